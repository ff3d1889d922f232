from __future__ import annotations

import random

import pytest
from hypothesis import given, settings, strategies as st

from greedycoin.encoding import (
    PAIR, SYMBOL, ZERO, BigAmount, CodeBook, UnderflowError, build_codebook, check_code_ordering,
    choose_base, compare, decode_block, encode_config, parse_amount, subtract,
)
from greedycoin.machine import Configuration, initial_config, run

from . import oracle


def synthetic(s: int, k: int) -> CodeBook:
    return CodeBook(tuple(f"q{i}" for i in range(s)), tuple(f"a{i}" for i in range(k)))


@pytest.mark.parametrize("s, k, B, m", [(3, 4, 32, 5), (1, 2, 8, 3), (10, 4, 64, 6), (4, 4, 32, 5)])
def test_choose_base(s, k, B, m):
    assert choose_base(s, k) == (B, m)
    assert synthetic(s, k).base == B


def test_pair_code_example():
    cb = synthetic(3, 4)
    assert cb.pair_code("q1", "a2") == 2 * 4 + 3 == 11


def test_codebook_order(parity):
    cb = build_codebook(parity)
    assert cb.states[0] == parity.start_state
    assert cb.symbols[:2] == ("$", "_")
    assert cb.symbol_code["$"] == 1


@pytest.mark.parametrize("s", range(1, 9))
@pytest.mark.parametrize("k", range(2, 9))
def test_code_ordering(s, k):
    cb = synthetic(s, k)
    check_code_ordering(cb)
    pairs = [cb.pair_code(q, a) for q in cb.states for a in cb.symbols]
    assert sorted(pairs) == list(range(k + 1, (s + 1) * k + 1))
    for d in range(cb.base):
        kind = cb.decode_digit(d)[0]
        assert kind == (ZERO if d == 0 else SYMBOL if d <= k else PAIR if d <= (s + 1) * k
                        else "invalid")


def random_amount(rng, width, base):
    return [rng.randrange(base) for _ in range(width)]


@settings(max_examples=300, deadline=None)
@given(st.integers(1, 10), st.integers(1, 60), st.data())
def test_arithmetic_matches_int_oracle(m, width, data):
    base = 1 << m
    digits = st.lists(st.integers(0, base - 1), min_size=width, max_size=width)
    x, y = data.draw(digits), data.draw(digits)
    a, b = BigAmount(x, base), BigAmount(y, base)
    xi, yi = oracle.to_int(x, base), oracle.to_int(y, base)
    assert compare(a, b) == (xi > yi) - (xi < yi)
    assert (a < b) == (xi < yi) and (a == b) == (xi == yi)
    hi, lo = (a, b) if xi >= yi else (b, a)
    diff = subtract(hi, lo)
    assert list(diff.digits) == oracle.to_digits(abs(xi - yi), base, width)
    assert diff.render() == oracle.render(diff.digits)
    assert a.to_hex() == format(xi, "x")


def test_borrow_chains():
    base = 16
    a = BigAmount([1] + [0] * 20, base)
    b = BigAmount([0] * 20 + [1], base)
    assert (a - b).digits == (0,) + (15,) * 20
    assert (a - a).is_zero()
    assert a - BigAmount.zero(21, base) == a
    with pytest.raises(UnderflowError):
        b - a


def test_shape_mismatch_raises():
    with pytest.raises(ValueError):
        BigAmount([1, 2], 8) < BigAmount([1, 2, 3], 8)
    with pytest.raises(ValueError):
        BigAmount([1, 2], 8) - BigAmount([1, 2], 16)


def test_digit_range():
    with pytest.raises(ValueError):
        BigAmount([8], 8)
    with pytest.raises(ValueError):
        BigAmount([1], 6)


@pytest.mark.parametrize("m", [1, 3, 8, 9, 13, 16, 17])
def test_binary_concatenation(m):
    rng = random.Random(m)
    base = 1 << m
    x = random_amount(rng, 37, base)
    bits = "".join(format(d, f"0{m}b") for d in x)
    a = BigAmount(x, base)
    assert int(bits, 2) == int(a.to_hex(), 16) == oracle.to_int(x, base)
    assert a.digits == tuple(x)
    assert parse_amount(a.render(), base, 37) == a


def test_render_format():
    a = BigAmount([0, 0, 0, 5, 0, 7, 0, 0], 8)
    assert a.render() == "0*3.5.0.7.0*2"
    assert parse_amount("0*3.5.0.7.0*2", 8) == a
    assert BigAmount.zero(4, 8).render() == "0*4"
    assert BigAmount.zero(4, 8).to_hex() == "0"


def test_encode_last_step_has_no_shift(parity):
    cb = build_codebook(parity)
    T = 5
    c = Configuration(parity.accept_state, 2, ("$", "_", "_", "0", "_"))
    a = encode_config(c, T, cb, T)
    assert a.leading_index() == T * T - T
    assert a.digits[-T:] == (1, cb.pair_code(parity.accept_state, "_"), 2, 3, 2)


def test_encode_initial_matches_closed_form(parity):
    cb = build_codebook(parity)
    T, x = 6, "101"
    B = cb.base
    g = cb.symbol_code
    cells = [cb.pair_code(parity.start_state, "$")] + [g[a] for a in x] + [g["_"]] * (T - 4)
    expect = oracle.to_int(cells, B) * B ** ((T - 1) * T)
    got = encode_config(initial_config(parity, x, T), 1, cb, T)
    assert oracle.to_int(got.digits, B) == expect


def test_encode_successive_steps_shift_by_one_block(contains01):
    cb = build_codebook(contains01)
    T = 7
    c = initial_config(contains01, "01", T)
    for j in range(1, T):
        hi, lo = encode_config(c, j, cb, T).digits, encode_config(c, j + 1, cb, T).digits
        assert hi == lo[T:] + (0,) * T
        assert oracle.to_int(hi, cb.base) == oracle.to_int(lo, cb.base) * cb.base ** T


def test_encode_decode_roundtrip(contains01):
    cb = build_codebook(contains01)
    T = 12
    for x in ["", "0", "01", "110"]:
        for t, c in enumerate(run(contains01, x, T).trace[:T]):
            j = t + 1
            view = decode_block(encode_config(c, j, cb, T), T - j, cb, T)
            assert view.to_configuration() == c
            for b in range(T):
                if b != T - j:
                    assert set(decode_block(encode_config(c, j, cb, T), b, cb, T).kinds()) == {ZERO}


def test_decode_zero_amount(parity):
    cb = build_codebook(parity)
    view = decode_block(BigAmount.zero(16, cb.base), 2, cb, 4)
    assert view.kinds() == (ZERO,) * 4 and view.to_configuration() is None


def test_decode_reports_invalid_digits(parity):
    cb = build_codebook(parity)
    view = decode_block(BigAmount([0] * 12 + [cb.base - 1, 1, 2, 3], cb.base), 0, cb, 4)
    assert view.kinds() == ("invalid", SYMBOL, SYMBOL, SYMBOL)
