"""Acceptance gate: one PASS/FAIL line per criterion, printed in the terminal summary."""

from __future__ import annotations

import random
import time

import numpy as np
import pytest

from greedycoin import corpus
from greedycoin.compiler import (
    Transition, coin_table, compile_instance, count_names, dumps_instance, initial_amount,
)
from greedycoin.encoding import (
    BigAmount, CodeBook, UnderflowError, build_codebook, check_code_ordering, compare,
    encode_config, subtract,
)
from greedycoin.greedy import greedy_set, optimal_dp
from greedycoin.machine import REJECT, TIMEOUT, normalize, run
from greedycoin.tmformat import parse_machine
from greedycoin.verifier import NotCertifiable, verify, verify_acceptance

from . import oracle
from .conftest import ACCEPTANCE_LINES

MAX_LEN = 6
T_CORPUS = corpus.time_bound(MAX_LEN)


def record(number: int, ok: bool, detail: str) -> None:
    ACCEPTANCE_LINES.append(f"[{'PASS' if ok else 'FAIL'}] criterion {number}: {detail}")
    assert ok, detail


@pytest.fixture(scope="module")
def corpus_runs():
    start = time.perf_counter()
    runs = {}
    for name in corpus.SOURCES:
        m = corpus.machine(name)
        for x in corpus.inputs_up_to(MAX_LEN):
            runs[name, x] = verify(m, x, T_CORPUS)
    return runs, time.perf_counter() - start


def test_criterion_1_acceptance_equivalence(corpus_runs):
    runs, elapsed = corpus_runs
    bad = [k for k, v in runs.items() if not v.certified]
    wrong = [k for k, v in runs.items() if v.decision != corpus.REFERENCE[k[0]](k[1])]
    ok = not bad and not wrong and len(runs) == 3 * (2 ** (MAX_LEN + 1) - 1) and elapsed < 120
    record(1, ok, f"{len(runs) - len(bad)}/{len(runs)} pairs certified, {len(wrong)} wrong "
                  f"decisions, T={T_CORPUS}, {elapsed:.1f}s")


def test_criterion_2_transition_structure(corpus_runs):
    runs, _ = corpus_runs
    T = T_CORPUS
    problems = 0
    phases = 0
    for (name, _), v in runs.items():
        cb = build_codebook(corpus.machine(name))
        for r in v.reports:
            phases += 1
            want = encode_config(r.after, r.j + 1, cb, T) if r.j < T else None
            if r.coins not in (T - 1, T - 2) or r.coins != len(r.cases):
                problems += 1
            elif want is not None and r.W_after.digits != want.digits:
                problems += 1
            elif want is None and not r.W_after.is_zero():
                problems += 1
        if len(v.reports) != T:
            problems += 1
    record(2, problems == 0, f"{phases} phases, {problems} with a wrong coin count, "
                             f"boundary amount or leftover")


def test_criterion_3_predictor_agreement(corpus_runs):
    # verify() compares predict_next_coin with the binary-search greedy choice
    # at every step and raises on the first disagreement.
    runs, _ = corpus_runs
    steps = sum(v.steps for v in runs.values())
    record(3, steps >= 10 ** 4, f"predictor agreed on {steps}/{steps} greedy steps")


def test_criterion_4_code_ordering():
    checked = 0
    for s in range(1, 9):
        for k in range(2, 9):
            cb = build_codebook_shape(s, k)
            check_code_ordering(cb)
            B = cb.base
            sym = max(cb.symbol_code.values())
            pairs = [cb.pair_code(q, a) for q in cb.states for a in cb.symbols]
            assert min(pairs) > sym and max(pairs) < B - 1
            checked += 1
    record(4, checked == 56, f"pair codes above symbol codes and all codes below B-1 for {checked} (s, k) shapes")


def build_codebook_shape(s: int, k: int):
    states = [f"q{i}" for i in range(s)]
    symbols = ["$", "_"] + [f"a{i}" for i in range(k - 2)]
    return CodeBook(tuple(states), tuple(symbols))


def _random_pair(rng: np.random.Generator, pyrng: random.Random):
    m = pyrng.choice([1, 2, 3, 5, 6, 7, 8, 9, 12, 16])
    B = 1 << m
    if pyrng.random() < 0.02:
        width = 3600
    else:
        width = int(np.exp(pyrng.uniform(0, np.log(3600))))
    style = pyrng.randrange(4)
    if style == 0:
        a = rng.integers(0, B, width)
    else:
        a = rng.choice([0, 0, 1, B - 1, B - 1, pyrng.randrange(B)], width)
    if style == 2:
        # shared prefix, so the difference hinges on a late digit and long borrow chains
        b = a.copy()
        cut = pyrng.randrange(width)
        b[cut:] = rng.choice([0, B - 1, pyrng.randrange(B)], width - cut)
    elif style == 3:
        b = a.copy()
    else:
        b = rng.choice([0, 1, B - 1, pyrng.randrange(B)], width) if pyrng.random() < 0.5 \
            else rng.integers(0, B, width)
    return m, a, b


def test_criterion_5_arithmetic_cross_check():
    rng = np.random.default_rng(2024)
    pyrng = random.Random(2024)
    pairs = 10 ** 5
    mismatches = 0
    widest = 0
    for _ in range(pairs):
        m, a, b = _random_pair(rng, pyrng)
        B, width = 1 << m, a.size
        widest = max(widest, width)
        A, Bv = BigAmount(a.tolist(), B), BigAmount(b.tolist(), B)
        ia, ib = oracle.int_from_array(a, m), oracle.int_from_array(b, m)
        want_cmp = (ia > ib) - (ia < ib)
        if compare(A, Bv) != want_cmp or (A < Bv) != (ia < ib) or (A == Bv) != (ia == ib):
            mismatches += 1
            continue
        hi, lo, ihi, ilo = (A, Bv, ia, ib) if want_cmp >= 0 else (Bv, A, ib, ia)
        diff = subtract(hi, lo)
        if not np.array_equal(diff.array().astype(np.int64), oracle.array_from_int(ihi - ilo, m, width)):
            mismatches += 1
            continue
        if want_cmp != 0:
            try:
                subtract(lo, hi)
                mismatches += 1
                continue
            except UnderflowError:
                pass
        if A.render() != oracle.render_fast(a.tolist()) or A.to_int() != ia:
            mismatches += 1
    record(5, mismatches == 0 and widest == 3600,
           f"{pairs - mismatches}/{pairs} pairs agree on compare, subtract and rendering "
           f"(widths up to {widest} digits)")


def test_criterion_6_greedy_vs_optimal():
    rng = random.Random(6)
    worse = 0
    for _ in range(500):
        coins = {1, *rng.sample(range(2, 200), rng.randrange(0, 8))}
        W = rng.randrange(0, 501)
        if len(greedy_set(W, sorted(coins, reverse=True))) < optimal_dp(W, coins)[0]:
            worse += 1
    canon_bad = [W for W in range(201)
                 if len(greedy_set(W, [25, 10, 5, 1])) != optimal_dp(W, [1, 5, 10, 25])[0]]
    record(6, worse == 0 and not canon_bad,
           f"greedy below optimum on {worse}/500 random instances; "
           f"{{1,5,10,25}} optimal for {201 - len(canon_bad)}/201 amounts")


def test_criterion_7_determinism_and_count():
    ok = True
    details = []
    for name, x, T in [("parity", "101", 8), ("contains01", "01", 7), ("always_reject", "", 6)]:
        m = corpus.machine(name)
        coin_table.cache_clear()
        first = dumps_instance(compile_instance(m, x, T))
        coin_table.cache_clear()
        second = dumps_instance(compile_instance(m, x, T))
        s, k = len(m.states), len(m.tape_alphabet)
        formula = k * T * T + s * k ** 3 * (T - 2) * T + (s - 2) * k * T
        total = coin_table(m, T).total
        ok &= first == second and total == formula == count_names(m, T)
        details.append(f"{name}: {total} names")
    record(7, ok, "identical instance files on recompile; " + ", ".join(details))


def test_criterion_8_degenerate_cases(corpus_runs):
    runs, _ = corpus_runs
    checks = {}
    # empty input
    checks["empty input"] = all(runs[name, ""].certified and
                                runs[name, ""].decision == corpus.REFERENCE[name]("")
                                for name in corpus.SOURCES)
    # minimum bound T = n + 2: a single trailing blank, one less is refused
    m = corpus.machine("parity")
    cb = build_codebook(m)
    x = "0110"
    W = initial_amount(m, x, len(x) + 2, cb)
    top = W.digits[:len(x) + 2]
    try:
        initial_amount(m, x, len(x) + 1, cb)
        refused = False
    except ValueError:
        refused = True
    checks["T = n+2"] = top[-1] == cb.symbol_code["_"] and top.count(cb.symbol_code["_"]) == 1 \
        and refused and run(m, x, len(x) + 2).verdict == TIMEOUT
    # reject paths end with the reject analogue and never choose the query coin
    rejects = [(k, v) for k, v in runs.items() if v.verdict == REJECT]
    checks["reject paths"] = bool(rejects) and all(
        not v.decision and v.query_step is None
        and v.final_first_coin == Transition(corpus.machine(k[0]).reject_state, "$", "_", "_", 2, T_CORPUS)
        for k, v in rejects)
    # timeout refusal
    loop = normalize(parse_machine(corpus.LOOP))
    try:
        verify_acceptance(loop, "01", 8)
        timeout_refused = False
    except NotCertifiable:
        timeout_refused = run(loop, "01", 8).verdict == TIMEOUT
    checks["timeout refusal"] = timeout_refused
    failed = [k for k, ok in checks.items() if not ok]
    record(8, not failed, "; ".join(f"{k} {'ok' if ok else 'BAD'}" for k, ok in checks.items()))
