"""Compile (machine, input, T) into a greedy coin change instance.

Every amount has T*T base-B digits.  Time step j owns the block of T digits
at shift (T - j) * T, so earlier configurations sit in higher digits.  A coin
removes a fragment of the configuration at step j and writes the updated
fragment into the block of step j + 1; at j = T there is no next block and the
coin is just the fragment.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from functools import cached_property, lru_cache
from pathlib import Path
from typing import Iterator, Union

from .encoding import (
    BigAmount,
    CodeBook,
    build_codebook,
    check_code_ordering,
    config_digits,
    decode_block,
    parse_amount,
)
from .greedy import CoinSystem
from .machine import BLANK, ENDMARKER, LEFT, MachineError, TuringMachine, initial_config


@dataclass(frozen=True)
class Copy:
    a: str
    i: int
    j: int

    kind = 0

    def __str__(self) -> str:
        return f"Copy({self.a},{self.i},{self.j})"


@dataclass(frozen=True)
class Transition:
    q: str
    a_minus: str
    a: str
    a_plus: str
    i: int
    j: int

    kind = 1

    def __str__(self) -> str:
        return (f"Transition({self.q},{self.a_minus},{self.a},{self.a_plus},"
                f"{self.i},{self.j})")


@dataclass(frozen=True)
class LeftEnd:
    q: str
    a_plus: str
    j: int

    kind = 2

    def __str__(self) -> str:
        return f"LeftEnd({self.q},{self.a_plus},{self.j})"


CoinName = Union[Copy, Transition, LeftEnd]

_NAME_RE = re.compile(r"^(Copy|Transition|LeftEnd)\(([^()]*)\)$")


def parse_coin_name(text: str) -> CoinName:
    match = _NAME_RE.match(text.strip())
    if not match:
        raise ValueError(f"bad coin name {text!r}")
    kind, args = match.group(1), match.group(2).split(",")
    try:
        if kind == "Copy" and len(args) == 3:
            return Copy(args[0], int(args[1]), int(args[2]))
        if kind == "Transition" and len(args) == 6:
            return Transition(*args[:4], int(args[4]), int(args[5]))
        if kind == "LeftEnd" and len(args) == 3:
            return LeftEnd(args[0], args[1], int(args[2]))
    except ValueError:
        pass
    raise ValueError(f"bad coin name {text!r}")


# -- naming scheme ------------------------------------------------------------
#
# A name is a point of a mixed-radix counter: (kind, then each argument as a
# zero-based index in its range).  Enumeration just increments the counter,
# so it can be resumed from any name.

def _ranges(kind: int, m: TuringMachine, cb: CodeBook, T: int) -> list[list]:
    symbols = list(cb.symbols)
    times = list(range(1, T + 1))
    if kind == 0:
        return [symbols, list(range(1, T + 1)), times]
    if kind == 1:
        return [list(cb.states), symbols, symbols, symbols, list(range(2, T)), times]
    working = [q for q in cb.states if not m.is_halting(q)]
    return [working, symbols, times]


_KINDS = (Copy, Transition, LeftEnd)


def _args(name: CoinName) -> tuple:
    if isinstance(name, Copy):
        return (name.a, name.i, name.j)
    if isinstance(name, Transition):
        return (name.q, name.a_minus, name.a, name.a_plus, name.i, name.j)
    return (name.q, name.a_plus, name.j)


def name_key(name: CoinName, m: TuringMachine, cb: CodeBook, T: int) -> tuple[int, ...]:
    ranges = _ranges(name.kind, m, cb, T)
    try:
        return (name.kind,) + tuple(r.index(v) for r, v in zip(ranges, _args(name)))
    except ValueError:
        raise ValueError(f"malformed coin name {name} for T={T}") from None


def validate_name(name: CoinName, m: TuringMachine, cb: CodeBook, T: int) -> None:
    name_key(name, m, cb, T)


def count_names(m: TuringMachine, T: int, cb: CodeBook | None = None) -> int:
    """k*T^2 + s*k^3*(T-2)*T + (s-2)*k*T."""
    cb = cb or build_codebook(m)
    s, k = cb.s, cb.k
    return k * T * T + s * k ** 3 * (T - 2) * T + (s - 2) * k * T


def iter_names(m: TuringMachine, T: int, cb: CodeBook | None = None,
               start: CoinName | None = None) -> Iterator[CoinName]:
    cb = cb or build_codebook(m)
    counter = list(name_key(start, m, cb, T)) if start is not None else [0]
    kind = counter[0]
    while kind < len(_KINDS):
        ranges = _ranges(kind, m, cb, T)
        pos = counter[1:] or [0] * len(ranges)
        if all(ranges):
            while True:
                yield _KINDS[kind](*(r[p] for r, p in zip(ranges, pos)))
                d = len(pos) - 1
                while d >= 0:
                    pos[d] += 1
                    if pos[d] < len(ranges[d]):
                        break
                    pos[d] = 0
                    d -= 1
                if d < 0:
                    break
        kind += 1
        counter = [kind]


# -- values -------------------------------------------------------------------

def _fragment(T: int, first: int, digits: list[int]) -> list[int]:
    """T-digit block with ``digits`` starting at 1-based cell ``first``."""
    block = [0] * T
    block[first - 1:first - 1 + len(digits)] = digits
    return block


def _two_blocks(high: list[int], low: list[int] | None, j: int, cb: CodeBook,
                T: int) -> BigAmount:
    width = T * T
    value = BigAmount.place(high, (T - j) * T, width, cb.base)
    if j < T and low is not None:
        value = value - BigAmount.place(low, (T - j - 1) * T, width, cb.base)
    return value


def coin_blocks(name: CoinName, m: TuringMachine, cb: CodeBook,
                T: int) -> tuple[list[int], list[int]]:
    """The removed block and the update block of a coin."""
    sym, pair = cb.symbol_code, cb.pair_code
    if isinstance(name, Copy):
        block = _fragment(T, name.i, [sym[name.a]])
        return block, block
    if isinstance(name, Transition):
        q, am, a, ap = name.q, name.a_minus, name.a, name.a_plus
        high = _fragment(T, name.i - 1, [sym[am], pair(q, a), sym[ap]])
        if m.is_halting(q):
            return high, high
        q2, a2, d = m.delta[q, a]
        if d == LEFT:
            low = [pair(q2, am), sym[a2], sym[ap]]
        else:
            low = [sym[am], sym[a2], pair(q2, ap)]
        return high, _fragment(T, name.i - 1, low)
    q2, written, _ = m.delta[name.q, ENDMARKER]
    high = _fragment(T, 1, [pair(name.q, ENDMARKER), sym[name.a_plus]])
    low = _fragment(T, 1, [sym[written], pair(q2, name.a_plus)])
    return high, low


def coin_value(name: CoinName, m: TuringMachine, T: int,
               cb: CodeBook | None = None) -> BigAmount:
    cb = cb or build_codebook(m)
    validate_name(name, m, cb, T)
    high, low = coin_blocks(name, m, cb, T)
    return _two_blocks(high, low, name.j, cb, T)


def query_name(m: TuringMachine, T: int) -> Transition:
    return Transition(m.accept_state, ENDMARKER, BLANK, BLANK, 2, T)


def query_coin(m: TuringMachine, T: int, cb: CodeBook | None = None) -> BigAmount:
    if T < 3:
        raise MachineError("T must be at least 3")
    return coin_value(query_name(m, T), m, T, cb)


def initial_amount(m: TuringMachine, x, T: int, cb: CodeBook | None = None) -> BigAmount:
    cb = cb or build_codebook(m)
    c = initial_config(m, x, T)
    return BigAmount.place(config_digits(c, cb), (T - 1) * T, T * T, cb.base)


def enumerate_coins(m: TuringMachine, T: int, cb: CodeBook | None = None,
                    start: CoinName | None = None) -> Iterator[tuple[CoinName, BigAmount]]:
    """Every (name, value) in name order, optionally resuming at ``start``.

    Names differing only in j share the 2T-digit difference high*B^T - low,
    which is computed once and shifted into place by whole blocks.
    """
    cb = cb or build_codebook(m)
    base, width = cb.base, T * T
    pad = bytes(BigAmount.zero(1, base).sort_key())
    last = core = top = None
    for name in iter_names(m, T, cb, start):
        group = (name.kind,) + _args(name)[:-1]
        if group != last:
            high, low = coin_blocks(name, m, cb, T)
            core = (BigAmount.place(high, T, 2 * T, base)
                    - BigAmount.place(low, 0, 2 * T, base)).sort_key()
            top = BigAmount(high, base).sort_key()
            last = group
        j = name.j
        if j < T:
            raw = pad * ((j - 1) * T) + core + pad * ((T - j - 1) * T)
        else:
            raw = pad * ((T - 1) * T) + top
        yield name, BigAmount._from_raw(raw, base, width)


# -- leading shapes -------------------------------------------------------------

def leading_shape_ok(name: CoinName, value: BigAmount, cb: CodeBook, T: int) -> bool:
    """Leading digits of a coin with j < T, as used by the greedy argument.

    Copy: a-1 then B-1.  Transition: a-, (q a), a+ - 1, then B-1.
    LeftEnd: (q $), a+ - 1, then B-1.
    """
    if name.j == T:
        return True
    sym, top = cb.symbol_code, cb.base - 1
    if isinstance(name, Copy):
        expect = [sym[name.a] - 1, top]
        first = name.i
    elif isinstance(name, Transition):
        expect = [sym[name.a_minus], cb.pair_code(name.q, name.a), sym[name.a_plus] - 1, top]
        first = name.i - 1
        if T == 3:
            # high block has no trailing zero, so the next digit is B - 1 - (update digit)
            expect.pop()
    else:
        expect = [cb.pair_code(name.q, ENDMARKER), sym[name.a_plus] - 1, top]
        first = 1
    start = (name.j - 1) * T + first - 1
    got = value.array()[start:start + len(expect)].tolist()
    lead = value.leading_index()
    return got == expect and lead is not None and lead >= (name.j - 1) * T


# -- instances ------------------------------------------------------------------

class CompileError(RuntimeError):
    pass


@dataclass
class Instance:
    T: int
    base: int
    m: int
    fingerprint: str
    W: BigAmount
    query: BigAmount
    coins: list[tuple[CoinName, BigAmount]]
    cb: CodeBook | None = None
    merged: int = 0
    table: CoinTable | None = field(default=None, repr=False)

    def __post_init__(self) -> None:
        if self.table is None:
            self.table = CoinTable(tuple(self.coins), self.merged, len(self.coins))

    @property
    def values(self) -> list[BigAmount]:
        return self.table.values

    @property
    def system(self) -> CoinSystem:
        return self.table.system

    def name_of(self, value: BigAmount) -> CoinName | None:
        return self.table.by_value.get(value.sort_key())


@dataclass(frozen=True, eq=False)
class CoinTable:
    coins: tuple[tuple[CoinName, BigAmount], ...]
    merged: int
    total: int

    @cached_property
    def values(self) -> list[BigAmount]:
        return [v for _, v in self.coins]

    @cached_property
    def system(self) -> CoinSystem:
        return CoinSystem(self.values)

    @cached_property
    def by_value(self) -> dict[bytes, CoinName]:
        return {v.sort_key(): n for n, v in self.coins}


@lru_cache(maxsize=4)
def coin_table(m: TuringMachine, T: int) -> CoinTable:
    """Sorted (descending), value-deduplicated coins of a machine at bound T.

    Independent of the input string, so it is shared by every compile of the
    same (machine, T).
    """
    cb = build_codebook(m)
    seen: dict[bytes, CoinName] = {}
    total = merged = 0
    values: dict[bytes, BigAmount] = {}
    for name, value in enumerate_coins(m, T, cb):
        total += 1
        if value.is_zero():
            raise CompileError(f"coin {name} has value 0")
        if not leading_shape_ok(name, value, cb, T):
            raise CompileError(f"coin {name} has an unexpected leading shape: {value}")
        key = value.sort_key()
        if key in seen:
            merged += 1
            continue
        seen[key] = name
        values[key] = value
    order = sorted(seen, reverse=True)
    return CoinTable(tuple((seen[k], values[k]) for k in order), merged, total)


def compile_instance(m: TuringMachine, x, T: int) -> Instance:
    m.check_normal_form()
    cb = build_codebook(m)
    check_code_ordering(cb)
    W = initial_amount(m, x, T, cb)
    table = coin_table(m, T)
    if table.total != count_names(m, T, cb):
        raise CompileError(f"enumerated {table.total} names, expected {count_names(m, T, cb)}")
    query = query_coin(m, T, cb)
    inst = Instance(T, cb.base, cb.m, m.fingerprint, W, query, list(table.coins), cb,
                    table.merged, table)
    if inst.name_of(query) != query_name(m, T):
        raise CompileError("query coin missing from the coin set or shared with another name")
    return inst


# -- instance files ---------------------------------------------------------------

def dumps_instance(inst: Instance) -> str:
    lines = [
        f"T={inst.T}",
        f"B={inst.base}",
        f"m={inst.m}",
        f"machine={inst.fingerprint}",
        f"W={inst.W.render()}",
        f"query={inst.query.render()}",
        f"coins={len(inst.coins)}",
    ]
    lines += [f"{name}\t{value.render()}" for name, value in inst.coins]
    return "\n".join(lines) + "\n"


def write_instance(inst: Instance, path) -> None:
    Path(path).write_text(dumps_instance(inst))


class InstanceFormatError(ValueError):
    pass


def loads_instance(text: str) -> Instance:
    lines = text.splitlines()
    header: dict[str, str] = {}
    keys = ("T", "B", "m", "machine", "W", "query", "coins")
    for lineno, key in enumerate(keys, start=1):
        if lineno > len(lines) or not lines[lineno - 1].startswith(f"{key}="):
            raise InstanceFormatError(f"line {lineno}: expected '{key}='")
        header[key] = lines[lineno - 1][len(key) + 1:]
    try:
        T, base, m = int(header["T"]), int(header["B"]), int(header["m"])
        if base != 1 << m:
            raise InstanceFormatError(f"B={base} is not 2**{m}")
        width = T * T
        W = parse_amount(header["W"], base, width)
        query = parse_amount(header["query"], base, width)
        n = int(header["coins"])
        body = lines[len(keys):]
        if len(body) != n:
            raise InstanceFormatError(f"expected {n} coin lines, found {len(body)}")
        coins = []
        for lineno, line in enumerate(body, start=len(keys) + 1):
            name, sep, value = line.partition("\t")
            if not sep:
                raise InstanceFormatError(f"line {lineno}: expected 'name<TAB>value'")
            coins.append((parse_coin_name(name), parse_amount(value, base, width)))
    except InstanceFormatError:
        raise
    except ValueError as e:
        raise InstanceFormatError(str(e)) from None
    for (_, a), (_, b) in zip(coins, coins[1:]):
        if not a > b:
            raise InstanceFormatError("coin values are not strictly descending")
    return Instance(T, base, m, header["machine"], W, query, coins)


def read_instance(path) -> Instance:
    return loads_instance(Path(path).read_text())


def describe_amount(a: BigAmount, cb: CodeBook, T: int, blocks: int = 2) -> str:
    """Decoded view of the leading nonzero blocks, for diagnostics."""
    lead = a.leading_index()
    if lead is None:
        return "0"
    top = T - 1 - lead // T
    parts = []
    for b in range(top, max(top - blocks, -1), -1):
        parts.append(f"[block {b}] {decode_block(a, b, cb, T)}")
    return " | ".join(parts)
