"""State/symbol numbering and fixed-width base-B amounts.

Amounts are unsigned numbers with a fixed count of base-B digits, most
significant first.  B is always a power of two, so each digit is an m-bit
chunk of the binary value.  Digits are stored as big-endian fixed-size
machine integers packed into ``bytes``; byte-wise comparison of two amounts of
equal width is then exactly their numeric comparison.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .machine import BLANK, ENDMARKER, Configuration, TuringMachine

ZERO, SYMBOL, PAIR, INVALID = "zero", "symbol", "pair", "invalid"


class UnderflowError(ArithmeticError):
    pass


def _dtype_for(base: int) -> np.dtype:
    if base <= 1 << 8:
        return np.dtype("u1")
    if base <= 1 << 16:
        return np.dtype(">u2")
    if base <= 1 << 32:
        return np.dtype(">u4")
    raise ValueError(f"base {base} too large")


def _bits(base: int) -> int:
    m = base.bit_length() - 1
    if base < 2 or 1 << m != base:
        raise ValueError(f"base must be a power of two >= 2, got {base}")
    return m


class BigAmount:
    __slots__ = ("_raw", "base", "width")

    def __init__(self, digits: Iterable[int], base: int):
        arr = np.asarray(list(digits), dtype=np.int64)
        _bits(base)
        if arr.size and (arr.min() < 0 or arr.max() >= base):
            raise ValueError(f"digit out of range for base {base}")
        self.base = base
        self.width = int(arr.size)
        self._raw = arr.astype(_dtype_for(base)).tobytes()

    @classmethod
    def _from_raw(cls, raw: bytes, base: int, width: int) -> BigAmount:
        out = cls.__new__(cls)
        out._raw, out.base, out.width = raw, base, width
        return out

    @classmethod
    def _from_array(cls, arr: np.ndarray, base: int) -> BigAmount:
        return cls._from_raw(arr.astype(_dtype_for(base)).tobytes(), base, int(arr.size))

    @classmethod
    def zero(cls, width: int, base: int) -> BigAmount:
        return cls._from_raw(bytes(width * _dtype_for(base).itemsize), base, width)

    @classmethod
    def place(cls, block: Sequence[int], shift: int, width: int, base: int) -> BigAmount:
        """``block`` (most significant first) times ``base ** shift``."""
        n = len(block)
        if shift < 0 or shift + n > width:
            raise ValueError(f"block of {n} digits at shift {shift} exceeds width {width}")
        if n and (min(block) < 0 or max(block) >= base):
            raise ValueError(f"digit out of range for base {base}")
        arr = np.zeros(width, dtype=np.int64)
        start = width - shift - n
        arr[start:start + n] = block
        return cls._from_array(arr, base)

    @property
    def m(self) -> int:
        return _bits(self.base)

    def array(self) -> np.ndarray:
        return np.frombuffer(self._raw, dtype=_dtype_for(self.base))

    @property
    def digits(self) -> tuple[int, ...]:
        return tuple(self.array().tolist())

    def digit(self, index: int) -> int:
        return int(self.array()[index])

    def is_zero(self) -> bool:
        return not any(self._raw)

    def leading_index(self) -> int | None:
        """Index (most significant first) of the first nonzero digit."""
        if _dtype_for(self.base).itemsize == 1:
            stripped = self._raw.lstrip(b"\0")
            return None if not stripped else self.width - len(stripped)
        nz = np.flatnonzero(self.array())
        return int(nz[0]) if nz.size else None

    def _check(self, other: BigAmount) -> None:
        if not isinstance(other, BigAmount):
            raise TypeError(f"cannot compare BigAmount with {type(other).__name__}")
        if other.base != self.base or other.width != self.width:
            raise ValueError(f"amount shapes differ: base {self.base}/{other.base}, "
                             f"width {self.width}/{other.width}")

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, BigAmount):
            return NotImplemented
        return self.base == other.base and self.width == other.width and self._raw == other._raw

    def __hash__(self) -> int:
        return hash((self._raw, self.base))

    def __lt__(self, other: BigAmount) -> bool:
        self._check(other)
        return self._raw < other._raw

    def __le__(self, other: BigAmount) -> bool:
        self._check(other)
        return self._raw <= other._raw

    def __gt__(self, other: BigAmount) -> bool:
        self._check(other)
        return self._raw > other._raw

    def __ge__(self, other: BigAmount) -> bool:
        self._check(other)
        return self._raw >= other._raw

    def __sub__(self, other: BigAmount) -> BigAmount:
        return subtract(self, other)

    def __repr__(self) -> str:
        return f"BigAmount({self.render()}, base={self.base})"

    def sort_key(self) -> bytes:
        return self._raw

    def render(self) -> str:
        return render(self)

    def to_hex(self) -> str:
        return to_hex(self)

    def to_int(self) -> int:
        return int(to_hex(self), 16)


def compare(a: BigAmount, b: BigAmount) -> int:
    """-1, 0 or 1 as ``a`` is less than, equal to or greater than ``b``."""
    a._check(b)
    return (a._raw > b._raw) - (a._raw < b._raw)


def subtract(a: BigAmount, b: BigAmount) -> BigAmount:
    a._check(b)
    x = a.array().astype(np.int64)[::-1]
    y = b.array().astype(np.int64)[::-1]
    d = x - y
    nz = np.flatnonzero(d)
    if nz.size == 0:
        return BigAmount.zero(a.width, a.base)
    if d[nz[-1]] < 0:
        raise UnderflowError("subtrahend exceeds minuend")
    # Least significant digit first.  A borrow enters position i exactly when
    # the nearest nonzero difference below i is negative.
    idx = np.full(d.size, -1, dtype=np.int64)
    idx[nz] = nz
    below = np.maximum.accumulate(idx)
    below = np.concatenate(([-1], below[:-1]))
    borrow = (below >= 0) & (d[np.maximum(below, 0)] < 0)
    r = d - borrow
    r[r < 0] += a.base
    return BigAmount._from_array(r[::-1], a.base)


_RUN = "0*"


def render(a: BigAmount) -> str:
    """Digits as decimals joined by ``.``; every run of two or more zeros is ``0*<count>``."""
    if a.width == 0:
        return ""
    arr = a.array()
    zero = arr == 0
    edges = np.flatnonzero(np.diff(np.concatenate(([0], zero.view(np.int8), [0]))))
    starts, ends = edges[0::2], edges[1::2]
    out: list[str] = []
    pos = 0
    for s, e in zip(starts.tolist(), ends.tolist()):
        if e - s < 2:
            continue
        if pos < s:
            out.append(".".join(map(str, arr[pos:s].tolist())))
        out.append(f"{_RUN}{e - s}")
        pos = e
    if pos < arr.size:
        out.append(".".join(map(str, arr[pos:].tolist())))
    return ".".join(out)


def parse_amount(text: str, base: int, width: int | None = None) -> BigAmount:
    digits: list[int] = []
    for tok in text.strip().split("."):
        if tok.startswith(_RUN):
            digits.extend([0] * int(tok[len(_RUN):]))
        elif tok:
            digits.append(int(tok))
        else:
            raise ValueError(f"empty digit in amount {text[:40]!r}")
    if width is not None and len(digits) != width:
        raise ValueError(f"amount has {len(digits)} digits, expected {width}")
    return BigAmount(digits, base)


_HEX = np.frombuffer(b"0123456789abcdef", dtype=np.uint8)


def to_hex(a: BigAmount) -> str:
    """Hexadecimal of the binary value: each digit expands to exactly m bits."""
    m = a.m
    arr = a.array().astype(np.int64)
    bits = (arr[:, None] >> np.arange(m - 1, -1, -1)) & 1
    bits = bits.ravel()
    pad = (-bits.size) % 4
    bits = np.concatenate((np.zeros(pad, dtype=np.int64), bits)).reshape(-1, 4)
    nibbles = bits @ np.array([8, 4, 2, 1])
    text = _HEX[nibbles].tobytes().decode().lstrip("0")
    return text or "0"


# -- codebook ---------------------------------------------------------------

def choose_base(s: int, k: int) -> tuple[int, int]:
    """Smallest B = 2**m with B >= (s + 1) * k + 2; returns (B, m)."""
    need = (s + 1) * k + 2
    m = max(1, (need - 1).bit_length())
    return 1 << m, m


@dataclass(frozen=True)
class CodeBook:
    states: tuple[str, ...]
    symbols: tuple[str, ...]
    base: int = field(init=False)
    m: int = field(init=False)
    state_code: dict = field(init=False, repr=False, compare=False)
    symbol_code: dict = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        object.__setattr__(self, "states", tuple(self.states))
        object.__setattr__(self, "symbols", tuple(self.symbols))
        base, m = choose_base(len(self.states), len(self.symbols))
        object.__setattr__(self, "base", base)
        object.__setattr__(self, "m", m)
        object.__setattr__(self, "state_code", {q: i for i, q in enumerate(self.states, 1)})
        object.__setattr__(self, "symbol_code", {a: i for i, a in enumerate(self.symbols, 1)})

    @property
    def s(self) -> int:
        return len(self.states)

    @property
    def k(self) -> int:
        return len(self.symbols)

    def pair_code(self, q: str, a: str) -> int:
        return self.state_code[q] * self.k + self.symbol_code[a]

    def decode_digit(self, d: int) -> tuple[str, str | None, str | None]:
        """(kind, state, symbol) for one digit."""
        k = self.k
        if d == 0:
            return ZERO, None, None
        if d <= k:
            return SYMBOL, None, self.symbols[d - 1]
        if d <= (self.s + 1) * k:
            q, a = divmod(d - 1, k)
            return PAIR, self.states[q - 1], self.symbols[a]
        return INVALID, None, None


def build_codebook(m: TuringMachine) -> CodeBook:
    states = (m.start_state,) + tuple(q for q in m.states if q != m.start_state)
    rest = tuple(a for a in m.tape_alphabet if a not in (ENDMARKER, BLANK))
    return CodeBook(states, (ENDMARKER, BLANK) + rest)


def check_code_ordering(cb: CodeBook) -> None:
    """Pair codes exceed every symbol code; every code stays below B - 1."""
    symbol_max = max(cb.symbol_code.values())
    pairs = [cb.pair_code(q, a) for q in cb.states for a in cb.symbols]
    if min(pairs) <= symbol_max:
        raise AssertionError(f"pair code {min(pairs)} not above symbol code {symbol_max}")
    if max(pairs + [symbol_max]) >= cb.base - 1:
        raise AssertionError(f"code {max(pairs)} not below B - 1 = {cb.base - 1}")


# -- configurations ---------------------------------------------------------

def config_digits(c: Configuration, cb: CodeBook) -> list[int]:
    out = [cb.symbol_code[a] for a in c.tape]
    out[c.head - 1] = cb.pair_code(c.state, c.symbol)
    return out


def encode_config(c: Configuration, j: int, cb: CodeBook, T: int) -> BigAmount:
    """Configuration at time step j (1..T), i.e. its digits times B**((T - j) * T)."""
    if len(c.tape) != T:
        raise ValueError(f"configuration has {len(c.tape)} cells, expected {T}")
    if not 1 <= j <= T:
        raise ValueError(f"time step {j} outside 1..{T}")
    return BigAmount.place(config_digits(c, cb), (T - j) * T, T * T, cb.base)


@dataclass(frozen=True)
class Cell:
    kind: str
    digit: int
    state: str | None = None
    symbol: str | None = None

    def __str__(self) -> str:
        if self.kind == PAIR:
            return f"({self.state} {self.symbol})"
        if self.kind == SYMBOL:
            return self.symbol
        return "0" if self.kind == ZERO else f"?{self.digit}"


@dataclass(frozen=True)
class BlockView:
    block: int
    cells: tuple[Cell, ...]

    def kinds(self) -> tuple[str, ...]:
        return tuple(c.kind for c in self.cells)

    def to_configuration(self) -> Configuration | None:
        """The configuration this block spells, or None if it is not a full one."""
        heads = [i for i, c in enumerate(self.cells) if c.kind == PAIR]
        if len(heads) != 1 or any(c.kind in (ZERO, INVALID) for c in self.cells):
            return None
        h = heads[0]
        return Configuration(self.cells[h].state, h + 1, tuple(c.symbol for c in self.cells))

    def __str__(self) -> str:
        return " ".join(map(str, self.cells))


def decode_block(a: BigAmount, b: int, cb: CodeBook, T: int) -> BlockView:
    """Block b holds the digits of weight B**(b*T) .. B**(b*T + T - 1)."""
    if not 0 <= b < T:
        raise ValueError(f"block {b} outside 0..{T - 1}")
    start = a.width - (b + 1) * T
    digits = a.array()[start:start + T].tolist()
    cells = []
    for d in digits:
        kind, q, sym = cb.decode_digit(d)
        cells.append(Cell(kind, d, q, sym))
    return BlockView(b, tuple(cells))
