"""Independent arithmetic for cross-checks: plain Python integers only."""

from __future__ import annotations

import itertools
import re

import numpy as np


def to_int(digits, base: int) -> int:
    n = 0
    for d in digits:
        n = n * base + d
    return n


def to_digits(n: int, base: int, width: int) -> list[int]:
    out = []
    for _ in range(width):
        n, d = divmod(n, base)
        out.append(d)
    assert n == 0, "value does not fit"
    return out[::-1]


def render(digits) -> str:
    toks = []
    for d, grp in itertools.groupby(digits):
        n = len(list(grp))
        if d == 0 and n >= 2:
            toks.append(f"0*{n}")
        else:
            toks.extend([str(d)] * n)
    return ".".join(toks)


def block_value(cells: dict[int, int], T: int, base: int) -> int:
    return sum(d * base ** (T - i) for i, d in cells.items())


_ZERO_RUN = re.compile(r"(?<![^.])0(?:\.0)+(?![^.])")


def render_fast(digits) -> str:
    """Same output as :func:`render`, via a regular expression over the dotted digits."""
    return _ZERO_RUN.sub(lambda mt: f"0*{(len(mt.group()) + 1) // 2}", ".".join(map(str, digits)))


def int_from_array(digits: np.ndarray, m: int) -> int:
    """Value of base-2**m digits, built from their bit expansion."""
    bits = ((digits[:, None].astype(np.int64) >> np.arange(m - 1, -1, -1)) & 1).astype(np.uint8)
    bits = bits.ravel()
    pad = (-bits.size) % 8
    packed = np.packbits(np.concatenate((np.zeros(pad, np.uint8), bits)))
    return int.from_bytes(packed.tobytes(), "big")


def array_from_int(n: int, m: int, width: int) -> np.ndarray:
    nbytes = (m * width + 7) // 8
    bits = np.unpackbits(np.frombuffer(n.to_bytes(nbytes, "big"), np.uint8))
    bits = bits[bits.size - m * width:].reshape(width, m).astype(np.int64)
    return bits @ (1 << np.arange(m - 1, -1, -1))
