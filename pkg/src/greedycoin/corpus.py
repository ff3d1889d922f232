"""Small source machines used by the test corpus and ``verify --corpus``."""

from __future__ import annotations

import itertools

from .machine import TuringMachine, normalize
from .tmformat import parse_machine

_HEADER = """\
input_alphabet: 0 1
tape_alphabet: $ _ 0 1
"""

PARITY = _HEADER + """\
# accepts bit strings with an even number of 1s
states: even odd acc rej
start: even
accept: acc
reject: rej
delta: even 0 -> even 0 R
delta: even 1 -> odd 1 R
delta: even _ -> acc _ L
delta: odd 0 -> odd 0 R
delta: odd 1 -> even 1 R
delta: odd _ -> rej _ L
"""

CONTAINS_01 = _HEADER + """\
# accepts bit strings containing the substring 01
states: s0 s1 acc rej
start: s0
accept: acc
reject: rej
delta: s0 0 -> s1 0 R
delta: s0 1 -> s0 1 R
delta: s0 _ -> rej _ L
delta: s1 0 -> s1 0 R
delta: s1 1 -> acc 1 L
delta: s1 _ -> rej _ L
"""

ALWAYS_REJECT = _HEADER + """\
states: q acc rej
start: q
accept: acc
reject: rej
delta: q 0 -> rej 0 L
delta: q 1 -> rej 1 L
delta: q _ -> rej _ L
"""

# bounces between the endmarker and cell 2 forever
LOOP = _HEADER + """\
states: q acc rej
start: q
accept: acc
reject: rej
delta: q 0 -> q 0 L
delta: q 1 -> q 1 L
delta: q _ -> q _ L
"""

# runs off the right end of any finite tape
RUNAWAY = _HEADER + """\
states: q acc rej
start: q
accept: acc
reject: rej
delta: q 0 -> q 0 R
delta: q 1 -> q 1 R
delta: q _ -> q _ R
"""

SOURCES = {
    "parity": PARITY,
    "contains01": CONTAINS_01,
    "always_reject": ALWAYS_REJECT,
}

# Reference deciders for the corpus machines.
REFERENCE = {
    "parity": lambda x: x.count("1") % 2 == 0,
    "contains01": lambda x: "01" in x,
    "always_reject": lambda x: False,
}


def machine(name: str) -> TuringMachine:
    return normalize(parse_machine(SOURCES[name]))


def inputs_up_to(n: int, alphabet: str = "01"):
    for length in range(n + 1):
        for t in itertools.product(alphabet, repeat=length):
            yield "".join(t)


def time_bound(n: int) -> int:
    """A bound at which every corpus machine halts inside the instance on inputs of length <= n."""
    return max(3, 2 * n + 6)
