from __future__ import annotations

import pytest

from greedycoin import corpus
from greedycoin.tmformat import parse_machine

ACCEPTANCE_LINES: list[str] = []

# Statically compliant four-state machine (explicit $ moves), used where a
# small base matters: s=4, k=4 gives B=32.  Flips bits until the first blank.
FLIP4 = """\
states: q0 q1 acc rej
start: q0
accept: acc
reject: rej
input_alphabet: 0 1
tape_alphabet: $ _ 0 1
normalized: true
delta: q0 $ -> q1 $ R
delta: q0 _ -> rej _ L
delta: q0 0 -> q0 1 R
delta: q0 1 -> q0 0 R
delta: q1 $ -> q1 $ R
delta: q1 _ -> acc _ L
delta: q1 0 -> q1 1 R
delta: q1 1 -> q1 0 L
"""

# s=3, k=4: the smallest legal shape.
TINY3 = """\
states: q acc rej
start: q
accept: acc
reject: rej
input_alphabet: 0 1
tape_alphabet: $ _ 0 1
normalized: true
delta: q $ -> q $ R
delta: q _ -> acc _ L
delta: q 0 -> q 0 R
delta: q 1 -> rej 1 L
"""


@pytest.fixture(scope="session")
def parity():
    return corpus.machine("parity")


@pytest.fixture(scope="session")
def contains01():
    return corpus.machine("contains01")


@pytest.fixture(scope="session")
def always_reject():
    return corpus.machine("always_reject")


@pytest.fixture(scope="session")
def flip4():
    return parse_machine(FLIP4)


@pytest.fixture(scope="session")
def tiny3():
    return parse_machine(TINY3)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
