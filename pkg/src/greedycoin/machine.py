"""Single-tape Turing machines: representation, normalization and direct simulation.

Tapes are 1-based.  Cell 1 always carries the endmarker ``$`` and the blank
symbol is written ``_``.  The direct simulator here is the ground truth that
the coin-change reduction is checked against.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass
from functools import cached_property
from types import MappingProxyType
from typing import Mapping

ENDMARKER = "$"
BLANK = "_"
LEFT, RIGHT = "L", "R"

ACCEPT, REJECT, TIMEOUT = "accept", "reject", "timeout"

Action = tuple  # (next_state, written_symbol, direction)


class MachineError(ValueError):
    """Raised for structurally invalid machines or machines outside normal form."""


class TapeBoundError(RuntimeError):
    """The head tried to leave cells 1..T; T is too small for this run."""


@dataclass(frozen=True, eq=False)
class TuringMachine:
    states: tuple[str, ...]
    tape_alphabet: tuple[str, ...]
    input_alphabet: tuple[str, ...]
    start_state: str
    accept_state: str
    reject_state: str
    delta: Mapping[tuple[str, str], Action]
    normalized: bool = False

    def __post_init__(self) -> None:
        object.__setattr__(self, "states", tuple(self.states))
        object.__setattr__(self, "tape_alphabet", tuple(self.tape_alphabet))
        object.__setattr__(self, "input_alphabet", tuple(self.input_alphabet))
        object.__setattr__(self, "delta", MappingProxyType(dict(self.delta)))
        self._check_structure()

    def _check_structure(self) -> None:
        states, gamma = set(self.states), set(self.tape_alphabet)
        if len(states) != len(self.states):
            raise MachineError("duplicate state names")
        if len(gamma) != len(self.tape_alphabet):
            raise MachineError("duplicate tape symbols")
        if ENDMARKER not in gamma or BLANK not in gamma:
            raise MachineError(f"tape alphabet must contain {ENDMARKER!r} and {BLANK!r}")
        for q in (self.start_state, self.accept_state, self.reject_state):
            if q not in states:
                raise MachineError(f"unknown state {q!r}")
        if self.accept_state == self.reject_state:
            raise MachineError("accept and reject states must differ")
        for a in self.input_alphabet:
            if a not in gamma or a in (ENDMARKER, BLANK):
                raise MachineError(f"bad input symbol {a!r}")
        for (q, a), (q2, a2, d) in self.delta.items():
            if q not in states or q2 not in states:
                raise MachineError(f"transition ({q}, {a}) uses an unknown state")
            if a not in gamma or a2 not in gamma:
                raise MachineError(f"transition ({q}, {a}) uses an unknown symbol")
            if d not in (LEFT, RIGHT):
                raise MachineError(f"transition ({q}, {a}) has direction {d!r}")
            if q in self.halting_states:
                raise MachineError(f"halting state {q!r} must not have transitions")

    @property
    def halting_states(self) -> tuple[str, str]:
        return (self.accept_state, self.reject_state)

    @property
    def working_states(self) -> tuple[str, ...]:
        return tuple(q for q in self.states if q not in self.halting_states)

    def is_halting(self, q: str) -> bool:
        return q == self.accept_state or q == self.reject_state

    def missing_transitions(self) -> list[tuple[str, str]]:
        return [(q, a) for q in self.working_states for a in self.tape_alphabet
                if (q, a) not in self.delta]

    def check_normal_form(self) -> None:
        """Static part of the normal form: delta total, ``$`` always bounces right.

        The halting ritual is a dynamic property and is checked on runs
        (see :func:`check_ritual`).
        """
        missing = self.missing_transitions()
        if missing:
            q, a = missing[0]
            raise MachineError(f"delta is not total: no transition for ({q}, {a})")
        for q in self.working_states:
            _, written, d = self.delta[q, ENDMARKER]
            if written != ENDMARKER or d != RIGHT:
                raise MachineError(f"delta({q}, $) must keep $ and move right")

    @cached_property
    def canonical_text(self) -> str:
        from .tmformat import dump_machine

        return dump_machine(self)

    @cached_property
    def fingerprint(self) -> str:
        return hashlib.sha256(self.canonical_text.encode()).hexdigest()[:16]

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, TuringMachine):
            return NotImplemented
        return self.canonical_text == other.canonical_text

    def __hash__(self) -> int:
        return hash(self.canonical_text)


@dataclass(frozen=True)
class Configuration:
    state: str
    head: int
    tape: tuple[str, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "tape", tuple(self.tape))
        if not 1 <= self.head <= len(self.tape):
            raise TapeBoundError(f"head {self.head} outside 1..{len(self.tape)}")

    @property
    def symbol(self) -> str:
        return self.tape[self.head - 1]

    def __str__(self) -> str:
        cells = list(self.tape)
        cells[self.head - 1] = f"({self.state} {cells[self.head - 1]})"
        return " ".join(cells)


@dataclass(frozen=True)
class RunResult:
    verdict: str
    trace: tuple[Configuration, ...]
    halt_step: int | None = None

    @property
    def final(self) -> Configuration:
        return self.trace[-1]


def initial_config(m: TuringMachine, x, T: int) -> Configuration:
    x = tuple(x)
    for a in x:
        if a not in m.input_alphabet:
            raise MachineError(f"symbol {a!r} is not in the input alphabet")
    if T < 3 or T < len(x) + 2:
        raise MachineError(f"time bound T={T} too small for input of length {len(x)} "
                           f"(need T >= max(3, n + 2))")
    tape = (ENDMARKER,) + x + (BLANK,) * (T - len(x) - 1)
    return Configuration(m.start_state, 1, tape)


def step(m: TuringMachine, c: Configuration) -> Configuration:
    if m.is_halting(c.state):
        return c
    try:
        q2, a2, d = m.delta[c.state, c.symbol]
    except KeyError:
        raise MachineError(f"no transition for ({c.state}, {c.symbol})") from None
    head = c.head + (1 if d == RIGHT else -1)
    if not 1 <= head <= len(c.tape):
        raise TapeBoundError(
            f"head would move to cell {head} from ({c.state}, {c.symbol}) at cell {c.head}")
    tape = c.tape[:c.head - 1] + (a2,) + c.tape[c.head:]
    return Configuration(q2, head, tape)


def run(m: TuringMachine, x, T: int) -> RunResult:
    c = initial_config(m, x, T)
    trace = [c]
    halt_step = 0 if m.is_halting(c.state) else None
    for t in range(1, T + 1):
        c = step(m, c)
        trace.append(c)
        if halt_step is None and m.is_halting(c.state):
            halt_step = t
    if halt_step is None:
        verdict = TIMEOUT
    else:
        verdict = ACCEPT if c.state == m.accept_state else REJECT
    return RunResult(verdict, tuple(trace), halt_step)


def accepts(m: TuringMachine, x, T: int) -> bool:
    return run(m, x, T).verdict == ACCEPT


def check_ritual(m: TuringMachine, c: Configuration) -> bool:
    """True iff a halting configuration has the shape ``$ (h _) _ ...``."""
    return (m.is_halting(c.state) and c.head == 2 and len(c.tape) >= 3
            and c.tape[0] == ENDMARKER and c.tape[1] == BLANK and c.tape[2] == BLANK)


def _fresh(base: str, taken: set[str]) -> str:
    name, n = base, 1
    while name in taken:
        n += 1
        name = f"{base}{n}"
    taken.add(name)
    return name


def normalize(m: TuringMachine) -> TuringMachine:
    """Bring ``m`` into the endmarker / halting-ritual normal form.

    The source machine must not write ``$`` and, if it defines transitions on
    ``$`` at all, they must keep ``$`` and move right.  Undefined ``$``
    transitions become right-bounces, so a left move off cell 2 behaves like
    the usual "stay on the first cell" convention.  Every transition into a
    halting state is redirected through a ritual that walks back to ``$``,
    blanks cells 2 and 3, and halts over cell 2.
    """
    if m.normalized:
        return m
    missing = [(q, a) for q, a in m.missing_transitions() if a != ENDMARKER]
    if missing:
        q, a = missing[0]
        raise MachineError(f"delta is not total: no transition for ({q}, {a})")
    for (q, a), (q2, a2, d) in m.delta.items():
        if a == ENDMARKER and (a2 != ENDMARKER or d != RIGHT):
            raise MachineError(f"delta({q}, $) must keep $ and move right; cannot repair")
        if a != ENDMARKER and a2 == ENDMARKER:
            raise MachineError(f"delta({q}, {a}) writes the endmarker")

    taken = set(m.states)
    walk, wipe2, wipe3 = {}, {}, {}
    for h in m.halting_states:
        walk[h] = _fresh(f"{h}.walk", taken)
        wipe2[h] = _fresh(f"{h}.wipe2", taken)
        wipe3[h] = _fresh(f"{h}.wipe3", taken)

    def redirect(q: str) -> str:
        return walk.get(q, q)

    delta: dict[tuple[str, str], Action] = {}
    for q in m.working_states:
        for a in m.tape_alphabet:
            if (q, a) in m.delta:
                q2, a2, d = m.delta[q, a]
                delta[q, a] = (redirect(q2), a2, d)
            else:
                delta[q, a] = (q, ENDMARKER, RIGHT)

    start = m.start_state
    added: list[str] = []
    if m.is_halting(start):
        start = _fresh(f"{m.start_state}.start", taken)
        added.append(start)
        for a in m.tape_alphabet:
            delta[start, a] = (walk[m.start_state], a, RIGHT)

    for h in m.halting_states:
        added += [walk[h], wipe2[h], wipe3[h]]
        for a in m.tape_alphabet:
            if a == ENDMARKER:
                delta[walk[h], a] = (wipe2[h], ENDMARKER, RIGHT)
                delta[wipe2[h], a] = (wipe2[h], ENDMARKER, RIGHT)
                delta[wipe3[h], a] = (wipe3[h], ENDMARKER, RIGHT)
            else:
                delta[walk[h], a] = (walk[h], a, LEFT)
                delta[wipe2[h], a] = (wipe3[h], BLANK, RIGHT)
                delta[wipe3[h], a] = (h, BLANK, LEFT)

    states = [start] + [q for q in m.states if q != start] + [q for q in added if q != start]
    out = TuringMachine(
        states=tuple(states),
        tape_alphabet=m.tape_alphabet,
        input_alphabet=m.input_alphabet,
        start_state=start,
        accept_state=m.accept_state,
        reject_state=m.reject_state,
        delta=delta,
        normalized=True,
    )
    out.check_normal_form()
    return out
