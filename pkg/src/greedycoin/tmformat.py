"""Line-oriented text format for Turing machines.

::

    # parity of ones
    states: even odd acc rej
    start: even
    accept: acc
    reject: rej
    input_alphabet: 0 1
    tape_alphabet: $ _ 0 1
    delta: even 0 -> even 0 R
    ...

``normalized: true`` marks a machine already in normal form, so that
re-normalizing it is the identity.  Transitions on ``$`` may be left out;
they are filled in by normalization.
"""

from __future__ import annotations

from pathlib import Path

from .machine import BLANK, ENDMARKER, LEFT, RIGHT, MachineError, TuringMachine

_SINGLE = ("start", "accept", "reject", "normalized")
_LISTS = ("states", "input_alphabet", "tape_alphabet")
_RESERVED = set(",()#\t")


class SpecParseError(ValueError):
    def __init__(self, lineno: int | None, msg: str):
        self.lineno = lineno
        super().__init__(f"line {lineno}: {msg}" if lineno else msg)


def _check_token(tok: str, lineno: int) -> str:
    if _RESERVED & set(tok) or tok in ("->",):
        raise SpecParseError(lineno, f"illegal identifier {tok!r}")
    return tok


def parse_machine(text: str) -> TuringMachine:
    fields: dict[str, object] = {}
    where: dict[str, int] = {}
    delta: dict[tuple[str, str], tuple[str, str, str]] = {}
    delta_line: dict[tuple[str, str], int] = {}

    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, rest = line.partition(":")
        key = key.strip()
        if not sep:
            raise SpecParseError(lineno, f"expected 'directive: ...', got {line!r}")
        toks = rest.split()
        if key == "delta":
            if len(toks) != 6 or toks[2] != "->":
                raise SpecParseError(lineno, "expected 'delta: q a -> q2 a2 L|R'")
            q, a, _, q2, a2, d = toks
            if d not in (LEFT, RIGHT):
                raise SpecParseError(lineno, f"direction must be L or R, got {d!r}")
            if (q, a) in delta:
                raise SpecParseError(lineno, f"duplicate transition for ({q}, {a}), "
                                             f"first given on line {delta_line[q, a]}")
            for t in (q, a, q2, a2):
                _check_token(t, lineno)
            delta[q, a] = (q2, a2, d)
            delta_line[q, a] = lineno
        elif key in _SINGLE:
            if len(toks) != 1:
                raise SpecParseError(lineno, f"'{key}:' takes exactly one value")
            if key in fields:
                raise SpecParseError(lineno, f"duplicate directive '{key}:'")
            fields[key] = _check_token(toks[0], lineno)
            where[key] = lineno
        elif key in _LISTS:
            if key in fields:
                raise SpecParseError(lineno, f"duplicate directive '{key}:'")
            fields[key] = tuple(_check_token(t, lineno) for t in toks)
            where[key] = lineno
        else:
            raise SpecParseError(lineno, f"unknown directive {key!r}")

    for key in _LISTS + _SINGLE[:3]:
        if key not in fields:
            raise SpecParseError(None, f"missing directive '{key}:'")

    states = fields["states"]
    gamma = fields["tape_alphabet"]
    if not gamma or gamma[0] != ENDMARKER:
        raise SpecParseError(where["tape_alphabet"], f"tape_alphabet must list {ENDMARKER!r} first")
    if BLANK not in gamma:
        raise SpecParseError(where["tape_alphabet"], f"tape_alphabet must contain {BLANK!r}")
    for key in ("start", "accept", "reject"):
        if fields[key] not in states:
            raise SpecParseError(where[key], f"{key} state {fields[key]!r} not declared")
    for (q, a), (q2, a2, _) in delta.items():
        ln = delta_line[q, a]
        if q not in states or q2 not in states:
            raise SpecParseError(ln, f"unknown state in transition ({q}, {a})")
        if a not in gamma or a2 not in gamma:
            raise SpecParseError(ln, f"unknown symbol in transition ({q}, {a})")
        if q in (fields["accept"], fields["reject"]):
            raise SpecParseError(ln, f"halting state {q!r} cannot have transitions")

    halting = (fields["accept"], fields["reject"])
    for q in states:
        if q in halting:
            continue
        for a in gamma:
            if a != ENDMARKER and (q, a) not in delta:
                raise SpecParseError(where["states"],
                                     f"missing delta line for state {q!r} on symbol {a!r}")

    normalized = fields.get("normalized", "false")
    if normalized not in ("true", "false"):
        raise SpecParseError(where["normalized"], "normalized: must be true or false")
    try:
        m = TuringMachine(
            states=states,
            tape_alphabet=gamma,
            input_alphabet=fields["input_alphabet"],
            start_state=fields["start"],
            accept_state=fields["accept"],
            reject_state=fields["reject"],
            delta=delta,
            normalized=normalized == "true",
        )
        if m.normalized:
            m.check_normal_form()
    except MachineError as e:
        raise SpecParseError(None, str(e)) from None
    return m


def load_machine(path) -> TuringMachine:
    return parse_machine(Path(path).read_text())


def dump_machine(m: TuringMachine) -> str:
    lines = [
        f"states: {' '.join(m.states)}",
        f"start: {m.start_state}",
        f"accept: {m.accept_state}",
        f"reject: {m.reject_state}",
        f"input_alphabet: {' '.join(m.input_alphabet)}",
        f"tape_alphabet: {' '.join(m.tape_alphabet)}",
    ]
    if m.normalized:
        lines.append("normalized: true")
    for q in m.states:
        for a in m.tape_alphabet:
            if (q, a) in m.delta:
                q2, a2, d = m.delta[q, a]
                lines.append(f"delta: {q} {a} -> {q2} {a2} {d}")
    return "\n".join(lines) + "\n"
