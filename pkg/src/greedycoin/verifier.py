"""Check the reduction on concrete runs.

The greedy run over the materialized coin set is compared, step by step,
against two things it was never told about: the direct machine trace, and a
stateless predictor that names the next coin from the shape of the remaining
amount alone.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

from .compiler import (
    Copy,
    CoinName,
    Instance,
    LeftEnd,
    Transition,
    coin_value,
    compile_instance,
    describe_amount,
    query_name,
)
from .encoding import INVALID, PAIR, SYMBOL, BigAmount, CodeBook, build_codebook, decode_block, encode_config
from .machine import ACCEPT, REJECT, TIMEOUT, TuringMachine, check_ritual, run

CASE1, CASE2, CASE3, CASE4, FINAL = "Case1", "Case2", "Case3", "Case4", "FinalBlock"


class ShapeError(ValueError):
    """The amount has none of the shapes a greedy run of a compiled instance passes through."""


class NotCertifiable(RuntimeError):
    """The run cannot be certified (timeout, late halting or a broken halting ritual)."""


class VerificationError(AssertionError):
    def __init__(self, step: int, msg: str):
        self.step = step
        super().__init__(f"step {step}: {msg}")


def classify(W: BigAmount, m: TuringMachine, cb: CodeBook, T: int) -> tuple[str, CoinName]:
    """Case label and predicted next coin for a remaining amount."""
    lead = W.leading_index()
    if lead is None:
        raise ShapeError("amount is zero; no next coin")
    j = lead // T + 1
    block = decode_block(W, T - j, cb, T).cells
    i = lead % T + 1
    cell = block[i - 1]
    nxt = block[i] if i < T else None

    if cell.kind == INVALID or (nxt is not None and nxt.kind == INVALID):
        raise ShapeError(f"invalid digit near cell {i} of step {j}")

    if cell.kind == PAIR:
        if i != 1 or cell.symbol != "$" or m.is_halting(cell.state):
            raise ShapeError(f"head digit ({cell.state} {cell.symbol}) leads at cell {i}")
        if nxt is None or nxt.kind != SYMBOL:
            raise ShapeError("left-end head not followed by a symbol")
        return (FINAL if j == T else CASE1), LeftEnd(cell.state, nxt.symbol, j)

    if nxt is not None and nxt.kind == PAIR:
        if i + 1 > T - 1:
            raise ShapeError(f"head at the last cell {T} at step {j}")
        after = block[i + 1]
        if after.kind != SYMBOL:
            raise ShapeError(f"cell {i + 2} after the head is not a symbol")
        name = Transition(nxt.state, cell.symbol, nxt.symbol, after.symbol, i + 1, j)
        return (FINAL if j == T else CASE4), name

    if any(c.kind == PAIR for c in block[i:]):
        label = CASE3
    else:
        label = CASE2
    return (FINAL if j == T else label), Copy(cell.symbol, i, j)


def predict_next_coin(W: BigAmount, m: TuringMachine, cb: CodeBook, T: int) -> CoinName:
    return classify(W, m, cb, T)[1]


@dataclass(frozen=True)
class TransitionReport:
    j: int
    before: object           # Configuration at step j
    after: object            # Configuration at step j + 1 (None for the final block)
    coins: int
    cases: tuple[str, ...]
    W_before: BigAmount
    W_after: BigAmount

    def line(self) -> str:
        runs = []
        for label, grp in itertools.groupby(self.cases):
            n = len(list(grp))
            runs.append(label if n == 1 else f"{label}*{n}")
        return f"j={self.j} coins={self.coins} head={self.before.head} cases={','.join(runs)}"


@dataclass
class Verification:
    verdict: str
    decision: bool
    certified: bool
    reports: list[TransitionReport]
    steps: int
    query_step: int | None
    final_first_coin: CoinName | None
    failure: str | None = None

    def lines(self) -> list[str]:
        out = [r.line() for r in self.reports]
        out.append(f"verdict={self.verdict} decision={'IN' if self.decision else 'OUT'} "
                   f"steps={self.steps}")
        out.append("CERTIFIED" if self.certified else f"FALSIFIED({self.failure})")
        return out


def _certifiable_run(m: TuringMachine, x, T: int):
    result = run(m, x, T)
    if result.verdict == TIMEOUT:
        raise NotCertifiable(f"machine did not halt within T={T} steps")
    final = result.trace[T - 1]
    if not m.is_halting(final.state):
        raise NotCertifiable(f"machine halts at step {result.halt_step}, but the instance "
                             f"only holds steps 0..{T - 1}")
    if not check_ritual(m, final):
        raise NotCertifiable(f"halting configuration {final} violates the halting ritual")
    return result


def verify(m: TuringMachine, x, T: int, inst: Instance | None = None) -> Verification:
    """Run greedy on the compiled instance and align it with the machine trace.

    Raises :class:`VerificationError` on the first divergence and
    :class:`NotCertifiable` when the run is outside the reduction's reach.
    """
    result = _certifiable_run(m, x, T)
    inst = inst or compile_instance(m, x, T)
    cb = inst.cb or build_codebook(m)
    system = inst.system
    trace = result.trace

    expected = encode_config(trace[0], 1, cb, T)
    if inst.W != expected:
        raise VerificationError(0, "initial amount differs from the encoded start configuration")

    W = inst.W
    step = 0
    reports: list[TransitionReport] = []
    query_steps: list[int] = []
    final_first = None
    query = query_name(m, T)

    for j in range(1, T + 1):
        start = W
        cases: list[str] = []
        target = encode_config(trace[j], j + 1, cb, T) if j < T else W - W
        while True:
            lead = W.leading_index()
            if lead is None or lead // T + 1 != j:
                break
            chosen = system.largest_at_most(W)
            step += 1
            if chosen is None:
                raise VerificationError(step, f"no coin fits {describe_amount(W, cb, T)}")
            try:
                label, predicted = classify(W, m, cb, T)
            except ValueError as e:
                raise VerificationError(step, f"{e}; amount {describe_amount(W, cb, T)}") from None
            expect_value = coin_value(predicted, m, T, cb)
            if expect_value != chosen:
                actual = inst.name_of(chosen)
                raise VerificationError(
                    step, f"predicted {predicted} ({label}) but greedy chose {actual}\n"
                          f"  before: {describe_amount(W, cb, T)}\n"
                          f"  predicted: {describe_amount(expect_value, cb, T)}\n"
                          f"  chosen:    {describe_amount(chosen, cb, T)}")
            if j == T and not cases:
                final_first = predicted
            if predicted == query:
                query_steps.append(step)
            cases.append(label)
            W = W - chosen
        if W != target:
            raise VerificationError(
                step, f"phase {j} ended at {describe_amount(W, cb, T)}, "
                      f"expected {describe_amount(target, cb, T)}")
        if len(cases) not in (T - 1, T - 2):
            raise VerificationError(step, f"phase {j} used {len(cases)} coins, "
                                          f"expected {T - 1} or {T - 2}")
        reports.append(TransitionReport(j, trace[j - 1], trace[j] if j < T else None,
                                        len(cases), tuple(cases), start, W))

    decision = bool(query_steps)
    accepted = result.verdict == ACCEPT
    failure = None
    if accepted != decision:
        failure = f"step={step}: verdict {result.verdict} but query coin " \
                  f"{'chosen' if decision else 'not chosen'}"
    elif accepted and len(query_steps) != 1:
        failure = f"step={query_steps[1]}: query coin chosen {len(query_steps)} times"
    elif accepted and final_first != query:
        failure = f"step={query_steps[0]}: query coin not the first coin of the final block"
    elif result.verdict == REJECT:
        analogue = Transition(m.reject_state, "$", "_", "_", 2, T)
        if final_first != analogue:
            failure = f"step={step - len(reports[-1].cases) + 1}: final block opened " \
                      f"with {final_first}, expected {analogue}"
    return Verification(result.verdict, decision, failure is None, reports, step,
                        query_steps[0] if query_steps else None, final_first, failure)


def verify_transitions(m: TuringMachine, x, T: int) -> list[TransitionReport]:
    return verify(m, x, T).reports


def verify_acceptance(m: TuringMachine, x, T: int) -> bool:
    return verify(m, x, T).certified
