"""Command line front end.

Exit codes: 0 success / IN / accept / certified, 1 negative decision or
reject, 2 usage or input error, 3 verification falsified, 4 timeout or
otherwise not certifiable.
"""

from __future__ import annotations

import argparse
import math
import random
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

from . import corpus
from .compiler import CompileError, compile_instance, dumps_instance, loads_instance, InstanceFormatError
from .greedy import CoinSystem, gcc_decision, greedy_set, optimal_dp
from .machine import ACCEPT, REJECT, MachineError, TapeBoundError, normalize, run
from .tmformat import SpecParseError, dump_machine, load_machine
from .verifier import NotCertifiable, VerificationError, verify

EXIT_OK, EXIT_NEGATIVE, EXIT_USAGE, EXIT_FALSIFIED, EXIT_TIMEOUT = 0, 1, 2, 3, 4


class UsageError(Exception):
    pass


@dataclass
class RunManifest:
    subcommand: str
    inputs: list[Path] = field(default_factory=list)
    word: tuple[str, ...] = ()
    T: int | None = None
    C_M: float | None = None
    ell: float | None = None
    output: Path | None = None
    seed: int | None = None

    def __post_init__(self) -> None:
        self.inputs = [Path(p).resolve() for p in self.inputs]
        if self.output is not None:
            self.output = Path(self.output).resolve()
        if self.T is None and self.C_M is not None:
            if self.ell is None:
                raise UsageError("--cm needs --ell")
            self.T = math.ceil(self.C_M * len(self.word) ** self.ell)


def split_word(text: str) -> tuple[str, ...]:
    if "," in text or " " in text:
        return tuple(t for t in text.replace(",", " ").split())
    return tuple(text)


def _manifest(args, word: bool = True) -> RunManifest:
    return RunManifest(
        subcommand=args.command,
        inputs=[args.spec] if getattr(args, "spec", None) else [],
        word=split_word(args.input) if word and args.input is not None else (),
        T=getattr(args, "time", None),
        C_M=getattr(args, "cm", None),
        ell=getattr(args, "ell", None),
        output=getattr(args, "output", None),
        seed=getattr(args, "seed", None),
    )


def _need_time(man: RunManifest) -> int:
    if man.T is None:
        raise UsageError("give --time T or --cm C --ell L")
    return man.T


def _load(man: RunManifest):
    return normalize(load_machine(man.inputs[0]))


def cmd_compile(args) -> int:
    man = _manifest(args)
    m = _load(man)
    inst = compile_instance(m, man.word, _need_time(man))
    text = dumps_instance(inst)
    if man.output:
        man.output.write_text(text)
    else:
        sys.stdout.write(text)
    return EXIT_OK


def _parse_generic(text: str):
    fields = {}
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = line.partition("=")
        if not sep or key.strip() not in ("W", "coins", "query"):
            raise UsageError(f"line {lineno}: expected W=, coins= or query=")
        fields[key.strip()] = value.strip()
    try:
        W = int(fields["W"])
        coins = [int(c) for c in fields["coins"].split(",") if c.strip()]
        query = int(fields["query"]) if "query" in fields else None
    except (KeyError, ValueError) as e:
        raise UsageError(f"bad generic instance: {e}") from None
    if W < 0 or any(c <= 0 for c in coins):
        raise UsageError("W must be non-negative and coins positive")
    return W, sorted(set(coins), reverse=True), query


def cmd_greedy(args) -> int:
    text = Path(args.instance).read_text()
    if text.startswith("T="):
        inst = loads_instance(text)
        W, system, query = inst.W, CoinSystem(inst.values), inst.query
        label = lambda v: str(inst.name_of(v))  # noqa: E731
        show = lambda v: v.render()  # noqa: E731
    else:
        W, coins, query = _parse_generic(text)
        if args.query is not None:
            query = args.query
        system = CoinSystem(coins)
        label = show = str
    if args.decision:
        if query is None:
            raise UsageError("--decision needs a query coin (query= line or --query)")
        chosen = gcc_decision(W, system, query)
        print("IN" if chosen else "OUT")
        return EXIT_OK if chosen else EXIT_NEGATIVE
    trace = greedy_set(W, system, limit=args.trace_limit)
    for n, (coin, rest) in enumerate(trace.steps, 1):
        print(f"{n}\t{label(coin)}\t{show(rest)}")
    if args.trace_limit is None or len(trace) < args.trace_limit:
        print(f"leftover={show(trace.leftover)}")
    return EXIT_OK


def cmd_verify(args) -> int:
    if args.corpus:
        return _verify_corpus(args)
    if args.spec is None or args.input is None:
        raise UsageError("verify needs MACHINE and --input, or --corpus")
    man = _manifest(args)
    m = _load(man)
    try:
        v = verify(m, man.word, _need_time(man))
    except NotCertifiable as e:
        print(f"REFUSED({e})")
        return EXIT_TIMEOUT
    except VerificationError as e:
        print(f"FALSIFIED(step={e.step}): {e}")
        return EXIT_FALSIFIED
    print("\n".join(v.lines()))
    return EXIT_OK if v.certified else EXIT_FALSIFIED


def _corpus_job(job) -> str:
    name, word, T = job
    m = corpus.machine(name)
    try:
        v = verify(m, word, T)
    except NotCertifiable as e:
        return f"{name}\t{word or '-'}\tREFUSED({e})"
    except VerificationError as e:
        return f"{name}\t{word or '-'}\tFALSIFIED(step={e.step})"
    status = "CERTIFIED" if v.certified else f"FALSIFIED({v.failure})"
    return f"{name}\t{word or '-'}\t{v.verdict}\t{'IN' if v.decision else 'OUT'}\t{status}"


def _verify_corpus(args) -> int:
    T = args.time if args.time is not None else corpus.time_bound(args.max_len)
    words = list(corpus.inputs_up_to(args.max_len))
    if args.sample is not None:
        if args.seed is None:
            raise UsageError("--sample needs --seed")
        words = sorted(random.Random(args.seed).sample(words, min(args.sample, len(words))),
                       key=lambda w: (len(w), w))
    jobs = [(name, w, T) for name in corpus.SOURCES for w in words]
    if args.jobs > 1:
        with ProcessPoolExecutor(args.jobs) as pool:
            lines = list(pool.map(_corpus_job, jobs, chunksize=16))
    else:
        lines = [_corpus_job(j) for j in jobs]
    bad = [ln for ln in lines if not ln.endswith("CERTIFIED")]
    print("\n".join(lines))
    print(f"pairs={len(lines)} certified={len(lines) - len(bad)}")
    if any("FALSIFIED" in ln for ln in bad):
        return EXIT_FALSIFIED
    return EXIT_TIMEOUT if bad else EXIT_OK


def cmd_run_tm(args) -> int:
    man = _manifest(args)
    m = _load(man)
    result = run(m, man.word, _need_time(man))
    if args.trace:
        for t, c in enumerate(result.trace):
            print(f"{t}\t{c}")
    print(result.verdict.upper())
    return {ACCEPT: EXIT_OK, REJECT: EXIT_NEGATIVE}.get(result.verdict, EXIT_TIMEOUT)


def cmd_optimal(args) -> int:
    try:
        coins = [int(c) for c in args.coins.split(",") if c.strip()]
    except ValueError:
        raise UsageError("--coins must be a comma-separated list of integers") from None
    count, witness = optimal_dp(args.W, coins)
    print(count)
    if args.witness:
        print(",".join(map(str, witness)))
    return EXIT_OK


def cmd_normalize(args) -> int:
    text = dump_machine(normalize(load_machine(args.spec)))
    if args.output:
        Path(args.output).write_text(text)
    else:
        sys.stdout.write(text)
    return EXIT_OK


def _time_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--time", "-T", type=int, help="time/space bound T")
    p.add_argument("--cm", type=float, help="constant C_M; T = ceil(C_M * n**ell)")
    p.add_argument("--ell", type=float, help="exponent ell")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="greedycoin", description=__doc__.split("\n")[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("compile", help="compile a machine and input into an instance file")
    p.add_argument("spec", metavar="MACHINE")
    p.add_argument("--input", "-i", required=True)
    _time_flags(p)
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_compile)

    p = sub.add_parser("greedy", help="run greedy change-making on an instance")
    p.add_argument("instance")
    p.add_argument("--decision", action="store_true", help="print IN/OUT for the query coin")
    p.add_argument("--query", type=int, help="query coin for generic instances")
    p.add_argument("--trace-limit", type=int)
    p.set_defaults(func=cmd_greedy)

    p = sub.add_parser("verify", help="check greedy against the machine step by step")
    p.add_argument("spec", nargs="?", metavar="MACHINE")
    p.add_argument("--input", "-i")
    _time_flags(p)
    p.add_argument("--corpus", action="store_true", help="verify the built-in machine corpus")
    p.add_argument("--max-len", type=int, default=6)
    p.add_argument("--sample", type=int, help="verify a random sample of corpus inputs")
    p.add_argument("--seed", type=int)
    p.add_argument("--jobs", type=int, default=1)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("run-tm", help="simulate a machine directly")
    p.add_argument("spec", metavar="MACHINE")
    p.add_argument("--input", "-i", required=True)
    _time_flags(p)
    p.add_argument("--trace", action="store_true")
    p.set_defaults(func=cmd_run_tm)

    p = sub.add_parser("optimal", help="fewest coins by dynamic programming")
    p.add_argument("--W", type=int, required=True)
    p.add_argument("--coins", required=True)
    p.add_argument("--witness", action="store_true")
    p.set_defaults(func=cmd_optimal)

    p = sub.add_parser("normalize", help="print the normalized machine")
    p.add_argument("spec", metavar="MACHINE")
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_normalize)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return EXIT_USAGE if e.code else EXIT_OK
    try:
        return args.func(args)
    except TapeBoundError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_TIMEOUT
    except (UsageError, SpecParseError, MachineError, InstanceFormatError, CompileError,
            OSError, ValueError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
