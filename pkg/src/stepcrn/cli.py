"""Command-line front end.

Subcommands: ``compile``, ``run``, ``verify``, ``lowerbound``,
``gen-corpus``.  Exit codes: 0 success / verification passed, 1
verification counterexample or decode failure, 2 usage or input error.
Everything is deterministic given the arguments and seeds.
"""
from __future__ import annotations

import argparse
import json
import os
import random
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

from .circuits import Circuit, CircuitError, evaluate, parse_circuit, stats, to_netlist
from .corpus import CorpusSpec, generate_circuits
from .engine import (
    Schedule,
    StateCapExceeded,
    decode_output,
    enumerate_program_terminals,
    program_from_text,
    program_to_text,
    run_program,
)
from .lowerbound import check_demand_growth, min_copy_bounds
from .lowering import compile_backend

DEFAULT_SEEDS = tuple(range(25))
DEFAULT_EXHAUSTIVE_VOLUME_CAP = 14
DEFAULT_ALL_INPUTS_CAP = 12


@dataclass(frozen=True)
class VerifyJob:
    circuit: Circuit
    backend: str
    input_mode: str = "all"  # "all" or "random"
    random_count: int = 16
    input_cap: int = DEFAULT_ALL_INPUTS_CAP
    seeds: tuple[int, ...] = DEFAULT_SEEDS
    exhaustive: bool = False
    volume_cap: int = DEFAULT_EXHAUSTIVE_VOLUME_CAP
    state_cap: int = 2_000_000


@dataclass
class VerifySummary:
    circuit: str
    backend: str
    assignments: int = 0
    runs: int = 0
    passed: int = 0
    failed: int = 0
    exhaustive_checked: int = 0
    exhaustive_skipped: int = 0
    counterexample: dict | None = None

    @property
    def ok(self) -> bool:
        return self.failed == 0

    def to_json_obj(self) -> dict:
        out = {
            "circuit": self.circuit,
            "backend": self.backend,
            "assignments": self.assignments,
            "runs": self.runs,
            "passed": self.passed,
            "failed": self.failed,
            "exhaustive_checked": self.exhaustive_checked,
            "exhaustive_skipped": self.exhaustive_skipped,
            "ok": self.ok,
        }
        if self.counterexample:
            out["counterexample"] = self.counterexample
        return out


def _assignments(job: VerifyJob) -> list[tuple[int, ...]]:
    n = len(job.circuit.input_ids)
    if job.input_mode == "all":
        if n > job.input_cap:
            raise CircuitError(
                f"{n} inputs exceed the all-assignments cap {job.input_cap}; "
                "use random mode"
            )
        return [tuple((i >> k) & 1 for k in range(n)) for i in range(1 << n)]
    rng_bits = random.Random(job.seeds[0] if job.seeds else 0)
    return [
        tuple(rng_bits.randint(0, 1) for _ in range(n)) for _ in range(job.random_count)
    ]


def verify_job(job: VerifyJob) -> VerifySummary:
    """Reference evaluation vs decoded runs (and, optionally, vs every
    exhaustively-reachable terminal) across all assignments and seeds."""
    program, _ = compile_backend(job.circuit, job.backend)
    summary = VerifySummary(circuit=job.circuit.name, backend=job.backend)
    for bits in _assignments(job):
        summary.assignments += 1
        want = tuple(evaluate(job.circuit, bits))
        for seed in job.seeds:
            summary.runs += 1
            result = run_program(program, bits, Schedule(seed))
            if result.decoded == want:
                summary.passed += 1
            else:
                summary.failed += 1
                if summary.counterexample is None:
                    summary.counterexample = {
                        "circuit": job.circuit.name,
                        "input": "".join(map(str, bits)),
                        "seed": seed,
                        "expected": list(want),
                        "decoded": list(result.decoded),
                        "terminal": result.final.as_dict(),
                    }
        if job.exhaustive:
            try:
                terminals = enumerate_program_terminals(
                    program,
                    bits,
                    state_cap=job.state_cap,
                    entry_volume_cap=job.volume_cap,
                )
            except StateCapExceeded:
                summary.exhaustive_skipped += 1
            else:
                summary.exhaustive_checked += 1
                for term in sorted(terminals, key=lambda t: t.counts):
                    decoded = tuple(decode_output(term, program))
                    if decoded != want:
                        summary.failed += 1
                        if summary.counterexample is None:
                            summary.counterexample = {
                                "circuit": job.circuit.name,
                                "input": "".join(map(str, bits)),
                                "seed": "exhaustive",
                                "expected": list(want),
                                "decoded": list(decoded),
                                "terminal": term.as_dict(),
                            }
                        break
    return summary


def _verify_worker(payload):
    netlist, backend, bits_chunk, seeds, exhaustive, volume_cap, state_cap = payload
    circuit = parse_circuit(netlist)
    program, _ = compile_backend(circuit, backend)
    passed = failed = checked = skipped = 0
    counterexamples = []
    for bits in bits_chunk:
        want = tuple(evaluate(circuit, bits))
        for seed in seeds:
            result = run_program(program, bits, Schedule(seed))
            if result.decoded == want:
                passed += 1
            else:
                failed += 1
                counterexamples.append(
                    (bits, seed, list(want), list(result.decoded), result.final.as_dict())
                )
        if exhaustive:
            try:
                terminals = enumerate_program_terminals(
                    program, bits, state_cap=state_cap, entry_volume_cap=volume_cap
                )
            except StateCapExceeded:
                skipped += 1
            else:
                checked += 1
                for term in sorted(terminals, key=lambda t: t.counts):
                    decoded = tuple(decode_output(term, program))
                    if decoded != want:
                        failed += 1
                        counterexamples.append(
                            (bits, -1, list(want), list(decoded), term.as_dict())
                        )
                        break
    return passed, failed, checked, skipped, len(bits_chunk), counterexamples


def verify_job_parallel(job: VerifyJob, jobs: int) -> VerifySummary:
    if jobs <= 1:
        return verify_job(job)
    assignments = _assignments(job)
    chunks = [assignments[i::jobs] for i in range(jobs)]
    netlist = to_netlist(job.circuit)
    payloads = [
        (netlist, job.backend, chunk, job.seeds, job.exhaustive, job.volume_cap, job.state_cap)
        for chunk in chunks
        if chunk
    ]
    summary = VerifySummary(circuit=job.circuit.name, backend=job.backend)
    counterexamples = []
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        for passed, failed, checked, skipped, n_bits, cexs in pool.map(
            _verify_worker, payloads
        ):
            summary.passed += passed
            summary.failed += failed
            summary.exhaustive_checked += checked
            summary.exhaustive_skipped += skipped
            summary.assignments += n_bits
            counterexamples.extend(cexs)
    summary.runs = summary.passed + summary.failed
    if counterexamples:
        bits, seed, want, got, term = min(counterexamples, key=lambda c: (c[0], c[1]))
        summary.counterexample = {
            "circuit": job.circuit.name,
            "input": "".join(map(str, bits)),
            "seed": seed if seed >= 0 else "exhaustive",
            "expected": want,
            "decoded": got,
            "terminal": term,
        }
    return summary


# -- argument helpers ---------------------------------------------------------


def _parse_range(text: str) -> tuple[int, int]:
    if ":" in text:
        lo, hi = text.split(":", 1)
        return int(lo), int(hi)
    v = int(text)
    return v, v


def _parse_seeds(text: str) -> tuple[int, ...]:
    if ":" in text:
        lo, hi = text.split(":", 1)
        return tuple(range(int(lo), int(hi)))
    return tuple(int(t) for t in text.split(","))


class CliInputError(Exception):
    pass


def _read(path: str) -> str:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            return fh.read()
    except OSError as e:
        raise CliInputError(f"cannot open {path}: {e.strerror}") from e


def _usage_error(message: str) -> int:
    print(f"error: {message}", file=sys.stderr)
    return 2


# -- subcommands ----------------------------------------------------------------


def cmd_compile(args) -> int:
    try:
        circuit = parse_circuit(_read(args.circuit))
        program, report = compile_backend(circuit, args.backend)
    except (CircuitError, ValueError) as e:
        return _usage_error(str(e))
    with open(args.out, "w", encoding="utf-8") as fh:
        fh.write(program_to_text(program))
    report_path = args.report or args.out + ".report"
    with open(report_path, "w", encoding="utf-8") as fh:
        fh.write(report.to_json() if args.json else report.to_text())
    if args.json:
        print(report.to_json())
    else:
        print(report.to_text(), end="")
    return 0


def cmd_run(args) -> int:
    try:
        program = program_from_text(_read(args.program))
    except ValueError as e:
        return _usage_error(str(e))
    bits = args.bits
    if len(bits) != len(program.input_order) or any(b not in "01" for b in bits):
        return _usage_error(
            f"program expects {len(program.input_order)} input bits, got {bits!r}"
        )
    result = run_program(program, bits, Schedule(args.seed), trace=args.trace)
    if args.trace:
        for line in result.trace:
            print(line)
    if args.json:
        print(
            json.dumps(
                {
                    "output": [str(b) for b in result.decoded],
                    "peak_volume": result.peak_volume,
                    "steps": result.step_count,
                    "applications": result.applications,
                    "terminal": result.final.as_dict(),
                },
                sort_keys=True,
            )
        )
    else:
        rendered = "".join(
            str(b) if isinstance(b, int) else f"<{b}@{j}>"
            for j, b in enumerate(result.decoded)
        )
        print(f"output: {rendered}")
        print(f"peak_volume: {result.peak_volume}")
        print(f"steps: {result.step_count}")
        for j, b in enumerate(result.decoded):
            if not isinstance(b, int):
                print(f"decode error at output {j}: {b}", file=sys.stderr)
    return 0 if result.ok else 1


def cmd_verify(args) -> int:
    try:
        circuit = parse_circuit(_read(args.circuit))
    except CircuitError as e:
        return _usage_error(str(e))
    mode, count = "all", 16
    if args.inputs.startswith("random"):
        mode = "random"
        if ":" in args.inputs:
            count = int(args.inputs.split(":", 1)[1])
    elif args.inputs != "all":
        return _usage_error(f"bad --inputs {args.inputs!r} (use all or random[:N])")
    job = VerifyJob(
        circuit=circuit,
        backend=args.backend,
        input_mode=mode,
        random_count=count,
        seeds=_parse_seeds(args.seeds),
        exhaustive=args.exhaustive,
        volume_cap=args.volume_cap,
    )
    try:
        summary = verify_job_parallel(job, args.jobs)
    except CircuitError as e:
        return _usage_error(str(e))
    if args.json:
        print(json.dumps(summary.to_json_obj(), sort_keys=True))
    else:
        print(
            f"{summary.circuit} backend={summary.backend}: "
            f"{summary.passed}/{summary.runs} runs passed, "
            f"{summary.exhaustive_checked} exhaustive checks, "
            f"{summary.exhaustive_skipped} skipped"
        )
        if summary.counterexample:
            print("counterexample:", json.dumps(summary.counterexample, sort_keys=True))
    return 0 if summary.ok else 1


def cmd_lowerbound(args) -> int:
    rows = check_demand_growth(args.max_depth)
    bounds = min_copy_bounds(args.max_depth)
    if args.json:
        print(
            json.dumps(
                {
                    "bounds": bounds,
                    "rows": [
                        {
                            "depth": r.depth,
                            "bound": r.bound,
                            "input_demand": r.input_demand,
                            "static_volume": r.static_volume,
                            "ok": r.ok,
                        }
                        for r in rows
                    ],
                },
                sort_keys=True,
            )
        )
    else:
        print(f"{'depth':>5} {'bound':>10} {'demand':>14} {'volume':>16} pass")
        for r in rows:
            print(
                f"{r.depth:>5} {r.bound:>10} {r.input_demand:>14} "
                f"{r.static_volume:>16} {'yes' if r.ok else 'NO'}"
            )
    return 0 if all(r.ok for r in rows) else 1


def cmd_gen_corpus(args) -> int:
    try:
        spec = CorpusSpec(
            count=args.count,
            seed=args.seed,
            depth=_parse_range(args.depth),
            gates=_parse_range(args.gates),
            fan_in=_parse_range(args.fan_in),
            fan_out=_parse_range(args.fan_out),
            inputs=_parse_range(args.inputs),
            maj_fraction=args.maj_fraction,
        )
        circuits = generate_circuits(spec)
    except (ValueError, RuntimeError) as e:
        return _usage_error(str(e))
    os.makedirs(args.out, exist_ok=True)
    for c in circuits:
        path = os.path.join(args.out, f"{c.name}.net")
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(to_netlist(c))
        st = stats(c)
        print(
            f"{path}: gates={st.gate_count} depth={st.depth} "
            f"fanout={st.max_fanout} width={st.width} inputs={len(c.input_ids)}"
        )
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="stepcrn",
        description="Compile threshold circuits to step programs of "
        "annihilation rules, run them, and verify the decodes.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("compile", help="lower a circuit to a step program")
    p.add_argument("circuit")
    p.add_argument("--backend", choices=("formula", "exp", "catalyst"), default="formula")
    p.add_argument("-o", "--out", required=True)
    p.add_argument("--report", default=None)
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_compile)

    p = sub.add_parser("run", help="run a compiled program on an input bitstring")
    p.add_argument("program")
    p.add_argument("bits")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--trace", action="store_true")
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("verify", help="check decoded runs against direct evaluation")
    p.add_argument("circuit")
    p.add_argument("--backend", choices=("formula", "exp", "catalyst"), default="formula")
    p.add_argument("--inputs", default="all", help="all or random[:N]")
    p.add_argument("--seeds", default="0:25", help="lo:hi or comma list")
    p.add_argument("--exhaustive", action="store_true")
    p.add_argument("--volume-cap", type=int, default=DEFAULT_EXHAUSTIVE_VOLUME_CAP)
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("lowerbound", help="demand growth of the worst-case family")
    p.add_argument("--max-depth", type=int, default=20)
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_lowerbound)

    p = sub.add_parser("gen-corpus", help="generate random circuits")
    p.add_argument("--out", required=True)
    p.add_argument("--count", type=int, default=10)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--depth", default="2:4")
    p.add_argument("--gates", default="4:16")
    p.add_argument("--fan-in", default="1:3")
    p.add_argument("--fan-out", default="1:3")
    p.add_argument("--inputs", default="2:6")
    p.add_argument("--maj-fraction", type=float, default=0.0)
    p.set_defaults(func=cmd_gen_corpus)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except CliInputError as e:
        return _usage_error(str(e))


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
