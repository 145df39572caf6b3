"""Execution of step programs: add species, run to terminal, repeat.

Two schedulers are provided.  The randomized maximal scheduler applies
uniformly-chosen applicable rules until none applies; identical
(program, input, seed) triples reproduce identical traces bit for bit.
The exhaustive enumerator computes the exact set of terminal
configurations reachable from a configuration (and, lifted over steps,
of a whole program run), which is the ground truth the verifier uses to
check that decoding is schedule independent.

Rule sets made purely of void-family rules strictly shrink the volume
with every application, so runs terminate without safeguards; anything
else is executed under an application budget.
"""
from __future__ import annotations

import random
from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

from .crn import (
    Alphabet,
    Configuration,
    Rule,
    RuleFamily,
    classify_rule,
    parse_rule,
)


class BudgetExceeded(RuntimeError):
    """A run with non-void rules exceeded its application budget."""


class StateCapExceeded(RuntimeError):
    """Exhaustive enumeration visited more configurations than allowed."""


DEFAULT_STATE_CAP = 2_000_000
DEFAULT_BUDGET = 1_000_000

RANDOM_MAXIMAL = "random-maximal"


@dataclass(frozen=True)
class Schedule:
    seed: int = 0
    policy: str = RANDOM_MAXIMAL

    def __post_init__(self):
        if self.policy != RANDOM_MAXIMAL:
            raise ValueError(f"unknown schedule policy {self.policy!r}")


@dataclass(frozen=True)
class StepProgram:
    """A rule set plus an ordered sequence of species additions.

    ``steps`` holds dense addition vectors.  ``input_encoding`` maps an
    input id to the (species, count) merged into step 0 for bit 0 and
    bit 1; exactly one of the two is merged per run.  ``output_decoding``
    pairs (species-for-0, species-for-1) per declared output.
    """

    name: str
    backend: str
    alphabet: Alphabet
    rules: tuple[Rule, ...]
    steps: tuple[tuple[int, ...], ...]
    input_order: tuple[int, ...]
    input_encoding: dict[int, tuple[tuple[str, int], tuple[str, int]]]
    output_decoding: tuple[tuple[str, str], ...]

    def __post_init__(self):
        for vec in self.steps:
            if len(vec) != len(self.alphabet):
                raise ValueError("step vector length does not match alphabet")
        for pair in self.input_encoding.values():
            for name, count in pair:
                self.alphabet.ordinal(name)
                if count < 1:
                    raise ValueError("input encoding counts must be >= 1")
        for zero, one in self.output_decoding:
            self.alphabet.ordinal(zero)
            self.alphabet.ordinal(one)

    @property
    def step_count(self) -> int:
        return len(self.steps)

    def static_volume(self) -> int:
        """Copies added over all steps plus the input merge (either bit
        choice adds the same count)."""
        total = sum(sum(vec) for vec in self.steps)
        total += sum(pair[0][1] for pair in self.input_encoding.values())
        return total


@dataclass(frozen=True)
class RunResult:
    final: Configuration
    per_step_terminal: tuple[Configuration, ...]
    peak_volume: int
    step_count: int
    applications: int
    decoded: tuple[object, ...]
    trace: tuple[str, ...] | None = None

    @property
    def ok(self) -> bool:
        return all(isinstance(b, int) for b in self.decoded)


# -- fast rule preparation ---------------------------------------------------

_PAIR = 0   # u + v -> .          (u != v)
_SELF = 1   # u + u -> .
_CAT = 2    # c + u -> c          (catalyst survives)
_GENERAL = 3


def _prep_rule(rule: Rule):
    r, p = rule.reactants, rule.products
    if not p and len(r) == 2 and r[0][1] == 1 and r[1][1] == 1:
        return (_PAIR, r[0][0], r[1][0], rule)
    if not p and len(r) == 1 and r[0][1] == 2:
        return (_SELF, r[0][0], r[0][0], rule)
    if (
        len(p) == 1
        and len(r) == 2
        and r[0][1] == 1
        and r[1][1] == 1
        and p[0][1] == 1
        and p[0][0] in (r[0][0], r[1][0])
    ):
        cat = p[0][0]
        consumed = r[1][0] if cat == r[0][0] else r[0][0]
        return (_CAT, cat, consumed, rule)
    return (_GENERAL, -1, -1, rule)


def _prepped_applicable(counts: Sequence[int], prep) -> bool:
    code, a, b, rule = prep
    if code == _PAIR or code == _CAT:
        return counts[a] >= 1 and counts[b] >= 1
    if code == _SELF:
        return counts[a] >= 2
    return all(counts[o] >= c for o, c in rule.reactants)


def _run_to_terminal(
    counts: list[int],
    live: list,
    rng: random.Random,
    *,
    all_void: bool,
    prepped_all=None,
    budget: int | None = None,
    trace: list[str] | None = None,
    step_no: int = 0,
    volume: int | None = None,
) -> tuple[int, int]:
    """Apply uniformly-chosen applicable rules until terminal.

    Mutates ``counts`` and ``live``.  Returns (applications, volume).
    For void-family rule sets applicability is monotone decreasing, so
    ``live`` only needs lazy pruning; otherwise every iteration rescans
    ``prepped_all`` and the budget is enforced.
    """
    if volume is None:
        volume = sum(counts)
    apps = 0
    if all_void:
        while live:
            i = rng.randrange(len(live))
            prep = live[i]
            code, a, b, rule = prep
            if code == _PAIR or code == _CAT:
                if counts[a] >= 1 and counts[b] >= 1:
                    if code == _PAIR:
                        counts[a] -= 1
                        counts[b] -= 1
                        volume -= 2
                    else:
                        counts[b] -= 1
                        volume -= 1
                else:
                    live[i] = live[-1]
                    live.pop()
                    continue
            elif code == _SELF:
                if counts[a] >= 2:
                    counts[a] -= 2
                    volume -= 2
                else:
                    live[i] = live[-1]
                    live.pop()
                    continue
            else:
                if all(counts[o] >= c for o, c in rule.reactants):
                    for o, d in rule.delta:
                        counts[o] += d
                        volume += d
                else:
                    live[i] = live[-1]
                    live.pop()
                    continue
            apps += 1
            if trace is not None:
                trace.append(f"step={step_no} rule={rule.text} volume={volume}")
        return apps, volume

    limit = DEFAULT_BUDGET if budget is None else budget
    while True:
        candidates = [p for p in prepped_all if _prepped_applicable(counts, p)]
        if not candidates:
            return apps, volume
        prep = candidates[rng.randrange(len(candidates))]
        rule = prep[3]
        for o, d in rule.delta:
            counts[o] += d
            volume += d
        apps += 1
        if trace is not None:
            trace.append(f"step={step_no} rule={rule.text} volume={volume}")
        if apps > limit:
            raise BudgetExceeded(
                f"exceeded {limit} rule applications; rule set is not void-only"
            )


class _PreparedRules:
    """Per-program preprocessing shared across runs."""

    def __init__(self, program: StepProgram):
        self.prepped = tuple(_prep_rule(r) for r in program.rules)
        self.all_void = all(
            classify_rule(r).family
            in (RuleFamily.TRUE_VOID, RuleFamily.CATALYTIC_VOID)
            for r in program.rules
        )
        # Steps at which each species is added: fixed additions plus
        # either input-encoding choice at step 0.
        n = len(program.alphabet)
        adds: list[set[int]] = [set() for _ in range(n)]
        for k, vec in enumerate(program.steps):
            for o, c in enumerate(vec):
                if c:
                    adds[o].add(k)
        for zero, one in program.input_encoding.values():
            for name, _ in (zero, one):
                adds[program.alphabet.ordinal(name)].add(0)
        # A rule can first fire once every reactant has been added, and —
        # applicability being monotone decreasing between additions for
        # void rules — can only revive at a step that re-adds one of its
        # reactants.  Rules with an unaddable reactant never fire.
        by_step: dict[int, list] = {}
        for prep in self.prepped:
            reactant_adds = [adds[o] for o, _ in prep[3].reactants]
            if any(not s for s in reactant_adds):
                continue
            ready = max(min(s) for s in reactant_adds)
            entries = {ready}
            for s in reactant_adds:
                entries.update(k for k in s if k > ready)
            for k in entries:
                by_step.setdefault(k, []).append(prep)
        self.candidates_by_step = by_step


_PREP_CACHE: dict[int, tuple[StepProgram, _PreparedRules]] = {}


def _prepared(program: StepProgram) -> _PreparedRules:
    hit = _PREP_CACHE.get(id(program))
    if hit is not None and hit[0] is program:
        return hit[1]
    prep = _PreparedRules(program)
    if len(_PREP_CACHE) > 64:
        _PREP_CACHE.clear()
    _PREP_CACHE[id(program)] = (program, prep)
    return prep


# -- public operations ---------------------------------------------------------


def run_step(
    config: Configuration,
    additions: Mapping[str, int] | Configuration,
    rules: Iterable[Rule],
    sched: Schedule = Schedule(),
    *,
    budget: int | None = None,
) -> Configuration:
    """Add species to a configuration, then run rules to a terminal."""
    rules = tuple(rules)
    counts = list(config.counts)
    if isinstance(additions, Configuration):
        add_items = enumerate(additions.counts)
    else:
        add_items = (
            (config.alphabet.ordinal(name), c) for name, c in additions.items()
        )
    for o, c in add_items:
        if c < 0:
            raise ValueError("additions must be non-negative")
        counts[o] += c
    prepped = [_prep_rule(r) for r in rules]
    all_void = all(
        classify_rule(r).family in (RuleFamily.TRUE_VOID, RuleFamily.CATALYTIC_VOID)
        for r in rules
    )
    rng = random.Random(sched.seed)
    live = [p for p in prepped if _prepped_applicable(counts, p)]
    _run_to_terminal(
        counts,
        live,
        rng,
        all_void=all_void,
        prepped_all=prepped,
        budget=budget,
    )
    return Configuration(config.alphabet, tuple(counts))


def _input_bits(program: StepProgram, bits) -> dict[int, int]:
    if isinstance(bits, Mapping):
        chosen = {int(k): int(v) for k, v in bits.items()}
    else:
        seq = [int(b) for b in str(bits)] if isinstance(bits, str) else [int(b) for b in bits]
        if len(seq) != len(program.input_order):
            raise ValueError(
                f"expected {len(program.input_order)} input bits, got {len(seq)}"
            )
        chosen = dict(zip(program.input_order, seq))
    if set(chosen) != set(program.input_order):
        raise ValueError("input bits do not match the program's inputs")
    if any(v not in (0, 1) for v in chosen.values()):
        raise ValueError("input bits must be 0 or 1")
    return chosen


def run_program(
    program: StepProgram,
    bits,
    sched: Schedule = Schedule(),
    *,
    trace: bool = False,
    budget: int | None = None,
) -> RunResult:
    """Execute every step of the program and decode the final terminal."""
    chosen = _input_bits(program, bits)
    prep = _prepared(program)
    rng = random.Random(sched.seed)
    n = len(program.alphabet)
    counts = [0] * n
    volume = 0
    peak = 0
    apps_total = 0
    trace_lines: list[str] | None = [] if trace else None
    per_step: list[Configuration] = []
    live: list = []
    in_live: set[int] = set()

    for k, vec in enumerate(program.steps):
        for o, c in enumerate(vec):
            if c:
                counts[o] += c
                volume += c
        if k == 0:
            for gid in program.input_order:
                name, count = program.input_encoding[gid][chosen[gid]]
                o = program.alphabet.ordinal(name)
                counts[o] += count
                volume += count
        peak = max(peak, volume)
        if prep.all_void:
            for p in prep.candidates_by_step.get(k, ()):
                key = id(p)
                if key not in in_live:
                    in_live.add(key)
                    live.append(p)
            before = len(live)
            apps, volume = _run_to_terminal(
                counts,
                live,
                rng,
                all_void=True,
                trace=trace_lines,
                step_no=k,
                volume=volume,
            )
            if len(live) != before:
                in_live = {id(p) for p in live}
        else:
            apps, volume = _run_to_terminal(
                counts,
                [],
                rng,
                all_void=False,
                prepped_all=prep.prepped,
                budget=budget,
                trace=trace_lines,
                step_no=k,
                volume=volume,
            )
        apps_total += apps
        per_step.append(Configuration(program.alphabet, tuple(counts)))

    final = per_step[-1] if per_step else Configuration(program.alphabet, tuple(counts))
    decoded = decode_output(final, program)
    return RunResult(
        final=final,
        per_step_terminal=tuple(per_step),
        peak_volume=peak,
        step_count=len(program.steps),
        applications=apps_total,
        decoded=tuple(decoded),
        trace=tuple(trace_lines) if trace_lines is not None else None,
    )


def decode_output(config: Configuration, program: StepProgram) -> list[object]:
    """Decode each declared output from a terminal configuration.

    An output decodes to 1 when its 1-species is present and its
    0-species absent (0 symmetric); otherwise the entry is the string
    ``"ambiguous"`` or ``"missing"``.
    """
    out: list[object] = []
    for zero, one in program.output_decoding:
        c0 = config.get(zero)
        c1 = config.get(one)
        if c1 >= 1 and c0 == 0:
            out.append(1)
        elif c0 >= 1 and c1 == 0:
            out.append(0)
        elif c0 and c1:
            out.append("ambiguous")
        else:
            out.append("missing")
    return out


# -- exhaustive enumeration ------------------------------------------------------


def enumerate_terminals(
    config: Configuration,
    rules: Iterable[Rule],
    state_cap: int = DEFAULT_STATE_CAP,
) -> set[Configuration]:
    """Exact set of terminal configurations reachable from ``config``.

    Exhaustive search over the rule-application graph with memoization
    on the configuration vector; raises :class:`StateCapExceeded` when
    more than ``state_cap`` distinct configurations are visited.
    """
    prepped = [_prep_rule(r) for r in tuple(rules)]
    terminals: set[tuple[int, ...]] = set()
    start = tuple(config.counts)
    visited: set[tuple[int, ...]] = {start}
    stack = [start]
    while stack:
        cur = stack.pop()
        successors = _successors(cur, prepped)
        if not successors:
            terminals.add(cur)
            continue
        for nxt in successors:
            if nxt not in visited:
                if len(visited) >= state_cap:
                    raise StateCapExceeded(
                        f"more than {state_cap} configurations reachable"
                    )
                visited.add(nxt)
                stack.append(nxt)
    return {Configuration(config.alphabet, t) for t in terminals}


def _successors(counts: tuple[int, ...], prepped) -> set[tuple[int, ...]]:
    out: set[tuple[int, ...]] = set()
    for prep in prepped:
        if _prepped_applicable(counts, prep):
            nxt = list(counts)
            for o, d in prep[3].delta:
                nxt[o] += d
            out.add(tuple(nxt))
    return out


def enumerate_program_terminals(
    program: StepProgram,
    bits,
    state_cap: int = DEFAULT_STATE_CAP,
    entry_volume_cap: int | None = None,
) -> set[Configuration]:
    """Exact set of final terminal configurations over all schedules.

    Lifts :func:`enumerate_terminals` over the step sequence: every
    terminal of step k, combined with step k+1's additions, seeds the
    next exploration.  ``entry_volume_cap`` aborts (with
    :class:`StateCapExceeded`) when any step entry exceeds the cap,
    signalling the instance is too large for exhaustive mode.
    """
    chosen = _input_bits(program, bits)
    prepped = [_prep_rule(r) for r in program.rules]
    n = len(program.alphabet)

    frontier: set[tuple[int, ...]] = {(0,) * n}
    for k, vec in enumerate(program.steps):
        add = list(vec)
        if k == 0:
            for gid in program.input_order:
                name, count = program.input_encoding[gid][chosen[gid]]
                add[program.alphabet.ordinal(name)] += count
        entries: set[tuple[int, ...]] = set()
        for term in frontier:
            entry = tuple(t + a for t, a in zip(term, add))
            if entry_volume_cap is not None and sum(entry) > entry_volume_cap:
                raise StateCapExceeded(
                    f"step {k} entry volume {sum(entry)} exceeds cap {entry_volume_cap}"
                )
            entries.add(entry)
        terminals: set[tuple[int, ...]] = set()
        visited: set[tuple[int, ...]] = set(entries)
        stack = list(entries)
        while stack:
            cur = stack.pop()
            successors = _successors(cur, prepped)
            if not successors:
                terminals.add(cur)
                continue
            for nxt in successors:
                if nxt not in visited:
                    if len(visited) >= state_cap:
                        raise StateCapExceeded(
                            f"more than {state_cap} configurations reachable"
                        )
                    visited.add(nxt)
                    stack.append(nxt)
        frontier = terminals
    return {Configuration(program.alphabet, t) for t in frontier}


# -- serialization ----------------------------------------------------------------


def program_to_text(program: StepProgram) -> str:
    lines = [f"program {program.name}", f"backend: {program.backend}"]
    lines.append("alphabet: " + " ".join(program.alphabet.names))
    lines.append("rules:")
    lines.extend(r.text for r in program.rules)
    lines.append("steps:")
    names = program.alphabet.names
    for k, vec in enumerate(program.steps):
        parts = ", ".join(f"{names[o]}={c}" for o, c in enumerate(vec) if c)
        lines.append(f"step {k}: {parts}")
    lines.append("inputs:")
    for gid in program.input_order:
        (sp0, n0), (sp1, n1) = program.input_encoding[gid]
        lines.append(f"{gid} 0={sp0}:{n0} 1={sp1}:{n1}")
    lines.append("outputs:")
    for j, (sp0, sp1) in enumerate(program.output_decoding):
        lines.append(f"{j} 0={sp0} 1={sp1}")
    return "\n".join(lines) + "\n"


def program_from_text(text: str) -> StepProgram:
    name = "program"
    backend = "unknown"
    alphabet: Alphabet | None = None
    rules: list[Rule] = []
    steps: list[tuple[int, ...]] = []
    input_order: list[int] = []
    input_encoding: dict[int, tuple[tuple[str, int], tuple[str, int]]] = {}
    output_decoding: list[tuple[str, str]] = []
    section = None
    for raw in text.splitlines():
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if line.startswith("program "):
            name = line.split(None, 1)[1]
            continue
        if line.startswith("backend:"):
            backend = line.split(":", 1)[1].strip()
            continue
        if line.startswith("alphabet:"):
            alphabet = Alphabet(line.split(":", 1)[1].split())
            continue
        if line == "rules:":
            section = "rules"
            continue
        if line == "steps:":
            section = "steps"
            continue
        if line == "inputs:":
            section = "inputs"
            continue
        if line == "outputs:":
            section = "outputs"
            continue
        if line.startswith("step ") and section in ("steps", "rules"):
            section = "steps"
        if alphabet is None:
            raise ValueError("program file must declare its alphabet first")
        if section == "rules":
            rules.append(parse_rule(line, alphabet))
        elif section == "steps":
            head, _, rest = line.partition(":")
            k = int(head.split()[1])
            if k != len(steps):
                raise ValueError(f"steps out of order at {line!r}")
            vec = [0] * len(alphabet)
            rest = rest.strip()
            if rest:
                for item in rest.split(","):
                    sp, _, cnt = item.strip().partition("=")
                    vec[alphabet.ordinal(sp)] += int(cnt)
            steps.append(tuple(vec))
        elif section == "inputs":
            parts = line.split()
            gid = int(parts[0])
            enc: dict[int, tuple[str, int]] = {}
            for part in parts[1:]:
                bit, _, rest2 = part.partition("=")
                sp, _, cnt = rest2.partition(":")
                enc[int(bit)] = (sp, int(cnt))
            input_order.append(gid)
            input_encoding[gid] = (enc[0], enc[1])
        elif section == "outputs":
            parts = line.split()
            pair: dict[int, str] = {}
            for part in parts[1:]:
                bit, _, sp = part.partition("=")
                pair[int(bit)] = sp
            output_decoding.append((pair[0], pair[1]))
        else:
            raise ValueError(f"unexpected line outside any section: {line!r}")
    if alphabet is None:
        raise ValueError("program file has no alphabet")
    return StepProgram(
        name=name,
        backend=backend,
        alphabet=alphabet,
        rules=tuple(rules),
        steps=tuple(steps),
        input_order=tuple(input_order),
        input_encoding=input_encoding,
        output_decoding=tuple(output_decoding),
    )
