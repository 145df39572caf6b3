"""Lowering of threshold circuits to step programs.

Three backends share one per-gate rule scheme:

* ``formula``  — annihilation-only (2,0) rules, one copy of everything;
  accepts fan-out-1 single-output circuits.
* ``exp``      — the same scheme with every addition count for a gate
  scaled by its copy demand, which lets arbitrary fan-out work at the
  price of exponential volume.
* ``catalyst`` — (2,0) rules plus (2,1) catalytic rules; a surviving
  output species stamps its truth value onto as many next-level input
  copies as needed, and deleter species sweep spent species between
  levels, keeping the resident volume proportional to circuit width.

The step skeleton per depth level is: one gate step (three for levels
containing MAJ gates: vote conversion, tally annihilation, output
conversion), then a conversion step that turns surviving output species
into the next level's input species.  Step 0 converts the initial
per-source species; the conversion after the last level produces the
species the decoder reads.

Before lowering, circuits are normalized so that every wire spans
exactly one depth level and every MAJ gate reads from producers that
feed nothing else.  The second condition matters for soundness: the
majority tally counts exact per-input copy contributions, and a shared
producer with spare copies (spare because a sibling consumer's shared
target pool was already emptied by another input) could otherwise dump
those copies into the tally pools under an adversarial schedule and
skew the vote.  Single-consumer buffers make such spares impossible.
Buffering is done with fan-in-1 OR gates and reported.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Mapping, Sequence

from .circuits import (
    Circuit,
    CircuitError,
    CircuitStats,
    Gate,
    GateKind,
    SOURCE_KINDS,
    demand_analysis,
    max_fanout_any,
    stats,
)
from .crn import (
    Alphabet,
    Rule,
    a_name,
    b_name,
    x_name,
    y_arrow_name,
    y_name,
)
from .engine import StepProgram

DELETER_X = "dx"
DELETER_Y = "dy"

# Repo-documented resource-bound constants (see README):
#   species <= SPECIES_C * gates          (formula, exp; +2 deleters catalyst)
#   steps   <= STEPS_C * depth + STEPS_C0 (formula, exp)
#   steps   <= CAT_STEPS_C * depth + CAT_STEPS_C0 (catalyst)
#   volume  <= VOLUME_C * gates           (formula: static and peak)
#   volume  <= VOLUME_C * gates * max_fanout**depth (exp: static)
#   resident volume <= RESIDENT_C * width (catalyst: peak)
# All against the normalized circuit's statistics.
SPECIES_C = 8
STEPS_C = 4
STEPS_C0 = 2
CAT_STEPS_C = 8
CAT_STEPS_C0 = 3
VOLUME_C = 8
RESIDENT_C = 8


class LoweringError(CircuitError):
    """Raised when a circuit cannot be lowered by the chosen backend."""


@dataclass(frozen=True)
class GateLowering:
    """Per-gate additions and annihilation rules, before demand scaling
    is applied to anything but the addition counts."""

    gate_id: int
    kind: GateKind
    steps_used: int
    additions: tuple[dict, ...]  # one dict per gate sub-step
    rules: tuple[tuple[str, str], ...]  # annihilating reactant pairs


@dataclass(frozen=True)
class NormalizationInfo:
    maj_input_buffers: int = 0
    wire_span_buffers: int = 0
    output_align_buffers: int = 0

    @property
    def total(self) -> int:
        return self.maj_input_buffers + self.wire_span_buffers + self.output_align_buffers


@dataclass
class CompilationReport:
    backend: str
    circuit_name: str
    original: CircuitStats
    normalized: CircuitStats
    buffers: NormalizationInfo
    species_count: int
    step_count: int
    static_volume: int
    max_input_multiplicity: int
    demand: dict[int, int]
    predicted: dict[str, int]
    completion_step: dict[int, int] = field(repr=False, default_factory=dict)

    def to_text(self) -> str:
        lines = [
            f"backend={self.backend}",
            f"circuit={self.circuit_name}",
            f"gates={self.normalized.gate_count}",
            f"depth={self.normalized.depth}",
            f"max_fanout={self.normalized.max_fanout}",
            f"width={self.normalized.width}",
            f"buffers_inserted={self.buffers.total}",
            f"species_count={self.species_count}",
            f"step_count={self.step_count}",
            f"static_volume={self.static_volume}",
            f"max_input_multiplicity={self.max_input_multiplicity}",
        ]
        lines += [f"predicted_{k}={v}" for k, v in sorted(self.predicted.items())]
        return "\n".join(lines) + "\n"

    def to_json(self) -> str:
        return json.dumps(self.to_json_obj(), indent=2, sort_keys=True)

    def to_json_obj(self) -> dict:
        return {
            "backend": self.backend,
            "circuit": self.circuit_name,
            "original": vars(self.original).copy(),
            "normalized": vars(self.normalized).copy(),
            "buffers_inserted": self.buffers.total,
            "species_count": self.species_count,
            "step_count": self.step_count,
            "static_volume": self.static_volume,
            "max_input_multiplicity": self.max_input_multiplicity,
            "demand": {str(k): v for k, v in sorted(self.demand.items())},
            "predicted": dict(sorted(self.predicted.items())),
        }


# -- per-gate lowering -------------------------------------------------------


def lower_gate(
    kind: GateKind,
    gate_id: int,
    fan_in: Sequence[int],
    multiplicity: int = 1,
) -> GateLowering:
    """Additions and rules computing one gate at the given output
    multiplicity.  ``fan_in`` lists input gate ids, duplicates allowed;
    rules are count-free so only addition counts scale."""
    if multiplicity < 1:
        raise LoweringError(f"gate {gate_id}: multiplicity must be >= 1")
    m = multiplicity
    fan_in = tuple(fan_in)
    distinct = sorted(set(fan_in))
    if kind is GateKind.AND:
        adds: dict[str, int] = {y_name(gate_id, True): m}
        for j in fan_in:
            arrow = y_arrow_name(j, gate_id, False)
            adds[arrow] = adds.get(arrow, 0) + m
        rules = []
        for j in distinct:
            rules.append((x_name(j, True), y_arrow_name(j, gate_id, False)))
            rules.append((x_name(j, False), y_name(gate_id, True)))
        return GateLowering(gate_id, kind, 1, (adds,), tuple(rules))
    if kind is GateKind.OR:
        adds = {y_name(gate_id, False): m}
        for j in fan_in:
            arrow = y_arrow_name(j, gate_id, True)
            adds[arrow] = adds.get(arrow, 0) + m
        rules = []
        for j in distinct:
            rules.append((x_name(j, False), y_arrow_name(j, gate_id, True)))
            rules.append((x_name(j, True), y_name(gate_id, False)))
        return GateLowering(gate_id, kind, 1, (adds,), tuple(rules))
    if kind is GateKind.NOT:
        (j,) = fan_in
        adds = {y_name(gate_id, True): m, y_name(gate_id, False): m}
        rules = (
            (x_name(j, True), y_name(gate_id, True)),
            (x_name(j, False), y_name(gate_id, False)),
        )
        return GateLowering(gate_id, kind, 1, (adds,), rules)
    if kind is GateKind.MAJ:
        n_raw = len(fan_in)
        pad = 1 if n_raw % 2 == 0 else 0
        n = n_raw + pad
        step1 = {
            a_name(gate_id, True): n_raw * m,
            a_name(gate_id, False): (n_raw + pad) * m,
        }
        step2 = {}
        if n // 2:
            step2 = {b_name(gate_id, True): (n // 2) * m, b_name(gate_id, False): (n // 2) * m}
        step3 = {y_name(gate_id, True): m, y_name(gate_id, False): m}
        rules = []
        for j in distinct:
            rules.append((x_name(j, True), a_name(gate_id, False)))
            rules.append((x_name(j, False), a_name(gate_id, True)))
        rules.append((a_name(gate_id, True), b_name(gate_id, False)))
        rules.append((a_name(gate_id, False), b_name(gate_id, True)))
        rules.append((a_name(gate_id, True), y_name(gate_id, False)))
        rules.append((a_name(gate_id, False), y_name(gate_id, True)))
        return GateLowering(gate_id, kind, 3, (step1, step2, step3), tuple(rules))
    raise LoweringError(f"gate {gate_id}: no lowering for kind {kind.value}")


def _output_forms(circuit: Circuit, gid: int) -> tuple[list[str], list[str]]:
    """Species forms that can carry the gate's result, split into
    (true forms, false forms)."""
    g = circuit.by_id[gid]
    distinct = sorted(set(g.inputs))
    if g.kind is GateKind.AND:
        return [y_name(gid, True)], [y_arrow_name(j, gid, False) for j in distinct]
    if g.kind is GateKind.OR:
        return [y_arrow_name(j, gid, True) for j in distinct], [y_name(gid, False)]
    return [y_name(gid, True)], [y_name(gid, False)]


# -- normalization -----------------------------------------------------------


def normalize(
    circuit: Circuit, *, align_outputs: bool = False
) -> tuple[Circuit, NormalizationInfo]:
    """Insert fan-in-1 OR buffers so every wire spans one depth level
    and every MAJ input comes from a single-consumer producer; with
    ``align_outputs``, additionally route every output to the deepest
    level (the catalyst backend's sweepers would otherwise delete
    earlier outputs)."""
    gates: dict[int, list] = {g.gid: [g.kind, list(g.inputs)] for g in circuit.gates}
    gate_order = [g.gid for g in circuit.gates]
    outputs = list(circuit.outputs)
    next_id = max(gates) + 1
    maj_buffers = 0
    span_buffers = 0
    out_buffers = 0

    def add_buffer(src: int) -> int:
        nonlocal next_id
        gid = next_id
        next_id += 1
        gates[gid] = [GateKind.OR, [src]]
        gate_order.append(gid)
        return gid

    # MAJ inputs from producers with any other obligation get a private
    # buffer, so their copy supply exactly equals their duty at the gate.
    fanout: dict[int, int] = {gid: outputs.count(gid) for gid in gates}
    for kind, ins in gates.values():
        for ref in ins:
            fanout[ref] += 1
    for gid in list(gate_order):
        kind, ins = gates[gid]
        if kind is not GateKind.MAJ:
            continue
        for slot, ref in enumerate(ins):
            if fanout[ref] > 1:
                ins[slot] = add_buffer(ref)
                maj_buffers += 1

    def levels() -> dict[int, int]:
        level: dict[int, int] = {}
        remaining = {gid: len(ins) for gid, (_, ins) in gates.items()}
        consumers: dict[int, list[int]] = {gid: [] for gid in gates}
        for gid, (_, ins) in gates.items():
            for ref in ins:
                consumers[ref].append(gid)
        ready = [gid for gid, r in remaining.items() if r == 0]
        while ready:
            gid = ready.pop()
            _, ins = gates[gid]
            level[gid] = 0 if not ins else 1 + max(level[r] for r in ins)
            for cid in consumers[gid]:
                remaining[cid] -= 1
                if remaining[cid] == 0:
                    ready.append(cid)
        return level

    level = levels()
    for gid in list(gate_order):
        _, ins = gates[gid]
        for slot, ref in enumerate(ins):
            gap = level[gid] - level[ref]
            while gap > 1:
                ref = add_buffer(ref)
                level[ref] = level[gates[ref][1][0]] + 1
                gap -= 1
                span_buffers += 1
            ins[slot] = ref

    if align_outputs:
        level = levels()
        depth = max(level.values(), default=0)
        for i, o in enumerate(outputs):
            cur = o
            while level[cur] < depth:
                nxt = add_buffer(cur)
                level[nxt] = level[cur] + 1
                cur = nxt
                out_buffers += 1
            outputs[i] = cur

    norm = Circuit(
        circuit.name,
        [Gate(gid, gates[gid][0], tuple(gates[gid][1])) for gid in gate_order],
        outputs,
    )
    info = NormalizationInfo(maj_buffers, span_buffers, out_buffers)
    return norm, info


# -- shared assembly ---------------------------------------------------------


def _levels_of(circuit: Circuit) -> list[list[int]]:
    """Non-source gate ids grouped by depth level (1-based), each group
    in declaration order."""
    depth = max((circuit.level[g.gid] for g in circuit.non_sources()), default=0)
    groups: list[list[int]] = [[] for _ in range(depth + 1)]
    for g in circuit.gates:
        if g.kind not in SOURCE_KINDS:
            groups[circuit.level[g.gid]].append(g.gid)
    return groups


def _species_for(circuit: Circuit, deleters: bool) -> Alphabet:
    names: list[str] = []
    for g in circuit.gates:
        gid = g.gid
        if g.kind in SOURCE_KINDS:
            names += [y_name(gid, True), y_name(gid, False)]
        elif g.kind is GateKind.MAJ:
            names += [
                a_name(gid, True), a_name(gid, False),
                b_name(gid, True), b_name(gid, False),
                y_name(gid, True), y_name(gid, False),
            ]
        else:
            true_forms, false_forms = _output_forms(circuit, gid)
            names += true_forms + false_forms
        names += [x_name(gid, True), x_name(gid, False)]
    if deleters:
        names += [DELETER_X, DELETER_Y]
    return Alphabet(names)


def _const_bit(kind: GateKind) -> bool:
    return kind is GateKind.CONST_ONE


def _source_merges(circuit: Circuit, demand: Mapping[int, int]) -> dict[str, int]:
    """Fixed step-0 additions for constant sources."""
    merges: dict[str, int] = {}
    for g in circuit.sources():
        if g.kind is not GateKind.INPUT:
            merges[y_name(g.gid, _const_bit(g.kind))] = demand[g.gid]
    return merges


def _dense(alphabet: Alphabet, adds: Mapping[str, int]) -> tuple[int, ...]:
    vec = [0] * len(alphabet)
    for name, c in adds.items():
        vec[alphabet.ordinal(name)] += c
    return tuple(vec)


def _check_addition_discipline(program: StepProgram) -> None:
    """Every non-deleter species is added at exactly one step, so a rule
    can never fire after the step its reactants were meant for: once
    that step reaches a terminal, one reactant is gone for good.  The
    deleter pair is the sanctioned exception (two consecutive single
    additions that annihilate)."""
    add_steps: dict[int, list[int]] = {}
    for k, vec in enumerate(program.steps):
        for o, c in enumerate(vec):
            if c:
                add_steps.setdefault(o, []).append(k)
    for pair in program.input_encoding.values():
        for name, _ in pair:
            add_steps.setdefault(program.alphabet.ordinal(name), []).append(0)
    for o, steps_at in add_steps.items():
        name = program.alphabet.names[o]
        if name in (DELETER_X, DELETER_Y):
            if any(b - a != 1 for a, b in zip(steps_at[::2], steps_at[1::2])):
                raise LoweringError(f"deleter {name} additions are not paired")
            continue
        if len(set(steps_at)) > 1:
            raise LoweringError(
                f"species {name} added at several steps {sorted(set(steps_at))}"
            )


def _base_report(
    backend: str,
    circuit: Circuit,
    norm: Circuit,
    info: NormalizationInfo,
    program: StepProgram,
    demand: Mapping[int, int],
    predicted: dict[str, int],
    completion: dict[int, int],
) -> CompilationReport:
    return CompilationReport(
        backend=backend,
        circuit_name=circuit.name,
        original=stats(circuit),
        normalized=stats(norm),
        buffers=info,
        species_count=len(program.alphabet),
        step_count=program.step_count,
        static_volume=program.static_volume(),
        max_input_multiplicity=max(
            (demand[g.gid] for g in norm.sources()), default=0
        ),
        demand=dict(demand),
        predicted=predicted,
        completion_step=completion,
    )


# -- (2,0) backends ----------------------------------------------------------


def _compile_void(circuit: Circuit, backend: str) -> tuple[StepProgram, CompilationReport]:
    norm, info = normalize(circuit)
    demand = demand_analysis(norm)
    alphabet = _species_for(norm, deleters=False)
    levels = _levels_of(norm)

    rules: list[Rule] = []

    def void(u: str, v: str) -> None:
        rules.append(Rule.make(alphabet, (u, v)))

    for g in norm.sources():
        true_forms, false_forms = [y_name(g.gid, True)], [y_name(g.gid, False)]
        for f in true_forms:
            void(f, x_name(g.gid, False))
        for f in false_forms:
            void(f, x_name(g.gid, True))

    lowerings: dict[int, GateLowering] = {}
    for group in levels[1:]:
        for gid in group:
            g = norm.by_id[gid]
            low = lower_gate(g.kind, gid, g.inputs, demand[gid])
            lowerings[gid] = low
            for u, v in low.rules:
                void(u, v)
        for gid in group:
            true_forms, false_forms = _output_forms(norm, gid)
            for f in true_forms:
                void(f, x_name(gid, False))
            for f in false_forms:
                void(f, x_name(gid, True))

    steps: list[tuple[int, ...]] = []
    completion: dict[int, int] = {}

    s0: dict[str, int] = dict(_source_merges(norm, demand))
    for g in norm.sources():
        s0[x_name(g.gid, True)] = s0.get(x_name(g.gid, True), 0) + demand[g.gid]
        s0[x_name(g.gid, False)] = s0.get(x_name(g.gid, False), 0) + demand[g.gid]
        completion[g.gid] = 0
    steps.append(_dense(alphabet, s0))

    for group in levels[1:]:
        sub_steps = max(lowerings[gid].steps_used for gid in group)
        for sub in range(sub_steps):
            adds: dict[str, int] = {}
            for gid in group:
                low = lowerings[gid]
                if sub < low.steps_used:
                    for name, c in low.additions[sub].items():
                        adds[name] = adds.get(name, 0) + c
                if sub == low.steps_used - 1:
                    completion[gid] = len(steps)
            steps.append(_dense(alphabet, adds))
        convert: dict[str, int] = {}
        for gid in group:
            convert[x_name(gid, True)] = demand[gid]
            convert[x_name(gid, False)] = demand[gid]
        steps.append(_dense(alphabet, convert))

    input_encoding = {
        g.gid: ((y_name(g.gid, False), demand[g.gid]), (y_name(g.gid, True), demand[g.gid]))
        for g in norm.gates
        if g.kind is GateKind.INPUT
    }
    program = StepProgram(
        name=circuit.name,
        backend=backend,
        alphabet=alphabet,
        rules=tuple(rules),
        steps=tuple(steps),
        input_order=norm.input_ids,
        input_encoding=input_encoding,
        output_decoding=tuple(
            (x_name(o, False), x_name(o, True)) for o in norm.outputs
        ),
    )
    _check_addition_discipline(program)

    st = stats(norm)
    gate_count = max(st.gate_count, 1)
    depth = max(st.depth, 1)
    predicted = {
        "species": SPECIES_C * gate_count,
        "steps": STEPS_C * depth + STEPS_C0,
    }
    if backend == "formula":
        predicted["static_volume"] = VOLUME_C * gate_count
        predicted["peak_volume"] = VOLUME_C * gate_count
    else:
        fanout = max(max_fanout_any(norm), 1)
        predicted["static_volume"] = VOLUME_C * gate_count * fanout**depth
    report = _base_report(backend, circuit, norm, info, program, demand, predicted, completion)
    return program, report


def compile_formula(circuit: Circuit) -> tuple[StepProgram, CompilationReport]:
    """Lower a formula (all non-source fan-out 1, single output)."""
    if not circuit.is_formula:
        raise LoweringError(
            "formula backend needs fan-out 1 everywhere and a single output"
        )
    return _compile_void(circuit, "formula")


def compile_circuit_exp(circuit: Circuit) -> tuple[StepProgram, CompilationReport]:
    """Lower an arbitrary circuit; every gate's additions are scaled by
    its copy demand, so input multiplicities grow with fan-out and
    depth."""
    return _compile_void(circuit, "exp")


# -- catalyst backend ----------------------------------------------------------


def compile_circuit_catalyst(circuit: Circuit) -> tuple[StepProgram, CompilationReport]:
    """Lower a circuit with (2,0) gate rules plus (2,1) catalytic
    conversion and sweeper rules; strict single-copy inputs."""
    norm, info = normalize(circuit, align_outputs=True)
    alphabet = _species_for(norm, deleters=True)
    levels = _levels_of(norm)

    # Demand degenerates to fan-out copies of each gate's input carrier.
    copies = {g.gid: norm.fanout(g.gid) for g in norm.gates}

    rules: list[Rule] = []

    def void(u: str, v: str) -> None:
        rules.append(Rule.make(alphabet, (u, v)))

    def catalytic(catalyst: str, consumed: str) -> None:
        rules.append(Rule.make(alphabet, (catalyst, consumed), (catalyst,)))

    lowerings: dict[int, GateLowering] = {}
    for group in levels[1:]:
        for gid in group:
            g = norm.by_id[gid]
            low = lower_gate(g.kind, gid, g.inputs, 1)
            lowerings[gid] = low
            for u, v in low.rules:
                void(u, v)

    all_forms: dict[int, tuple[list[str], list[str]]] = {}
    for g in norm.gates:
        if g.kind in SOURCE_KINDS:
            all_forms[g.gid] = ([y_name(g.gid, True)], [y_name(g.gid, False)])
        else:
            all_forms[g.gid] = _output_forms(norm, g.gid)
    for g in norm.gates:
        true_forms, false_forms = all_forms[g.gid]
        for f in true_forms:
            catalytic(f, x_name(g.gid, False))
        for f in false_forms:
            catalytic(f, x_name(g.gid, True))

    for g in norm.gates:
        catalytic(DELETER_X, x_name(g.gid, True))
        catalytic(DELETER_X, x_name(g.gid, False))
        if g.kind is GateKind.MAJ:
            for bit in (True, False):
                catalytic(DELETER_X, a_name(g.gid, bit))
                catalytic(DELETER_X, b_name(g.gid, bit))
    rules.append(Rule.make(alphabet, {DELETER_X: 2}))
    for g in norm.gates:
        for f in all_forms[g.gid][0] + all_forms[g.gid][1]:
            catalytic(DELETER_Y, f)
    rules.append(Rule.make(alphabet, {DELETER_Y: 2}))

    steps: list[tuple[int, ...]] = []
    completion: dict[int, int] = {}

    s0: dict[str, int] = dict(_source_merges(norm, {g.gid: 1 for g in norm.gates}))
    for g in norm.sources():
        s0[x_name(g.gid, True)] = s0.get(x_name(g.gid, True), 0) + copies[g.gid]
        s0[x_name(g.gid, False)] = s0.get(x_name(g.gid, False), 0) + copies[g.gid]
        completion[g.gid] = 0
    steps.append(_dense(alphabet, s0))
    steps.append(_dense(alphabet, {DELETER_Y: 1}))
    steps.append(_dense(alphabet, {DELETER_Y: 1}))

    for group in levels[1:]:
        sub_steps = max(lowerings[gid].steps_used for gid in group)
        for sub in range(sub_steps):
            adds: dict[str, int] = {}
            for gid in group:
                low = lowerings[gid]
                if sub < low.steps_used:
                    for name, c in low.additions[sub].items():
                        adds[name] = adds.get(name, 0) + c
                if sub == low.steps_used - 1:
                    completion[gid] = len(steps)
            steps.append(_dense(alphabet, adds))
        steps.append(_dense(alphabet, {DELETER_X: 1}))
        steps.append(_dense(alphabet, {DELETER_X: 1}))
        fan: dict[str, int] = {}
        for gid in group:
            fan[x_name(gid, True)] = copies[gid]
            fan[x_name(gid, False)] = copies[gid]
        steps.append(_dense(alphabet, fan))
        steps.append(_dense(alphabet, {DELETER_Y: 1}))
        steps.append(_dense(alphabet, {DELETER_Y: 1}))

    input_encoding = {
        g.gid: ((y_name(g.gid, False), 1), (y_name(g.gid, True), 1))
        for g in norm.gates
        if g.kind is GateKind.INPUT
    }
    program = StepProgram(
        name=circuit.name,
        backend="catalyst",
        alphabet=alphabet,
        rules=tuple(rules),
        steps=tuple(steps),
        input_order=norm.input_ids,
        input_encoding=input_encoding,
        output_decoding=tuple(
            (x_name(o, False), x_name(o, True)) for o in norm.outputs
        ),
    )
    _check_addition_discipline(program)

    st = stats(norm)
    predicted = {
        "species": SPECIES_C * max(st.gate_count, 1) + 2,
        "steps": CAT_STEPS_C * max(st.depth, 1) + CAT_STEPS_C0,
        "peak_volume": RESIDENT_C * max(st.width, 1),
    }
    demand = {g.gid: 1 for g in norm.gates}
    report = _base_report("catalyst", circuit, norm, info, program, demand, predicted, completion)
    return program, report


# -- input encoding ------------------------------------------------------------


def encode_input(program: StepProgram, bits) -> dict[str, int]:
    """The demand-scaled species merged into step 0 for an input
    assignment; never contains both polarity species of one input."""
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
        raise ValueError("assignment does not cover the program's inputs")
    merge: dict[str, int] = {}
    for gid in program.input_order:
        name, count = program.input_encoding[gid][chosen[gid]]
        merge[name] = merge.get(name, 0) + count
    return merge


def compile_backend(circuit: Circuit, backend: str):
    if backend == "formula":
        return compile_formula(circuit)
    if backend == "exp":
        return compile_circuit_exp(circuit)
    if backend == "catalyst":
        return compile_circuit_catalyst(circuit)
    raise ValueError(f"unknown backend {backend!r}")
