"""Threshold-circuit intermediate representation.

Circuits are DAGs of AND/OR/NOT/MAJ gates over INPUT and constant source
gates, with arbitrary fan-in and fan-out.  This module owns parsing
(netlist text and an equivalent JSON form), validation, reference
evaluation, structural statistics, and the per-gate copy-demand analysis
used by the circuit compilers.

Netlist format (line oriented, ``#`` starts a comment):

    circuit <name>
    gate <id> <KIND> [input ids...]
    outputs <id> [<id> ...]

The JSON form is an object with keys ``name``, ``gates`` (array of
``{"id":..., "kind":..., "inputs":[...]}``) and ``outputs``.  The parser
auto-detects JSON by a leading ``{``.

Conventions fixed here and relied on everywhere else:

* Input bits are assigned to INPUT gates in netlist declaration order.
* A gate's fan-out counts its outgoing wires plus its occurrences in the
  output list (an output designation consumes one copy of the result).
* MAJ with an even number of input wires gets one implicit constant-0
  vote, so ties resolve to 0.  The compilers implement the same padding,
  keeping evaluator and compiled programs aligned by construction.
"""
from __future__ import annotations

import json
from dataclasses import dataclass
from enum import Enum
from typing import Iterable, Mapping, Sequence


class CircuitError(ValueError):
    """A structurally invalid circuit."""


class NetlistParseError(CircuitError):
    """A malformed circuit document; ``line`` is 1-based when known."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        super().__init__(f"line {line}: {message}" if line is not None else message)


class GateKind(Enum):
    INPUT = "INPUT"
    CONST_ZERO = "CONST_ZERO"
    CONST_ONE = "CONST_ONE"
    AND = "AND"
    OR = "OR"
    NOT = "NOT"
    MAJ = "MAJ"


SOURCE_KINDS = frozenset({GateKind.INPUT, GateKind.CONST_ZERO, GateKind.CONST_ONE})


@dataclass(frozen=True)
class Gate:
    gid: int
    kind: GateKind
    inputs: tuple[int, ...] = ()


@dataclass(frozen=True)
class Wire:
    """One directed edge.  ``slot`` disambiguates duplicate edges and
    ``index`` is the rank of (producer, consumer, slot) in lexicographic
    order, giving every wire a deterministic unique number."""

    producer: int
    consumer: int
    slot: int
    index: int


@dataclass(frozen=True)
class CircuitStats:
    gate_count: int
    depth: int
    max_fanout: int
    width: int


class Circuit:
    """A validated gate DAG.  Immutable after construction and safe to
    share across workers."""

    def __init__(self, name: str, gates: Iterable[Gate], outputs: Sequence[int]):
        self.name = str(name)
        self.gates = tuple(gates)
        self.outputs = tuple(int(o) for o in outputs)
        self._validate()

    # -- construction helpers -------------------------------------------------

    def _validate(self) -> None:
        if not self.gates:
            raise CircuitError("circuit has no gates")
        if not self.outputs:
            raise CircuitError("circuit has no outputs")

        by_id: dict[int, Gate] = {}
        for g in self.gates:
            if g.gid <= 0:
                raise CircuitError(f"gate id must be positive, got {g.gid}")
            if g.gid in by_id:
                raise CircuitError(f"duplicate gate id {g.gid}")
            by_id[g.gid] = g
        self.by_id = by_id

        for g in self.gates:
            if g.kind in SOURCE_KINDS:
                if g.inputs:
                    raise CircuitError(f"gate {g.gid}: {g.kind.value} takes no inputs")
            elif g.kind is GateKind.NOT:
                if len(g.inputs) != 1:
                    raise CircuitError(
                        f"gate {g.gid}: NOT takes exactly one input, got {len(g.inputs)}"
                    )
            else:
                if len(g.inputs) < 1:
                    raise CircuitError(f"gate {g.gid}: {g.kind.value} needs fan-in >= 1")
            for ref in g.inputs:
                if ref not in by_id:
                    raise CircuitError(f"gate {g.gid}: unknown input gate {ref}")
        for o in self.outputs:
            if o not in by_id:
                raise CircuitError(f"unknown output gate {o}")

        # Topological order / cycle check (Kahn over the multigraph).
        consumers: dict[int, list[tuple[int, int]]] = {g.gid: [] for g in self.gates}
        indeg = {g.gid: len(g.inputs) for g in self.gates}
        for g in self.gates:
            for slot, ref in enumerate(g.inputs):
                consumers[ref].append((g.gid, slot))
        ready = [g.gid for g in self.gates if indeg[g.gid] == 0]
        order: list[int] = []
        level: dict[int, int] = {}
        while ready:
            gid = ready.pop()
            order.append(gid)
            ins = by_id[gid].inputs
            level[gid] = 0 if not ins else 1 + max(level[r] for r in ins)
            for cid, _ in consumers[gid]:
                indeg[cid] -= 1
                if indeg[cid] == 0:
                    ready.append(cid)
        if len(order) != len(self.gates):
            cyclic = sorted(gid for gid, d in indeg.items() if d > 0)
            raise CircuitError(f"cycle detected through gates {cyclic}")
        order.sort(key=lambda gid: (level[gid], gid))
        self.order = tuple(order)
        self.level = level

        # Every gate must feed some output (directly or transitively);
        # dangling subgraphs would compile to dead species.
        live: set[int] = set()
        stack = list(self.outputs)
        while stack:
            gid = stack.pop()
            if gid in live:
                continue
            live.add(gid)
            stack.extend(by_id[gid].inputs)
        dead = sorted(set(by_id) - live)
        if dead:
            raise CircuitError(f"gates {dead} reach no output")

        wires = sorted(
            (ref, g.gid, slot)
            for g in self.gates
            for slot, ref in enumerate(g.inputs)
        )
        self.wires = tuple(
            Wire(p, c, s, i) for i, (p, c, s) in enumerate(wires)
        )
        self.consumer_wires = {gid: tuple(w for w in self.wires if w.producer == gid) for gid in by_id}
        self.input_ids = tuple(g.gid for g in self.gates if g.kind is GateKind.INPUT)

    # -- queries ---------------------------------------------------------------

    def fanout(self, gid: int) -> int:
        return len(self.consumer_wires[gid]) + self.outputs.count(gid)

    def sources(self) -> tuple[Gate, ...]:
        return tuple(g for g in self.gates if g.kind in SOURCE_KINDS)

    def non_sources(self) -> tuple[Gate, ...]:
        return tuple(g for g in self.gates if g.kind not in SOURCE_KINDS)

    @property
    def is_formula(self) -> bool:
        return len(self.outputs) == 1 and all(
            self.fanout(g.gid) == 1 for g in self.non_sources()
        )

    def __repr__(self) -> str:  # pragma: no cover
        return f"Circuit({self.name!r}, gates={len(self.gates)}, outputs={self.outputs})"


# -- operations ------------------------------------------------------------------


def evaluate(circuit: Circuit, assignment) -> list[int]:
    """Evaluate the circuit on one input assignment.

    ``assignment`` is either a sequence of bits aligned with the INPUT
    gates in declaration order, or a mapping from input gate id to bit.
    Returns the output bits aligned with ``circuit.outputs``.
    """
    if isinstance(assignment, Mapping):
        bits = dict(assignment)
    else:
        seq = [int(b) for b in assignment]
        if len(seq) != len(circuit.input_ids):
            raise CircuitError(
                f"expected {len(circuit.input_ids)} input bits, got {len(seq)}"
            )
        bits = dict(zip(circuit.input_ids, seq))
    if set(bits) != set(circuit.input_ids):
        missing = sorted(set(circuit.input_ids) - set(bits))
        extra = sorted(set(bits) - set(circuit.input_ids))
        raise CircuitError(f"bad assignment (missing {missing}, extra {extra})")

    value: dict[int, int] = {}
    for gid in circuit.order:
        g = circuit.by_id[gid]
        if g.kind is GateKind.INPUT:
            value[gid] = 1 if bits[gid] else 0
        elif g.kind is GateKind.CONST_ZERO:
            value[gid] = 0
        elif g.kind is GateKind.CONST_ONE:
            value[gid] = 1
        else:
            ins = [value[r] for r in g.inputs]
            if g.kind is GateKind.AND:
                value[gid] = int(all(ins))
            elif g.kind is GateKind.OR:
                value[gid] = int(any(ins))
            elif g.kind is GateKind.NOT:
                value[gid] = 1 - ins[0]
            else:  # MAJ; even fan-in gets one implicit false vote
                true_votes = sum(ins)
                false_votes = len(ins) - true_votes + (1 if len(ins) % 2 == 0 else 0)
                value[gid] = int(true_votes > false_votes)
    return [value[o] for o in circuit.outputs]


def stats(circuit: Circuit) -> CircuitStats:
    """Structural statistics over the non-source gates."""
    internal = circuit.non_sources()
    if not internal:
        return CircuitStats(gate_count=0, depth=0, max_fanout=0, width=0)
    depth = max(circuit.level[g.gid] for g in internal)
    widths: dict[int, int] = {}
    for g in internal:
        widths[circuit.level[g.gid]] = widths.get(circuit.level[g.gid], 0) + 1
    return CircuitStats(
        gate_count=len(internal),
        depth=depth,
        max_fanout=max(circuit.fanout(g.gid) for g in internal),
        width=max(widths.values()),
    )


def max_fanout_any(circuit: Circuit) -> int:
    """Maximum fan-out over all gates, sources included.  This is the
    figure demand bounds need; :func:`stats` reports fan-out over
    non-source gates only so that formulas (whose sources may fan out
    freely) keep their fan-out-1 characterization."""
    return max(circuit.fanout(g.gid) for g in circuit.gates)


def demand_analysis(circuit: Circuit) -> dict[int, int]:
    """Copies of its result each gate must produce.

    A gate owes one copy per output designation plus, for every outgoing
    wire, the consumer's own demand.  Computed by a backward topological
    pass; covers every gate including sources.
    """
    demand: dict[int, int] = {}
    for gid in reversed(circuit.order):
        d = circuit.outputs.count(gid)
        for w in circuit.consumer_wires[gid]:
            d += demand[w.consumer]
        demand[gid] = d
    return demand


# -- parsing / serialization ------------------------------------------------------


_KINDS = {k.value: k for k in GateKind}


def parse_circuit(text: str) -> Circuit:
    """Parse a circuit document, auto-detecting netlist vs JSON form."""
    stripped = text.lstrip()
    if stripped.startswith("{"):
        try:
            obj = json.loads(text)
        except json.JSONDecodeError as e:
            raise NetlistParseError(f"bad JSON: {e}", line=e.lineno) from e
        return circuit_from_json(obj)
    return _parse_netlist(text)


def _parse_netlist(text: str) -> Circuit:
    name = None
    gates: list[Gate] = []
    outputs: list[int] | None = None
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        head = parts[0]
        if head == "circuit":
            if name is not None:
                raise NetlistParseError("duplicate circuit header", lineno)
            if len(parts) != 2:
                raise NetlistParseError("expected: circuit <name>", lineno)
            name = parts[1]
        elif head == "gate":
            if len(parts) < 3:
                raise NetlistParseError("expected: gate <id> <KIND> [inputs...]", lineno)
            gid = _parse_id(parts[1], lineno)
            kind = _KINDS.get(parts[2])
            if kind is None:
                raise NetlistParseError(f"unknown gate kind {parts[2]!r}", lineno)
            ins = tuple(_parse_id(tok, lineno) for tok in parts[3:])
            gates.append(Gate(gid, kind, ins))
        elif head == "outputs":
            if outputs is not None:
                raise NetlistParseError("duplicate outputs line", lineno)
            if len(parts) < 2:
                raise NetlistParseError("outputs line lists no gates", lineno)
            outputs = [_parse_id(tok, lineno) for tok in parts[1:]]
        else:
            raise NetlistParseError(f"unknown directive {head!r}", lineno)
    if name is None:
        raise NetlistParseError("missing circuit header")
    if outputs is None:
        raise NetlistParseError("missing outputs line")
    return Circuit(name, gates, outputs)


def _parse_id(token: str, lineno: int) -> int:
    try:
        value = int(token)
    except ValueError:
        raise NetlistParseError(f"expected gate id, got {token!r}", lineno) from None
    if value <= 0:
        raise NetlistParseError(f"gate ids are positive, got {value}", lineno)
    return value


def circuit_from_json(obj) -> Circuit:
    try:
        gates = [
            Gate(int(g["id"]), _KINDS[str(g["kind"])], tuple(int(r) for r in g.get("inputs", ())))
            for g in obj["gates"]
        ]
        return Circuit(str(obj.get("name", "circuit")), gates, [int(o) for o in obj["outputs"]])
    except (KeyError, TypeError) as e:
        raise NetlistParseError(f"bad circuit JSON: {e}") from e


def to_netlist(circuit: Circuit) -> str:
    lines = [f"circuit {circuit.name}"]
    for g in circuit.gates:
        ins = "".join(f" {r}" for r in g.inputs)
        lines.append(f"gate {g.gid} {g.kind.value}{ins}")
    lines.append("outputs " + " ".join(str(o) for o in circuit.outputs))
    return "\n".join(lines) + "\n"


def to_json_obj(circuit: Circuit) -> dict:
    return {
        "name": circuit.name,
        "gates": [
            {"id": g.gid, "kind": g.kind.value, "inputs": list(g.inputs)}
            for g in circuit.gates
        ],
        "outputs": list(circuit.outputs),
    }
