"""Property-based checks over random configurations, rules, and circuits."""

import random

from hypothesis import given, settings
from hypothesis import strategies as st

from stepcrn import (
    Alphabet,
    Configuration,
    GateKind,
    Rule,
    RuleFamily,
    Schedule,
    applicable,
    apply_rule,
    classify_rule,
    decode_output,
    demand_analysis,
    enumerate_program_terminals,
    evaluate,
    run_program,
    run_step,
    stats,
)
from stepcrn.circuits import max_fanout_any
from stepcrn.corpus import CorpusSpec, generate_circuits
from stepcrn.lowering import compile_backend

AB = Alphabet([f"s{i}" for i in range(6)])

sparse_counts = st.dictionaries(
    st.sampled_from(AB.names), st.integers(min_value=1, max_value=4), max_size=4
)
configs = sparse_counts.map(lambda d: Configuration.from_dict(AB, d))
rules = st.tuples(
    sparse_counts.filter(lambda d: d),
    sparse_counts,
).map(lambda rp: Rule(AB, tuple(sorted((AB.ordinal(n), c) for n, c in rp[0].items())),
                      tuple(sorted((AB.ordinal(n), c) for n, c in rp[1].items()))))


@given(configs, rules)
def test_apply_never_goes_negative(config, rule):
    if applicable(config, rule):
        out = apply_rule(config, rule)
        assert all(c >= 0 for c in out.counts)


@given(configs, rules)
def test_void_application_shrinks_volume_exactly(config, rule):
    cls = classify_rule(rule)
    if cls.family in (RuleFamily.TRUE_VOID, RuleFamily.CATALYTIC_VOID) and applicable(
        config, rule
    ):
        out = apply_rule(config, rule)
        i, j = cls.size
        assert config.volume - out.volume == i - j


@given(st.integers(min_value=0, max_value=10_000))
def test_void_runs_halt_within_entry_volume(seed):
    rng = random.Random(seed)
    names = [f"s{i}" for i in range(5)]
    ab = Alphabet(names)
    pool = []
    for a in names:
        for b in names:
            pool.append(Rule.make(ab, (a, b)) if a != b else Rule.make(ab, {a: 2}))
    chosen = rng.sample(pool, k=rng.randint(1, 6))
    counts = {n: rng.randint(0, 5) for n in names}
    start = Configuration.from_dict(ab, counts)
    out = run_step(start, {}, chosen, Schedule(seed))
    # each application removes two copies, so the run halted within volume/2 steps
    assert out.volume <= start.volume
    assert all(c >= 0 for c in out.counts)


def _eval_recursive(circuit, bits):
    """Independent oracle: memoized recursion instead of the library's
    iterative topological pass."""
    assign = dict(zip(circuit.input_ids, bits))
    memo = {}

    def value(gid):
        if gid in memo:
            return memo[gid]
        g = circuit.by_id[gid]
        if g.kind is GateKind.INPUT:
            v = assign[gid]
        elif g.kind is GateKind.CONST_ZERO:
            v = 0
        elif g.kind is GateKind.CONST_ONE:
            v = 1
        else:
            ins = [value(r) for r in g.inputs]
            if g.kind is GateKind.AND:
                v = min(ins)
            elif g.kind is GateKind.OR:
                v = max(ins)
            elif g.kind is GateKind.NOT:
                v = 1 - ins[0]
            else:
                votes_true = sum(ins)
                votes_false = len(ins) - votes_true + (len(ins) + 1) % 2
                v = 1 if votes_true > votes_false else 0
        memo[gid] = v
        return v

    return [value(o) for o in circuit.outputs]


@settings(deadline=None, max_examples=30)
@given(st.integers(min_value=0, max_value=10_000), st.booleans())
def test_evaluate_matches_truth_table_oracle(seed, formula_mode):
    spec = CorpusSpec(
        count=1,
        seed=seed,
        depth=(1, 4),
        gates=(1, 10),
        fan_in=(1, 3),
        fan_out=(1, 1) if formula_mode else (1, 3),
        inputs=(1, 8),
        maj_fraction=0.4,
    )
    (circuit,) = generate_circuits(spec)
    n = len(circuit.input_ids)
    for i in range(1 << n):
        bits = [(i >> k) & 1 for k in range(n)]
        assert evaluate(circuit, bits) == _eval_recursive(circuit, bits)


def _paths_to_outputs(circuit, gid):
    memo = {}

    def paths(g):
        if g not in memo:
            memo[g] = circuit.outputs.count(g) + sum(
                paths(w.consumer) for w in circuit.consumer_wires[g]
            )
        return memo[g]

    return paths(gid)


@settings(deadline=None, max_examples=30)
@given(st.integers(min_value=0, max_value=10_000))
def test_demand_equals_output_path_count(seed):
    spec = CorpusSpec(
        count=1, seed=seed, depth=(1, 3), gates=(1, 12), fan_in=(1, 3),
        fan_out=(1, 3), inputs=(1, 5),
    )
    (circuit,) = generate_circuits(spec)
    demand = demand_analysis(circuit)
    for gid in circuit.by_id:
        assert demand[gid] == _paths_to_outputs(circuit, gid)


@settings(deadline=None, max_examples=30)
@given(st.integers(min_value=0, max_value=10_000))
def test_input_demand_bounded_by_fanout_power_depth(seed):
    spec = CorpusSpec(
        count=1, seed=seed, depth=(1, 4), gates=(2, 14), fan_in=(1, 3),
        fan_out=(1, 3), inputs=(2, 5),
    )
    (circuit,) = generate_circuits(spec)
    st_ = stats(circuit)
    demand = demand_analysis(circuit)
    bound = max(max_fanout_any(circuit), 1) ** st_.depth
    assert max(demand[g] for g in circuit.input_ids) <= bound


@settings(deadline=None, max_examples=12)
@given(
    st.integers(min_value=0, max_value=10_000),
    st.sampled_from(["formula", "exp", "catalyst"]),
)
def test_runs_reproducible_and_correct(seed, backend):
    spec = CorpusSpec(
        count=1, seed=seed, depth=(1, 3), gates=(1, 8), fan_in=(1, 2),
        fan_out=(1, 1) if backend == "formula" else (1, 2),
        inputs=(1, 4), maj_fraction=0.3 if backend == "formula" else 0.0,
    )
    (circuit,) = generate_circuits(spec)
    program, _ = compile_backend(circuit, backend)
    n = len(circuit.input_ids)
    rng = random.Random(seed)
    bits = [rng.randint(0, 1) for _ in range(n)]
    want = tuple(evaluate(circuit, bits))
    first = run_program(program, bits, Schedule(17), trace=True)
    second = run_program(program, bits, Schedule(17), trace=True)
    assert first == second
    assert first.decoded == want
    for other_seed in range(6):
        assert run_program(program, bits, Schedule(other_seed)).decoded == want


@settings(deadline=None, max_examples=10)
@given(st.integers(min_value=0, max_value=10_000))
def test_small_programs_decode_uniformly_over_all_schedules(seed):
    spec = CorpusSpec(
        count=1, seed=seed, depth=(1, 2), gates=(1, 3), fan_in=(1, 2),
        fan_out=(1, 2), inputs=(1, 3), maj_fraction=0.25,
    )
    (circuit,) = generate_circuits(spec)
    n = len(circuit.input_ids)
    for backend in ("exp", "catalyst"):
        program, _ = compile_backend(circuit, backend)
        for i in range(1 << n):
            bits = [(i >> k) & 1 for k in range(n)]
            want = tuple(evaluate(circuit, bits))
            terminals = enumerate_program_terminals(program, bits, state_cap=200_000)
            assert {tuple(decode_output(t, program)) for t in terminals} == {want}
