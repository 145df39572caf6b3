import pytest

from stepcrn import (
    Alphabet,
    Configuration,
    GateKind,
    Rule,
    RuleFamily,
    Schedule,
    classify_rule,
    compile_circuit_catalyst,
    compile_circuit_exp,
    compile_formula,
    decode_output,
    encode_input,
    enumerate_program_terminals,
    enumerate_terminals,
    evaluate,
    lower_gate,
    normalize,
    parse_circuit,
    run_program,
)
from stepcrn.lowering import LoweringError

FIG_FORMULA = """
circuit fig
gate 1 INPUT
gate 2 INPUT
gate 3 INPUT
gate 4 INPUT
gate 5 AND 1 2
gate 6 AND 3 4
gate 7 OR 5 6
outputs 7
"""

FANOUT2_AND = """
circuit fanout2
gate 3 INPUT
gate 2 INPUT
gate 1 AND 3 2
outputs 1 1
"""


def _step_dict(prog, k):
    return {
        prog.alphabet.names[o]: c for o, c in enumerate(prog.steps[k]) if c
    }


# -- lower_gate ---------------------------------------------------------------


def test_lower_and_gate():
    low = lower_gate(GateKind.AND, 4, (1, 2, 3))
    assert low.steps_used == 1
    assert low.additions[0] == {
        "y[4]T": 1, "y[1->4]F": 1, "y[2->4]F": 1, "y[3->4]F": 1,
    }
    assert ("x[1]T", "y[1->4]F") in low.rules
    assert ("x[1]F", "y[4]T") in low.rules


def test_lower_not_with_multiplicity():
    low = lower_gate(GateKind.NOT, 2, (1,), multiplicity=3)
    assert low.additions[0] == {"y[2]T": 3, "y[2]F": 3}
    assert set(low.rules) == {("x[1]T", "y[2]T"), ("x[1]F", "y[2]F")}


def test_lower_maj_three_steps():
    low = lower_gate(GateKind.MAJ, 9, (1, 2, 3))
    assert low.steps_used == 3
    assert low.additions[0] == {"a[9]T": 3, "a[9]F": 3}
    assert low.additions[1] == {"b[9]T": 1, "b[9]F": 1}
    assert low.additions[2] == {"y[9]T": 1, "y[9]F": 1}


def test_lower_maj_even_fan_in_pads_false():
    low = lower_gate(GateKind.MAJ, 9, (1, 2, 3, 4))
    assert low.additions[0] == {"a[9]T": 4, "a[9]F": 5}
    assert low.additions[1] == {"b[9]T": 2, "b[9]F": 2}


def test_lower_gate_rejects_sources():
    with pytest.raises(LoweringError):
        lower_gate(GateKind.INPUT, 1, ())


# -- formula backend -------------------------------------------------------------


def test_formula_five_steps_match_reference_table():
    prog, report = compile_formula(parse_circuit(FIG_FORMULA))
    assert prog.step_count == 5
    assert _step_dict(prog, 0) == {
        "x[1]T": 1, "x[1]F": 1, "x[2]T": 1, "x[2]F": 1,
        "x[3]T": 1, "x[3]F": 1, "x[4]T": 1, "x[4]F": 1,
    }
    assert _step_dict(prog, 1) == {
        "y[5]T": 1, "y[1->5]F": 1, "y[2->5]F": 1,
        "y[6]T": 1, "y[3->6]F": 1, "y[4->6]F": 1,
    }
    assert _step_dict(prog, 2) == {"x[5]T": 1, "x[5]F": 1, "x[6]T": 1, "x[6]F": 1}
    assert _step_dict(prog, 3) == {"y[5->7]T": 1, "y[6->7]T": 1, "y[7]F": 1}
    assert _step_dict(prog, 4) == {"x[7]T": 1, "x[7]F": 1}
    assert run_program(prog, "1001", Schedule(0)).decoded == (0,)
    assert report.buffers.total == 0


def test_formula_single_and_step_skeleton():
    prog, _ = compile_formula(
        parse_circuit("circuit a\ngate 1 INPUT\ngate 2 INPUT\ngate 3 AND 1 2\noutputs 3\n")
    )
    # initial conversion, gate step, output conversion
    assert prog.step_count == 3


def test_formula_single_maj_step_skeleton():
    prog, _ = compile_formula(
        parse_circuit(
            "circuit m\ngate 1 INPUT\ngate 2 INPUT\ngate 3 INPUT\ngate 9 MAJ 1 2 3\noutputs 9\n"
        )
    )
    # initial conversion, three majority steps, output conversion
    assert prog.step_count == 5


def test_formula_backend_rejects_circuits():
    with pytest.raises(LoweringError):
        compile_formula(parse_circuit(FANOUT2_AND))


def test_formula_input_encoding():
    prog, _ = compile_formula(
        parse_circuit("circuit a\ngate 1 INPUT\ngate 2 INPUT\ngate 3 AND 1 2\noutputs 3\n")
    )
    assert encode_input(prog, "10") == {"y[1]T": 1, "y[2]F": 1}


def test_constant_circuit_empty_merge():
    prog, _ = compile_formula(
        parse_circuit("circuit k\ngate 1 CONST_ONE\ngate 2 NOT 1\noutputs 2\n")
    )
    assert encode_input(prog, "") == {}
    assert run_program(prog, "", Schedule(0)).decoded == (0,)


# -- exponential-volume backend ----------------------------------------------------


def test_exp_fanout_two_copies():
    c = parse_circuit(FANOUT2_AND)
    prog, report = compile_circuit_exp(c)
    assert report.demand[1] == 2 and report.max_input_multiplicity == 2
    assert encode_input(prog, "10") == {"y[3]T": 2, "y[2]F": 2}
    result = run_program(prog, "10", Schedule(0))
    assert result.per_step_terminal[1].as_dict() == {"y[2->1]F": 2}
    assert result.decoded == (0, 0)


def test_exp_equals_formula_on_formulas():
    c = parse_circuit(FIG_FORMULA)
    p1, _ = compile_formula(c)
    p2, _ = compile_circuit_exp(c)
    assert p1.steps == p2.steps
    assert [r.text for r in p1.rules] == [r.text for r in p2.rules]
    assert p1.alphabet == p2.alphabet
    assert p1.input_encoding == p2.input_encoding
    assert p1.output_decoding == p2.output_decoding


def test_exp_binary_chain_demand_grows():
    lines = ["circuit chain", "gate 1 INPUT"]
    prev, gid = [1], 2
    for _ in range(3):
        nxt = []
        for p in prev:
            for _ in range(2):
                lines.append(f"gate {gid} NOT {p}")
                nxt.append(gid)
                gid += 1
        prev = nxt
    lines.append("outputs " + " ".join(map(str, prev)))
    _, report = compile_circuit_exp(parse_circuit("\n".join(lines)))
    assert report.max_input_multiplicity == 8


# -- catalyst backend ---------------------------------------------------------------


def test_catalyst_cycle_and_decode():
    c = parse_circuit(FANOUT2_AND)
    prog, report = compile_circuit_catalyst(c)
    # strict inputs: one copy each
    assert encode_input(prog, "10") == {"y[3]T": 1, "y[2]F": 1}
    result = run_program(prog, "10", Schedule(1))
    assert result.decoded == (0, 0)
    # deleters gone, every spent carrier swept: only the decode copies remain
    assert result.final.as_dict() == {"x[1]F": 2}


def test_catalyst_single_not():
    c = parse_circuit("circuit n\ngate 1 INPUT\ngate 2 NOT 1\noutputs 2\n")
    prog, report = compile_circuit_catalyst(c)
    r = run_program(prog, "1", Schedule(0))
    assert r.decoded == (0,)
    assert r.peak_volume <= 8 * max(report.normalized.width, 1)


def test_catalyst_matches_formula_decodes():
    c = parse_circuit(FIG_FORMULA)
    pf, _ = compile_formula(c)
    pc, _ = compile_circuit_catalyst(c)
    for i in range(16):
        bits = [(i >> k) & 1 for k in range(4)]
        want = tuple(evaluate(c, bits))
        assert run_program(pf, bits, Schedule(2)).decoded == want
        assert run_program(pc, bits, Schedule(2)).decoded == want


def test_catalyst_early_output_survives():
    # output at level 1 of a depth-2 circuit must not be swept
    c = parse_circuit(
        "circuit e\ngate 1 INPUT\ngate 2 INPUT\ngate 3 AND 1 2\ngate 4 NOT 3\noutputs 3 4\n"
    )
    prog, report = compile_circuit_catalyst(c)
    assert report.buffers.output_align_buffers == 1
    for bits in ("00", "01", "10", "11"):
        assert run_program(prog, bits, Schedule(0)).decoded == tuple(evaluate(c, bits))


# -- rule discipline ---------------------------------------------------------------


def test_void_backends_emit_only_true_void_pairs():
    for compiler in (compile_formula, compile_circuit_exp):
        prog, _ = compiler(parse_circuit(FIG_FORMULA))
        for rule in prog.rules:
            cls = classify_rule(rule)
            assert cls.family is RuleFamily.TRUE_VOID and cls.size == (2, 0)


def test_catalyst_emits_only_void_families():
    prog, _ = compile_circuit_catalyst(parse_circuit(FANOUT2_AND))
    sizes = set()
    for rule in prog.rules:
        cls = classify_rule(rule)
        sizes.add((cls.size, cls.family))
    assert sizes <= {
        ((2, 0), RuleFamily.TRUE_VOID),
        ((2, 1), RuleFamily.CATALYTIC_VOID),
    }
    assert ((2, 1), RuleFamily.CATALYTIC_VOID) in sizes


def _owning_gate(name):
    # y[j->i]b is owned by gate i; y[i]b / a[i]b / b[i]b by gate i
    if name.startswith(("y[", "a[", "b[")):
        return int(name.split("]")[0].split("->")[-1].lstrip("yab["))
    return None


def test_gate_species_not_shared_between_lowerings():
    # no rule couples result carriers of two different gates; gates talk
    # only through the x[...] conversion species
    for compiler in (compile_formula, compile_circuit_exp, compile_circuit_catalyst):
        circuit = parse_circuit(FIG_FORMULA)
        prog, _ = compiler(circuit)
        for rule in prog.rules:
            owners = {
                _owning_gate(prog.alphabet.names[o])
                for o, _ in rule.reactants
            } - {None}
            assert len(owners) <= 1, rule.text


def test_each_species_added_at_one_step():
    for compiler in (compile_formula, compile_circuit_exp):
        prog, _ = compiler(parse_circuit(FIG_FORMULA))
        seen = {}
        for k, vec in enumerate(prog.steps):
            for o, c in enumerate(vec):
                if c:
                    assert seen.setdefault(o, k) == k
    prog, _ = compile_circuit_catalyst(parse_circuit(FIG_FORMULA))
    seen = {}
    for k, vec in enumerate(prog.steps):
        for o, c in enumerate(vec):
            if not c:
                continue
            name = prog.alphabet.names[o]
            if name in ("dx", "dy"):
                continue
            assert seen.setdefault(o, k) == k


def test_completion_order_strictly_increases_along_paths():
    c = parse_circuit(FIG_FORMULA)
    for compiler in (compile_formula, compile_circuit_exp, compile_circuit_catalyst):
        prog, report = compiler(c)
        norm, _ = normalize(c, align_outputs=(compiler is compile_circuit_catalyst))
        for w in norm.wires:
            assert report.completion_step[w.producer] < report.completion_step[w.consumer]


# -- majority-input isolation -----------------------------------------------------


CLASH = """
circuit clash
gate 1 INPUT
gate 2 INPUT
gate 3 INPUT
gate 4 INPUT
gate 5 AND 3 4
gate 6 MAJ 1 2 3
outputs 5 6
"""


def test_vote_pools_can_skew_without_isolation():
    # Raw tables with a shared producer: the AND's true-output pool dies
    # to one false input, freeing the other false input's copy to eat an
    # extra vote carrier.  This is why normalize() buffers MAJ inputs.
    names = [
        "x[1]T", "x[2]T", "x[3]F", "x[4]F",
        "y[5]T", "y[3->5]F", "y[4->5]F",
        "a[6]T", "a[6]F",
    ]
    ab = Alphabet(names)
    rules = [
        Rule.make(ab, ("x[3]F", "y[5]T")),
        Rule.make(ab, ("x[4]F", "y[5]T")),
        Rule.make(ab, ("x[1]T", "a[6]F")),
        Rule.make(ab, ("x[2]T", "a[6]F")),
        Rule.make(ab, ("x[3]F", "a[6]T")),
    ]
    entry = Configuration.from_dict(
        ab,
        {
            "x[1]T": 1, "x[2]T": 1, "x[3]F": 2, "x[4]F": 1,
            "y[5]T": 1, "y[3->5]F": 1, "y[4->5]F": 1,
            "a[6]T": 3, "a[6]F": 3,
        },
    )
    pools = {
        (t.get("a[6]T"), t.get("a[6]F")) for t in enumerate_terminals(entry, rules)
    }
    assert (2, 1) in pools  # the intended 2:1 tally
    assert (1, 1) in pools  # the skewed dead heat the buffers prevent


def test_isolated_maj_inputs_are_confluent():
    c = parse_circuit(CLASH)
    bits = "1100"
    want = tuple(evaluate(c, bits))
    for compiler in (compile_circuit_exp, compile_circuit_catalyst):
        prog, report = compiler(c)
        assert report.buffers.maj_input_buffers == 1
        terms = enumerate_program_terminals(prog, bits, state_cap=500_000)
        assert {tuple(decode_output(t, prog)) for t in terms} == {want}


def test_normalize_spans_every_wire_one_level():
    c = parse_circuit(
        "circuit skip\ngate 1 INPUT\ngate 2 INPUT\ngate 3 AND 1 2\ngate 4 OR 3 1\noutputs 4\n"
    )
    norm, info = normalize(c)
    assert info.wire_span_buffers == 1
    for w in norm.wires:
        assert norm.level[w.consumer] - norm.level[w.producer] == 1


def test_compiled_species_follow_the_grammar():
    from stepcrn.crn import SPECIES_RE

    for compiler in (compile_formula, compile_circuit_exp, compile_circuit_catalyst):
        circuit = parse_circuit(FIG_FORMULA if compiler is compile_formula else CLASH)
        prog, _ = compiler(circuit)
        for name in prog.alphabet.names:
            assert SPECIES_RE.match(name), name


def test_report_renders():
    _, report = compile_circuit_exp(parse_circuit(FANOUT2_AND))
    text = report.to_text()
    assert "backend=exp" in text and "static_volume=" in text
    obj = report.to_json_obj()
    assert obj["demand"]["1"] == 2
