"""stepcrn: threshold circuits compiled to stepwise annihilation-rule
reaction programs, with randomized and exhaustive execution and
end-to-end verification against direct evaluation."""

from .circuits import (
    Circuit,
    CircuitError,
    CircuitStats,
    Gate,
    GateKind,
    NetlistParseError,
    Wire,
    demand_analysis,
    evaluate,
    parse_circuit,
    stats,
    to_netlist,
)
from .crn import (
    Alphabet,
    AlphabetMismatch,
    Configuration,
    Rule,
    RuleClass,
    RuleFamily,
    applicable,
    apply_rule,
    classify_rule,
    format_rule,
    is_terminal,
    parse_rule,
)
from .engine import (
    BudgetExceeded,
    RunResult,
    Schedule,
    StateCapExceeded,
    StepProgram,
    decode_output,
    enumerate_program_terminals,
    enumerate_terminals,
    program_from_text,
    program_to_text,
    run_program,
    run_step,
)
from .lowering import (
    CompilationReport,
    GateLowering,
    LoweringError,
    NormalizationInfo,
    compile_backend,
    compile_circuit_catalyst,
    compile_circuit_exp,
    compile_formula,
    encode_input,
    lower_gate,
    normalize,
)
from .lowerbound import (
    StageSpec,
    build_stage_chain,
    build_stage_circuit,
    check_demand_growth,
    fibonacci,
    min_copy_bounds,
)
from .corpus import CorpusSpec, generate_circuits

__version__ = "0.1.0"
