"""Fractal Goodstein processes over base hierarchies.

Multi-base hereditary notation, upgrade operators between hierarchies,
successor and self-feeding hierarchy constructions, and a term-level
ordinal calculus with two collapses that turns runs of the process into
machine-checkable termination certificates and lower-bound witness chains.
"""

from .hierarchy import (
    DEFAULT_HORIZON,
    FiniteHierarchy,
    Hierarchy,
    HorizonError,
    LazyHierarchy,
)
from .interpretations import (
    IotaProvenance,
    PsiInterpretation,
    ThetaInterpretation,
    fs_witness,
    majorize_witness,
    o_from_digits,
)
from .numerals import (
    DEFAULT_BUDGET,
    INFINITY,
    BitBudget,
    BudgetExceededError,
    Decomposition,
    base_change,
    decompose,
    digits,
    superexp,
)
from .ordinal_terms import (
    BIG_OMEGA,
    CNT_ONE,
    CNT_ZERO,
    OMEGA,
    OMEGA_ORD,
    ONE,
    ZERO,
    Atom,
    Cofinality,
    CntTerm,
    OrdTerm,
    OrdinalError,
    big_f,
    cofinality,
    compare,
    compare_cnt,
    fund_seq,
    fund_seq_cnt,
    is_psi_normal_form,
    natural_sum,
    omega_monomial,
    omega_tower,
    parse_term,
    psi,
    step_down,
    term_to_str,
    theta,
)
from .runner import (
    ChainReport,
    RunResult,
    StepRecord,
    VerifyReport,
    hierarchy_from_spec,
    lower_bound_chain,
    run,
    verify_trace,
    write_trace,
)
from .successors import (
    DynamicalHierarchy,
    PlusHierarchy,
    d_sequence,
    dynamical,
    ouroboros_stage,
)
from .upgrade import UpgradeContext, check_good_successor, deep_base_change, upgrade

__version__ = "0.1.0"

__all__ = [
    "Atom",
    "BIG_OMEGA",
    "BitBudget",
    "BudgetExceededError",
    "ChainReport",
    "CNT_ONE",
    "CNT_ZERO",
    "CntTerm",
    "Cofinality",
    "DEFAULT_BUDGET",
    "DEFAULT_HORIZON",
    "Decomposition",
    "DynamicalHierarchy",
    "FiniteHierarchy",
    "Hierarchy",
    "HorizonError",
    "INFINITY",
    "IotaProvenance",
    "LazyHierarchy",
    "OMEGA",
    "OMEGA_ORD",
    "ONE",
    "OrdTerm",
    "OrdinalError",
    "PlusHierarchy",
    "PsiInterpretation",
    "RunResult",
    "StepRecord",
    "ThetaInterpretation",
    "UpgradeContext",
    "VerifyReport",
    "ZERO",
    "base_change",
    "big_f",
    "check_good_successor",
    "cofinality",
    "compare",
    "compare_cnt",
    "d_sequence",
    "decompose",
    "deep_base_change",
    "digits",
    "dynamical",
    "fs_witness",
    "fund_seq",
    "fund_seq_cnt",
    "hierarchy_from_spec",
    "is_psi_normal_form",
    "lower_bound_chain",
    "majorize_witness",
    "natural_sum",
    "o_from_digits",
    "omega_monomial",
    "omega_tower",
    "ouroboros_stage",
    "parse_term",
    "psi",
    "run",
    "step_down",
    "superexp",
    "term_to_str",
    "theta",
    "upgrade",
    "verify_trace",
    "write_trace",
]
