"""Robust arbitrage detection, superhedging and optional decomposition on
finite scenario trees, with exact rational LP duality throughout."""

from .arbitrage import (
    ArbitrageFound,
    FtapWitness,
    NodeNaReport,
    find_dominating_mm,
    global_na,
    node_na,
    semistatic_na,
    verify_witness,
)
from .decompose import (
    AdaptedProcess,
    Decomposition,
    NotSupermartingale,
    Violation,
    check_supermartingale,
    confirm_by_sampling,
    optional_decomposition,
    verify_decomposition,
)
from .lp import (
    EXACT,
    Constraint,
    FarkasCertificate,
    Infeasible,
    LinearProgram,
    Mode,
    NumericalBreakdown,
    Optimal,
    Unbounded,
    float_mode,
    linear_program,
    solve,
    verify,
    zero_in_relative_interior,
)
from .model import (
    AmbiguitySet,
    Claim,
    DanglingChildReference,
    DimensionMismatch,
    MalformedDocument,
    Measure,
    MissingKernel,
    Model,
    ModelError,
    Node,
    PathMeasure,
    ProbabilityNotNormalized,
    ScenarioTree,
    StaticOption,
    Strategy,
    load_model,
    product_measure,
    save_model,
    wealth,
)
from .oracle import (
    BrutePrice,
    EmptyPolytope,
    InstanceTooLarge,
    MartingalePolytope,
    brute_price,
    enumerate_vertices,
    one_step_vertices,
)
from .polar import (
    SupportMask,
    compute_support,
    is_polar,
    reference_kernels,
    reference_measure,
)
from .superhedge import (
    ArbitrageDetected,
    LagrangeGap,
    LocalArbitrage,
    NotReplicable,
    PriceInterval,
    Proved,
    Refuted,
    Replicable,
    ValueSurface,
    check_complete,
    check_replicable,
    dual_price,
    lagrange_check,
    node_price,
    price_interval,
    prove_inequality,
    superhedge_dynamic,
    superhedge_semistatic,
)

__all__ = [
    "AdaptedProcess",
    "AmbiguitySet",
    "ArbitrageDetected",
    "ArbitrageFound",
    "BrutePrice",
    "Claim",
    "Constraint",
    "DanglingChildReference",
    "Decomposition",
    "DimensionMismatch",
    "EXACT",
    "EmptyPolytope",
    "FarkasCertificate",
    "FtapWitness",
    "Infeasible",
    "InstanceTooLarge",
    "LagrangeGap",
    "LinearProgram",
    "LocalArbitrage",
    "MalformedDocument",
    "MartingalePolytope",
    "Measure",
    "MissingKernel",
    "Mode",
    "Model",
    "ModelError",
    "Node",
    "NodeNaReport",
    "NotReplicable",
    "NotSupermartingale",
    "NumericalBreakdown",
    "Optimal",
    "PathMeasure",
    "PriceInterval",
    "ProbabilityNotNormalized",
    "Proved",
    "Refuted",
    "Replicable",
    "ScenarioTree",
    "StaticOption",
    "Strategy",
    "SupportMask",
    "Unbounded",
    "ValueSurface",
    "Violation",
    "brute_price",
    "check_complete",
    "check_replicable",
    "check_supermartingale",
    "compute_support",
    "confirm_by_sampling",
    "dual_price",
    "enumerate_vertices",
    "find_dominating_mm",
    "float_mode",
    "global_na",
    "is_polar",
    "lagrange_check",
    "linear_program",
    "load_model",
    "node_na",
    "node_price",
    "one_step_vertices",
    "optional_decomposition",
    "price_interval",
    "product_measure",
    "prove_inequality",
    "reference_kernels",
    "reference_measure",
    "save_model",
    "semistatic_na",
    "solve",
    "superhedge_dynamic",
    "superhedge_semistatic",
    "verify",
    "verify_decomposition",
    "verify_witness",
    "wealth",
    "zero_in_relative_interior",
]
