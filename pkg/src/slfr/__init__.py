"""Linear coded caching for scalar linear function retrieval.

Construction of the placement/delivery scheme, closed-form decoding
coefficients, constraint graphs on the encoding coefficients, greedy
free-coefficient selection, and exact brute-force verification.
"""

from .field import GF, FieldElement, FieldSpec
from .linalg import FqMatrix, cramer_component, det, matmul, rank, solve
from .scheme import (
    Library,
    Placement,
    SchemeParams,
    TransformedDemand,
    delta_header,
    demand_block,
    make_placement,
    measured_load,
    select_leaders,
    theoretical_load,
    user_cache,
    worst_case_demand,
)
from .codec import (
    DecodingCoefficients,
    EncodingCoefficients,
    MulticastMessage,
    all_beta,
    build_messages,
    check_feasibility,
    closed_form_beta,
    closed_form_beta_tilde,
    hierarchy_recursion_beta,
    phi_sign,
    reconstruct_unsent,
    user_decode,
    wan_alpha,
)
from .graph import (
    CoefficientStatus,
    ConstraintGraph,
    CycleRelation,
    Monomial,
    build_graph,
    component_dot,
    extract_cycle_constraint,
    greedy_free_coefficients,
    propagate_values,
    random_feasible_alpha,
    spanning_tree,
)
from .harness import OracleResult, TrialReport, oracle_beta, simulate, sweep

__version__ = "0.1.0"
