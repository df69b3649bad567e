"""DAG associahedra: CI structures, submodular functions, path matroids and
ordering-based causal search, all in exact arithmetic."""

__version__ = "0.1.0"

from .ci import (
    CIRelation,
    CIStructure,
    is_gaussoid,
    is_graphoid,
    is_mss_monotone,
    is_semigraphoid,
    parse_ci_text,
)
from .graphs import (
    Edge,
    MixedGraph,
    d_separated,
    essential_graph,
    find_bayes_ball_path,
    m_separated,
    separation_ci,
    simplify_path,
)
from .setfunction import (
    SetFunction,
    dual_flip,
    facet_incidence,
    float_incidence_heuristic,
    greedy_vertex,
    h_representation,
    is_submodular,
    permutation_classes,
    semigraphoid_of,
)
from .matroid import PathMatroid, matroid_from_path, matroid_semigraphoid, msmp_associahedron
from .gaussian import faithful_gaussian, gaussian_ci, gaussian_setfunction, gram, lambda_from_dag, multiinformation
from .causal import (
    DSepOracle,
    ExplicitOracle,
    covered_edges,
    exhaustive_sp,
    greedy_sp_covered,
    greedy_sp_permutohedron,
    minimal_imap,
)
from .estimator import SparsestPermutation

__all__ = [
    "CIRelation", "CIStructure", "is_semigraphoid", "is_graphoid", "is_gaussoid", "is_mss_monotone",
    "parse_ci_text", "Edge", "MixedGraph", "d_separated", "m_separated", "separation_ci",
    "find_bayes_ball_path", "simplify_path", "essential_graph", "SetFunction", "dual_flip",
    "greedy_vertex", "h_representation", "is_submodular", "semigraphoid_of", "permutation_classes",
    "facet_incidence", "float_incidence_heuristic", "PathMatroid", "matroid_from_path",
    "matroid_semigraphoid", "msmp_associahedron", "lambda_from_dag", "gram", "gaussian_ci",
    "multiinformation", "gaussian_setfunction", "faithful_gaussian", "DSepOracle", "ExplicitOracle",
    "minimal_imap", "covered_edges", "greedy_sp_permutohedron", "greedy_sp_covered", "exhaustive_sp",
    "SparsestPermutation",
]
