"""Minimum controller counts for structural controllability of networks.

Compute maximum matchings of the bipartite view of a directed network --
exactly (Hopcroft-Karp) or with fast randomized heuristics (Greedy,
Karp-Sipser, one-sided Karp-Sipser) -- and compare the resulting
controller counts against analytic predictions for random-network models
(generating-function fixed points, Poisson closed forms, exact Greedy
pmf, degree-dynamics ODEs).
"""

from .errors import ConvergenceError, InputError
from .graph import (
    BipartiteNet,
    ControlConfig,
    Matching,
    control_config,
    degree_histogram,
    from_directed_edges,
    from_undirected_edges,
    validate_matching,
)
from .algorithms import (
    RunStats,
    brute_force_max,
    controllers,
    greedy,
    karp_sipser,
    max_matching,
    one_sided_karp_sipser,
    run_algorithm,
)
from .generators import (
    DegreeDist,
    GenSpec,
    gen_chung_lu,
    gen_dd,
    gen_er,
    gen_ufs,
    generate,
    rewire_preserving_degrees,
)
from .asymptotics import (
    FixedPointSolution,
    GenFunc,
    PoissonKS,
    eval_mgf,
    greedy_asymptotic,
    greedy_pmf_directed_er,
    predict_controllers,
    solve_fixed_point,
    solve_poisson_ks,
)
from .dynamics import (
    DegreeState,
    OdeSpec,
    Trajectory,
    compare_discrete,
    fraction_time_no_deg1,
    integrate,
    vector_field,
)
from .ingest import EdgeListFile, ParseReport, parse_edge_list, write_edge_list
from .experiments import McSummary, monte_carlo, run_table

__all__ = [
    "DegreeDist",
    "DegreeState",
    "EdgeListFile",
    "FixedPointSolution",
    "GenFunc",
    "GenSpec",
    "McSummary",
    "OdeSpec",
    "ParseReport",
    "PoissonKS",
    "Trajectory",
    "compare_discrete",
    "eval_mgf",
    "fraction_time_no_deg1",
    "gen_chung_lu",
    "gen_dd",
    "gen_er",
    "gen_ufs",
    "generate",
    "greedy_asymptotic",
    "greedy_pmf_directed_er",
    "integrate",
    "monte_carlo",
    "parse_edge_list",
    "predict_controllers",
    "rewire_preserving_degrees",
    "run_table",
    "solve_fixed_point",
    "solve_poisson_ks",
    "vector_field",
    "write_edge_list",
    "BipartiteNet",
    "ControlConfig",
    "ConvergenceError",
    "InputError",
    "Matching",
    "RunStats",
    "brute_force_max",
    "control_config",
    "controllers",
    "degree_histogram",
    "from_directed_edges",
    "from_undirected_edges",
    "greedy",
    "karp_sipser",
    "max_matching",
    "one_sided_karp_sipser",
    "run_algorithm",
    "validate_matching",
]

__version__ = "0.1.0"
