"""balance-lens: directed-graph balance-ratio analytics.

Build or ingest a directed graph, measure how its edges balance the
in-degrees of their endpoints (per-edge ratios, the log-binned balance
profile, positivity), generate seeded power-law test networks, and check
measurements against the piecewise power-law prediction.
"""

__version__ = "0.1.0"

from .errors import (BalanceLensError, ConfigError, EdgeListFormatError,
                     EstimationError, SingularGammaError,
                     UndefinedPositivityError, UsageError)
from .graph import (BuildReport, DirectedGraph, InDegreeHistogram, build_graph,
                    in_degree_histogram)
from .ingest import ReadReport, read_edge_list, write_edge_list
from .generator import (MODELS, DegreeAssignment, GeneratorConfig,
                        assign_degrees_deterministic, assign_degrees_stochastic,
                        generate, realize_edges_bernoulli, realize_edges_exact)
from .metrics import (DEFAULT_ALPHA, RATIO_INFINITE, BalanceProfile,
                      DegreeSlice, EdgeBalanceRecord, balance_profile,
                      bin_average_degrees, bin_of_ratio, degree_slice,
                      edge_balance_ratio, positivity, profile_from_json,
                      profile_to_csv, profile_to_json)
from .theory import (FAR_ABOVE, FAR_BELOW, NEAR_ABOVE, NEAR_BELOW,
                     SECTION_LABELS, ComparisonReport, SectionFit,
                     TheoreticalProfile, TheoryParams, compare_profiles,
                     estimate_gamma, estimate_scale_A, far_above_coefficient,
                     far_below_coefficient, fit_section_slopes, lemma1_count,
                     near_coefficient, section_exponents, theorem1_profile,
                     theory_from_json, theory_to_json)
