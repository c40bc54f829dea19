"""Expansive automata networks, their orbit arrays, and the MDS codes they induce."""

from .algebra import Matrix, RingSpec, make_ring, mat_det, mat_pow, mat_rank, parse_matrix, format_matrix
from .coding import Code, OrthogonalArray, check_oa, generator_matrix, is_mds, min_distance, orbit_array
from .constructions import (
    build,
    bush_gate,
    cycle_of_cycles_network,
    cycle_with_loops_network,
    linear_field_threshold,
    nonsingular_matrix_for_graph,
    prop5_network,
    primitive_mult_network,
    random_linear_strategy,
    super_expansive_search,
    twisted_lex_network,
)
from .errors import *  # noqa: F401,F403
from .expansivity import (
    expansion_frequency,
    expansion_time,
    is_expansive,
    is_expansive_linear,
    is_quasi_expansive,
    is_strongly_expansive,
    is_super_expansive,
    is_super_expansive_linear,
    is_weakly_expansive,
    linear_certificate,
    tau_pair,
)
from .graphs import Digraph, cycle_decomposition, is_coverable, is_strong, term_rank
from .networks import (
    Network,
    apply,
    cartesian_product,
    from_ca_rule,
    interaction_graph,
    iterate,
    load_fixture,
    parse_network,
    format_network,
    trace,
    xor_network,
)

__version__ = "0.1.0"
