"""Analysis of two-party nonlocal games, entangled strategies and the
communication protocols they induce."""

from .commsim import (
    chromatic_number,
    coloring_protocol,
    cost_bounds,
    orthogonal_representation_hadamard,
    simulate_protocol,
    strategy_to_protocol,
)
from .games import (
    Graph,
    NonlocalGame,
    classical_value,
    detect_weak_projection,
    hadamard_graph,
    make_bcs_game,
    make_coloring_game,
    make_homomorphism_game,
    tilde_transform,
)
from .linalg import bipartite_expectation, commutator_norm, schmidt_decompose, support_projector, vec_map
from .strategies import (
    QuantumStrategy,
    block_direct_sum_strategy,
    fourier_strategy_hadamard,
    is_perfect,
    lift_strategy_tilde,
    magic_square_strategy,
    structure_report,
    substitute_max_entangled,
    verify_corollary1,
    verify_lemma2,
    winning_probability,
)

__version__ = "0.1.0"
