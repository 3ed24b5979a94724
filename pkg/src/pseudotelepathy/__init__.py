"""Exact analysis of bipartite nonlocal games and the Magic Square Bell inequality."""

__version__ = "0.1.0"

from .bell import (
    BellExpression,
    InequalityForm,
    NoiseFigures,
    magic_square_inequality,
    noise_resistance,
    uniform_noise_value,
)
from .games import (
    DeterministicStrategy,
    Encoding,
    GameRelation,
    MagicSquareTable,
    TripleOutcome,
    classical_value,
    count_deterministic,
    is_classically_winnable,
    magic_square_game,
    table_to_strategy,
    winnable_2xn,
)
from .polytope import PolytopeParams, cg_dimension, is_facet, rank_exact, saturating_vertices, strategy_to_cg
from .quantum import (
    ProjectiveMeasurement,
    QuantumStrategy,
    SignedPauliString,
    StateVector,
    extract_classical_strategy,
    joint_measurement,
    magic_square_quantum_strategy,
    mermin_peres_square,
    winning_probability,
)
