"""Every published number, recomputed and compared against its tolerance."""

from __future__ import annotations

import math
import time
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable

import numpy as np

from . import bell, games, polytope, quantum
from .io import format_fraction, format_float


@dataclass(frozen=True)
class Check:
    name: str
    expected: str
    observed: str
    passed: bool
    tolerance: str
    seconds: float

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        return f"{status}  {self.name}: observed {self.observed}, expected {self.expected} ({self.tolerance})"


def _show(v) -> str:
    if isinstance(v, Fraction):
        return format_fraction(v)
    if isinstance(v, int) and not isinstance(v, bool):
        return str(v)
    if isinstance(v, float):
        return format_float(v)
    return str(v)


def _exact(name: str, compute: Callable[[], object], expected) -> Check:
    start = time.perf_counter()
    observed = compute()
    elapsed = time.perf_counter() - start
    return Check(name, _show(expected), _show(observed), observed == expected, "exact", elapsed)


def _close(name: str, compute: Callable[[], float], expected: float, tol: float) -> Check:
    start = time.perf_counter()
    observed = float(compute())
    elapsed = time.perf_counter() - start
    passed = abs(observed - expected) <= tol
    return Check(name, format_float(expected), format_float(observed), passed, f"abs tol {tol:g}", elapsed)


def _saturating_all_lose_once():
    expr = bell.magic_square_inequality("restricted4")
    game = games.magic_square_game("restricted4")
    vertices = polytope.saturating_vertices(expr)
    return len(vertices) == 144 and all(games.winning_count(game, s) == 8 for s in vertices)


def _magic_square_quantum_terms():
    terms = quantum.success_terms(quantum.magic_square_quantum_strategy(), games.magic_square_game())
    return float(np.max(np.abs(terms - 1)))


def _quantum_inequality_value():
    behavior = quantum.labelled_behavior(quantum.magic_square_quantum_strategy(), 4, 4)
    return bell.magic_square_inequality("restricted4").evaluate_on_distribution(behavior)


def _sub_game_extraction():
    game = games.restrict_inputs(games.magic_square_game(), [0, 1])
    strategy = quantum.magic_square_quantum_strategy().restrict([0, 1])
    classical = quantum.extract_classical_strategy(strategy, game)
    return Fraction(games.winning_count(game, classical), 6)


def _corner_table_completed():
    # free cells c00 = c01 = c10 = c11 = 0; row 2 and column 2 follow from parities
    table = games.MagicSquareTable(((0, 0, 0), (0, 0, 0), (1, 1, 0)))
    return games.winning_count(games.magic_square_game(), games.parity_completed_strategy(table))


def _no_parity_table():
    bad = 0
    for bits in range(512):
        table = games.MagicSquareTable.from_bits([(bits >> k) & 1 for k in range(9)])
        try:
            games.table_to_strategy(table, "restricted4")
        except games.ParityError:
            bad += 1
    return bad


def _forms_agree():
    r4 = bell.magic_square_inequality("restricted4")
    a4 = bell.magic_square_inequality("abstract4")
    t_r, _ = r4.integer_table()
    t_a, _ = a4.integer_table()
    agree = True
    for (_, _, _, v_r), (_, _, _, v_a) in zip(games.value_blocks(t_r), games.value_blocks(t_a)):
        agree = agree and bool(np.array_equal(v_r, v_a))
    return agree


def run_checks(proper_face_guard: bool = True) -> list[Check]:
    ms4 = bell.magic_square_inequality("restricted4")
    zero = bell.zero_expression(polytope.PolytopeParams(3, 3, 4, 4))
    figures = bell.magic_square_noise_figures()
    tsirelson = (2 + math.sqrt(2)) / 4
    return [
        _exact("classical value, Magic Square (4 outcomes)",
               lambda: games.classical_value(games.magic_square_game("restricted4")), Fraction(8, 9)),
        _exact("classical value, Magic Square (8 outcomes)",
               lambda: games.classical_value(games.magic_square_game("full8")), Fraction(8, 9)),
        _exact("Magic Square not classically winnable",
               lambda: games.is_classically_winnable(games.magic_square_game()), False),
        _exact("parity-completed table wins 8 of 9", _corner_table_completed, 8),
        _exact("no 3x3 table has even rows and odd columns (of 512)", _no_parity_table, 512),
        _exact("deterministic strategies, (3,3,4,4)", lambda: games.count_deterministic(3, 3, 4, 4), 4096),
        _exact("deterministic strategies, (3,3,8,8)", lambda: games.count_deterministic(3, 3, 8, 8), 262144),
        _exact("dimension d, (3,3,4,4)", lambda: polytope.cg_dimension((3, 3, 4, 4)), 99),
        _exact("dimension d, (3,3,8,8)", lambda: polytope.cg_dimension((3, 3, 8, 8)), 483),
        _exact("local bound of the 4-outcome inequality", lambda: ms4.local_maximum()[0], Fraction(8)),
        _exact("saturating deterministic strategies", lambda: len(polytope.saturating_vertices(ms4)), 144),
        _exact("each saturating strategy loses exactly one input pair", _saturating_all_lose_once, True),
        _exact("rank of saturating-vertex matrix",
               lambda: polytope.rank_exact(polytope.cg_matrix(polytope.saturating_vertices(ms4), ms4.params)), 99),
        _exact("facet of (3,3,4,4)", lambda: polytope.is_facet(ms4, proper_face_guard=proper_face_guard).verdict, True),
        _exact("8-outcome inequality is not a facet of (3,3,8,8)",
               lambda: polytope.is_facet(bell.magic_square_inequality("full8"),
                                         proper_face_guard=proper_face_guard).verdict, False),
        _exact("zero expression is not a facet",
               lambda: polytope.is_facet(zero, proper_face_guard=proper_face_guard).verdict, False),
        _exact("quaternary rewrite agrees on all 4096 strategies", _forms_agree, True),
        _close("quantum Magic Square: max deviation of nine terms from 1", _magic_square_quantum_terms, 0.0, 1e-9),
        _close("quantum value of the 4-outcome inequality", _quantum_inequality_value, 9.0, 1e-9),
        _exact("classical value, CHSH", lambda: games.classical_value(games.chsh_game()), Fraction(3, 4)),
        _close("quantum value, CHSH",
               lambda: quantum.winning_probability(quantum.chsh_quantum_strategy(), games.chsh_game()),
               tsirelson, 1e-9),
        _exact("CHSH fails the two-input criterion", lambda: games.winnable_2xn(games.chsh_game()), False),
        _exact("Magic Square rows {0,1}: extracted classical strategy value", _sub_game_extraction, Fraction(1)),
        _exact("uniform-noise value", lambda: figures.i_noise, Fraction(9, 2)),
        _exact("p_n = 2/9", lambda: bell.noise_resistance(9, 8, Fraction(9, 2)), Fraction(2, 9)),
        _exact("noise interpolation (1-p_n)*9 + p_n*9/2 = 8",
               lambda: (1 - figures.p_n) * 9 + figures.p_n * figures.i_noise, Fraction(8)),
        _close("p_n for the (2,2,4,4) comparison inequality",
               lambda: bell.noise_resistance(0.3648, 0, Fraction(-3, 4)), 0.3272, 5e-4),
    ]
