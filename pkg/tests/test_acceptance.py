"""Acceptance criteria, one test per criterion.

Each test records a PASS/FAIL line; conftest prints them at the end of the run.
"""

import itertools
import math
import time
from fractions import Fraction

import numpy as np
import pytest

from pseudotelepathy.bell import (
    magic_square_inequality,
    noise_resistance,
    uniform_noise_value,
)
from pseudotelepathy.games import (
    GameRelation,
    chsh_game,
    classical_value,
    count_deterministic,
    is_classically_winnable,
    magic_square_game,
    restrict_inputs,
    value_blocks,
    winnable_2xn,
    winning_count,
)
from pseudotelepathy.polytope import cg_dimension, cg_matrix, is_facet, rank_exact, saturating_vertices
from pseudotelepathy.quantum import (
    chsh_quantum_strategy,
    extract_classical_strategy,
    magic_square_quantum_strategy,
    magic_square_triple_measurements,
    mermin_peres_square,
    square_column,
    square_row,
    success_terms,
    winning_probability,
)

from oracles import brute_force_winnable

RESULTS: dict[int, str] = {}


def record(number, title, ok, detail):
    RESULTS[number] = f"{'PASS' if ok else 'FAIL'}  criterion {number:>2}: {title}: {detail}"
    assert ok, RESULTS[number]


def timed(fn):
    start = time.perf_counter()
    value = fn()
    return value, time.perf_counter() - start


def test_criterion_01_classical_value():
    r4, t4 = timed(lambda: classical_value(magic_square_game("restricted4")))
    f8, t8 = timed(lambda: classical_value(magic_square_game("full8")))
    ok = (
        r4 == Fraction(8, 9) and t4 < 1
        and f8 == Fraction(8, 9) and t8 < 30
        and count_deterministic(3, 3, 4, 4) == 4096 and count_deterministic(3, 3, 8, 8) == 262144
    )
    record(1, "classical value 8/9", ok,
           f"Restricted4 {r4} in {t4:.3f}s (<1s), Full8 {f8} in {t8:.3f}s (<30s)")


def test_criterion_02_saturating_vertices():
    expr = magic_square_inequality("restricted4")
    game = magic_square_game("restricted4")
    vertices, t = timed(lambda: saturating_vertices(expr))
    lose_once = all(winning_count(game, s) == 8 for s in vertices)
    ok = len(vertices) == 144 and lose_once and t < 5
    record(2, "144 saturating strategies", ok,
           f"{len(vertices)} vertices, each loses one pair: {lose_once}, {t:.3f}s (<5s)")


def test_criterion_03_exact_rank_and_facet():
    expr = magic_square_inequality("restricted4")

    def compute():
        matrix = cg_matrix(saturating_vertices(expr), expr.params)
        return matrix, rank_exact(matrix), is_facet(expr)

    (matrix, rank, cert), t = timed(compute)
    integer_path = matrix.dtype.kind == "i"
    with pytest.raises(TypeError):
        rank_exact(matrix.astype(float))
    ok = matrix.shape == (144, 99) and rank == 99 and cert.verdict and integer_path and t < 5
    record(3, "exact rank 99, facet", ok,
           f"matrix {matrix.shape}, rank {rank}, verdict {cert.verdict}, integer dtype {integer_path}, {t:.3f}s (<5s)")


def test_criterion_04_quantum_terms():
    terms, t = timed(lambda: success_terms(magic_square_quantum_strategy(), magic_square_game()))
    deviation = float(np.max(np.abs(terms - 1)))
    ok = terms.shape == (3, 3) and deviation <= 1e-9 and t < 1
    record(4, "quantum winning probability 1", ok,
           f"max |term - 1| = {deviation:.3g} (tol 1e-9), {t:.3f}s (<1s)")


def test_criterion_05_noise():
    expr = magic_square_inequality("restricted4")
    i_noise = uniform_noise_value(expr)
    p_n = noise_resistance(9, 8, Fraction(9, 2))
    published = noise_resistance(0.3648, 0, Fraction(-3, 4))
    ok = i_noise == Fraction(9, 2) and p_n == Fraction(2, 9) and abs(published - 0.3272) <= 5e-4
    record(5, "noise figures", ok,
           f"I_noise {i_noise}, p_n {p_n}, published-constant p_n {published:.5f} (0.3272 +- 5e-4)")


def test_criterion_06_dimension():
    d4, d8 = cg_dimension((3, 3, 4, 4)), cg_dimension((3, 3, 8, 8))
    record(6, "dimension formula", d4 == 99 and d8 == 483, f"d(3,3,4,4) = {d4}, d(3,3,8,8) = {d8}")


def test_criterion_07_form_equivalence():
    t_r, _ = magic_square_inequality("restricted4").integer_table()
    t_a, _ = magic_square_inequality("abstract4").integer_table()
    compared = 0
    agree = True
    for (_, _, _, v_r), (_, _, _, v_a) in zip(value_blocks(t_r), value_blocks(t_a)):
        compared += v_r.size
        agree = agree and bool(np.array_equal(v_r, v_a))
    record(7, "Abstract4 equals Restricted4", agree and compared == 4096,
           f"{compared} strategies compared, all equal: {agree}")


def test_criterion_08_two_input_criterion():
    mismatches = 0
    for mask in range(1 << 16):
        wins = np.array([(mask >> k) & 1 for k in range(16)], dtype=bool).reshape(2, 2, 2, 2)
        game = GameRelation(wins)
        mismatches += winnable_2xn(game) != is_classically_winnable(game)

    rng = np.random.default_rng(1)
    shapes = [(2, 3, 2, 2), (2, 2, 3, 2), (2, 3, 3, 3), (2, 4, 2, 3)]
    random_checked = 0
    for k in range(10_000):
        shape = shapes[k % len(shapes)]
        wins = rng.random(shape) < rng.uniform(0.4, 0.95)
        game = GameRelation(wins)
        mismatches += winnable_2xn(game) != is_classically_winnable(game)
        random_checked += 1
    # a slice checked against the independent nested-loop oracle as well
    for _ in range(200):
        wins = rng.random((2, 3, 3, 2)) < 0.7
        mismatches += winnable_2xn(GameRelation(wins)) != brute_force_winnable(wins.tolist(), 2, 3, 3, 2)

    sub = restrict_inputs(magic_square_game(), [0, 1])
    sub_winnable = winnable_2xn(sub) and is_classically_winnable(sub)
    quantum_sub = magic_square_quantum_strategy().restrict([0, 1])
    extracted = extract_classical_strategy(quantum_sub, sub)
    extracted_wins = winning_count(sub, extracted)
    ok = mismatches == 0 and random_checked >= 10_000 and sub_winnable and extracted_wins == 6
    record(8, "two-input criterion", ok,
           f"65536 exhaustive + {random_checked} random, {mismatches} mismatches; "
           f"2x3 sub-game winnable {sub_winnable}, extracted strategy wins {extracted_wins}/6")


def test_criterion_09_chsh():
    c = classical_value(chsh_game())
    q = winning_probability(chsh_quantum_strategy(), chsh_game())
    target = (2 + math.sqrt(2)) / 4
    ok = c == Fraction(3, 4) and abs(q - target) <= 1e-9
    record(9, "CHSH", ok, f"classical {c}, quantum {q:.12f} vs {target:.12f} (tol 1e-9)")


def _measurement_errors(m):
    mats = [p for _, p in m.outcomes]
    idem = max(np.max(np.abs(p @ p - p)) for p in mats)
    orth = max((np.max(np.abs(p @ q)) for p, q in itertools.combinations(mats, 2)), default=0.0)
    comp = np.max(np.abs(sum(mats) - np.eye(m.dim)))
    return max(idem, orth, comp)


def test_criterion_10_measurement_invariants():
    strategy = magic_square_quantum_strategy()
    alice, bob = magic_square_triple_measurements()
    chsh = chsh_quantum_strategy()
    measurements = list(strategy.alice) + list(strategy.bob) + alice + bob + list(chsh.alice) + list(chsh.bob)
    worst_measure = max(_measurement_errors(m) for m in measurements)

    square = mermin_peres_square()
    ident = np.eye(4)
    worst_square = 0.0
    for i in range(3):
        for line, target in ((square_row(square, i), ident), (square_column(square, i), -ident)):
            mats = [o.matrix for o in line]
            worst_square = max(worst_square, np.max(np.abs(mats[0] @ mats[1] @ mats[2] - target)))
            for p, q in itertools.combinations(mats, 2):
                worst_square = max(worst_square, np.max(np.abs(p @ q - q @ p)))
    ok = worst_measure <= 1e-10 and worst_square <= 1e-12
    record(10, "measurement invariants", ok,
           f"{len(measurements)} measurements, worst error {worst_measure:.3g} (tol 1e-10); "
           f"square worst error {worst_square:.3g} (tol 1e-12)")
