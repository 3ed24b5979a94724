import itertools
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from pseudotelepathy.errors import BudgetExceededError, InvalidStrategyError, ParityError
from pseudotelepathy.games import (
    DeterministicStrategy,
    Encoding,
    GameRelation,
    MagicSquareTable,
    TripleOutcome,
    chsh_game,
    classical_value,
    classical_value_with_witness,
    constant_game,
    count_deterministic,
    find_winning_strategy,
    is_classically_winnable,
    magic_square_game,
    parity_completed_strategy,
    restrict_inputs,
    restricted_to_full,
    table_to_strategy,
    winnable_2xn,
    winnable_2xn_witness,
    winning_count,
)

from oracles import brute_force_value, brute_force_winnable, magic_square_bits_win, restricted_magic_square_wins

ALL_TABLES = [MagicSquareTable.from_bits(bits) for bits in itertools.product((0, 1), repeat=9)]


def as_lists(game):
    return game.wins.tolist()


class TestGameRelation:
    def test_from_quadruples_round_trip(self):
        quads = [(0, 0, 1, 1), (1, 0, 0, 1)]
        game = GameRelation.from_quadruples(2, 1, 2, 2, quads)
        assert game.quadruples() == sorted(quads)
        assert game.shape == (2, 1, 2, 2)

    def test_rejects_out_of_range(self):
        with pytest.raises(ValueError):
            GameRelation.from_quadruples(2, 2, 2, 2, [(2, 0, 0, 0)])

    def test_rejects_zero_cardinality(self):
        with pytest.raises(ValueError):
            GameRelation.from_quadruples(0, 2, 2, 2, [])

    def test_immutable(self):
        game = chsh_game()
        with pytest.raises(ValueError):
            game.wins[0, 0, 0, 0] = False

    def test_strategy_validation(self):
        with pytest.raises(InvalidStrategyError):
            DeterministicStrategy((0, 4, 0), (0, 0, 0)).validate_for(magic_square_game())
        with pytest.raises(InvalidStrategyError):
            DeterministicStrategy((0, 0), (0, 0, 0)).validate_for(magic_square_game())


class TestTripleOutcome:
    @pytest.mark.parametrize("code", range(4))
    @pytest.mark.parametrize("parity", [0, 1])
    def test_round_trip(self, code, parity):
        t = TripleOutcome.from_code(code, parity)
        assert t.code == code
        assert t.parity == parity

    def test_convention(self):
        assert TripleOutcome.from_code(2, 0).bits == (1, 0, 1)
        assert TripleOutcome.from_code(2, 1).bits == (1, 0, 0)
        assert TripleOutcome((1, 1, 0)).full_code == 6


class TestMagicSquareGame:
    def test_restricted_example(self):
        # Alice (0,0,0), Bob (0,0,1): both read bit 0 at the intersection
        assert magic_square_game(Encoding.RESTRICTED4).wins[0, 0, 0, 0]

    def test_full8_odd_alice_parity_never_wins(self):
        wins = magic_square_game(Encoding.FULL8).wins
        for a in range(8):
            if TripleOutcome.from_full_code(a).parity == 1:
                assert not wins[:, :, a, :].any()

    def test_restricted_matches_requirements_oracle(self):
        expected = restricted_magic_square_wins()
        assert as_lists(magic_square_game("restricted4")) == expected
        assert sum(v for x in expected for y in x for a in y for v in a) == 72
        assert int(magic_square_game("restricted4").wins.sum()) == 72

    def test_full8_matches_requirements_oracle(self):
        wins = magic_square_game("full8").wins
        for x, y, a, b in itertools.product(range(3), range(3), range(8), range(8)):
            alice = ((a >> 2) & 1, (a >> 1) & 1, a & 1)
            bob = ((b >> 2) & 1, (b >> 1) & 1, b & 1)
            assert wins[x, y, a, b] == magic_square_bits_win(x, y, alice, bob)


class TestClassicalValue:
    def test_magic_square(self):
        assert classical_value(magic_square_game("restricted4")) == Fraction(8, 9)

    def test_magic_square_full8(self):
        assert classical_value(magic_square_game("full8")) == Fraction(8, 9)

    def test_all_true(self):
        assert classical_value(constant_game(2, 3, 2, 2, True)) == 1

    def test_all_false(self):
        assert classical_value(constant_game(2, 2, 2, 2, False)) == 0

    def test_chsh(self):
        assert classical_value(chsh_game()) == Fraction(3, 4)

    def test_witness_is_lexicographically_first_maximizer(self):
        game = magic_square_game()
        value, witness = classical_value_with_witness(game)
        first = None
        for a_map in itertools.product(range(4), repeat=3):
            for b_map in itertools.product(range(4), repeat=3):
                s = DeterministicStrategy(a_map, b_map)
                if Fraction(winning_count(game, s), 9) == value:
                    first = s
                    break
            if first is not None:
                break
        assert witness == first

    def test_budget(self):
        with pytest.raises(BudgetExceededError) as info:
            classical_value(magic_square_game("full8"), budget=1000)
        assert info.value.required == 262144
        assert "262144" in str(info.value)

    @settings(max_examples=60, deadline=None)
    @given(st.data())
    def test_matches_brute_force(self, data):
        m_a, m_b = data.draw(st.integers(1, 3)), data.draw(st.integers(1, 3))
        n_a, n_b = data.draw(st.integers(1, 3)), data.draw(st.integers(1, 3))
        bits = data.draw(st.lists(st.booleans(), min_size=m_a * m_b * n_a * n_b, max_size=m_a * m_b * n_a * n_b))
        game = GameRelation(np.array(bits).reshape(m_a, m_b, n_a, n_b))
        expected = brute_force_value(as_lists(game), m_a, m_b, n_a, n_b)
        assert classical_value(game) == Fraction(expected, m_a * m_b)
        assert is_classically_winnable(game) == (expected == m_a * m_b)

    @settings(max_examples=40, deadline=None)
    @given(st.data())
    def test_relabeling_invariance(self, data):
        shape = (2, 3, 3, 2)
        bits = data.draw(st.lists(st.booleans(), min_size=36, max_size=36))
        wins = np.array(bits).reshape(shape)
        perms = [data.draw(st.permutations(range(n))) for n in shape]
        relabeled = wins[np.ix_(*perms)]
        assert classical_value(GameRelation(wins)) == classical_value(GameRelation(relabeled))


class TestWinnability:
    def test_magic_square_not_winnable(self):
        assert not is_classically_winnable(magic_square_game())
        assert find_winning_strategy(magic_square_game()) is None

    def test_all_true_winnable(self):
        assert is_classically_winnable(constant_game(3, 3, 2, 2, True))

    def test_sub_game_winnable(self):
        sub = restrict_inputs(magic_square_game(), [0, 1])
        assert sub.shape == (2, 3, 4, 4)
        assert brute_force_winnable(as_lists(sub), 2, 3, 4, 4)
        assert is_classically_winnable(sub)
        strategy = find_winning_strategy(sub)
        assert winning_count(sub, strategy) == 6

    def test_2xn_examples(self):
        sub = restrict_inputs(magic_square_game(), [0, 1])
        assert winnable_2xn(sub)
        a0, a1, b_list = winnable_2xn_witness(sub)
        assert winning_count(sub, DeterministicStrategy((a0, a1), b_list)) == 6
        assert not winnable_2xn(constant_game(2, 4, 3, 3, False))
        assert not winnable_2xn(chsh_game())
        assert winnable_2xn(constant_game(2, 2, 2, 2, True))

    def test_2xn_rejects_other_shapes(self):
        with pytest.raises(ValueError):
            winnable_2xn(magic_square_game())

    def test_2xn_exhaustive_2222(self):
        # every relation on (2,2,2,2), compared with brute-force enumeration
        for mask in range(1 << 16):
            wins = [(mask >> k) & 1 for k in range(16)]
            game = GameRelation(np.array(wins, dtype=bool).reshape(2, 2, 2, 2))
            a = winnable_2xn(game)
            assert a == is_classically_winnable(game), mask

    @pytest.mark.parametrize("shape", [(2, 3, 2, 2), (2, 2, 3, 2)])
    def test_2xn_random(self, shape):
        rng = np.random.default_rng(20061011)
        for _ in range(10_000):
            wins = rng.random(shape) < rng.uniform(0.3, 0.9)
            game = GameRelation(wins)
            assert winnable_2xn(game) == is_classically_winnable(game)

    def test_2xn_random_against_oracle(self):
        rng = np.random.default_rng(7)
        for _ in range(300):
            wins = rng.random((2, 3, 3, 2)) < 0.6
            game = GameRelation(wins)
            assert winnable_2xn(game) == brute_force_winnable(wins.tolist(), 2, 3, 3, 2)


class TestTables:
    def test_all_zero_table(self):
        s = table_to_strategy(MagicSquareTable(((0, 0, 0),) * 3))
        assert s == DeterministicStrategy((0, 0, 0), (0, 0, 0))

    def test_full8_count_never_nine(self):
        game = magic_square_game("full8")
        counts = [winning_count(game, table_to_strategy(t)) for t in ALL_TABLES]
        assert max(counts) <= 8
        # shared tables always have an odd row or an even column
        assert max(counts) == 6

    def test_restricted_projection_always_fails(self):
        for t in ALL_TABLES:
            assert not (t.rows_even() and t.columns_odd())
            with pytest.raises(ParityError):
                table_to_strategy(t, "restricted4")

    def test_corner_table_with_parity_completion_wins_eight(self):
        table = MagicSquareTable(((0, 0, 0), (0, 0, 0), (1, 1, 0)))
        restricted = parity_completed_strategy(table)
        assert winning_count(magic_square_game("restricted4"), restricted) == 8
        full = restricted_to_full(restricted)
        assert winning_count(magic_square_game("full8"), full) == 8
        # the literal shared table loses every pair in column 2
        assert winning_count(magic_square_game("full8"), table_to_strategy(table)) == 6

    def test_free_cell_family_all_win_eight(self):
        game = magic_square_game()
        for c00, c01, c10, c11 in itertools.product((0, 1), repeat=4):
            table = MagicSquareTable((
                (c00, c01, c00 ^ c01),
                (c10, c11, c10 ^ c11),
                (c00 ^ c10 ^ 1, c01 ^ c11 ^ 1, 0),
            ))
            strategy = parity_completed_strategy(table)
            lost = [(x, y) for x in range(3) for y in range(3)
                    if not game.wins[x, y, strategy.a_map[x], strategy.b_map[y]]]
            assert lost == [(2, 2)]


@pytest.mark.parametrize(
    "args, expected",
    [((3, 3, 4, 4), 4096), ((1, 1, 1, 1), 1), ((3, 3, 8, 8), 262144), ((2, 5, 3, 2), 9 * 32)],
)
def test_count_deterministic(args, expected):
    assert count_deterministic(*args) == expected
