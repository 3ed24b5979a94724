"""Bipartite games, deterministic strategies and exact classical values.

A game is stored as a dense boolean table ``wins[x, y, a, b]``. Inputs are
weighted uniformly, so the value of a strategy is the fraction of input
pairs ``(x, y)`` it wins.

Magic Square outputs come in two encodings:

* ``FULL8``: each party answers three raw bits ``(t0, t1, t2)``, coded as
  ``4*t0 + 2*t1 + t2``.
* ``RESTRICTED4``: each party has promised its local parity, so only
  ``code = 2*t0 + t1`` is sent and ``t2`` is completed (even parity for
  Alice, odd for Bob).
"""

from __future__ import annotations

import enum
import itertools
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator, Sequence

import numpy as np

from .errors import BudgetExceededError, InvalidStrategyError, ParityError

DEFAULT_BUDGET = 10**8

ALICE_PARITY = 0
BOB_PARITY = 1

# upper bound on entries of one value block built during enumeration
_BLOCK_ENTRIES = 1 << 22


class Encoding(str, enum.Enum):
    FULL8 = "full8"
    RESTRICTED4 = "restricted4"


@dataclass(frozen=True, eq=False)
class GameRelation:
    """A bipartite game ``(I, O, W)`` with ``wins[x, y, a, b]`` true on W."""

    wins: np.ndarray

    def __post_init__(self):
        wins = np.array(self.wins, dtype=bool)
        if wins.ndim != 4 or min(wins.shape) < 1:
            raise ValueError(f"winning table must be 4-dimensional and non-empty, got shape {wins.shape}")
        wins.setflags(write=False)
        object.__setattr__(self, "wins", wins)

    @classmethod
    def from_quadruples(cls, m_a, m_b, n_a, n_b, quadruples) -> GameRelation:
        for name, v in (("m_A", m_a), ("m_B", m_b), ("n_A", n_a), ("n_B", n_b)):
            if int(v) < 1:
                raise ValueError(f"{name} must be >= 1, got {v}")
        wins = np.zeros((m_a, m_b, n_a, n_b), dtype=bool)
        for q in quadruples:
            x, y, a, b = (int(v) for v in q)
            if not (0 <= x < m_a and 0 <= y < m_b and 0 <= a < n_a and 0 <= b < n_b):
                raise ValueError(f"quadruple {tuple(q)} out of range")
            wins[x, y, a, b] = True
        return cls(wins)

    @property
    def m_a(self) -> int:
        return self.wins.shape[0]

    @property
    def m_b(self) -> int:
        return self.wins.shape[1]

    @property
    def n_a(self) -> int:
        return self.wins.shape[2]

    @property
    def n_b(self) -> int:
        return self.wins.shape[3]

    @property
    def shape(self) -> tuple[int, int, int, int]:
        return self.wins.shape

    def quadruples(self) -> list[tuple[int, int, int, int]]:
        """Winning quadruples in lexicographic order."""
        return [tuple(int(v) for v in q) for q in np.argwhere(self.wins)]

    def __eq__(self, other):
        if not isinstance(other, GameRelation):
            return NotImplemented
        return self.shape == other.shape and bool(np.array_equal(self.wins, other.wins))

    def __hash__(self):
        return hash((self.shape, self.wins.tobytes()))

    def __repr__(self):
        return f"GameRelation(shape={self.shape}, winning={int(self.wins.sum())})"


@dataclass(frozen=True)
class DeterministicStrategy:
    a_map: tuple[int, ...]
    b_map: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "a_map", tuple(int(v) for v in self.a_map))
        object.__setattr__(self, "b_map", tuple(int(v) for v in self.b_map))

    def validate(self, m_a: int, m_b: int, n_a: int, n_b: int) -> None:
        if len(self.a_map) != m_a or len(self.b_map) != m_b:
            raise InvalidStrategyError(
                f"strategy has {len(self.a_map)}x{len(self.b_map)} inputs, expected {m_a}x{m_b}"
            )
        if any(not 0 <= a < n_a for a in self.a_map):
            raise InvalidStrategyError(f"Alice output out of range 0..{n_a - 1}: {self.a_map}")
        if any(not 0 <= b < n_b for b in self.b_map):
            raise InvalidStrategyError(f"Bob output out of range 0..{n_b - 1}: {self.b_map}")

    def validate_for(self, game: GameRelation) -> None:
        self.validate(*game.shape)


@dataclass(frozen=True)
class TripleOutcome:
    """Three answer bits of one party, with their two-bit code ``2*t0 + t1``."""

    bits: tuple[int, int, int]

    def __post_init__(self):
        bits = tuple(int(b) for b in self.bits)
        if len(bits) != 3 or any(b not in (0, 1) for b in bits):
            raise ValueError(f"expected three bits, got {self.bits}")
        object.__setattr__(self, "bits", bits)

    @property
    def code(self) -> int:
        return 2 * self.bits[0] + self.bits[1]

    @property
    def full_code(self) -> int:
        return 4 * self.bits[0] + 2 * self.bits[1] + self.bits[2]

    @property
    def parity(self) -> int:
        return self.bits[0] ^ self.bits[1] ^ self.bits[2]

    @classmethod
    def from_code(cls, code: int, parity: int) -> TripleOutcome:
        """Decode a two-bit code, completing the third bit to the given parity."""
        if not 0 <= code < 4:
            raise ValueError(f"code must be in 0..3, got {code}")
        t0, t1 = code >> 1, code & 1
        return cls((t0, t1, t0 ^ t1 ^ parity))

    @classmethod
    def from_full_code(cls, code: int) -> TripleOutcome:
        if not 0 <= code < 8:
            raise ValueError(f"code must be in 0..7, got {code}")
        return cls(((code >> 2) & 1, (code >> 1) & 1, code & 1))


@dataclass(frozen=True)
class MagicSquareTable:
    """A shared 3x3 table of bits; Alice reads row x, Bob reads column y."""

    c: tuple[tuple[int, int, int], ...]

    def __post_init__(self):
        c = tuple(tuple(int(v) for v in row) for row in self.c)
        if len(c) != 3 or any(len(row) != 3 for row in c):
            raise ValueError("table must be 3x3")
        if any(v not in (0, 1) for row in c for v in row):
            raise ValueError("table entries must be bits")
        object.__setattr__(self, "c", c)

    @classmethod
    def from_bits(cls, bits: Sequence[int]) -> MagicSquareTable:
        return cls((tuple(bits[0:3]), tuple(bits[3:6]), tuple(bits[6:9])))

    def row(self, x: int) -> tuple[int, int, int]:
        return self.c[x]

    def column(self, y: int) -> tuple[int, int, int]:
        return tuple(self.c[x][y] for x in range(3))

    def rows_even(self) -> bool:
        return all(sum(self.row(x)) % 2 == 0 for x in range(3))

    def columns_odd(self) -> bool:
        return all(sum(self.column(y)) % 2 == 1 for y in range(3))


def count_deterministic(m_a: int, m_b: int, n_a: int, n_b: int) -> int:
    if min(m_a, m_b, n_a, n_b) < 1:
        raise ValueError("all cardinalities must be >= 1")
    return n_a**m_a * n_b**m_b


def magic_square_game(encoding: Encoding | str = Encoding.RESTRICTED4) -> GameRelation:
    encoding = Encoding(encoding)
    if encoding is Encoding.FULL8:
        wins = np.zeros((3, 3, 8, 8), dtype=bool)
        for x, y, a, b in itertools.product(range(3), range(3), range(8), range(8)):
            ta, tb = TripleOutcome.from_full_code(a), TripleOutcome.from_full_code(b)
            wins[x, y, a, b] = (
                ta.parity == ALICE_PARITY and tb.parity == BOB_PARITY and ta.bits[y] == tb.bits[x]
            )
        return GameRelation(wins)
    wins = np.zeros((3, 3, 4, 4), dtype=bool)
    for x, y, a, b in itertools.product(range(3), range(3), range(4), range(4)):
        ta = TripleOutcome.from_code(a, ALICE_PARITY)
        tb = TripleOutcome.from_code(b, BOB_PARITY)
        wins[x, y, a, b] = ta.bits[y] == tb.bits[x]
    return GameRelation(wins)


def chsh_game() -> GameRelation:
    """Win iff ``a XOR b == x AND y``."""
    wins = np.zeros((2, 2, 2, 2), dtype=bool)
    for x, y, a, b in itertools.product(range(2), repeat=4):
        wins[x, y, a, b] = (a ^ b) == (x & y)
    return GameRelation(wins)


def constant_game(m_a: int, m_b: int, n_a: int, n_b: int, value: bool) -> GameRelation:
    return GameRelation(np.full((m_a, m_b, n_a, n_b), bool(value)))


def restrict_inputs(game: GameRelation, alice_inputs=None, bob_inputs=None) -> GameRelation:
    """Sub-game on a subset of the inputs, renumbered in the given order."""
    xs = list(range(game.m_a)) if alice_inputs is None else list(alice_inputs)
    ys = list(range(game.m_b)) if bob_inputs is None else list(bob_inputs)
    return GameRelation(game.wins[np.ix_(xs, ys)])


def winning_count(game: GameRelation, strategy: DeterministicStrategy) -> int:
    strategy.validate_for(game)
    return sum(
        bool(game.wins[x, y, a, b])
        for x, a in enumerate(strategy.a_map)
        for y, b in enumerate(strategy.b_map)
    )


def strategy_value(game: GameRelation, strategy: DeterministicStrategy) -> Fraction:
    return Fraction(winning_count(game, strategy), game.m_a * game.m_b)


# -- enumeration -----------------------------------------------------------

def check_budget(m_a: int, m_b: int, n_a: int, n_b: int, budget: int | None) -> int:
    required = count_deterministic(m_a, m_b, n_a, n_b)
    budget = DEFAULT_BUDGET if budget is None else budget
    if required > budget:
        raise BudgetExceededError(required, budget)
    return required


def local_strategies(m: int, n: int) -> np.ndarray:
    """All output functions of one party as rows, in lexicographic order."""
    if n == 1 or m == 0:
        return np.zeros((1, m), dtype=np.int64)
    return np.array(list(itertools.product(range(n), repeat=m)), dtype=np.int64).reshape(-1, m)


def value_blocks(table: np.ndarray, budget: int | None = None) -> Iterator[tuple[int, np.ndarray, np.ndarray, np.ndarray]]:
    """Enumerate ``sum_{x,y} table[x, y, a(x), b(y)]`` over all deterministic strategies.

    Yields ``(start, alice, bob, values)`` where ``values[i, j]`` belongs to the
    strategy with Alice rows ``alice[start + i]`` and Bob row ``bob[j]``.
    Flattening the blocks in order reproduces lexicographic order over
    ``(a_map, b_map)``. Integer tables give exact integer values.
    """
    m_a, m_b, n_a, n_b = table.shape
    check_budget(m_a, m_b, n_a, n_b, budget)
    alice = local_strategies(m_a, n_a)
    bob = local_strategies(m_b, n_b)
    rows = max(1, _BLOCK_ENTRIES // len(bob))
    xs = np.arange(m_a)
    for start in range(0, len(alice), rows):
        chunk = alice[start:start + rows]
        # per_y[i, y, b] = sum_x table[x, y, a_i(x), b]
        per_y = table[xs, :, chunk, :].sum(axis=1)
        values = np.zeros((len(chunk), len(bob)), dtype=per_y.dtype)
        for y in range(m_b):
            values += per_y[:, y, bob[:, y]]
        yield start, alice, bob, values


def best_strategy(table: np.ndarray, budget: int | None = None):
    """Maximum of the enumerated values and its lexicographically first maximizer."""
    best = None
    witness = None
    for start, alice, bob, values in value_blocks(table, budget):
        i, j = np.unravel_index(int(np.argmax(values)), values.shape)
        v = values[i, j]
        if best is None or v > best:
            best = v
            witness = DeterministicStrategy(alice[start + i], bob[j])
    return best, witness


def classical_value(game: GameRelation, budget: int | None = None) -> Fraction:
    return classical_value_with_witness(game, budget)[0]


def classical_value_with_witness(game: GameRelation, budget: int | None = None):
    count, witness = best_strategy(game.wins.astype(np.int64), budget)
    return Fraction(int(count), game.m_a * game.m_b), witness


def is_classically_winnable(game: GameRelation, budget: int | None = None) -> bool:
    return find_winning_strategy(game, budget) is not None


def find_winning_strategy(game: GameRelation, budget: int | None = None) -> DeterministicStrategy | None:
    """First winning deterministic strategy in lexicographic order, or None.

    Bob's answer to each ``y`` can be chosen independently once Alice's
    function is fixed, so only Alice's functions are walked explicitly.
    """
    check_budget(*game.shape, budget)
    wins = game.wins
    xs = np.arange(game.m_a)
    alice = local_strategies(game.m_a, game.n_a)
    rows = max(1, _BLOCK_ENTRIES // (game.m_a * game.m_b * game.n_b))
    for start in range(0, len(alice), rows):
        chunk = alice[start:start + rows]
        # ok[i, y, b]: answering b to y wins against every x under a_i
        ok = wins[xs, :, chunk, :].all(axis=1)
        good = ok.any(axis=2).all(axis=1)
        if good.any():
            i = int(np.argmax(good))
            return DeterministicStrategy(chunk[i], np.argmax(ok[i], axis=1))
    return None


def winnable_2xn(game: GameRelation) -> bool:
    return winnable_2xn_witness(game) is not None


def winnable_2xn_witness(game: GameRelation):
    """Pair-compatibility test for games where Alice has two inputs.

    Returns ``(a0, a1, b_list)`` for the first pair of Alice answers such that
    every ``y`` has a Bob answer compatible with both, or None.
    """
    if game.m_a != 2:
        raise ValueError(f"pair-compatibility criterion needs m_A = 2, got {game.m_a}")
    w = game.wins
    # compat[a0, a1, y, b] = W(0, y, a0, b) and W(1, y, a1, b)
    by_answer0 = w[0].transpose(1, 0, 2)
    by_answer1 = w[1].transpose(1, 0, 2)
    compat = by_answer0[:, None] & by_answer1[None, :]
    good = compat.any(axis=3).all(axis=2)
    if not good.any():
        return None
    a0, a1 = (int(v) for v in np.argwhere(good)[0])
    b_list = tuple(int(v) for v in np.argmax(compat[a0, a1], axis=1))
    return a0, a1, b_list


# -- Magic Square tables ---------------------------------------------------

def table_to_strategy(table: MagicSquareTable, encoding: Encoding | str = Encoding.FULL8) -> DeterministicStrategy:
    """Alice answers row x of the table, Bob answers column y.

    With ``RESTRICTED4`` the rows must be even and the columns odd, which no
    complete 3x3 table achieves; a ParityError names the first offender.
    """
    encoding = Encoding(encoding)
    rows = [TripleOutcome(table.row(x)) for x in range(3)]
    cols = [TripleOutcome(table.column(y)) for y in range(3)]
    if encoding is Encoding.FULL8:
        return DeterministicStrategy([t.full_code for t in rows], [t.full_code for t in cols])
    for x, t in enumerate(rows):
        if t.parity != ALICE_PARITY:
            raise ParityError(f"row {x} has odd parity")
    for y, t in enumerate(cols):
        if t.parity != BOB_PARITY:
            raise ParityError(f"column {y} has even parity")
    return DeterministicStrategy([t.code for t in rows], [t.code for t in cols])


def parity_completed_strategy(table: MagicSquareTable) -> DeterministicStrategy:
    """Restricted4 strategy where each party completes its own third bit.

    Only the first two entries of each row and column are read. The players
    then disagree at no more than one cell of the square.
    """
    a_map = [TripleOutcome.from_code(2 * table.c[x][0] + table.c[x][1], ALICE_PARITY).code for x in range(3)]
    b_map = [TripleOutcome.from_code(2 * table.c[0][y] + table.c[1][y], BOB_PARITY).code for y in range(3)]
    return DeterministicStrategy(a_map, b_map)


def restricted_to_full(strategy: DeterministicStrategy) -> DeterministicStrategy:
    """Re-express a Restricted4 strategy as the equivalent Full8 strategy."""
    return DeterministicStrategy(
        [TripleOutcome.from_code(a, ALICE_PARITY).full_code for a in strategy.a_map],
        [TripleOutcome.from_code(b, BOB_PARITY).full_code for b in strategy.b_map],
    )
