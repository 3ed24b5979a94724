"""Bell expressions over ``(x, y, a, b)``, the Magic Square inequality and noise figures."""

from __future__ import annotations

import enum
import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from numbers import Rational

import numpy as np

from .games import (
    ALICE_PARITY,
    BOB_PARITY,
    DeterministicStrategy,
    GameRelation,
    TripleOutcome,
    best_strategy,
    magic_square_game,
)
from .polytope import PolytopeParams

NORMALIZATION_TOL = 1e-10


class InequalityForm(str, enum.Enum):
    FULL8 = "full8"
    RESTRICTED4 = "restricted4"
    ABSTRACT4 = "abstract4"


@dataclass(frozen=True, eq=False)
class BellExpression:
    """``sum coefficients[x, y, a, b] * P(a, b|x, y) <= local_bound``.

    Coefficients are stored as an object array of Fractions.
    """

    params: PolytopeParams
    coefficients: np.ndarray
    local_bound: Fraction

    def __post_init__(self):
        coeffs = np.asarray(self.coefficients, dtype=object)
        if coeffs.shape != self.params.shape:
            raise ValueError(f"coefficient table has shape {coeffs.shape}, params need {self.params.shape}")
        coeffs = np.vectorize(Fraction, otypes=[object])(coeffs)
        coeffs.setflags(write=False)
        object.__setattr__(self, "coefficients", coeffs)
        object.__setattr__(self, "local_bound", Fraction(self.local_bound))

    @classmethod
    def from_terms(cls, params: PolytopeParams, terms, local_bound) -> BellExpression:
        coeffs = np.full(params.shape, Fraction(0), dtype=object)
        for x, y, a, b, v in terms:
            coeffs[x, y, a, b] += Fraction(v)
        return cls(params, coeffs, local_bound)

    @classmethod
    def from_game(cls, game: GameRelation, local_bound) -> BellExpression:
        """Indicator coefficients of the winning relation, one term per input pair."""
        return cls(PolytopeParams(*game.shape), game.wins.astype(int), local_bound)

    def terms(self) -> list[tuple[int, int, int, int, Fraction]]:
        """Nonzero coefficients as ``(x, y, a, b, value)`` in lexicographic order."""
        return [
            (*(int(i) for i in idx), self.coefficients[idx])
            for idx in itertools.product(*(range(n) for n in self.params.shape))
            if self.coefficients[idx] != 0
        ]

    def integer_table(self) -> tuple[np.ndarray, int]:
        """Coefficients times the lcm of their denominators, and that lcm."""
        scale = 1
        for v in self.coefficients.flat:
            scale = scale * v.denominator // math.gcd(scale, v.denominator)
        ints = np.vectorize(lambda v: int(v * scale), otypes=[object])(self.coefficients)
        biggest = max((abs(v) for v in ints.flat), default=0)
        if biggest * self.params.m_a * self.params.m_b < 2**62:
            ints = ints.astype(np.int64)
        return ints, scale

    def embed(self, params: PolytopeParams) -> BellExpression:
        """Same expression in a scenario with at least as many inputs and outputs.

        The new inputs and outputs get zero coefficients.
        """
        if any(new < old for new, old in zip(params.shape, self.params.shape)):
            raise ValueError(f"cannot embed {self.params} into smaller scenario {params}")
        coeffs = np.full(params.shape, Fraction(0), dtype=object)
        m_a, m_b, n_a, n_b = self.params.shape
        coeffs[:m_a, :m_b, :n_a, :n_b] = self.coefficients
        return BellExpression(params, coeffs, self.local_bound)

    def evaluate_on_strategy(self, strategy: DeterministicStrategy) -> Fraction:
        strategy.validate(*self.params.shape)
        return sum(
            (self.coefficients[x, y, a, b] for x, a in enumerate(strategy.a_map) for y, b in enumerate(strategy.b_map)),
            Fraction(0),
        )

    def evaluate_on_distribution(self, dist):
        """``sum c * P``. Float tables give a float, object tables of Fractions an exact value."""
        dist = np.asarray(dist)
        if dist.shape != self.params.shape:
            raise ValueError(f"distribution has shape {dist.shape}, expected {self.params.shape}")
        if dist.dtype == object:
            sums = dist.sum(axis=(2, 3))
            if any(s != 1 for s in sums.flat):
                raise ValueError("distribution is not normalized for every input pair")
            return sum((c * p for c, p in zip(self.coefficients.flat, dist.flat)), Fraction(0))
        sums = dist.sum(axis=(2, 3))
        if np.max(np.abs(sums - 1)) > NORMALIZATION_TOL:
            raise ValueError(f"distribution is not normalized (max deviation {np.max(np.abs(sums - 1)):.3g})")
        return float(np.sum(self.coefficients.astype(float) * dist))

    def local_maximum(self, budget: int | None = None) -> tuple[Fraction, DeterministicStrategy]:
        """Exact maximum over deterministic strategies and its first maximizer."""
        table, scale = self.integer_table()
        best, witness = best_strategy(table, budget)
        return Fraction(int(best), scale), witness

    def __eq__(self, other):
        if not isinstance(other, BellExpression):
            return NotImplemented
        return (
            self.params == other.params
            and self.local_bound == other.local_bound
            and bool(np.all(self.coefficients == other.coefficients))
        )

    def __repr__(self):
        return f"BellExpression(params={self.params}, terms={len(self.terms())}, bound={self.local_bound})"


def zero_expression(params: PolytopeParams) -> BellExpression:
    return BellExpression(params, np.full(params.shape, Fraction(0), dtype=object), 0)


# -- Magic Square inequality -----------------------------------------------

def _alice_bit0(a: int) -> int:
    return ((a - a % 2) // 2) % 2


def _alice_bit1(a: int) -> int:
    return a % 2


def _alice_bit2(a: int) -> int:
    return (a + a % 2) // 2


def _bob_bit2(b: int) -> int:
    return (b + b % 2) // 2 + 1


# term (x, y) compares Alice's bit y with Bob's bit x, modulo 2
_ALICE_BITS = (_alice_bit0, _alice_bit1, _alice_bit2)
_BOB_BITS = (_alice_bit0, _alice_bit1, _bob_bit2)


def magic_square_inequality(form: InequalityForm | str = InequalityForm.RESTRICTED4) -> BellExpression:
    form = InequalityForm(form)
    if form is InequalityForm.FULL8:
        return BellExpression.from_game(magic_square_game("full8"), 8)
    if form is InequalityForm.RESTRICTED4:
        return BellExpression.from_game(magic_square_game("restricted4"), 8)
    coeffs = np.full((3, 3, 4, 4), Fraction(0), dtype=object)
    for x, y, a, b in itertools.product(range(3), range(3), range(4), range(4)):
        if (_ALICE_BITS[y](a) - _BOB_BITS[x](b)) % 2 == 0:
            coeffs[x, y, a, b] = Fraction(1)
    return BellExpression(PolytopeParams(3, 3, 4, 4), coeffs, 8)


def marginal_expression(params: PolytopeParams, x: int, a: int, bound=1) -> BellExpression:
    """``P(a|x) <= bound``, with the marginal taken at Bob's input 0."""
    terms = [(x, 0, a, b, 1) for b in range(params.n_b)]
    return BellExpression.from_terms(params, terms, bound)


def uniform_noise(params: PolytopeParams) -> np.ndarray:
    return np.full(params.shape, Fraction(1, params.n_a * params.n_b), dtype=object)


def uniform_noise_value(expr: BellExpression) -> Fraction:
    total = sum(expr.coefficients.flat, Fraction(0))
    return total / (expr.params.n_a * expr.params.n_b)


def strategy_distribution(strategy: DeterministicStrategy, params: PolytopeParams) -> np.ndarray:
    """Exact table ``P[x, y, a, b]`` of a deterministic strategy."""
    strategy.validate(*params.shape)
    p = np.full(params.shape, Fraction(0), dtype=object)
    for x, a in enumerate(strategy.a_map):
        for y, b in enumerate(strategy.b_map):
            p[x, y, a, b] = Fraction(1)
    return p


# -- noise resistance ------------------------------------------------------

def _exact(v) -> bool:
    return isinstance(v, Rational)


def noise_resistance(i_qm, i_lv, i_noise):
    """Fraction of unstructured noise at which the violation disappears.

    Exact if all three inputs are rational, float otherwise.
    """
    if i_qm == i_noise:
        raise ZeroDivisionError("quantum value equals the noise value; resistance undefined")
    if all(_exact(v) for v in (i_qm, i_lv, i_noise)):
        return (Fraction(i_qm) - Fraction(i_lv)) / (Fraction(i_qm) - Fraction(i_noise))
    return (float(i_qm) - float(i_lv)) / (float(i_qm) - float(i_noise))


@dataclass(frozen=True)
class NoiseFigures:
    i_qm: float
    i_lv: Fraction
    i_noise: Fraction
    p_n: float | Fraction | None = None

    def __post_init__(self):
        if self.p_n is not None and self.i_qm == self.i_noise:
            raise ValueError("quantum value equals the noise value")

    @classmethod
    def compute(cls, i_qm, i_lv, i_noise) -> NoiseFigures:
        return cls(i_qm, Fraction(i_lv), Fraction(i_noise), noise_resistance(i_qm, i_lv, i_noise))


def magic_square_noise_figures(i_qm=9) -> NoiseFigures:
    expr = magic_square_inequality(InequalityForm.RESTRICTED4)
    return NoiseFigures.compute(i_qm, expr.local_bound, uniform_noise_value(expr))
