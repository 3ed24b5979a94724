"""Pure-state simulation of bipartite quantum strategies.

Qubit order: a state on Alice's qubits (A1, A2) and Bob's (B1, B2) has
amplitude index ``A1*8 + A2*4 + B1*2 + B2``. In general the amplitude vector
is reshaped to a ``(D_A, D_B)`` matrix ``M`` so that
``(P (x) Q)|psi>`` corresponds to ``P @ M @ Q.T``.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from functools import reduce
from typing import Hashable, Sequence

import numpy as np

from .errors import NonCommutingError, NoOverlapError, NotWinningError
from .games import (
    DeterministicStrategy,
    GameRelation,
    TripleOutcome,
    winning_count,
)

NORM_TOL = 1e-12
PROJECTOR_TOL = 1e-10
OVERLAP_EPS = 1e-9
WIN_TOL = 1e-9

PAULI = {
    "I": np.eye(2, dtype=complex),
    "X": np.array([[0, 1], [1, 0]], dtype=complex),
    "Y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "Z": np.array([[1, 0], [0, -1]], dtype=complex),
}


@dataclass(frozen=True)
class SignedPauliString:
    sign: int
    letters: tuple[str, str]

    def __post_init__(self):
        if self.sign not in (1, -1):
            raise ValueError(f"sign must be +1 or -1, got {self.sign}")
        letters = tuple(self.letters)
        if len(letters) != 2 or any(l not in PAULI for l in letters):
            raise ValueError(f"need two Pauli letters from IXYZ, got {self.letters}")
        object.__setattr__(self, "letters", letters)

    @classmethod
    def parse(cls, text: str) -> SignedPauliString:
        """``"-XZ"`` or ``"+YY"`` or ``"IZ"``."""
        text = text.strip()
        sign = -1 if text.startswith("-") else 1
        return cls(sign, tuple(text.lstrip("+-")))

    @property
    def matrix(self) -> np.ndarray:
        return self.sign * np.kron(PAULI[self.letters[0]], PAULI[self.letters[1]])

    def __neg__(self):
        return SignedPauliString(-self.sign, self.letters)

    def __str__(self):
        return ("-" if self.sign < 0 else "+") + "".join(self.letters)


def mermin_peres_square(flip: tuple[int, int] | None = None) -> list[list[SignedPauliString]]:
    """Rows multiply to +1, columns to -1, and every entry is real symmetric.

    ``flip`` negates one entry; the result is no longer a valid square and
    only serves as a negative control.
    """
    square = [
        [SignedPauliString.parse(s) for s in row]
        for row in (("IZ", "ZI", "ZZ"), ("XI", "IX", "XX"), ("-XZ", "-ZX", "YY"))
    ]
    if flip is not None:
        x, y = flip
        square[x][y] = -square[x][y]
    return square


def square_row(square, x: int) -> list[SignedPauliString]:
    return list(square[x])


def square_column(square, y: int) -> list[SignedPauliString]:
    return [row[y] for row in square]


def square_defects(square, tol: float = 1e-12) -> list[str]:
    """Violated square properties, as readable messages (empty if valid)."""
    ident = np.eye(4)
    defects = []
    lines = [("row", x, square_row(square, x), 1) for x in range(3)]
    lines += [("column", y, square_column(square, y), -1) for y in range(3)]
    for kind, i, ops, target in lines:
        mats = [o.matrix for o in ops]
        for p, q in itertools.combinations(mats, 2):
            if np.max(np.abs(p @ q - q @ p)) > tol:
                defects.append(f"{kind} {i} has non-commuting entries")
                break
        prod = reduce(np.matmul, mats)
        if np.max(np.abs(prod - target * ident)) > tol:
            defects.append(f"{kind} {i} product is not {'+' if target > 0 else '-'}identity")
    for x, y in itertools.product(range(3), repeat=2):
        m = square[x][y].matrix
        if np.max(np.abs(m - m.T)) > tol:
            defects.append(f"entry ({x},{y}) is not transpose-invariant")
    return defects


@dataclass(frozen=True, eq=False)
class StateVector:
    amplitudes: np.ndarray
    dims: tuple[int, int]

    def __post_init__(self):
        amps = np.array(self.amplitudes, dtype=complex)
        if amps.ndim != 1:
            raise ValueError("only pure states (1-d amplitude vectors) are supported; got a mixed-state-shaped array")
        d_a, d_b = (int(d) for d in self.dims)
        if d_a * d_b != amps.size:
            raise ValueError(f"dimension split {d_a}x{d_b} does not match {amps.size} amplitudes")
        norm = np.linalg.norm(amps)
        if abs(norm - 1) > NORM_TOL:
            raise ValueError(f"state is not normalized (norm {norm!r})")
        amps.setflags(write=False)
        object.__setattr__(self, "amplitudes", amps)
        object.__setattr__(self, "dims", (d_a, d_b))

    def as_matrix(self) -> np.ndarray:
        return self.amplitudes.reshape(self.dims)


def maximally_entangled(dim: int) -> StateVector:
    amps = np.eye(dim, dtype=complex).reshape(-1) / np.sqrt(dim)
    return StateVector(amps, (dim, dim))


def paired_bell_state() -> StateVector:
    """|Phi+> on (A1, B1) times |Phi+> on (A2, B2), in the (A1 A2 | B1 B2) order."""
    amps = np.zeros(16, dtype=complex)
    for i, j in itertools.product(range(2), repeat=2):
        amps[i * 8 + j * 4 + i * 2 + j] = 0.5
    return StateVector(amps, (4, 4))


def singlet() -> StateVector:
    return StateVector(np.array([0, 1, -1, 0], dtype=complex) / np.sqrt(2), (2, 2))


@dataclass(frozen=True, eq=False)
class ProjectiveMeasurement:
    """Labelled projectors; validated as a resolution of the identity."""

    outcomes: tuple[tuple[Hashable, np.ndarray], ...]
    tol: float = field(default=PROJECTOR_TOL, compare=False)

    def __post_init__(self):
        outcomes = tuple((label, np.array(p, dtype=complex)) for label, p in self.outcomes)
        if not outcomes:
            raise ValueError("measurement needs at least one outcome")
        labels = [label for label, _ in outcomes]
        if len(set(labels)) != len(labels):
            raise ValueError(f"duplicate outcome labels {labels}")
        dim = outcomes[0][1].shape[0]
        for _, p in outcomes:
            if p.shape != (dim, dim):
                raise ValueError("projectors must be square and of equal size")
            p.setflags(write=False)
        object.__setattr__(self, "outcomes", outcomes)
        defects = self.defects()
        if defects:
            raise ValueError("not a projective measurement: " + "; ".join(defects))

    @property
    def dim(self) -> int:
        return self.outcomes[0][1].shape[0]

    @property
    def labels(self) -> list:
        return [label for label, _ in self.outcomes]

    def projector(self, label) -> np.ndarray:
        for lab, p in self.outcomes:
            if lab == label:
                return p
        raise KeyError(label)

    def defects(self) -> list[str]:
        out = []
        mats = [p for _, p in self.outcomes]
        for label, p in self.outcomes:
            if np.max(np.abs(p @ p - p)) > self.tol:
                out.append(f"projector {label!r} is not idempotent")
            if np.max(np.abs(p - p.conj().T)) > self.tol:
                out.append(f"projector {label!r} is not Hermitian")
        for (la, p), (lb, q) in itertools.combinations(self.outcomes, 2):
            if np.max(np.abs(p @ q)) > self.tol:
                out.append(f"projectors {la!r} and {lb!r} are not orthogonal")
        if np.max(np.abs(sum(mats) - np.eye(self.dim))) > self.tol:
            out.append("projectors do not sum to the identity")
        return out

    def relabel(self, mapping) -> ProjectiveMeasurement:
        """Apply ``mapping`` to the labels, summing projectors that collide."""
        merged: dict = {}
        for label, p in self.outcomes:
            new = mapping(label)
            merged[new] = merged.get(new, 0) + p
        return ProjectiveMeasurement(tuple(sorted(merged.items(), key=lambda kv: kv[0])), self.tol)

    def padded(self, labels: Sequence) -> ProjectiveMeasurement:
        """Add zero projectors for labels that never occur."""
        have = set(self.labels)
        extra = tuple((lab, np.zeros((self.dim, self.dim), dtype=complex)) for lab in labels if lab not in have)
        return ProjectiveMeasurement(tuple(sorted(self.outcomes + extra, key=lambda kv: kv[0])), self.tol)

    def conjugated(self, unitary: np.ndarray) -> ProjectiveMeasurement:
        u = np.asarray(unitary)
        return ProjectiveMeasurement(tuple((lab, u @ p @ u.conj().T) for lab, p in self.outcomes), self.tol)


def joint_measurement(observables: Sequence[SignedPauliString], tol: float = PROJECTOR_TOL) -> ProjectiveMeasurement:
    """Measure commuting +-1 observables together.

    The outcome ``(t_0, ..., t_k)`` has projector
    ``prod_i (1 + (-1)**t_i O_i) / 2``; bit 0 means eigenvalue +1.
    """
    mats = [o.matrix if isinstance(o, SignedPauliString) else np.asarray(o, dtype=complex) for o in observables]
    for (i, p), (j, q) in itertools.combinations(enumerate(mats), 2):
        if np.max(np.abs(p @ q - q @ p)) > tol:
            raise NonCommutingError(f"observables {i} and {j} do not commute")
    ident = np.eye(mats[0].shape[0], dtype=complex)
    outcomes = []
    for bits in itertools.product((0, 1), repeat=len(mats)):
        proj = reduce(np.matmul, [(ident + (-1) ** t * m) / 2 for t, m in zip(bits, mats)])
        if np.max(np.abs(proj)) > tol:
            outcomes.append((bits, proj))
    return ProjectiveMeasurement(tuple(outcomes), tol)


@dataclass(frozen=True, eq=False)
class QuantumStrategy:
    state: StateVector
    alice: tuple[ProjectiveMeasurement, ...]
    bob: tuple[ProjectiveMeasurement, ...]

    def __post_init__(self):
        object.__setattr__(self, "alice", tuple(self.alice))
        object.__setattr__(self, "bob", tuple(self.bob))
        d_a, d_b = self.state.dims
        if any(m.dim != d_a for m in self.alice) or any(m.dim != d_b for m in self.bob):
            raise ValueError("measurement dimensions do not match the state's party split")

    @property
    def m_a(self) -> int:
        return len(self.alice)

    @property
    def m_b(self) -> int:
        return len(self.bob)

    def check_compatible(self, game: GameRelation) -> None:
        if (self.m_a, self.m_b) != (game.m_a, game.m_b):
            raise ValueError(f"strategy has {self.m_a}x{self.m_b} inputs, game has {game.m_a}x{game.m_b}")
        for party, ms, n in (("Alice", self.alice, game.n_a), ("Bob", self.bob, game.n_b)):
            for i, m in enumerate(ms):
                if sorted(m.labels) != list(range(n)):
                    raise ValueError(f"{party}'s measurement {i} has labels {m.labels}, expected 0..{n - 1}")

    def restrict(self, alice_inputs=None, bob_inputs=None) -> QuantumStrategy:
        alice = self.alice if alice_inputs is None else tuple(self.alice[x] for x in alice_inputs)
        bob = self.bob if bob_inputs is None else tuple(self.bob[y] for y in bob_inputs)
        return QuantumStrategy(self.state, alice, bob)

    def transformed(self, u_a: np.ndarray, u_b: np.ndarray) -> QuantumStrategy:
        """Apply ``U_A (x) U_B`` to the state and conjugate every projector."""
        m = np.asarray(u_a) @ self.state.as_matrix() @ np.asarray(u_b).T
        state = StateVector(m.reshape(-1), self.state.dims)
        return QuantumStrategy(
            state,
            tuple(meas.conjugated(u_a) for meas in self.alice),
            tuple(meas.conjugated(u_b) for meas in self.bob),
        )


def _expectation(psi: np.ndarray, transformed: np.ndarray) -> float:
    value = np.vdot(psi, transformed)
    if abs(value.imag) > PROJECTOR_TOL:
        raise ArithmeticError(f"expectation has imaginary part {value.imag!r}")
    return float(value.real)


def joint_probability(strategy: QuantumStrategy, x: int, y: int, a, b) -> float:
    psi = strategy.state.as_matrix()
    p = strategy.alice[x].projector(a)
    q = strategy.bob[y].projector(b)
    return _expectation(psi, p @ psi @ q.T)


def success_terms(strategy: QuantumStrategy, game: GameRelation) -> np.ndarray:
    """Probability of winning on each input pair, as an ``(m_A, m_B)`` array."""
    strategy.check_compatible(game)
    terms = np.zeros((game.m_a, game.m_b))
    for x, y in itertools.product(range(game.m_a), range(game.m_b)):
        terms[x, y] = sum(
            joint_probability(strategy, x, y, int(a), int(b)) for a, b in np.argwhere(game.wins[x, y])
        )
    return terms


def winning_probability(strategy: QuantumStrategy, game: GameRelation) -> float:
    return float(success_terms(strategy, game).mean())


def labelled_behavior(strategy: QuantumStrategy, n_a: int, n_b: int) -> np.ndarray:
    """``P[x, y, a, b]`` for integer labels ``0..n-1`` (missing labels give 0)."""
    out = np.zeros((strategy.m_a, strategy.m_b, n_a, n_b))
    for x, ma in enumerate(strategy.alice):
        for y, mb in enumerate(strategy.bob):
            for a in ma.labels:
                for b in mb.labels:
                    out[x, y, a, b] = joint_probability(strategy, x, y, a, b)
    return out


# -- concrete strategies ---------------------------------------------------

def magic_square_quantum_strategy(square=None, bob_square=None) -> QuantumStrategy:
    """Alice measures row x of the square, Bob measures column y, on paired Bell states.

    Bit triples are sent as Restricted4 codes ``2*t0 + t1``. Bob uses
    ``bob_square`` when given (defaults to the same square).
    """
    square = mermin_peres_square() if square is None else square
    bob_square = square if bob_square is None else bob_square

    def code(bits):
        return TripleOutcome(bits).code

    alice = [joint_measurement(square_row(square, x)).relabel(code).padded(range(4)) for x in range(3)]
    bob = [joint_measurement(square_column(bob_square, y)).relabel(code).padded(range(4)) for y in range(3)]
    return QuantumStrategy(paired_bell_state(), alice, bob)


def magic_square_triple_measurements(square=None):
    """Unrelabelled joint measurements: (Alice's per row, Bob's per column)."""
    square = mermin_peres_square() if square is None else square
    return (
        [joint_measurement(square_row(square, x)) for x in range(3)],
        [joint_measurement(square_column(square, y)) for y in range(3)],
    )


def _qubit_observable(theta: float) -> np.ndarray:
    return np.cos(theta) * PAULI["Z"] + np.sin(theta) * PAULI["X"]


def _spectral(obs: np.ndarray, flip: bool = False) -> ProjectiveMeasurement:
    ident = np.eye(obs.shape[0], dtype=complex)
    plus, minus = (ident + obs) / 2, (ident - obs) / 2
    if flip:
        plus, minus = minus, plus
    return ProjectiveMeasurement(((0, plus), (1, minus)))


def chsh_quantum_strategy() -> QuantumStrategy:
    """Singlet with Alice at angles 0, pi/2 and Bob at pi/4, -pi/4 in the X-Z plane.

    The singlet anticorrelates equal settings, so Bob reports the opposite
    bit of his spectral outcome.
    """
    alice = [_spectral(_qubit_observable(t)) for t in (0.0, np.pi / 2)]
    bob = [_spectral(_qubit_observable(t), flip=True) for t in (np.pi / 4, -np.pi / 4)]
    return QuantumStrategy(singlet(), alice, bob)


def basis_measurement(dim: int, labels: Sequence[int]) -> ProjectiveMeasurement:
    """Computational-basis measurement reporting ``labels[k]`` on basis state k."""
    merged: dict = {}
    for k, lab in enumerate(labels):
        p = np.zeros((dim, dim), dtype=complex)
        p[k, k] = 1
        merged[lab] = merged.get(lab, 0) + p
    return ProjectiveMeasurement(tuple(sorted(merged.items(), key=lambda kv: kv[0])))


# -- classical strategy from a winning quantum one ---------------------------

def extract_classical_strategy(
    strategy: QuantumStrategy,
    game: GameRelation,
    eps: float = OVERLAP_EPS,
    check: bool = True,
) -> DeterministicStrategy:
    """Read a winning deterministic strategy off a winning quantum strategy.

    Alice has two inputs. For her answers ``a0`` (to x=0) and ``a1`` (to x=1)
    the post-measurement vectors ``(P_a0 (x) 1)|psi>`` and
    ``(P_a1 (x) 1)|psi>`` overlap for some pair, since both measurements
    resolve the identity. For every y a Bob outcome b then has non-negligible
    weight on both vectors, so ``(0, y, a0, b)`` and ``(1, y, a1, b)`` occur
    with positive probability and are winning.

    With ``check=False`` the winning precondition is not verified and the
    construction runs on whatever strategy is given.
    """
    if game.m_a != 2:
        raise ValueError(f"extraction needs m_A = 2, got {game.m_a}")
    strategy.check_compatible(game)
    if check:
        p_win = winning_probability(strategy, game)
        if p_win < 1 - WIN_TOL:
            raise NotWinningError(f"strategy wins with probability {p_win:.12f}, not 1")
    psi = strategy.state.as_matrix()

    def residual(x, a):
        v = strategy.alice[x].projector(a) @ psi
        n = np.linalg.norm(v)
        return v / n if n > eps else None

    res0 = {a: residual(0, a) for a in strategy.alice[0].labels}
    res1 = {a: residual(1, a) for a in strategy.alice[1].labels}
    for a0, a1 in itertools.product(sorted(res0), sorted(res1)):
        v0, v1 = res0[a0], res1[a1]
        if v0 is None or v1 is None or abs(np.vdot(v0, v1)) <= eps:
            continue
        b_map = []
        for meas in strategy.bob:
            for b in sorted(meas.labels):
                q = meas.projector(b)
                w0 = np.vdot(v0, v0 @ q.T).real
                w1 = np.vdot(v1, v1 @ q.T).real
                if w0 > eps and w1 > eps:
                    b_map.append(b)
                    break
            else:
                break
        if len(b_map) == strategy.m_b:
            return DeterministicStrategy((a0, a1), b_map)
    raise NoOverlapError("no pair of Alice outcomes with a common Bob answer for every input")


def extraction_report(strategy: QuantumStrategy, game: GameRelation, **kwargs):
    classical = extract_classical_strategy(strategy, game, **kwargs)
    return classical, winning_count(game, classical)

