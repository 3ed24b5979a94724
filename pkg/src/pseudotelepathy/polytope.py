"""Local polytopes in Collins-Gisin coordinates and exact facet checks.

Coordinate order of a behavior vector of length ``d``:

1. Alice marginals ``P(a|x)`` for ``a < n_A - 1``, x-major;
2. Bob marginals ``P(b|y)`` for ``b < n_B - 1``, y-major;
3. joints ``P(a, b|x, y)`` for ``a < n_A - 1``, ``b < n_B - 1``, in
   ``(x, y, a, b)`` lexicographic order.

The last outcome of each party is implicit.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import TYPE_CHECKING, Sequence

import numpy as np

from .errors import DegenerateFaceError
from .games import DeterministicStrategy, count_deterministic, value_blocks

if TYPE_CHECKING:
    from .bell import BellExpression


@dataclass(frozen=True)
class PolytopeParams:
    m_a: int
    m_b: int
    n_a: int
    n_b: int

    def __post_init__(self):
        for name in ("m_a", "m_b", "n_a", "n_b"):
            v = int(getattr(self, name))
            if v < 1:
                raise ValueError(f"{name} must be >= 1, got {v}")
            object.__setattr__(self, name, v)

    @property
    def shape(self) -> tuple[int, int, int, int]:
        return (self.m_a, self.m_b, self.n_a, self.n_b)

    @property
    def dimension(self) -> int:
        return cg_dimension(self)

    @property
    def vertex_count(self) -> int:
        return count_deterministic(*self.shape)

    def __str__(self):
        return "({},{},{},{})".format(*self.shape)


def cg_dimension(params: PolytopeParams | Sequence[int]) -> int:
    m_a, m_b, n_a, n_b = params.shape if isinstance(params, PolytopeParams) else params
    return m_a * m_b * (n_a - 1) * (n_b - 1) + m_a * (n_a - 1) + m_b * (n_b - 1)


def _offsets(params: PolytopeParams):
    m_a, m_b, n_a, n_b = params.shape
    bob0 = m_a * (n_a - 1)
    joint0 = bob0 + m_b * (n_b - 1)
    return bob0, joint0


def cg_index_joint(params: PolytopeParams, x: int, y: int, a: int, b: int) -> int:
    _, joint0 = _offsets(params)
    return joint0 + ((x * params.m_b + y) * (params.n_a - 1) + a) * (params.n_b - 1) + b


def strategy_to_cg(strategy: DeterministicStrategy, params: PolytopeParams) -> np.ndarray:
    """0/1 Collins-Gisin vector of a deterministic strategy (int64)."""
    strategy.validate(*params.shape)
    m_a, m_b, n_a, n_b = params.shape
    bob0, _ = _offsets(params)
    vec = np.zeros(cg_dimension(params), dtype=np.int64)
    for x, a in enumerate(strategy.a_map):
        if a < n_a - 1:
            vec[x * (n_a - 1) + a] = 1
    for y, b in enumerate(strategy.b_map):
        if b < n_b - 1:
            vec[bob0 + y * (n_b - 1) + b] = 1
    for x, a in enumerate(strategy.a_map):
        if a == n_a - 1:
            continue
        for y, b in enumerate(strategy.b_map):
            if b < n_b - 1:
                vec[cg_index_joint(params, x, y, a, b)] = 1
    return vec


def cg_matrix(strategies: Sequence[DeterministicStrategy], params: PolytopeParams) -> np.ndarray:
    if not strategies:
        return np.zeros((0, cg_dimension(params)), dtype=np.int64)
    return np.stack([strategy_to_cg(s, params) for s in strategies])


def full_to_cg(dist, params: PolytopeParams) -> list:
    """Collins-Gisin coordinates of a no-signalling table ``P[x, y, a, b]``.

    Marginals are read off input 0 of the other party.
    """
    m_a, m_b, n_a, n_b = params.shape
    p = np.asarray(dist, dtype=object)
    out = []
    for x in range(m_a):
        for a in range(n_a - 1):
            out.append(sum(p[x, 0, a, b] for b in range(n_b)))
    for y in range(m_b):
        for b in range(n_b - 1):
            out.append(sum(p[0, y, a, b] for a in range(n_a)))
    for x in range(m_a):
        for y in range(m_b):
            for a in range(n_a - 1):
                for b in range(n_b - 1):
                    out.append(p[x, y, a, b])
    return out


def cg_to_full(vec, params: PolytopeParams) -> np.ndarray:
    """Expand Collins-Gisin coordinates back to the table ``P[x, y, a, b]``."""
    m_a, m_b, n_a, n_b = params.shape
    bob0, _ = _offsets(params)
    vec = [Fraction(v) for v in vec]
    if len(vec) != cg_dimension(params):
        raise ValueError(f"expected {cg_dimension(params)} coordinates, got {len(vec)}")
    out = np.empty((m_a, m_b, n_a, n_b), dtype=object)
    for x in range(m_a):
        pa = [vec[x * (n_a - 1) + a] for a in range(n_a - 1)]
        pa.append(1 - sum(pa))
        for y in range(m_b):
            pb = [vec[bob0 + y * (n_b - 1) + b] for b in range(n_b - 1)]
            pb.append(1 - sum(pb))
            joint = [[vec[cg_index_joint(params, x, y, a, b)] for b in range(n_b - 1)] for a in range(n_a - 1)]
            for a in range(n_a - 1):
                for b in range(n_b - 1):
                    out[x, y, a, b] = joint[a][b]
                out[x, y, a, n_b - 1] = pa[a] - sum(joint[a])
            for b in range(n_b - 1):
                out[x, y, n_a - 1, b] = pb[b] - sum(joint[a][b] for a in range(n_a - 1))
            out[x, y, n_a - 1, n_b - 1] = pa[n_a - 1] - sum(out[x, y, n_a - 1, b] for b in range(n_b - 1))
    return out


def rank_exact(matrix) -> int:
    """Rank over the rationals by fraction-free (Bareiss) elimination.

    Entries must be integers; all arithmetic is on Python ints.
    """
    rows = [list(r) for r in matrix]
    if not rows or not rows[0]:
        return 0
    for r in rows:
        for v in r:
            if isinstance(v, (float, np.floating, complex)):
                raise TypeError("rank_exact takes integer entries only")
    m = np.array([[int(v) for v in r] for r in rows], dtype=object)
    n_rows, n_cols = m.shape
    rank = 0
    prev = 1
    for c in range(n_cols):
        if rank == n_rows:
            break
        nz = np.flatnonzero(m[rank:, c] != 0)
        if len(nz) == 0:
            continue
        piv = rank + int(nz[0])
        if piv != rank:
            m[[rank, piv]] = m[[piv, rank]]
        p = m[rank, c]
        below = m[rank + 1:, c + 1:]
        # exact: every updated entry is a minor of the original matrix
        m[rank + 1:, c + 1:] = (p * below - np.outer(m[rank + 1:, c], m[rank, c + 1:])) // prev
        m[rank + 1:, c] = 0
        prev = p
        rank += 1
    return rank


def saturating_vertices(
    expr: BellExpression, params: PolytopeParams | None = None, budget: int | None = None
) -> list[DeterministicStrategy]:
    """All deterministic strategies on which ``expr`` equals its local bound."""
    if params is not None and params != expr.params:
        expr = expr.embed(params)
    table, scale = expr.integer_table()
    target = expr.local_bound * scale
    if target.denominator != 1:
        return []
    target = target.numerator
    found = []
    for start, alice, bob, values in value_blocks(table, budget):
        for i, j in np.argwhere(values == target):
            found.append(DeterministicStrategy(alice[start + i], bob[j]))
    return found


@dataclass(frozen=True)
class FacetCertificate:
    verdict: bool
    vertex_count: int
    rank: int
    dimension: int
    total_vertices: int
    reason: str

    def as_tuple(self) -> tuple[int, int, int]:
        return (self.vertex_count, self.rank, self.dimension)


def is_facet(
    expr: BellExpression,
    params: PolytopeParams | None = None,
    budget: int | None = None,
    proper_face_guard: bool = True,
) -> FacetCertificate:
    """Decide whether ``expr <= local_bound`` defines a facet of the local polytope.

    The saturating vertices are stacked as Collins-Gisin rows and the facet
    test is ``rank == d``. The proper-face guard additionally rejects a bound
    that some vertex exceeds, a face containing every vertex, and handles a
    hyperplane through the origin (there the test becomes ``rank == d - 1``).
    """
    if params is not None and params != expr.params:
        expr = expr.embed(params)
    params = expr.params
    d = cg_dimension(params)
    total = params.vertex_count

    best, _ = expr.local_maximum(budget)
    vertices = saturating_vertices(expr, budget=budget)
    if not vertices:
        raise DegenerateFaceError(f"no deterministic strategy reaches the bound {expr.local_bound}")
    rank = rank_exact(cg_matrix(vertices, params))

    def cert(verdict, reason):
        return FacetCertificate(verdict, len(vertices), rank, d, total, reason)

    if not proper_face_guard:
        return cert(rank == d, "rank test only")
    if best > expr.local_bound:
        return cert(False, f"not a valid inequality: local maximum {best} exceeds bound")
    if len(vertices) == total:
        return cert(False, "not a proper face: every vertex saturates")
    origin = DeterministicStrategy([params.n_a - 1] * params.m_a, [params.n_b - 1] * params.m_b)
    if expr.evaluate_on_strategy(origin) == expr.local_bound:
        needed = d - 1
        return cert(rank == needed, f"hyperplane through origin, rank {rank} vs required {needed}")
    return cert(rank == d, f"rank {rank} vs required {d}")
