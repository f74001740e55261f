"""Quadrics through Veronese varieties, inner projections and quadratic persistence.

A quadric in the coordinates y_m (m a degree-d monomial in n+1 variables)
is a symmetric matrix Q.  It contains nu_d(P^n) iff every product monomial
collects zero total weight from Q.  Projecting from a point v of the variety
keeps those quadrics that are cones over v (Q v = 0); in coordinates where v
is the first basis vector that is the same as dropping one row and column.

All of this is exact rational arithmetic.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from math import comb
from typing import Sequence

import numpy as np

from . import exactla
from .errors import NotOnVariety, TooLarge
from .polycore import Exponent, monomial_basis

MAX_AMBIENT = 60

SymMatrix = list[list[Fraction]]


def _zeros(n: int) -> SymMatrix:
    return [[Fraction(0)] * n for _ in range(n)]


def quadric_value(Q: SymMatrix, v: Sequence) -> Fraction:
    return sum((Q[i][j] * v[i] * v[j] for i in range(len(v)) if v[i] for j in range(len(v)) if v[j] and Q[i][j]),
               Fraction(0))


def veronese_point(p: Sequence, d: int) -> list[Fraction]:
    """nu_d(p) in the grevlex order of the degree-d monomials."""
    basis = monomial_basis(len(p), d)
    return [Fraction(v) for v in basis.evaluate([Fraction(c) for c in p])]


@dataclass(frozen=True)
class ProjectionStep:
    """z_i = y_i - (v_i / v_j) y_j for i != j, and coordinate j is dropped."""

    pivot: int
    ratios: tuple[Fraction, ...]

    def apply(self, y: Sequence[Fraction]) -> list[Fraction]:
        yj = y[self.pivot]
        return [y[i] - self.ratios[i] * yj for i in range(len(y)) if i != self.pivot]


@dataclass(eq=False)
class QuadricSpace:
    """Basis of I(X)_2 for X = a projection of nu_d(P^n)."""

    n: int
    d: int
    ambient: int
    quadrics: list[SymMatrix]
    steps: tuple[ProjectionStep, ...] = ()

    @property
    def dim(self) -> int:
        return len(self.quadrics)

    @property
    def codim(self) -> int:
        return self.ambient - 1 - self.n

    def embed(self, p: Sequence) -> list[Fraction]:
        """Image of the affine point p under nu_d and the projections so far."""
        y = veronese_point(p, self.d)
        for s in self.steps:
            y = s.apply(y)
        return y

    def contains(self, v: Sequence) -> bool:
        return all(quadric_value(Q, v) == 0 for Q in self.quadrics)

    def cone_system(self, v: Sequence) -> list[list[Fraction]]:
        """Rows a: sum_k c_k (Q_k v)_a = 0."""
        cols = [[sum((Q[a][b] * v[b] for b in range(self.ambient) if v[b] and Q[a][b]), Fraction(0))
                 for a in range(self.ambient)] for Q in self.quadrics]
        return exactla.transpose(cols) if cols else []

    def drop(self, v: Sequence) -> int:
        """How many quadrics are lost when projecting from v."""
        if not self.quadrics:
            return 0
        return exactla.rank(self.cone_system(v))

    def to_json(self) -> dict:
        return {"n": self.n, "d": self.d, "ambient": self.ambient, "dim_I2": self.dim,
                "projections": len(self.steps)}


def veronese_quadrics(n: int, d: int) -> QuadricSpace:
    """I_2 of nu_d(P^n) in P^N, N + 1 = C(n + d, d).

    The multiplication map Sym^2 R_d -> R_2d sends y_a y_b to m_a m_b, so its
    kernel is spanned by differences of pairs with the same product.
    """
    if n < 1 or d < 1:
        raise ValueError("need n >= 1 and d >= 1")
    basis = monomial_basis(n + 1, d)
    N1 = len(basis)
    if N1 > MAX_AMBIENT:
        raise TooLarge(f"ambient dimension {N1} exceeds {MAX_AMBIENT}")
    groups: dict[Exponent, list[tuple[int, int]]] = {}
    for a in range(N1):
        for b in range(a, N1):
            m = tuple(x + y for x, y in zip(basis[a], basis[b]))
            groups.setdefault(m, []).append((a, b))
    half = Fraction(1, 2)

    def unit(pair):
        Q = _zeros(N1)
        a, b = pair
        if a == b:
            Q[a][a] = Fraction(1)
        else:
            Q[a][b] = Q[b][a] = half
        return Q

    quadrics = []
    for m in sorted(groups, key=lambda e: (sum(e), tuple(reversed(e)))):
        pairs = groups[m]
        for other in pairs[1:]:
            P, R = unit(pairs[0]), unit(other)
            quadrics.append([[P[i][j] - R[i][j] for j in range(N1)] for i in range(N1)])
    expected = comb(N1 + 1, 2) - comb(n + 2 * d, 2 * d)
    assert len(quadrics) == expected, (len(quadrics), expected)
    return QuadricSpace(n, d, N1, quadrics)


def project_from_point(Q: QuadricSpace, v: Sequence) -> QuadricSpace:
    v = [Fraction(c) for c in v]
    if len(v) != Q.ambient:
        raise NotOnVariety(f"point has {len(v)} coordinates, ambient space has {Q.ambient}")
    if not any(v):
        raise NotOnVariety("zero vector is not a projective point")
    if not Q.contains(v):
        raise NotOnVariety("point is not on the variety cut out by the quadrics")
    j = next(i for i, c in enumerate(v) if c)
    step = ProjectionStep(j, tuple(c / v[j] for c in v))
    kept = []
    if Q.quadrics:
        system = Q.cone_system(v)
        red, pivots = exactla.rref(system, len(Q.quadrics))
        pivset = set(pivots)
        for f in range(len(Q.quadrics)):
            if f in pivset:
                continue
            combo = {f: Fraction(1)}
            for row, pc in zip(red, pivots):
                if row[f]:
                    combo[pc] = -row[f]
            M = _zeros(Q.ambient)
            for k, c in combo.items():
                Qk = Q.quadrics[k]
                for a in range(Q.ambient):
                    ra, Ma = Qk[a], M[a]
                    for b in range(Q.ambient):
                        if ra[b]:
                            Ma[b] += c * ra[b]
            kept.append([[M[a][b] for b in range(Q.ambient) if b != j] for a in range(Q.ambient) if a != j])
    return QuadricSpace(Q.n, Q.d, Q.ambient - 1, kept, Q.steps + (step,))


@dataclass
class ProjectionTrace:
    n: int
    d: int
    steps: list = field(default_factory=list)

    @property
    def qp(self) -> int:
        return len(self.steps)

    @property
    def drops(self) -> tuple[int, ...]:
        return tuple(s["before"] - s["after"] for s in self.steps)

    def to_json(self) -> dict:
        return {
            "n": self.n,
            "d": self.d,
            "qp": self.qp,
            "drops": list(self.drops),
            "steps": [dict(s, point=[int(c) for c in s["point"]]) for s in self.steps],
        }


def _random_point(rng: np.random.Generator, n: int, bound: int = 10) -> tuple[int, ...]:
    while True:
        p = tuple(int(c) for c in rng.integers(-bound, bound + 1, size=n + 1))
        if any(p):
            return p


def quadratic_persistence(n: int, d: int, seed: int = 0, candidates: int = 3,
                          max_steps: int | None = None, on_step=None) -> ProjectionTrace:
    """Project from seeded random points until no quadric survives.

    Each step scores ``candidates`` points by the exact drop and projects from
    the best one.  ``max_steps`` stops early (the trace then records a partial
    run with quadrics left).
    """
    rng = np.random.default_rng(seed)
    Q = veronese_quadrics(n, d)
    trace = ProjectionTrace(n, d)
    while Q.dim > 0 and (max_steps is None or trace.qp < max_steps):
        best = None
        for _ in range(candidates):
            p = _random_point(rng, n)
            v = Q.embed(p)
            if not any(v):
                continue
            drop = Q.drop(v)
            if best is None or drop > best[0]:
                best = (drop, p, v)
        if best is None:
            continue
        drop, p, v = best
        codim = Q.codim
        before = Q.dim
        Q = project_from_point(Q, v)
        assert before - Q.dim == drop
        if drop > codim:
            raise AssertionError(f"drop {drop} exceeds codimension {codim}")
        trace.steps.append({"point": p, "before": before, "after": Q.dim, "codim": codim})
        if on_step is not None:
            on_step(trace.steps[-1])
    return trace


def castelnuovo_check(Q: QuadricSpace | int, dim_X: int, codim_X: int) -> dict:
    """dim I_2 <= C(codim + 1, 2), with equality exactly for varieties of minimal degree."""
    if dim_X < 0 or codim_X < 0:
        raise ValueError("dimensions must be nonnegative")
    dim_I2 = Q.dim if isinstance(Q, QuadricSpace) else int(Q)
    bound = comb(codim_X + 1, 2)
    return {"bound": bound, "dim_I2": dim_I2, "equality": dim_I2 == bound, "within_bound": dim_I2 <= bound}


def pythagoras_lower_bound(N_ambient: int, qp: int) -> int:
    """Lower bound N + 1 - qp on the Pythagoras number of X in P^N."""
    if qp < 0 or qp > N_ambient + 1:
        raise ValueError(f"qp={qp} out of range for P^{N_ambient}")
    return N_ambient + 1 - qp


def veronese_pythagoras_bound(n: int, d: int, qp: int | None = None, seed: int = 0) -> int:
    """Bound for nu_d(P^n); runs the persistence computation when qp is not given."""
    N = comb(n + d, d) - 1
    if qp is None:
        qp = quadratic_persistence(n, d, seed).qp
    return pythagoras_lower_bound(N, qp)
