"""Newton polytopes and the half-polytope pruning of Gram bases.

Everything here is exact: hull membership is decided by a phase-one simplex
over :class:`Fraction` with Bland's rule, so degenerate (lower-dimensional)
polytopes need no special casing.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass
from fractions import Fraction
from math import ceil, floor
from typing import Sequence

from .errors import NotEvenDegree, ZeroInput
from .polycore import Exponent, Polynomial, grevlex_key


def lp_feasible(A: Sequence[Sequence], b: Sequence) -> list[Fraction] | None:
    """Exact nonnegative solution of ``A x = b`` or None.

    Phase-one simplex on the artificial objective; Bland's rule rules out cycling.
    """
    m = len(A)
    k = len(A[0]) if m else 0
    rows = []
    for i in range(m):
        row = [Fraction(c) for c in A[i]]
        rhs = Fraction(b[i])
        if rhs < 0:
            row = [-c for c in row]
            rhs = -rhs
        art = [Fraction(int(j == i)) for j in range(m)]
        rows.append(row + art + [rhs])
    ncols = k + m
    basis = list(range(k, k + m))
    # reduced costs of the phase-one objective sum(artificials)
    cost = [-sum(rows[i][j] for i in range(m)) for j in range(k)] + [Fraction(0)] * m
    obj = -sum(rows[i][-1] for i in range(m))
    while True:
        enter = next((j for j in range(ncols) if cost[j] < 0), None)
        if enter is None:
            break
        best = None
        for i in range(m):
            a = rows[i][enter]
            if a > 0:
                ratio = rows[i][-1] / a
                if best is None or ratio < best[0] or (ratio == best[0] and basis[i] < basis[best[1]]):
                    best = (ratio, i)
        if best is None:  # unbounded direction; cannot happen for phase one
            break
        r = best[1]
        piv = rows[r][enter]
        rows[r] = [c / piv for c in rows[r]]
        for i in range(m):
            if i != r and rows[i][enter]:
                f = rows[i][enter]
                rows[i] = [a - f * c for a, c in zip(rows[i], rows[r])]
        f = cost[enter]
        cost = [a - f * c for a, c in zip(cost, rows[r][:-1])]
        obj -= f * rows[r][-1]
        basis[r] = enter
    if obj != 0:
        return None
    x = [Fraction(0)] * k
    for i, j in enumerate(basis):
        if j < k:
            x[j] = rows[i][-1]
    return x


def in_convex_hull(point: Sequence, points: Sequence[Sequence]) -> bool:
    if not points:
        return False
    dim = len(point)
    A = [[Fraction(p[c]) for p in points] for c in range(dim)]
    A.append([Fraction(1)] * len(points))
    b = [Fraction(c) for c in point] + [Fraction(1)]
    return lp_feasible(A, b) is not None


@dataclass(frozen=True)
class LatticePolytope:
    dim: int
    vertices: tuple[Exponent, ...]

    def contains(self, point: Sequence) -> bool:
        """Exact membership for rational points."""
        if len(point) != self.dim:
            return False
        return in_convex_hull(point, self.vertices)

    def to_json(self) -> dict:
        return {"dim": self.dim, "vertices": [list(v) for v in self.vertices]}


def hull_vertices(points: Sequence[Sequence[int]], probes: int = 64) -> list[Exponent]:
    """Extreme points of a finite point set, exactly.

    Unique maximisers of integer linear functionals are vertices, which seeds
    a small vertex set cheaply.  A remaining point inside the hull of known
    vertices is not a vertex; anything else gets the full LP test against
    all other points.
    """
    pts = sorted({tuple(p) for p in points}, key=grevlex_key)
    if len(pts) <= 2:
        return pts
    dim = len(pts[0])
    rng = random.Random(len(pts))
    known = set()
    for k in range(probes + 2 * dim):
        if k < 2 * dim:
            w = [0] * dim
            w[k // 2] = 1 if k % 2 == 0 else -1
        else:
            w = [rng.randint(-7, 7) for _ in range(dim)]
        vals = [sum(a * b for a, b in zip(w, p)) for p in pts]
        top = max(vals)
        if vals.count(top) == 1:
            known.add(pts[vals.index(top)])
    verts = set(known)
    for i, p in enumerate(pts):
        if p in known:
            continue
        if in_convex_hull(p, sorted(known)):
            continue
        if not in_convex_hull(p, pts[:i] + pts[i + 1:]):
            verts.add(p)
    return sorted(verts, key=grevlex_key)


def newton_polytope(p: Polynomial) -> LatticePolytope:
    if p.is_zero():
        raise ZeroInput("Newton polytope of the zero polynomial")
    return LatticePolytope(p.nvars, tuple(hull_vertices(list(p.terms))))


def half_lattice_points(poly: LatticePolytope) -> list[Exponent]:
    """Integer points q >= 0 with 2q in the polytope, grevlex ordered.

    For a homogeneous polynomial of degree 2d these automatically have degree d;
    for an affine polynomial they are the candidate monomials of degree <= d.
    """
    degs = {sum(v) for v in poly.vertices}
    if any(d % 2 for d in degs if d == max(degs)):
        raise NotEvenDegree("Newton polytope has odd top degree")
    ranges = []
    for c in range(poly.dim):
        lo = min(v[c] for v in poly.vertices)
        hi = max(v[c] for v in poly.vertices)
        ranges.append(range(ceil(lo / 2), floor(hi / 2) + 1))
    homogeneous = len(degs) == 1
    half = max(degs) // 2
    out = []
    for q in itertools.product(*ranges):
        if homogeneous and sum(q) != half:
            continue
        if poly.contains([2 * k for k in q]):
            out.append(tuple(q))
    out.sort(key=grevlex_key)
    return out


def newton_basis(p: Polynomial, poly: LatticePolytope | None = None) -> list[Exponent]:
    if p.degree % 2:
        raise NotEvenDegree(f"degree {p.degree} is odd")
    return half_lattice_points(poly or newton_polytope(p))


@dataclass(frozen=True)
class NecessaryCheck:
    passed: bool
    reason: str = ""

    def __bool__(self) -> bool:
        return self.passed


def sos_necessary_check(p: Polynomial, poly: LatticePolytope | None = None) -> NecessaryCheck:
    """Cheap obstructions to being a sum of squares read off the Newton polytope."""
    if p.is_zero():
        return NecessaryCheck(True)
    if p.degree % 2:
        return NecessaryCheck(False, f"odd degree {p.degree}")
    for v in (poly or newton_polytope(p)).vertices:
        if any(k % 2 for k in v):
            return NecessaryCheck(False, f"vertex {list(v)} has an odd exponent")
        if p.terms[v] < 0:
            return NecessaryCheck(False, f"vertex {list(v)} has negative coefficient {p.terms[v]}")
    return NecessaryCheck(True)
