"""Linear functionals on forms seen as quadratic forms, and their extreme rays.

A functional ell on degree-2d forms gives the matrix Q_ell[i][j] = ell(m_i m_j)
over the degree-d monomials.  ell is nonnegative on squares exactly when
Q_ell is PSD.  Point evaluations give rank one; the Cayley-Bacharach relation
among nine points of two plane cubics gives an extreme functional of rank 7.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np

from . import exactla
from .errors import (DegenerateConfiguration, DimensionMismatch, NotInSubspace, NotPsd, NotRankOne,
                     NotVeroneseConsistent, ZeroInput)
from .numerics import as_symmetric, eigendecompose, is_psd, numerical_rank
from .polycore import Exponent, MonomialBasis, grevlex_key, monomial_basis


def hankel_matrix(moments: Sequence[float]) -> np.ndarray:
    """(d+1) x (d+1) matrix with entry (i, j) = moments[i + j]."""
    m = np.asarray(moments, dtype=float).reshape(-1)
    if m.size % 2 == 0:
        raise DimensionMismatch(f"need 2d+1 moments, got {m.size}")
    d = m.size // 2
    idx = np.add.outer(np.arange(d + 1), np.arange(d + 1))
    return m[idx]


def _product(a: Exponent, b: Exponent) -> Exponent:
    return tuple(x + y for x, y in zip(a, b))


def moment_matrix(basis: MonomialBasis, values: dict) -> np.ndarray:
    """Q_ell[i][j] = ell(m_i m_j); products missing from ``values`` read as 0."""
    n = len(basis)
    Q = np.zeros((n, n))
    for i in range(n):
        for j in range(i, n):
            Q[i, j] = Q[j, i] = values.get(_product(basis[i], basis[j]), 0.0)
    return Q


@dataclass(frozen=True, eq=False)
class MomentFunctional:
    basis: MonomialBasis
    values: dict

    @property
    def matrix(self) -> np.ndarray:
        return moment_matrix(self.basis, self.values)

    def __call__(self, m: Sequence[int]) -> float:
        return self.values.get(tuple(m), 0.0)

    def to_json(self) -> dict:
        return {
            "basis": self.basis.to_json(),
            "values": [{"monomial": list(m), "value": v}
                       for m, v in sorted(self.values.items(), key=lambda kv: grevlex_key(kv[0]))],
            "matrix": self.matrix.tolist(),
        }


def product_monomials(basis: MonomialBasis) -> list[Exponent]:
    out = {_product(a, b) for a in basis for b in basis}
    return sorted(out, key=grevlex_key)


def point_evaluation_functional(v: Sequence[float], basis: MonomialBasis,
                                normalize: bool = True) -> MomentFunctional:
    """ell_v(f) = f(v), with v rescaled to unit length unless ``normalize`` is off."""
    x = np.asarray(v, dtype=float)
    if x.shape != (basis.nvars,):
        raise DimensionMismatch(f"point has {x.size} coordinates, basis has {basis.nvars} variables")
    nrm = float(np.linalg.norm(x))
    if nrm == 0:
        raise ZeroInput("point evaluation at the zero vector")
    if normalize:
        x = x / nrm
    values = {m: float(np.prod(x ** np.array(m))) for m in product_monomials(basis)}
    return MomentFunctional(basis, values)


def recover_point_from_rank1(Q, basis: MonomialBasis, tol: float = 1e-8) -> tuple[float, ...]:
    """The projective point behind a rank-one moment matrix, scaled so its first nonzero entry is 1."""
    A = as_symmetric(Q)
    if A.shape[0] != len(basis):
        raise DimensionMismatch(f"matrix is {A.shape[0]}x{A.shape[0]}, basis has {len(basis)} monomials")
    if not is_psd(A, tol):
        raise NotPsd("moment matrix is not PSD")
    rep = numerical_rank(A, tol)
    if rep.rank != 1:
        raise NotRankOne(f"numerical rank {rep.rank}")
    w_all, V = eigendecompose(A)
    w = V[:, 0] * np.sqrt(w_all[0])
    index = basis.index()
    k = int(np.argmax(np.abs(w)))
    top = basis[k]
    i = next(c for c, e in enumerate(top) if e > 0)
    point = np.zeros(basis.nvars)
    for j in range(basis.nvars):
        shifted = list(top)
        shifted[i] -= 1
        shifted[j] += 1
        point[j] = w[index[tuple(shifted)]] / w[k]
    first = next(c for c in point if abs(c) > tol)
    point = point / first
    model = np.array([np.prod(point ** np.array(m)) for m in basis])
    model = model / np.linalg.norm(model) * np.sign(model @ w)
    # w must be parallel to the evaluation vector of the recovered point
    if np.max(np.abs(model - w / np.linalg.norm(w))) > 1e-6:
        raise NotVeroneseConsistent("rank-one factor is not a monomial evaluation vector")
    return tuple(float(c) for c in point)


def moment_subspace(basis: MonomialBasis) -> list[np.ndarray]:
    """E_m for every product monomial m: ones exactly where m_i m_j = m."""
    out = []
    n = len(basis)
    for m in product_monomials(basis):
        E = np.zeros((n, n))
        for i in range(n):
            for j in range(n):
                if _product(basis[i], basis[j]) == m:
                    E[i, j] = 1.0
        out.append(E)
    return out


@dataclass(frozen=True, eq=False)
class ExtremeRayReport:
    is_extreme: bool
    rank: int
    kernel: np.ndarray
    solution_dimension: int
    witness: np.ndarray | None = None
    singular_values: tuple = ()

    def to_json(self) -> dict:
        return {
            "is_extreme": self.is_extreme,
            "rank": self.rank,
            "kernel_dimension": int(self.kernel.shape[1]),
            "solution_dimension": self.solution_dimension,
            "witness": None if self.witness is None else self.witness.tolist(),
        }


def _subspace_basis(mats: Sequence[np.ndarray], tol: float) -> np.ndarray:
    V = np.array([np.asarray(M, dtype=float).reshape(-1) for M in mats])
    if V.size == 0:
        raise DimensionMismatch("empty subspace")
    _, s, Wt = np.linalg.svd(V, full_matrices=False)
    r = int(np.sum(s > tol * s[0]))
    return Wt[:r]


def is_extreme_ray(Q, subspace: Sequence[np.ndarray], tol: float = 1e-7,
                   system_tol: float = 1e-10) -> ExtremeRayReport:
    """Kernel maximality inside the slice: extreme iff only multiples of Q kill ker(Q).

    Solves {A in span(subspace) : A K = 0} where the columns of K span ker(Q).
    ``tol`` decides the rank of Q, ``system_tol`` the rank of that linear system.
    """
    A = as_symmetric(Q)
    n = A.shape[0]
    if not is_psd(A, tol):
        raise NotPsd("matrix is not PSD")
    B = _subspace_basis(subspace, 1e-12)
    q = A.reshape(-1)
    coef, *_ = np.linalg.lstsq(B.T, q, rcond=None)
    if np.linalg.norm(B.T @ coef - q) > tol * max(1.0, np.linalg.norm(q)):
        raise NotInSubspace("matrix is not in the given subspace")
    rep = numerical_rank(A, tol)
    w, V = eigendecompose(A)
    K = V[:, rep.rank:]
    if K.shape[1] == 0:
        sol_dim = B.shape[0]
        sv = ()
        null = B
    else:
        # column k of the system: vec(E_k K)
        S = np.array([(b.reshape(n, n) @ K).reshape(-1) for b in B]).T
        _, sv, Wt = np.linalg.svd(S, full_matrices=True)
        scale = max(float(sv[0]) if sv.size else 0.0, 1.0)
        nnz = int(np.sum(sv > system_tol * scale))
        null = Wt[nnz:] @ B
        sol_dim = null.shape[0]
        sv = tuple(float(x) for x in sv)
    witness = None
    if sol_dim > 1:
        qn = q / np.linalg.norm(q)
        for row in null:
            r = row - (row @ qn) * qn
            if np.linalg.norm(r) > 1e-6 * np.linalg.norm(row):
                witness = (r / np.linalg.norm(r)).reshape(n, n)
                break
    return ExtremeRayReport(sol_dim == 1, rep.rank, K, sol_dim, witness, sv)


def rank2_extreme_example() -> tuple[np.ndarray, list[np.ndarray]]:
    """diag(1, 1, 0) inside span{diag(1,1,0), E13+E31, E23+E32}: PSD, rank 2, extreme."""
    Q = np.diag([1.0, 1.0, 0.0])
    E13 = np.zeros((3, 3))
    E13[0, 2] = E13[2, 0] = 1.0
    E23 = np.zeros((3, 3))
    E23[1, 2] = E23[2, 1] = 1.0
    return Q, [Q.copy(), E13, E23]


# -- Cayley-Bacharach ---------------------------------------------------------


@dataclass(eq=False)
class CayleyBacharach:
    lines: list
    points_exact: list
    points: np.ndarray
    evaluation_rank: int
    lam: np.ndarray
    mu: np.ndarray
    Q: np.ndarray
    eigenvalues: np.ndarray
    rank: int
    attempts: int
    extreme: ExtremeRayReport | None = None
    notes: list = field(default_factory=list)

    @property
    def basis(self) -> MonomialBasis:
        return monomial_basis(3, 3)

    def relation_residual(self, f_coeffs: np.ndarray) -> float:
        """|sum lambda_i f(v_i)| for a cubic given by coefficients on the cubic basis."""
        W = _evaluations(self.points, self.basis)
        return float(abs(self.lam @ (W @ f_coeffs)))

    def to_json(self) -> dict:
        return {
            "lines": [list(l) for l in self.lines],
            "points": self.points.tolist(),
            "points_exact": [[int(c) for c in p] for p in self.points_exact],
            "evaluation_rank": self.evaluation_rank,
            "lambda": self.lam.tolist(),
            "mu": self.mu.tolist(),
            "eigenvalues": self.eigenvalues.tolist(),
            "rank": self.rank,
            "is_extreme": None if self.extreme is None else self.extreme.is_extreme,
            "attempts": self.attempts,
            "Q_L": self.Q.tolist(),
        }


def _cross(a, b):
    return (a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0])


def _evaluations(points: np.ndarray, basis: MonomialBasis) -> np.ndarray:
    E = np.array(basis.monomials)
    return np.prod(points[:, None, :] ** E[None, :, :], axis=2)


def _draw_configuration(rng: np.random.Generator, coeff: int = 5):
    lines = [tuple(int(c) for c in rng.integers(-coeff, coeff + 1, size=3)) for _ in range(6)]
    if any(l == (0, 0, 0) for l in lines):
        return None, "zero line"
    pts, pairs = [], []
    for i in range(3):
        for j in range(3, 6):
            p = _cross(lines[i], lines[j])
            if p == (0, 0, 0):
                return None, "repeated line"
            pts.append(p)
            pairs.append((i, j))
    for p, (i, j) in zip(pts, pairs):
        for k in range(6):
            if k not in (i, j) and sum(a * b for a, b in zip(lines[k], p)) == 0:
                return None, "point on a third line"
    for a in range(9):
        for b in range(a + 1, 9):
            if _cross(pts[a], pts[b]) == (0, 0, 0):
                return None, "coincident points"
    return (lines, pts), ""


def cayley_bacharach(seed: int = 0, max_attempts: int = 50, tol: float = 1e-7,
                     check_extreme: bool = True) -> CayleyBacharach:
    """Nine points cut out by two triples of lines, and the functional on the edge of PSD-ness.

    The evaluation matrix on cubics has a one-dimensional left kernel lambda,
    computed exactly over the integers.  With lambda_9 = 1, mu_1..8 = 1 and
    mu_9 = -lambda_9^2 / sum_{i<=8} lambda_i^2 / mu_i the form
    sum mu_i f(v_i)^2 is PSD with a three-dimensional kernel.
    """
    rng = np.random.default_rng(seed)
    basis = monomial_basis(3, 3)
    for attempt in range(1, max_attempts + 1):
        conf, why = _draw_configuration(rng)
        if conf is None:
            continue
        lines, pts = conf
        Ev = [[Fraction(v) for v in basis.evaluate(p)] for p in pts]
        ev_rank = exactla.rank(Ev)
        if ev_rank != 8:
            continue
        kern = exactla.left_nullspace(Ev)
        if len(kern) != 1 or any(c == 0 for c in kern[0]):
            continue
        P = np.array(pts, dtype=float)
        norms = np.linalg.norm(P, axis=1)
        # evaluations of unit representatives pick up a factor |p|^-3
        lam = np.array([float(c) for c in kern[0]]) * norms ** 3
        # the point carrying the largest |lambda| goes last, which keeps mu_9 of order one
        order = np.argsort(np.abs(lam), kind="stable")
        pts = [pts[k] for k in order]
        lam, norms = lam[order], norms[order]
        unit = P[order] / norms[:, None]
        lam = lam / lam[8]
        mu = np.ones(9)
        mu[8] = -lam[8] ** 2 / float(np.sum(lam[:8] ** 2 / mu[:8]))
        W = _evaluations(unit, basis)
        Q = (W.T * mu) @ W
        Q = (Q + Q.T) / 2
        w, _ = eigendecompose(Q)
        rank = numerical_rank(Q, tol).rank
        out = CayleyBacharach(lines, pts, unit, ev_rank, lam, mu, Q, w, rank, attempt)
        if check_extreme:
            out.extreme = is_extreme_ray(Q, moment_subspace(basis), tol)
        return out
    raise DegenerateConfiguration(f"no generic configuration in {max_attempts} draws for seed {seed}")
