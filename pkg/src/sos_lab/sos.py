"""Sum-of-squares certification through Gram matrices.

p = sum q_k^2 with supp(q_k) inside a monomial basis m is the same as
p = m^T G m with G PSD.  Matching coefficients gives one linear equation per
product monomial, so the question is an SDP feasibility problem.  A feasible
G factors into squares; an infeasible one comes with a Farkas vector, which
we read as a linear functional ell that is nonnegative on squares (Q_ell PSD)
but negative on p.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np
from scipy.optimize import minimize

from . import sdp as sdp_mod
from .errors import BasisTooSmall, NotEvenDegree
from .graphs import PartialSymmetricMatrix, completion_sdp
from .moments import moment_matrix
from .newton import newton_basis, newton_polytope, sos_necessary_check
from .numerics import min_eigenvalue, psd_square_root_rows
from .polycore import Exponent, MonomialBasis, Polynomial, basis_from_monomials, grevlex_key, monomial_basis

OBJECTIVES = ("feasible", "min_trace", "max_trace")


@dataclass(frozen=True, eq=False)
class GramSystem:
    """The coefficient-matching equations for a basis, kept symbolically.

    ``pairs[m]`` maps index pairs (i, j), i <= j, to their multiplicity in the
    coefficient of m (2 off the diagonal, 1 on it).
    """

    basis: MonomialBasis
    monomials: tuple[Exponent, ...]
    pairs: dict

    def equation(self, m: Exponent) -> dict[tuple[int, int], int]:
        return dict(self.pairs[tuple(m)])


def gram_system(basis: MonomialBasis) -> GramSystem:
    pairs: dict[Exponent, dict] = {}
    monos = basis.monomials
    for i in range(len(monos)):
        for j in range(i, len(monos)):
            m = tuple(a + b for a, b in zip(monos[i], monos[j]))
            pairs.setdefault(m, {})[(i, j)] = 1 if i == j else 2
    order = tuple(sorted(pairs, key=grevlex_key))
    return GramSystem(basis, order, {m: pairs[m] for m in order})


def build_gram_sdp(p: Polynomial, basis: MonomialBasis) -> sdp_mod.SdpProblem:
    """Feasibility SDP in the Gram matrix; constraint k is labelled by its monomial."""
    if p.nvars != basis.nvars:
        raise BasisTooSmall(f"basis has {basis.nvars} variables, polynomial has {p.nvars}")
    system = gram_system(basis)
    missing = [e for e in p.support() if e not in system.pairs]
    if missing:
        raise BasisTooSmall(f"monomials {[list(e) for e in missing]} are not products of basis monomials")
    n = len(basis)
    A = np.zeros((len(system.monomials), n, n))
    b = np.zeros(len(system.monomials))
    for k, m in enumerate(system.monomials):
        for (i, j) in system.pairs[m]:
            A[k, i, j] = A[k, j, i] = 1.0
        b[k] = float(p.coefficient(m))
    return sdp_mod.SdpProblem.feasibility(A, b, n=n, labels=system.monomials)


@dataclass(eq=False)
class GramCertificate:
    basis: MonomialBasis
    gram: np.ndarray
    squares: list[Polynomial]
    residual: float
    status: str = "SOS"
    notes: list = field(default_factory=list)

    @property
    def rank(self) -> int:
        return len(self.squares)

    def to_json(self) -> dict:
        return {
            "status": self.status,
            "basis": self.basis.to_json(),
            "gram": self.gram.tolist(),
            "rank": self.rank,
            "squares": [q.to_json() for q in self.squares],
            "residual": self.residual,
            "notes": list(self.notes),
        }


@dataclass(eq=False)
class NotSosCertificate:
    """A functional ell, given by its values on products of basis monomials.

    ``kind`` is "dual" for a Farkas vector from the SDP and "point" for
    evaluation at a rational point where p is negative.
    """

    basis: MonomialBasis
    values: dict
    moment_matrix: np.ndarray
    ell_p: float
    delta: float
    kind: str = "dual"
    point: tuple | None = None
    status: str = "NotSOS"
    notes: list = field(default_factory=list)

    def verify(self, p: Polynomial, eps: float = 1e-6) -> bool:
        Q = moment_matrix(self.basis, self.values)
        scale = max(1.0, float(np.max(np.abs(Q)))) if Q.size else 1.0
        psd = Q.size == 0 or min_eigenvalue(Q) >= -eps * scale
        return bool(psd and apply_functional(self.values, p) <= -self.delta)

    def to_json(self) -> dict:
        return {
            "status": self.status,
            "kind": self.kind,
            "basis": self.basis.to_json(),
            "functional": [{"monomial": list(m), "value": v}
                           for m, v in sorted(self.values.items(), key=lambda kv: grevlex_key(kv[0]))],
            "moment_matrix": self.moment_matrix.tolist(),
            "min_eigenvalue": min_eigenvalue(self.moment_matrix) if self.moment_matrix.size else 0.0,
            "ell_p": self.ell_p,
            "delta": self.delta,
            "point": None if self.point is None else [str(c) for c in self.point],
            "notes": list(self.notes),
        }


@dataclass(eq=False)
class Indeterminate:
    reason: str
    iterations: int = 0
    status: str = "Indeterminate"
    notes: list = field(default_factory=list)

    def to_json(self) -> dict:
        return {"status": self.status, "reason": self.reason, "iterations": self.iterations,
                "notes": list(self.notes)}


def apply_functional(values: dict, p: Polynomial) -> float:
    return float(sum(float(c) * values.get(e, 0.0) for e, c in p.terms.items()))


def _default_basis(p: Polynomial, prune: bool, poly=None) -> MonomialBasis:
    if prune:
        return basis_from_monomials(newton_basis(p, poly))
    half = p.degree // 2
    return monomial_basis(p.nvars, half, up_to=not p.is_homogeneous())


def _squares_from_gram(basis: MonomialBasis, G: np.ndarray, rank_tol: float) -> list[Polynomial]:
    rows = psd_square_root_rows(G, rank_tol)
    out = []
    for g in rows:
        out.append(Polynomial(basis.nvars, {m: Fraction(float(c)) for m, c in zip(basis, g) if c != 0}))
    return out


def _gram_certificate(prob, basis, X, p, rank_tol) -> GramCertificate:
    G = (X + X.T) / 2
    squares = _squares_from_gram(basis, G, rank_tol)
    rows = psd_square_root_rows(G, rank_tol)
    recon = rows.T @ rows if rows.size else np.zeros_like(G)
    residual = float(np.max(np.abs(prob.apply(recon) - prob.b))) if prob.m else 0.0
    return GramCertificate(basis, G, squares, residual)


def _dual_certificate(prob, basis, y, p) -> NotSosCertificate:
    values = {m: 0.0 - float(v) for m, v in zip(prob.labels, y)}
    Q = -prob.adjoint(y)
    ell_p = apply_functional(values, p)
    return NotSosCertificate(basis, values, Q, ell_p, delta=-ell_p / 2 if ell_p < 0 else 0.0)


def point_certificate(p: Polynomial, point: Sequence[Fraction]) -> NotSosCertificate:
    """Evaluation at ``point`` as a functional on all monomials of degree <= 2*ceil(deg/2)."""
    half = (p.degree + 1) // 2
    basis = monomial_basis(p.nvars, half, up_to=True)
    w = np.array([float(v) for v in basis.evaluate(point)])
    values = {}
    for m in monomial_basis(p.nvars, 2 * half, up_to=True):
        val = Fraction(1)
        for x, k in zip(point, m):
            val *= Fraction(x) ** k
        values[m] = float(val)
    exact = p.evaluate(point)
    return NotSosCertificate(basis, values, np.outer(w, w), float(exact), delta=-float(exact) / 2,
                             kind="point", point=tuple(point))


def certify_sos(p: Polynomial, prune: bool = True, objective: str = "feasible",
                basis: MonomialBasis | None = None, config: sdp_mod.SolverConfig | None = None,
                rank_tol: float = 1e-7, seed: int = 0):
    """Decide p in Sigma numerically; returns a GramCertificate, NotSosCertificate or Indeterminate.

    ``objective`` picks a Gram matrix inside the feasible set: any ("feasible"),
    or the trace minimiser / maximiser, which sit on the boundary and so tend
    to have low rank.
    """
    if objective not in OBJECTIVES:
        raise ValueError(f"objective must be one of {OBJECTIVES}")
    if p.is_zero():
        empty = MonomialBasis(p.nvars, 0, (), True)
        return GramCertificate(empty, np.zeros((0, 0)), [], 0.0, notes=["zero polynomial"])
    poly = newton_polytope(p)
    check = sos_necessary_check(p, poly)
    notes = [] if check else [check.reason]
    if not check and (p.degree % 2 or "odd exponent" in check.reason):
        # no Gram matrix can exist; look for a witness point instead
        pt = find_negative_point(p, budget=10_000, seed=seed)
        if pt is not None:
            cert = point_certificate(p, pt)
            cert.notes = notes
            return cert
        return Indeterminate(f"necessary condition fails ({check.reason}) but no negative point found",
                             notes=notes)
    if basis is None:
        basis = _default_basis(p, prune, poly)
    prob = build_gram_sdp(p, basis)
    if objective != "feasible":
        sign = 1.0 if objective == "min_trace" else -1.0
        prob = prob.with_objective(sign * np.eye(prob.n))
    out = sdp_mod.solve(prob, config)
    if out.status in (sdp_mod.Status.FEASIBLE, sdp_mod.Status.OPTIMAL):
        cert = _gram_certificate(prob, basis, out.X, p, rank_tol)
        cert.notes = notes + [f"{out.status.value} after {out.iterations} iterations"]
        return cert
    if out.status == sdp_mod.Status.INFEASIBLE:
        cert = _dual_certificate(prob, basis, out.certificate, p)
        cert.notes = notes
        return cert
    return Indeterminate(f"solver stopped with status {out.status.value}", out.iterations, notes=notes + out.notes)


def gram_matrix_at(p: Polynomial, basis: MonomialBasis, fixed: dict, rank_tol: float = 1e-7):
    """Convenience for small examples: solve with extra entries of G pinned (keys (i, j))."""
    base = build_gram_sdp(p, basis)
    A = list(base.A)
    b = list(base.b)
    for (i, j), v in fixed.items():
        A.append(sdp_mod.constraint_matrix(base.n, [(i, j, 1.0)]))
        b.append(v if i == j else 2 * v)
    prob = sdp_mod.SdpProblem.feasibility(A, b, n=base.n, labels=base.labels + tuple(("fix", k) for k in fixed))
    out = sdp_mod.solve(prob)
    if not out.ok:
        return None
    return _gram_certificate(base, basis, out.X, p, rank_tol)


def certify_sos_mod_graph(M: PartialSymmetricMatrix, config: sdp_mod.SolverConfig | None = None,
                          rank_tol: float = 1e-7):
    """Is the quadratic form with the specified coefficients a sum of squares modulo I(G)?

    Non-edge products x_i x_j vanish in the quotient, so the Gram entries there
    are free and the problem is exactly PSD completion.
    """
    n = M.n
    basis = MonomialBasis(n, 1, tuple(tuple(int(k == i) for k in range(n)) for i in range(n)), True)
    prob = completion_sdp(M)
    labels = tuple(tuple(int(k == i) + int(k == j) for k in range(n)) for i, j in prob.labels)
    prob = sdp_mod.SdpProblem.feasibility(prob.A, prob.b, n=n, labels=labels)
    q = Polynomial(n, {m: Fraction(float(b)) for m, b in zip(labels, prob.b)})
    out = sdp_mod.solve(prob, config)
    if out.status in (sdp_mod.Status.FEASIBLE, sdp_mod.Status.OPTIMAL):
        X = out.X.copy()
        for (i, j), v in M.specified.items():
            X[i, j] = X[j, i] = v
        return _gram_certificate(prob, basis, X, q, rank_tol)
    if out.status == sdp_mod.Status.INFEASIBLE:
        return _dual_certificate(prob, basis, out.certificate, q)
    return Indeterminate(f"solver stopped with status {out.status.value}", out.iterations, notes=out.notes)


def hilbert_case(n: int, two_d: int) -> str:
    """Whether every nonnegative form in n variables of degree 2d is SOS.

    Forms in at most two variables dehomogenise to univariate polynomials,
    so n = 1 joins n = 2 on the equality side.
    """
    if n < 1 or two_d < 1:
        raise ValueError("need n >= 1 and degree >= 1")
    if two_d % 2:
        raise NotEvenDegree(f"degree {two_d} is odd")
    if n <= 2 or two_d == 2 or (n, two_d) == (3, 4):
        return "equality"
    return "strict"


def find_negative_point(p: Polynomial, budget: int = 10_000, seed: int = 0,
                        refine: int = 20) -> tuple[Fraction, ...] | None:
    """Rational point with p < 0 (checked exactly), or None.

    Random samples (on the unit sphere for forms) followed by derivative-free
    local descent from the best few.  ``budget`` bounds the number of sampled
    points; the refinement runs are extra.
    """
    if p.is_zero():
        return None
    rng = np.random.default_rng(seed)
    n = p.nvars
    homog = p.is_homogeneous()
    X = rng.standard_normal((max(budget, 1), n))
    if homog:
        X /= np.linalg.norm(X, axis=1, keepdims=True)
    else:
        X *= 10.0 ** rng.uniform(-1, 1, size=(X.shape[0], 1))
    vals = p.evaluate_float(X)
    order = np.argsort(vals)
    for idx in order[:refine]:
        hit = _rational_negative(p, X[idx])
        if hit is not None:
            return hit
    if homog:
        f = lambda x: float(p.evaluate_float(x[None, :] / max(np.linalg.norm(x), 1e-12))[0])
    else:
        f = lambda x: float(p.evaluate_float(x[None, :])[0])
    for idx in order[:refine]:
        res = minimize(f, X[idx], method="Powell", options={"maxfev": 200 * n, "xtol": 1e-10, "ftol": 1e-14})
        x = res.x / np.linalg.norm(res.x) if homog and np.linalg.norm(res.x) > 0 else res.x
        if res.fun < 0:
            hit = _rational_negative(p, x)
            if hit is not None:
                return hit
    return None


def _rational_negative(p: Polynomial, x: np.ndarray) -> tuple[Fraction, ...] | None:
    if not np.all(np.isfinite(x)):
        return None
    for den in (10**3, 10**6, 10**9):
        pt = tuple(Fraction(float(c)).limit_denominator(den) for c in x)
        if p.evaluate(pt) < 0:
            return pt
    return None


def random_sos(nvars: int, degree: int, count: int, rng: np.random.Generator,
               homogeneous: bool = False, scale: int = 3) -> Polynomial:
    """sum of ``count`` squares of random integer polynomials of degree <= ``degree``."""
    basis = monomial_basis(nvars, degree, up_to=not homogeneous)
    total = Polynomial.zero(nvars)
    for _ in range(count):
        coeffs = rng.integers(-scale, scale + 1, size=len(basis))
        q = Polynomial(nvars, {m: int(c) for m, c in zip(basis, coeffs)})
        total = total + q * q
    return total
