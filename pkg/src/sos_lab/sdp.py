"""Dense primal-dual interior-point solver for standard-form semidefinite programs.

    minimize <C, X>  subject to  <A_i, X> = b_i,  X PSD

The solver runs a homogeneous self-dual embedding (variables X, y, Z, tau,
kappa) with HKM search directions and a Mehrotra predictor-corrector.  The
embedding always has an interior starting point (X = Z = I, y = 0,
tau = kappa = 1), and when the primal is infeasible the dual iterate
converges to a Farkas witness: y with b^T y = 1 and sum_i y_i A_i NSD.

Sizes targeted are tiny (n up to a few dozen), so every step is dense.
"""

from __future__ import annotations

import json
import logging
from dataclasses import dataclass, field
from enum import Enum
from typing import Sequence

import numpy as np
import scipy.linalg

from .errors import DimensionMismatch, NumericalError

log = logging.getLogger(__name__)


class Status(str, Enum):
    OPTIMAL = "Optimal"
    FEASIBLE = "Feasible"
    INFEASIBLE = "Infeasible"
    UNBOUNDED = "Unbounded"
    MAX_ITERATIONS = "MaxIterations"


@dataclass(frozen=True)
class SolverConfig:
    eps_feas: float = 1e-8
    eps_psd: float = 1e-8
    eps_cert: float = 1e-6
    eps_gap: float = 1e-8
    max_iter: int = 200
    step_fraction: float = 0.95


@dataclass(frozen=True, eq=False)
class SdpProblem:
    """Standard-form SDP; ``A`` has shape (m, n, n).  ``mode`` is minimize or feasibility."""

    C: np.ndarray
    A: np.ndarray
    b: np.ndarray
    mode: str = "minimize"
    labels: tuple = ()

    def __post_init__(self):
        C = np.array(self.C, dtype=float)
        if C.ndim != 2 or C.shape[0] != C.shape[1] or C.shape[0] < 1:
            raise DimensionMismatch(f"C must be a non-empty square matrix, got {C.shape}")
        n = C.shape[0]
        A = np.array(self.A, dtype=float)
        if A.size == 0:
            A = np.zeros((0, n, n))
        if A.ndim != 3 or A.shape[1:] != (n, n):
            raise DimensionMismatch(f"constraint matrices must be {n}x{n}, got {A.shape}")
        b = np.array(self.b, dtype=float).reshape(-1)
        if b.shape[0] != A.shape[0]:
            raise DimensionMismatch(f"{A.shape[0]} constraint matrices but {b.shape[0]} right-hand sides")
        if self.mode not in ("minimize", "feasibility"):
            raise ValueError(f"unknown mode {self.mode!r}")
        if A.shape[0] == 0 and self.mode != "feasibility":
            raise ValueError("an empty constraint list is only allowed in feasibility mode")
        for arr in (C, A, b):
            if not np.all(np.isfinite(arr)):
                raise NumericalError("problem data has non-finite entries")
        C = (C + C.T) / 2
        A = (A + A.transpose(0, 2, 1)) / 2
        object.__setattr__(self, "C", C)
        object.__setattr__(self, "A", A)
        object.__setattr__(self, "b", b)
        if self.mode == "feasibility" and np.any(C):
            raise ValueError("feasibility problems carry a zero objective")

    @property
    def n(self) -> int:
        return self.C.shape[0]

    @property
    def m(self) -> int:
        return self.A.shape[0]

    @classmethod
    def feasibility(cls, A, b, n: int | None = None, labels=()) -> SdpProblem:
        A = np.asarray(A, dtype=float)
        if n is None:
            n = A.shape[1]
        return cls(np.zeros((n, n)), A, b, "feasibility", tuple(labels))

    def with_objective(self, C) -> SdpProblem:
        return SdpProblem(C, self.A, self.b, "minimize", self.labels)

    def apply(self, X) -> np.ndarray:
        """The linear map X -> (<A_i, X>)_i."""
        return np.einsum("iab,ab->i", self.A, X)

    def adjoint(self, y) -> np.ndarray:
        """y -> sum_i y_i A_i."""
        return np.einsum("i,iab->ab", y, self.A)

    def to_json(self) -> dict:
        return {
            "n": self.n,
            "mode": self.mode,
            "C": self.C.tolist(),
            "constraints": [{"A": Ai.tolist(), "b": float(bi)} for Ai, bi in zip(self.A, self.b)],
        }

    @classmethod
    def from_json(cls, doc) -> SdpProblem:
        n = int(doc["n"])
        mode = doc.get("mode", "minimize")
        C = np.asarray(doc.get("C", np.zeros((n, n))), dtype=float)
        cons = doc.get("constraints", [])
        A = np.array([c["A"] for c in cons], dtype=float) if cons else np.zeros((0, n, n))
        b = np.array([c["b"] for c in cons], dtype=float)
        return cls(C, A, b, mode)


@dataclass(eq=False)
class SdpOutcome:
    status: Status
    X: np.ndarray | None = None
    y: np.ndarray | None = None
    Z: np.ndarray | None = None
    certificate: np.ndarray | None = None
    primal_objective: float = float("nan")
    dual_objective: float = float("nan")
    primal_residual: float = float("nan")
    dual_residual: float = float("nan")
    certificate_residual: float = float("nan")
    iterations: int = 0
    notes: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return self.status in (Status.OPTIMAL, Status.FEASIBLE)

    def to_json(self) -> dict:
        def arr(a):
            return None if a is None else np.asarray(a).tolist()

        def num(x):
            return None if x is None or not np.isfinite(x) else float(x)

        return {
            "status": self.status.value,
            "X": arr(self.X),
            "y": arr(self.y),
            "certificate": arr(self.certificate),
            "objective": num(self.primal_objective),
            "dual_objective": num(self.dual_objective),
            "residuals": {
                "primal": num(self.primal_residual),
                "dual": num(self.dual_residual),
                "certificate": num(self.certificate_residual),
            },
            "iterations": self.iterations,
            "notes": list(self.notes),
        }


def certificate_violation(prob: SdpProblem, y) -> tuple[float, float]:
    """(b^T y, lambda_max(sum y_i A_i)) for a candidate Farkas witness."""
    y = np.asarray(y, dtype=float)
    S = prob.adjoint(y)
    return float(prob.b @ y), float(np.linalg.eigvalsh((S + S.T) / 2)[-1])


def check_certificate(prob: SdpProblem, y, eps: float = 1e-6) -> bool:
    """Independent check of the infeasibility contract: b^T y = 1, sum y_i A_i <= eps I."""
    by, lam = certificate_violation(prob, y)
    return abs(by - 1.0) <= 1e-9 and lam <= eps


def _max_step(M: np.ndarray, dM: np.ndarray) -> float:
    """Largest alpha with M + alpha dM PSD (M assumed PD)."""
    try:
        L = np.linalg.cholesky(M)
    except np.linalg.LinAlgError:
        return 0.0
    Li = scipy.linalg.solve_triangular(L, np.eye(M.shape[0]), lower=True)
    S = Li @ dM @ Li.T
    lam = np.linalg.eigvalsh((S + S.T) / 2)[0]
    return np.inf if lam >= 0 else -1.0 / lam


def _sym(W):
    return (W + W.T) / 2


def _reduce_constraints(A: np.ndarray, b: np.ndarray, tol: float = 1e-10):
    """Drop linearly dependent constraints via pivoted QR.

    Returns (keep_indices, None) or (None, witness) when a dependent constraint
    carries an inconsistent right-hand side; the witness y satisfies
    sum y_i A_i = 0 and b^T y = 1 exactly in the reduced sense.
    """
    m = A.shape[0]
    if m == 0:
        return np.arange(0), None
    V = A.reshape(m, -1)
    _, R, piv = scipy.linalg.qr(V.T, mode="economic", pivoting=True)
    diag = np.abs(np.diag(R))
    r = int(np.sum(diag > tol * max(diag[0], 1e-300))) if diag.size else 0
    keep = np.sort(piv[:r])
    dropped = [j for j in range(m) if j not in set(keep.tolist())]
    for j in dropped:
        coef, *_ = np.linalg.lstsq(V[keep].T, V[j], rcond=None)
        gap = b[j] - coef @ b[keep]
        if abs(gap) > 1e-9 * max(1.0, np.max(np.abs(b))):
            y = np.zeros(m)
            y[j] = 1.0
            y[keep] -= coef
            return None, y / gap
    return keep, None


def solve(prob: SdpProblem, config: SolverConfig | None = None) -> SdpOutcome:
    """Solve ``prob``; see :class:`SdpOutcome` for the returned contract."""
    cfg = config or SolverConfig()
    n, m = prob.n, prob.m
    feas_mode = prob.mode == "feasibility"

    if m == 0:
        X = np.eye(n) / n
        return SdpOutcome(Status.FEASIBLE if feas_mode else Status.OPTIMAL, X=X, y=np.zeros(0),
                          Z=prob.C.copy(), primal_objective=float(np.sum(prob.C * X)),
                          primal_residual=0.0, dual_residual=0.0)

    # row normalisation and redundancy elimination
    norms = np.sqrt(np.einsum("iab,iab->i", prob.A, prob.A))
    zero_rows = norms == 0
    if np.any(zero_rows & (prob.b != 0)):
        j = int(np.flatnonzero(zero_rows & (prob.b != 0))[0])
        y = np.zeros(m)
        y[j] = 1.0 / prob.b[j]
        return _infeasible(prob, y, 0, "zero constraint with nonzero right-hand side")
    norms[zero_rows] = 1.0
    As = prob.A / norms[:, None, None]
    bs = prob.b / norms
    keep, witness = _reduce_constraints(As, bs)
    if witness is not None:
        y = witness / norms
        y = y / (prob.b @ y)
        return _infeasible(prob, y, 0, "inconsistent linearly dependent constraints")
    As, bs = As[keep], bs[keep]
    mk = len(keep)

    b_scale = max(1.0, float(np.max(np.abs(bs))))
    c_scale = max(1.0, float(np.max(np.abs(prob.C))))
    bs = bs / b_scale
    Cs = prob.C / c_scale

    def lift_y(y_red):
        """Dual vector of the reduced scaled problem -> original constraint indexing."""
        y = np.zeros(m)
        y[keep] = y_red / norms[keep]
        return y

    def Aop(X):
        return np.einsum("iab,ab->i", As, X)

    def Aadj(y):
        return np.einsum("i,iab->ab", y, As)

    b_inf = float(np.max(np.abs(prob.b)))
    X = np.eye(n)
    Z = np.eye(n)
    y = np.zeros(mk)
    tau = 1.0
    kappa = 1.0
    I = np.eye(n)
    best = None
    stall = 0

    for it in range(cfg.max_iter + 1):
        # -- termination tests, in original units --------------------------
        Xh = X / tau * b_scale
        yh = lift_y(y / tau) * c_scale
        Zh = Z / tau * c_scale
        pres_vec = prob.apply(Xh) - prob.b
        pres = float(np.max(np.abs(pres_vec)))
        dres = float(np.max(np.abs(prob.C - prob.adjoint(yh) - Zh)))
        pobj = float(np.sum(prob.C * Xh))
        dobj = float(prob.b @ yh)
        lam_min_X = float(np.linalg.eigvalsh(Xh)[0])
        best = (Xh, yh, Zh, pobj, dobj, pres, dres)
        feas_tol = cfg.eps_feas * (1 + b_inf)

        if feas_mode:
            if pres <= feas_tol and lam_min_X >= -cfg.eps_psd:
                return SdpOutcome(Status.FEASIBLE, X=Xh, y=yh, Z=Zh, primal_objective=pobj,
                                  dual_objective=dobj, primal_residual=pres, dual_residual=dres,
                                  iterations=it)
        else:
            gap = abs(pobj - dobj)
            if (pres <= feas_tol and lam_min_X >= -cfg.eps_psd
                    and dres <= cfg.eps_feas * (1 + c_scale)
                    and gap <= cfg.eps_gap * (1 + abs(pobj) + abs(dobj))):
                return SdpOutcome(Status.OPTIMAL, X=Xh, y=yh, Z=Zh, primal_objective=pobj,
                                  dual_objective=dobj, primal_residual=pres, dual_residual=dres,
                                  iterations=it)

        y_orig = lift_y(y)
        by = float(prob.b @ y_orig)
        if by > 0:
            cert = y_orig / by
            _, lam = certificate_violation(prob, cert)
            if lam <= cfg.eps_cert:
                return _infeasible(prob, cert, it, "")
        cx = float(np.sum(prob.C * X))
        if not feas_mode and cx < 0:
            Xd = X / (-cx)
            if (np.max(np.abs(prob.apply(Xd))) <= cfg.eps_feas
                    and np.linalg.eigvalsh(Xd)[0] >= -cfg.eps_psd):
                return SdpOutcome(Status.UNBOUNDED, X=Xd, iterations=it,
                                  notes=["primal recession direction with negative cost"])
        if it == cfg.max_iter:
            break

        # -- Newton system --------------------------------------------------
        mu = (float(np.sum(X * Z)) + tau * kappa) / (n + 1)
        Rp = bs * tau - Aop(X)
        Rd = Cs * tau - Aadj(y) - Z
        Rg = kappa - bs @ y + float(np.sum(Cs * X))
        try:
            Zinv = np.linalg.inv(Z)
        except np.linalg.LinAlgError:
            break
        Zinv = _sym(Zinv)
        G = Zinv @ As @ X  # (mk, n, n)
        Mschur = np.einsum("iab,jba->ij", As, G)
        ZCX = Zinv @ Cs @ X
        u = np.einsum("iab,ba->i", As, ZCX)
        ccc = float(np.sum(Cs * ZCX.T))
        K = np.zeros((mk + 1, mk + 1))
        K[:mk, :mk] = _sym(Mschur)
        K[:mk, mk] = -(u + bs)
        K[mk, :mk] = bs - u
        K[mk, mk] = ccc + kappa / tau
        ZRdX = _sym(Zinv @ Rd @ X)

        def direction(sigma, eta, corrX, corrTK):
            RX = sigma * mu * Zinv - X - eta * ZRdX - corrX
            r1 = eta * Rp - Aop(RX)
            r2 = eta * Rg + float(np.sum(Cs * RX)) + (sigma * mu - tau * kappa - corrTK) / tau
            rhs = np.concatenate([r1, [r2]])
            try:
                sol = np.linalg.solve(K, rhs)
                if not np.all(np.isfinite(sol)):
                    raise np.linalg.LinAlgError
            except np.linalg.LinAlgError:
                sol = np.linalg.lstsq(K, rhs, rcond=None)[0]
            dy, dtau = sol[:mk], sol[mk]
            dZ = eta * Rd - Aadj(dy) + Cs * dtau
            dX = RX + _sym(Zinv @ Aadj(dy) @ X) - dtau * _sym(ZCX)
            dkappa = (sigma * mu - tau * kappa - corrTK - kappa * dtau) / tau
            return dX, dy, dZ, dtau, dkappa

        def step_len(dX, dZ, dtau, dkappa):
            a = min(_max_step(X, dX), _max_step(Z, dZ))
            if dtau < 0:
                a = min(a, -tau / dtau)
            if dkappa < 0:
                a = min(a, -kappa / dkappa)
            return a

        dXa, dya, dZa, dta, dka = direction(0.0, 1.0, 0.0, 0.0)
        a_aff = min(1.0, step_len(dXa, dZa, dta, dka))
        mu_aff = (float(np.sum((X + a_aff * dXa) * (Z + a_aff * dZa)))
                  + (tau + a_aff * dta) * (kappa + a_aff * dka)) / (n + 1)
        sigma = min(1.0, max(0.0, mu_aff / mu)) ** 3
        corrX = _sym(Zinv @ dZa @ dXa)
        dX, dy, dZ, dtau, dkappa = direction(sigma, 1.0 - sigma, corrX, dta * dka)
        a_max = step_len(dX, dZ, dtau, dkappa)
        alpha = min(1.0, cfg.step_fraction * a_max)
        if not np.isfinite(alpha) or alpha < 1e-12:
            stall += 1
            if stall > 3:
                break
            alpha = max(alpha, 0.0) if np.isfinite(alpha) else 0.0
        X = _sym(X + alpha * dX)
        Z = _sym(Z + alpha * dZ)
        y = y + alpha * dy
        tau = tau + alpha * dtau
        kappa = kappa + alpha * dkappa
        # rescale the homogeneous iterate to keep numbers moderate
        s = max(tau, kappa, 1e-300)
        if s > 1e8 or s < 1e-8:
            X, Z, y, tau, kappa = X / s, Z / s, y / s, tau / s, kappa / s

    Xh, yh, Zh, pobj, dobj, pres, dres = best
    log.debug("SDP stopped without convergence after %d iterations", it)
    return SdpOutcome(Status.MAX_ITERATIONS, X=Xh, y=yh, Z=Zh, primal_objective=pobj,
                      dual_objective=dobj, primal_residual=pres, dual_residual=dres,
                      iterations=it, notes=["iteration budget exhausted or search direction stalled"])


def _infeasible(prob: SdpProblem, cert: np.ndarray, it: int, note: str) -> SdpOutcome:
    _, lam = certificate_violation(prob, cert)
    return SdpOutcome(Status.INFEASIBLE, y=cert, certificate=cert, dual_objective=float(prob.b @ cert),
                      certificate_residual=max(lam, 0.0), iterations=it, notes=[note] if note else [])


def minimize_trace(prob: SdpProblem, config: SolverConfig | None = None) -> SdpOutcome:
    """Solve with objective <I, X>, which biases toward low rank."""
    return solve(prob.with_objective(np.eye(prob.n)), config)


def load_problem(path) -> SdpProblem:
    with open(path) as fh:
        return SdpProblem.from_json(json.load(fh))


def constraint_matrix(n: int, entries: Sequence[tuple[int, int, float]]) -> np.ndarray:
    """Symmetric matrix with the given (i, j, value) entries mirrored."""
    A = np.zeros((n, n))
    for i, j, v in entries:
        A[i, j] += v
        if i != j:
            A[j, i] += v
    return A


# -- seeded test instances -------------------------------------------------------


def random_feasible_problem(rng: np.random.Generator, n: int, m: int, objective: bool = False) -> SdpProblem:
    """b = A(X0) for a random PSD X0 of random rank; with ``objective`` the cost is PSD, so an optimum exists."""
    B = rng.standard_normal((n, int(rng.integers(1, n + 1))))
    A = rng.standard_normal((m, n, n))
    A = (A + A.transpose(0, 2, 1)) / 2
    b = np.einsum("iab,ab->i", A, B @ B.T)
    if not objective:
        return SdpProblem.feasibility(A, b)
    G = rng.standard_normal((n, n))
    return SdpProblem(G @ G.T, A, b)


def random_infeasible_problem(rng: np.random.Generator, n: int, m: int) -> SdpProblem:
    """Planted Farkas witness: the last A_i is chosen so that sum y_i A_i = -P with P PSD, and b^T y = 1."""
    A = rng.standard_normal((m, n, n))
    A = (A + A.transpose(0, 2, 1)) / 2
    y = rng.standard_normal(m)
    if abs(y[-1]) < 0.1:
        y[-1] = 1.0
    B = rng.standard_normal((n, int(rng.integers(0, n + 1))))
    rest = np.einsum("i,iab->ab", y[:-1], A[:-1])
    A[-1] = (-(B @ B.T) - rest) / y[-1]
    b = rng.standard_normal(m)
    while abs(b @ y) < 1e-3:
        b = rng.standard_normal(m)
    return SdpProblem.feasibility(A, b / (b @ y))
