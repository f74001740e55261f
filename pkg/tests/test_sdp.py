import json

import cvxpy as cp
import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from sos_lab.errors import DimensionMismatch
from sos_lab.sdp import (SdpProblem, SolverConfig, Status, check_certificate, constraint_matrix, minimize_trace,
                         random_feasible_problem, random_infeasible_problem, solve)


def E(n, i, j):
    return constraint_matrix(n, [(i, j, 1.0)])


def quartic_problem():
    A = [E(3, 0, 0), E(3, 0, 1), constraint_matrix(3, [(0, 2, 1), (1, 1, 1)]), E(3, 1, 2), E(3, 2, 2)]
    return SdpProblem.feasibility(A, [1, 1, 3, -1, 1])


def test_one_by_one():
    assert solve(SdpProblem([[1.0]], [[[1.0]]], [1.0])).status == Status.OPTIMAL
    out = solve(SdpProblem.feasibility([[[1.0]]], [-1.0]))
    assert out.status == Status.INFEASIBLE
    assert out.certificate[0] == pytest.approx(-1.0)


def test_validation():
    with pytest.raises(DimensionMismatch):
        SdpProblem(np.eye(2), np.zeros((1, 3, 3)), [0.0])
    with pytest.raises(DimensionMismatch):
        SdpProblem(np.eye(2), np.zeros((2, 2, 2)), [0.0])
    with pytest.raises(ValueError):
        SdpProblem(np.eye(2), np.zeros((1, 2, 2)), [0.0], mode="feasibility")


def test_json_roundtrip():
    p = quartic_problem()
    q = SdpProblem.from_json(json.loads(json.dumps(p.to_json())))
    assert np.array_equal(p.A, q.A) and np.array_equal(p.b, q.b) and q.mode == "feasibility"


@pytest.mark.parametrize("sign", [1, -1])
def test_quartic_interval_endpoints(sign):
    prob = quartic_problem().with_objective(sign * E(3, 0, 2) / 2)
    out = solve(prob)
    assert out.status == Status.OPTIMAL
    expected = -1.0 if sign == 1 else (5 - 5 ** 0.5) / 4
    assert out.X[0, 2] == pytest.approx(expected, abs=1e-6)


def test_quartic_interval_matches_cvxpy():
    X = cp.Variable((3, 3), symmetric=True)
    cons = [X >> 0, X[0, 0] == 1, 2 * X[0, 1] == 1, 2 * X[0, 2] + X[1, 1] == 3, 2 * X[1, 2] == -1, X[2, 2] == 1]
    ends = []
    for sense in (cp.Minimize, cp.Maximize):
        cp.Problem(sense(X[0, 2]), cons).solve(solver=cp.CLARABEL)
        ends.append(X.value[0, 2])
    ours = [solve(quartic_problem().with_objective(s * E(3, 0, 2) / 2)).X[0, 2] for s in (1, -1)]
    assert np.allclose(ours, ends, atol=1e-5)


def test_no_interior_singleton():
    # all-ones 4x4 is the only completion here, so the feasible set has no interior
    edges = [(0, 1), (0, 2), (1, 2), (2, 3)]
    A = [E(4, i, i) for i in range(4)] + [E(4, i, j) for i, j in edges]
    out = solve(SdpProblem.feasibility(A, [1] * 4 + [2] * 4))
    assert out.status == Status.FEASIBLE
    assert np.allclose(out.X, np.ones((4, 4)), atol=1e-4)


def test_redundant_and_inconsistent_rows():
    A = [E(2, 0, 0), 2 * E(2, 0, 0)]
    assert solve(SdpProblem.feasibility(A, [1.0, 2.0])).status == Status.FEASIBLE
    out = solve(SdpProblem.feasibility(A, [1.0, 3.0]))
    assert out.status == Status.INFEASIBLE
    assert check_certificate(SdpProblem.feasibility(A, [1.0, 3.0]), out.certificate)


def test_unbounded():
    # min -X11 subject to X22 = 1 has no lower bound
    out = solve(SdpProblem(-E(2, 0, 0), [E(2, 1, 1)], [1.0]))
    assert out.status == Status.UNBOUNDED


def test_trace_min_is_low_rank():
    out = minimize_trace(quartic_problem())
    assert out.status == Status.OPTIMAL
    assert np.sum(np.linalg.eigvalsh(out.X) > 1e-6) == 2


@given(st.integers(1, 6), st.integers(1, 8), st.integers(0, 2**32 - 1))
def test_random_feasible(n, m, seed):
    prob = random_feasible_problem(np.random.default_rng(seed), n, m)
    out = solve(prob)
    assert out.status == Status.FEASIBLE
    assert np.max(np.abs(prob.apply(out.X) - prob.b)) <= 1e-8 * (1 + np.abs(prob.b).max())
    assert np.linalg.eigvalsh(out.X)[0] >= -1e-8


@given(st.integers(1, 6), st.integers(1, 8), st.integers(0, 2**32 - 1))
def test_weak_duality(n, m, seed):
    prob = random_feasible_problem(np.random.default_rng(seed), n, m, objective=True)
    out = solve(prob)
    assert out.status == Status.OPTIMAL
    # dual slack Z = C - A^T y must be PSD and b^T y <= <C, X>
    Z = prob.C - prob.adjoint(out.y)
    assert np.linalg.eigvalsh(Z)[0] >= -1e-6 * (1 + np.abs(prob.C).max())
    assert out.dual_objective <= out.primal_objective + 1e-6 * (1 + abs(out.primal_objective))


@given(st.integers(1, 6), st.integers(1, 8), st.integers(0, 2**32 - 1))
def test_random_infeasible(n, m, seed):
    prob = random_infeasible_problem(np.random.default_rng(seed), n, m)
    out = solve(prob)
    assert out.status == Status.INFEASIBLE
    assert check_certificate(prob, out.certificate, SolverConfig().eps_cert)
    assert out.certificate @ prob.b == pytest.approx(1.0)


def test_feasibility_agrees_with_cvxpy(rng):
    for _ in range(10):
        n, m = int(rng.integers(2, 5)), int(rng.integers(1, 5))
        prob = (random_feasible_problem if rng.random() < 0.5 else random_infeasible_problem)(rng, n, m)
        X = cp.Variable((n, n), symmetric=True)
        cons = [X >> 0] + [cp.trace(prob.A[i] @ X) == prob.b[i] for i in range(m)]
        ref = cp.Problem(cp.Minimize(0), cons)
        ref.solve(solver=cp.CLARABEL)
        ours = solve(prob).status
        assert (ours == Status.FEASIBLE) == (ref.status in ("optimal", "optimal_inaccurate"))
