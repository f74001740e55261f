from fractions import Fraction
from math import comb

import numpy as np
import pytest

from sos_lab import exactla
from sos_lab.errors import NotOnVariety, TooLarge
from sos_lab.polycore import monomial_basis
from sos_lab.veronese import (castelnuovo_check, project_from_point, pythagoras_lower_bound, quadratic_persistence,
                              quadric_value, veronese_point, veronese_pythagoras_bound, veronese_quadrics)


def kernel_dimension_oracle(n, d):
    """dim ker(Sym^2 R_d -> R_2d) from a generic exact null-space computation."""
    basis = monomial_basis(n + 1, d)
    pairs = [(a, b) for a in range(len(basis)) for b in range(a, len(basis))]
    targets = sorted({tuple(x + y for x, y in zip(basis[a], basis[b])) for a, b in pairs})
    row = {m: k for k, m in enumerate(targets)}
    M = [[0] * len(pairs) for _ in targets]
    for c, (a, b) in enumerate(pairs):
        M[row[tuple(x + y for x, y in zip(basis[a], basis[b]))]][c] = 1
    return len(exactla.nullspace(M, len(pairs)))


@pytest.mark.parametrize("n,d,dim", [(2, 2, 6), (2, 3, 27), (3, 3, 126), (1, 3, 3)])
def test_dimensions(n, d, dim):
    Q = veronese_quadrics(n, d)
    assert Q.dim == dim == comb(comb(n + d, d) + 1, 2) - comb(n + 2 * d, 2 * d)
    if dim < 100:
        assert kernel_dimension_oracle(n, d) == dim


def test_quadrics_independent():
    Q = veronese_quadrics(2, 2)
    flat = [[c for row in q for c in row] for q in Q.quadrics]
    assert exactla.rank(flat) == Q.dim


def test_quadrics_vanish_on_variety(rng):
    for n, d in [(2, 2), (2, 3), (3, 2)]:
        Q = veronese_quadrics(n, d)
        for _ in range(50):
            p = [Fraction(int(c), int(rng.integers(1, 5))) for c in rng.integers(-9, 10, size=n + 1)]
            v = veronese_point(p, d)
            assert all(quadric_value(q, v) == 0 for q in Q.quadrics)


def test_size_guard():
    with pytest.raises(TooLarge):
        veronese_quadrics(4, 4)  # C(8,4) = 70 coordinates


def test_projection_drops():
    Q = veronese_quadrics(2, 2)
    P = project_from_point(Q, Q.embed((1, 2, 3)))
    assert (Q.dim, P.dim, P.ambient) == (6, 3, 5)
    with pytest.raises(NotOnVariety):
        project_from_point(P, P.embed((1, 2, 3)))
    with pytest.raises(NotOnVariety):
        project_from_point(Q, [1] + [0] * 4 + [1])


def test_projected_quadrics_vanish_on_projected_variety(rng):
    Q = veronese_quadrics(2, 3)
    for p in [(1, -2, 3), (4, 1, -1)]:
        Q = project_from_point(Q, Q.embed(p))
    for _ in range(20):
        v = Q.embed(tuple(int(c) for c in rng.integers(-9, 10, size=3)))
        assert all(quadric_value(q, v) == 0 for q in Q.quadrics)


def test_drops_invariant_under_coordinate_change(rng):
    from sos_lab.veronese import QuadricSpace

    Q = veronese_quadrics(2, 3)
    N = Q.ambient
    T = [[Fraction(int(i == j)) if i >= j else Fraction(int(rng.integers(-2, 3))) for j in range(N)] for i in range(N)]
    Tt = exactla.transpose(T)
    moved = QuadricSpace(Q.n, Q.d, N, [exactla.matmul(exactla.matmul(Tt, q), T) for q in Q.quadrics])
    for p in [(2, -1, 3), (1, 1, 5)]:
        v = Q.embed(p)
        w = exactla.solve(T, v)  # same point in the new coordinates
        assert moved.contains(w)
        drop = Q.drop(v)
        assert moved.drop(w) == drop == 7
        assert project_from_point(Q, v).dim == project_from_point(moved, w).dim


@pytest.mark.parametrize("seed", range(10))
def test_persistence_plane(seed):
    a = quadratic_persistence(2, 2, seed)
    b = quadratic_persistence(2, 3, seed)
    assert (a.qp, a.drops) == (3, (3, 2, 1))
    assert (b.qp, b.drops) == (6, (7, 6, 5, 4, 3, 2))
    for tr in (a, b):
        for s in tr.steps:
            assert 0 <= s["before"] - s["after"] <= s["codim"]


def test_rational_normal_curves():
    for d in (2, 3, 4, 5):
        tr = quadratic_persistence(1, d)
        assert tr.drops == tuple(range(d - 1, 0, -1))


def test_first_projection_of_cubic_threefold_embedding():
    tr = quadratic_persistence(3, 3, seed=0, max_steps=1)
    assert tr.steps[0]["before"] == 126 and tr.drops == (16,)


def test_castelnuovo():
    assert castelnuovo_check(veronese_quadrics(2, 2), 2, 3)["equality"]
    strict = castelnuovo_check(veronese_quadrics(2, 3), 2, 7)
    assert (strict["bound"], strict["dim_I2"], strict["equality"]) == (28, 27, False)
    for d in (2, 3, 4):
        assert castelnuovo_check(veronese_quadrics(1, d), 1, d - 1)["equality"]
    assert castelnuovo_check(1, 3, 1)["bound"] == 1


def test_pythagoras():
    assert pythagoras_lower_bound(9, 6) == 4
    assert pythagoras_lower_bound(5, 6) == 0
    with pytest.raises(ValueError):
        pythagoras_lower_bound(5, 7)
    assert veronese_pythagoras_bound(2, 3) == 4
