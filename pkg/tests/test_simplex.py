import itertools
import math

import numpy as np
import pytest

import polylab as pl
from polylab.errors import DomainError
from polylab.simplex import INF_BOUND, LpProblem, l1_min, lp_solve


def lp_vertex_oracle(c, a, b):
    """Optimum of min c.x, Ax=b, x>=0 by enumerating basic feasible solutions."""
    m, n = a.shape
    best = math.inf
    for cols in itertools.combinations(range(n), m):
        sub = a[:, cols]
        if abs(np.linalg.det(sub)) < 1e-10:
            continue
        x = np.linalg.solve(sub, b)
        if (x < -1e-9).any():
            continue
        full = np.zeros(n)
        full[list(cols)] = x
        best = min(best, float(c @ full))
    return best


def l1_support_oracle(a, y):
    """min ||x||_1 with Ax=y by scanning all supports of size <= n."""
    n, big_n = a.shape
    best = math.inf
    for k in range(0, n + 1):
        for cols in itertools.combinations(range(big_n), k):
            if k == 0:
                if np.abs(y).max() < 1e-9:
                    best = min(best, 0.0)
                continue
            sub = a[:, cols]
            x, res, rank, _ = np.linalg.lstsq(sub, y, rcond=None)
            if np.abs(sub @ x - y).max() > 1e-8:
                continue
            best = min(best, float(np.abs(x).sum()))
    return best


def test_forced_equality():
    p = LpProblem(np.array([1.0, 1.0]), np.array([[1.0, 1.0]]), np.array([1.0]),
                  np.zeros(2), np.full(2, np.inf))
    s = lp_solve(p)
    assert s.status == "optimal"
    assert s.value == pytest.approx(1.0, abs=1e-9)


def test_upper_bound_only():
    p = LpProblem(np.array([-1.0]), np.zeros((0, 1)), np.zeros(0),
                  np.array([-np.inf]), np.array([1.0]))
    s = lp_solve(p)
    assert s.status == "optimal"
    assert s.value == pytest.approx(-1.0)
    assert s.point[0] == pytest.approx(1.0)


def test_box_bounds_and_shifts():
    # min x1 - 2 x2 s.t. x1 + x2 = 3, 0.5 <= x1 <= 2, 0 <= x2 <= 2.5
    p = LpProblem(np.array([1.0, -2.0]), np.array([[1.0, 1.0]]), np.array([3.0]),
                  np.array([0.5, 0.0]), np.array([2.0, 2.5]))
    s = lp_solve(p)
    assert s.status == "optimal"
    assert s.point == pytest.approx([0.5, 2.5])
    assert s.value == pytest.approx(0.5 - 5.0)


def test_infeasible_and_unbounded():
    p = LpProblem(np.array([1.0]), np.array([[1.0]]), np.array([-1.0]),
                  np.zeros(1), np.full(1, np.inf))
    assert lp_solve(p).status == "infeasible"
    p2 = LpProblem(np.array([-1.0]), np.zeros((0, 1)), np.zeros(0),
                   np.zeros(1), np.full(1, np.inf))
    assert lp_solve(p2).status == "unbounded"


def test_inconsistent_dimensions():
    with pytest.raises(DomainError):
        LpProblem(np.array([1.0]), np.array([[1.0, 2.0]]), np.array([1.0]),
                  np.zeros(1), np.ones(1)).validate()


def test_random_instances_vs_vertex_oracle():
    rs = np.random.RandomState(2)
    done = 0
    while done < 5:
        a = rs.randn(3, 6)
        x0 = np.abs(rs.randn(6))
        b = a @ x0
        c = rs.rand(6) + 0.2
        expect = lp_vertex_oracle(c, a, b)
        if not math.isfinite(expect):
            continue
        got = lp_solve(LpProblem(c, a, b, np.zeros(6), np.full(6, np.inf)))
        assert got.status == "optimal"
        assert got.value == pytest.approx(expect, abs=1e-7 * (1 + abs(expect)))
        assert np.abs(a @ got.point - b).max() <= 1e-7
        done += 1


def test_strong_duality():
    rs = np.random.RandomState(4)
    for _ in range(5):
        m, n = 3, 7
        a = rs.randn(m, n)
        b = a @ np.abs(rs.randn(n))
        c = rs.rand(n) + 0.5
        prim = lp_solve(LpProblem(c, a, b, np.zeros(n), np.full(n, np.inf)))
        ad = np.hstack([a.T, np.eye(n)])
        cd = np.concatenate([-b, np.zeros(n)])
        lo = np.concatenate([np.full(m, -np.inf), np.zeros(n)])
        dual = lp_solve(LpProblem(cd, ad, c, lo, np.full(m + n, np.inf)))
        assert prim.status == dual.status == "optimal"
        assert prim.value == pytest.approx(-dual.value, abs=1e-7 * (1 + abs(prim.value)))


def test_infinity_sentinel_convention():
    # magnitudes at or above 1e300 behave as missing bounds: x1 is free here,
    # so min x1 subject to x1 + x2 = 1, x2 >= 0 is unbounded below
    p = LpProblem(np.array([1.0, 0.0]), np.array([[1.0, 1.0]]), np.array([1.0]),
                  np.array([-INF_BOUND, 0.0]), np.array([INF_BOUND, INF_BOUND]))
    s = lp_solve(p)
    assert s.status == "unbounded"
    # and the same free variable with a pinning objective is solvable
    p2 = LpProblem(np.array([1.0, 2.0]), np.array([[1.0, 1.0]]), np.array([1.0]),
                   np.array([-INF_BOUND, 0.0]), np.array([INF_BOUND, INF_BOUND]))
    s2 = lp_solve(p2)
    assert s2.status == "optimal"
    assert s2.value == pytest.approx(1.0, abs=1e-9)


def test_l1_examples():
    v, x, st = l1_min(np.array([[1.0, 0.0, 1.0], [0.0, 1.0, 1.0]]), np.array([1.0, 1.0]))
    assert st == "optimal"
    assert v == pytest.approx(1.0, abs=1e-9)
    assert x == pytest.approx([0.0, 0.0, 1.0], abs=1e-9)

    v, x, st = l1_min(np.array([[1.0, 0.0, 1.0], [0.0, 1.0, 1.0]]), np.zeros(2))
    assert v == pytest.approx(0.0, abs=1e-12)

    v, x, st = l1_min(np.eye(2), np.array([3.0, -4.0]))
    assert v == pytest.approx(7.0)
    assert x == pytest.approx([3.0, -4.0])


def test_l1_infeasible():
    _, _, st = l1_min(np.array([[1.0, 1.0], [1.0, 1.0]]), np.array([1.0, 2.0]))
    assert st == "infeasible"


def test_l1_vs_support_oracle():
    rs = np.random.RandomState(8)
    for _ in range(30):
        n = rs.randint(1, 4)
        big_n = rs.randint(n, 9)
        a = rs.randn(n, big_n)
        y = a @ rs.randn(big_n)
        expect = l1_support_oracle(a, y)
        v, x, st = l1_min(a, y)
        assert st == "optimal"
        assert v == pytest.approx(expect, abs=1e-6 * (1 + abs(expect)))
        assert np.abs(a @ x - y).max() <= 1e-7
