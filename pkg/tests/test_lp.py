import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy.optimize import linprog

from vlpsolve.lp import LpProblem, LpStatus, SimplexSolver, check_certificates, solve_lp
from vlpsolve.verify import lp_vertex_oracle, random_lp

INF = np.inf


def test_tight_single_constraint():
    res = solve_lp(LpProblem([1, 1], [[1, 1]], [1], [INF], [0, 0], [10, 10]))
    assert res.status == LpStatus.OPTIMAL
    assert res.obj == pytest.approx(1.0)


def test_free_descent_is_unbounded():
    res = solve_lp(LpProblem([-1], np.zeros((0, 1)), [], [], [0], [INF]))
    assert res.status == LpStatus.UNBOUNDED
    assert res.ray[0] > 0


def test_empty_box_is_infeasible():
    res = solve_lp(LpProblem([0], [[1]], [-INF], [-1], [0], [INF]))
    assert res.status == LpStatus.INFEASIBLE


def test_bound_order_checked():
    with pytest.raises(ValueError):
        LpProblem([0], [[1]], [2], [1], [0], [1])


def _highs(p):
    bounds = [(None if not np.isfinite(a) else a, None if not np.isfinite(b) else b)
              for a, b in zip(p.col_lo, p.col_hi)]
    A_ub, b_ub = [], []
    for i in range(p.n_rows):
        if np.isfinite(p.row_hi[i]):
            A_ub.append(p.A[i]); b_ub.append(p.row_hi[i])
        if np.isfinite(p.row_lo[i]):
            A_ub.append(-p.A[i]); b_ub.append(-p.row_lo[i])
    kw = {"A_ub": np.array(A_ub), "b_ub": np.array(b_ub)} if A_ub else {}
    return linprog(p.c, bounds=bounds, method="highs", options={"presolve": False}, **kw)


@settings(max_examples=150, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_random_lps_agree_with_vertex_oracle(seed):
    p = random_lp(np.random.default_rng(seed), max_n=6, max_m=6, max_subsets=5000)
    res = solve_lp(p)
    status, value = lp_vertex_oracle(p)
    assert res.status.value == status
    if status == "optimal":
        assert res.obj == pytest.approx(value, abs=1e-7 * (1 + abs(value)))
        cert = check_certificates(p, res)
        assert max(cert.values()) <= 1e-7, cert


@settings(max_examples=100, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_free_variable_lps_agree_with_highs(seed):
    rng = np.random.default_rng(seed)
    n, m = int(rng.integers(1, 7)), int(rng.integers(1, 7))
    A = rng.integers(-5, 6, size=(m, n)).astype(float)
    x0 = rng.integers(-3, 4, size=n)
    lo = np.where(rng.random(m) < 0.3, -INF, A @ x0 - rng.integers(0, 3, size=m))
    hi = np.where(rng.random(m) < 0.3, INF, A @ x0 + rng.integers(0, 3, size=m))
    col_lo = np.where(rng.random(n) < 0.5, -INF, x0 - 2)
    col_hi = np.where(rng.random(n) < 0.5, INF, x0 + 2)
    p = LpProblem(rng.integers(-5, 6, size=n), A, lo, hi, col_lo, col_hi)
    res = solve_lp(p)
    ref = _highs(p)
    expected = {0: "optimal", 2: "infeasible", 3: "unbounded"}[ref.status]
    assert res.status.value == expected
    if expected == "optimal":
        assert res.obj == pytest.approx(ref.fun, abs=1e-7 * (1 + abs(ref.fun)))
        assert max(check_certificates(p, res).values()) <= 1e-7
    if expected == "unbounded":
        r = res.ray
        assert p.c @ r < 0
        Ar = p.A @ r
        assert np.all(Ar[np.isfinite(p.row_lo)] >= -1e-9)
        assert np.all(Ar[np.isfinite(p.row_hi)] <= 1e-9)
        assert np.all(r[np.isfinite(p.col_lo)] >= -1e-9)
        assert np.all(r[np.isfinite(p.col_hi)] <= 1e-9)


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_warm_start_gives_same_optimum(seed):
    rng = np.random.default_rng(seed)
    p = random_lp(rng, max_subsets=5000)
    solver = SimplexSolver()
    first = solver.solve(p)
    for _ in range(5):
        c = p.c + rng.integers(-2, 3, size=p.n_cols)
        q = LpProblem(c, p.A, p.row_lo, p.row_hi, p.col_lo, p.col_hi)
        warm = solver.solve(q, warm_basis=first.basis)
        cold = solve_lp(q)
        assert warm.status == cold.status
        if cold.status == LpStatus.OPTIMAL:
            assert warm.obj == pytest.approx(cold.obj, abs=1e-7 * (1 + abs(cold.obj)))


def test_deterministic():
    p = random_lp(np.random.default_rng(7))
    a, b = solve_lp(p), solve_lp(p)
    assert a.status == b.status
    if a.x is not None:
        assert np.array_equal(a.x, b.x) and np.array_equal(a.y_dual, b.y_dual)
