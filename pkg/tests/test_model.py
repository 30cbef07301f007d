import itertools

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from vlpsolve.model import (BadDualityParam, DimensionMismatch, InconsistentBounds, NotPointed,
                            NotSolid, OrderingCone, Sense, VlpProblem, complete_cone,
                            homogenize, validate)

from conftest import INF, same_rows, unit_rows


def brute_dual_generators(Y):
    """Extreme rays of {z : Y^T z >= 0} by enumerating (q-1)-subsets of tight generators."""
    q = Y.shape[0]
    rays = []
    for sub in itertools.combinations(range(Y.shape[1]), q - 1):
        M = Y[:, list(sub)].T
        _, sv, vt = np.linalg.svd(M, full_matrices=True)
        if np.sum(sv > 1e-9) < q - 1:
            continue
        z = vt[-1]
        for cand in (z, -z):
            if np.all(Y.T @ cand >= -1e-9):
                rays.append(cand / np.abs(cand).max())
    out = []
    for r in rays:
        if not any(np.allclose(r, o) for o in out):
            out.append(r)
    return np.array(out)


def test_orthant_is_valid_with_default_parameter():
    p = validate(VlpProblem.create(np.eye(2), cone=OrderingCone(2, np.eye(2))))
    assert np.allclose(p.cone.Z, np.eye(2))
    assert np.allclose(p.c / p.c.max(), [1, 1])


def test_single_generator_is_not_solid():
    with pytest.raises(NotSolid):
        validate(VlpProblem.create(np.eye(2), cone=OrderingCone(2, np.array([[1.0], [0.0]]))))


def test_boundary_parameter_rejected():
    with pytest.raises(BadDualityParam):
        validate(VlpProblem.create(np.eye(2), c=[1, 0]))


def test_parameter_with_zero_last_component_rejected():
    cone = OrderingCone(2, np.array([[1.0, 1.0], [-1.0, 1.0]]))
    with pytest.raises(BadDualityParam):
        validate(VlpProblem.create(np.eye(2), cone=cone, c=[1, 0]))


def test_dimension_and_bound_errors():
    with pytest.raises(DimensionMismatch):
        validate(VlpProblem.create(np.eye(2), np.ones((1, 3))))
    with pytest.raises(InconsistentBounds):
        validate(VlpProblem.create(np.eye(2), np.ones((1, 2)), a=[2], b=[1]))
    with pytest.raises(InconsistentBounds):
        validate(VlpProblem.create(np.eye(2), l=[0, 1], s=[1, 0]))


def test_dual_cone_with_line_is_not_pointed():
    Z = np.array([[1.0], [0.0]])
    with pytest.raises(NotPointed):
        complete_cone(OrderingCone(2, None, Z))


def test_complete_cone_orthant():
    assert np.allclose(complete_cone(OrderingCone(2, np.eye(2))).Z, np.eye(2))
    assert same_rows(complete_cone(OrderingCone(3, None, np.eye(3))).Y.T, np.eye(3))


def test_complete_cone_two_generators():
    Y = np.array([[1.0, 1.0], [0.0, 1.0]])
    Z = complete_cone(OrderingCone(2, Y)).Z
    expected = brute_dual_generators(Y)
    assert same_rows(unit_rows(Z.T), unit_rows(expected))
    assert same_rows(unit_rows(Z.T), unit_rows(np.array([[0.0, 1.0], [1.0, -1.0]])))


def random_cone(seed, q):
    rng = np.random.default_rng(seed)
    while True:
        Y = rng.integers(0, 4, size=(q, q + int(rng.integers(0, 3)))).astype(float)
        Y[:, :q] += np.eye(q)
        if np.linalg.matrix_rank(Y) == q:
            return Y


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 10**6), st.sampled_from([2, 3]))
def test_complete_cone_matches_brute_force(seed, q):
    Y = random_cone(seed, q)
    Z = complete_cone(OrderingCone(q, Y)).Z
    assert same_rows(unit_rows(Z.T), unit_rows(brute_dual_generators(Y)), tol=1e-7)


@settings(max_examples=20, deadline=None)
@given(st.integers(0, 10**6), st.sampled_from([2, 3]))
def test_complete_cone_involution(seed, q):
    cone = complete_cone(OrderingCone(q, random_cone(seed, q)))
    again = complete_cone(OrderingCone(q, None, cone.Z))
    rays = np.random.default_rng(seed).normal(size=(1000, q))
    assert [cone.contains(r) for r in rays] == [again.contains(r) for r in rays]
    assert np.min(cone.Z.T @ cone.Y) >= -1e-9


def test_homogenize_examples():
    p = validate(VlpProblem.create(np.eye(2), np.ones((1, 2)), a=[1], b=[INF], l=[0, 0], s=[INF, INF]))
    a_h, b_h, l_h, s_h = homogenize(p).direction_bounds
    assert list(a_h) == [0] and list(b_h) == [INF]
    assert list(l_h) == [0, 0] and list(s_h) == [INF, INF]
    p = validate(VlpProblem.create(np.eye(2), np.ones((1, 2)), a=[-INF], b=[3]))
    a_h, b_h, _, _ = homogenize(p).direction_bounds
    assert list(a_h) == [-INF] and list(b_h) == [0]
    p = validate(VlpProblem.create(np.eye(2), np.ones((1, 2)), a=[-1], b=[2], l=[0, 0], s=[1, 1]))
    assert all(np.all(v == 0) for v in homogenize(p).direction_bounds)


def test_homogenize_idempotent():
    p = validate(VlpProblem.create(np.eye(2), np.ones((2, 2)), a=[1, -INF], b=[INF, 4], l=[0, -INF]))
    once = homogenize(p).direction_bounds
    q2 = validate(VlpProblem.create(p.P, p.B, *once))
    twice = homogenize(q2).direction_bounds
    assert all(np.array_equal(x, y) for x, y in zip(once, twice))


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10**6), st.sampled_from([2, 3, 4]))
def test_default_parameter_is_interior(seed, q):
    rng = np.random.default_rng(seed)
    Y = np.eye(q) + rng.integers(-1, 2, size=(q, q)) * 0.3
    Y[-1] = rng.choice([-1.0, 0.0, 1.0], size=q) * (rng.random() < 0.5)
    Y[-1, 0] = 1.0
    Y[-1, 1] = -1.0
    try:
        cone = complete_cone(OrderingCone(q, Y))
    except Exception:
        return
    p = validate(VlpProblem.create(np.eye(q), cone=cone))
    assert np.all(p.cone.Z.T @ p.c > 1e-7)
    assert abs(p.c[-1]) > 1e-7


def test_orthant_dual_conditions_reduce_to_nonnegativity():
    p = validate(VlpProblem.create(np.eye(3)))
    rng = np.random.default_rng(0)
    for w in rng.normal(size=(200, 3)):
        assert bool(np.all(p.cone.Z.T @ w >= 0)) == bool(np.all(w >= 0))


def test_sense_parsed():
    assert validate(VlpProblem.create(np.eye(2), sense="max")).sense == Sense.MAX
