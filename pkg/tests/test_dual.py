
import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from vlpsolve.dual import (CouplingContext, MissingVerticalDirection, build_dual, coupling, d_value,
                           dual_halfspace, dual_vrep_to_primal_hrep, primal_halfspace,
                           primal_vrep_to_dual_hrep)
from vlpsolve.model import Sense
from vlpsolve.polytope import VRep

from conftest import INF, same_rows

E = CouplingContext(np.array([1.0, 1.0]))
S2_PRIMAL = np.array([[1.0, 0.0], [0.0, 1.0]])
S2_DUAL = np.array([[0.0, 0.0], [0.5, 0.5], [1.0, 0.0]])


def test_coupling_examples():
    assert coupling([1, 0], True, [0.5, 0.5], E) == pytest.approx(0.0)
    assert coupling([1, 0], False, [0.3, 0.9], E) == pytest.approx(0.3)
    assert coupling([0, 0], True, [0, 0], CouplingContext([1.0, 2.0])) == 0.0
    assert coupling([1, 0], True, [0.5, 0.5], CouplingContext([1.0, 1.0], Sense.MAX)) == pytest.approx(0.0)


def test_coupling_rejects_zero_last_component():
    with pytest.raises(ValueError):
        CouplingContext([1.0, 0.0])


@settings(max_examples=200, deadline=None)
@given(st.integers(0, 2**32 - 1), st.sampled_from([2, 3, 4]), st.booleans(), st.booleans())
def test_halfspace_forms_match_coupling(seed, q, is_point, maximize):
    rng = np.random.default_rng(seed)
    c = rng.normal(size=q)
    c[-1] = rng.choice([-1, 1]) * (0.1 + abs(c[-1]))
    ctx = CouplingContext(c, Sense.MAX if maximize else Sense.MIN)
    y, ys = rng.normal(size=q), rng.normal(size=q)
    phi = coupling(y, is_point, ys, ctx)
    n1, o1 = dual_halfspace(y, is_point, ctx)
    assert n1 @ ys - o1 == pytest.approx(phi, abs=1e-12)
    if is_point:
        n2, o2 = primal_halfspace(ys, ctx)
        assert n2 @ y - o2 == pytest.approx(phi, abs=1e-12)


@settings(max_examples=100, deadline=None)
@given(st.integers(0, 2**32 - 1), st.booleans())
def test_sense_symmetry(seed, is_point):
    rng = np.random.default_rng(seed)
    q = 3
    c = np.abs(rng.normal(size=q)) + 0.1
    y, ys = rng.normal(size=q), rng.normal(size=q)
    ys_neg = ys.copy()
    ys_neg[-1] *= -1
    lhs = coupling(y, is_point, ys, CouplingContext(c, Sense.MAX))
    rhs = coupling(y, is_point, ys_neg, CouplingContext(-c, Sense.MIN))
    assert lhs == pytest.approx(rhs, abs=1e-12)
    # the negated form: MAX coupling is minus the MIN coupling with y*_q negated
    # in the point term only
    expanded = -(c[-1] * y[:-1] @ ys[:-1] + y[-1] * (1 - c[:-1] @ ys[:-1])
                 - (1.0 if is_point else 0.0) * c[-1] * ys[-1])
    assert lhs == pytest.approx(expanded, abs=1e-12)


@settings(max_examples=100, deadline=None)
@given(st.integers(0, 2**32 - 1), st.booleans())
def test_negative_last_component_reflection(seed, is_point):
    rng = np.random.default_rng(seed)
    c = np.abs(rng.normal(size=3)) + 0.1
    y, ys = rng.normal(size=3), rng.normal(size=3)
    # reflecting y -> -y and c -> -c leaves the coupling value unchanged
    a = coupling(y, is_point, ys, CouplingContext(c))
    b = coupling(-y, is_point, ys, CouplingContext(-c))
    assert a == pytest.approx(b, abs=1e-12)


def test_dual_vertices_to_primal_hrep():
    h = dual_vrep_to_primal_hrep(VRep(S2_DUAL, [[0, -1]]), E)
    expected = np.array([[0, 1, 0], [1, 1, 1], [1, 0, 0]], dtype=float)
    expected /= np.linalg.norm(expected[:, :2], axis=1)[:, None]
    assert same_rows(np.column_stack([h.normals, h.offsets]), expected)


def test_single_dual_vertex():
    h = dual_vrep_to_primal_hrep(np.array([[0.5, 0.5]]), E)
    s = np.sqrt(0.5)
    assert np.allclose(h.normals, [[s, s]]) and np.allclose(h.offsets, [s])


def test_missing_vertical_direction_warns_and_empty_input():
    with pytest.warns(MissingVerticalDirection):
        dual_vrep_to_primal_hrep(VRep(S2_DUAL, np.zeros((0, 2))), E)
    assert len(dual_vrep_to_primal_hrep(np.zeros((0, 2)), E)) == 0


def test_primal_vrep_to_dual_hrep():
    h = primal_vrep_to_dual_hrep(VRep(S2_PRIMAL, np.eye(2)), E)
    # y*_2 <= y*_1, y*_2 <= 1 - y*_1, y*_1 >= 0, y*_1 <= 1
    expected = np.array([[1, -1, 0], [-1, -1, -1], [1, 0, 0], [-1, 0, -1]], dtype=float)
    expected /= np.linalg.norm(expected[:, :2], axis=1)[:, None]
    assert same_rows(np.column_stack([h.normals, h.offsets]), expected)
    assert list(h.cone_flags) == [False, False, True, True]


def test_single_direction_and_vertex():
    h = primal_vrep_to_dual_hrep(VRep(np.zeros((0, 2)), [[1, 0]]), E)
    assert np.allclose(h.normals, [[1, 0]]) and np.allclose(h.offsets, [0])
    h = primal_vrep_to_dual_hrep(VRep([[0, 0]], np.zeros((0, 2))), E)
    assert np.allclose(h.normals, [[0, -1]]) and np.allclose(h.offsets, [0])


def test_incidence_pattern_simplex2():
    prim = [(y, True) for y in S2_PRIMAL] + [(d, False) for d in np.eye(2)]
    zero = {(i, j) for i, (y, pt) in enumerate(prim) for j, ys in enumerate(S2_DUAL)
            if abs(coupling(y, pt, ys, E)) <= 1e-9}
    vals = [coupling(y, True, ys, E) for y in S2_PRIMAL for ys in S2_DUAL]
    assert sum(abs(v) <= 1e-9 for v in vals) == 4
    assert all(v >= -1e-12 for v in vals)
    # vertex pairs plus the pairs of dual vertices with the two directions
    assert zero == {(0, 0), (0, 1), (1, 1), (1, 2), (2, 0), (3, 2)}


def test_weak_duality_on_grid():
    # dual feasible points of simplex2: 0 <= w1 <= 1, gamma <= min(w1, 1 - w1)
    duals = [(w, g) for w in np.linspace(0, 1, 11) for g in np.linspace(-1, min(w, 1 - w), 5)]
    grid = [(a, b) for a in np.linspace(0, 3, 13) for b in np.linspace(0, 3, 13) if a + b >= 1]
    for ys in duals:
        for y in grid:
            assert coupling(np.array(y), True, np.array(ys), E) >= -1e-9


def test_build_dual_simplex2(simplex2):
    d = build_dual(simplex2)
    assert list(d.u_sign) == [1, 1, 1]
    assert list(d.v_sign) == [2, 2]
    u, w, v = np.array([0.5, 0.0, 0.0]), np.array([0.5, 0.5]), np.zeros(2)
    assert d.residual(u, w, v) == pytest.approx(0.0)
    assert np.allclose(d.objective(u, w, v), [0.5, 0.5])
    assert d.residual(np.array([-0.5, 1, 1]), w, v) > 0


def test_d_value_examples():
    l, s = np.zeros(2), np.ones(2)
    assert d_value([1, 0], [3, 5], l, s, [2, -1], [0, 0]) == -3.0
    assert d_value([1, 0], [INF, 5], l, s, [2, 0], [0, 0]) == 2.0
    assert d_value([1, 0], [3, 5], l, s, [2, -1], [0, 0], Sense.MAX) == pytest.approx(3 * 2 - 0)


def test_molp_reduction():
    from vlpsolve.model import VlpProblem, validate
    B = np.array([[1.0, 2.0], [3.0, 1.0]])
    p = validate(VlpProblem.create(np.eye(2), B, a=[1, 1], c=[1, 1]))
    d = build_dual(p)
    assert list(d.u_sign) == [1, 1] and list(d.v_sign) == [2, 2]
    u, w = np.array([0.2, 0.1]), np.array([0.5, 0.5])
    assert d.objective(u, w, np.zeros(2))[-1] == pytest.approx(u.sum())
