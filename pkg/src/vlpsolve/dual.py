"""Geometric duality between the upper image and the dual lower image.

Dual points are written ``y* = (y*_1, ..., y*_{q-1}, y*_q)`` where the first
``q - 1`` entries are the (sign adjusted) weights ``w`` normalized by
``c^T w = 1`` and ``y*_q`` is the dual objective value.  The coupling
function links a V-representation of one image to an H-representation of
the other.
"""
import warnings
from dataclasses import dataclass

import numpy as np

from .model import Sense, mul_inf_zero
from .polytope import HRep, Polyhedron, VRep


class MissingVerticalDirection(UserWarning):
    pass


@dataclass(frozen=True)
class CouplingContext:
    c: np.ndarray
    sense: Sense = Sense.MIN

    def __post_init__(self):
        object.__setattr__(self, "c", np.asarray(self.c, dtype=float))
        object.__setattr__(self, "sense", Sense(self.sense))
        if self.c[-1] == 0.0:
            raise ValueError("last component of c must be nonzero")

    @property
    def q(self):
        return len(self.c)

    @property
    def vertical(self):
        """Extreme direction of the dual image: down for MIN, up for MAX."""
        e = np.zeros(self.q)
        e[-1] = -1.0 if self.sense == Sense.MIN else 1.0
        return e


def coupling(y, is_point, ystar, ctx):
    """Value of the coupling function for a primal point/direction and a dual point."""
    y = np.asarray(y, dtype=float)
    ystar = np.asarray(ystar, dtype=float)
    c = ctx.c
    cq = c[-1]
    xi = 1.0 if is_point else 0.0
    val = (cq * (y[:-1] @ ystar[:-1])
           + y[-1] * (abs(cq) / cq - c[:-1] @ ystar[:-1])
           - xi * abs(cq) * ystar[-1])
    return -val if ctx.sense == Sense.MAX else val


def primal_halfspace(ystar, ctx):
    """``(normal, offset)`` with ``{y : phi(y, y*) >= 0} = {y : normal @ y >= offset}``."""
    ystar = np.asarray(ystar, dtype=float)
    c = ctx.c
    cq = c[-1]
    normal = np.append(cq * ystar[:-1], abs(cq) / cq - c[:-1] @ ystar[:-1])
    offset = abs(cq) * ystar[-1]
    if ctx.sense == Sense.MAX:
        normal, offset = -normal, -offset
    return normal, offset


def dual_halfspace(y, is_point, ctx):
    """``(normal, offset)`` with ``{y* : phi(y, y*) >= 0} = {y* : normal @ y* >= offset}``."""
    y = np.asarray(y, dtype=float)
    c = ctx.c
    cq = c[-1]
    xi = 1.0 if is_point else 0.0
    normal = np.append(cq * y[:-1] - c[:-1] * y[-1], -xi * abs(cq))
    offset = -(abs(cq) / cq) * y[-1]
    if ctx.sense == Sense.MAX:
        normal, offset = -normal, -offset
    return normal, offset


def _unit(normals, offsets):
    normals = np.asarray(normals, dtype=float).reshape(len(offsets), -1)
    offsets = np.asarray(offsets, dtype=float)
    nrm = np.linalg.norm(normals, axis=1)
    keep = nrm > 1e-14
    return normals[keep] / nrm[keep, None], offsets[keep] / nrm[keep], keep


def dual_vrep_to_primal_hrep(W, ctx):
    """H-representation of the upper image from the vertices of the dual image.

    ``W`` is a :class:`VRep` of the dual image (or an array of its vertices).
    The vertical direction contributes no halfspace; if a VRep without it is
    passed a :class:`MissingVerticalDirection` warning is issued.
    """
    if isinstance(W, VRep):
        dirs = W.directions
        if not any(np.allclose(d / np.linalg.norm(d), ctx.vertical) for d in dirs):
            warnings.warn("dual V-representation lacks the vertical direction",
                          MissingVerticalDirection, stacklevel=2)
        pts, data = W.points, W.point_data
    else:
        pts = np.asarray(W, dtype=float).reshape(-1, ctx.q)
        data = [None] * len(pts)
    if len(pts) == 0:
        return HRep.empty(ctx.q)
    hs = [primal_halfspace(ys, ctx) for ys in pts]
    normals, offsets, keep = _unit([h[0] for h in hs], [h[1] for h in hs])
    return HRep(normals, offsets, data=[d for d, k in zip(data, keep) if k])


def primal_vrep_to_dual_hrep(Ybar, ctx):
    """H-representation of the dual image from a V-representation of the upper image."""
    items = [(y, True) for y in Ybar.points] + [(d, False) for d in Ybar.directions]
    if not items:
        return HRep.empty(ctx.q)
    hs = [dual_halfspace(y, is_pt, ctx) for y, is_pt in items]
    normals, offsets, keep = _unit([h[0] for h in hs], [h[1] for h in hs])
    flags = np.array([not is_pt for _, is_pt in items], dtype=bool)[keep]
    return HRep(normals, offsets, cone_flags=flags)


# ---------------------------------------------------------------------------
# dual problem

def d_value(a, b, l, s, u, v, sense=Sense.MIN):
    """Last component of the dual objective, using ``(+-inf) * 0 = 0``."""
    u = np.asarray(u, dtype=float)
    v = np.asarray(v, dtype=float)
    up, um = np.maximum(u, 0.0), np.maximum(-u, 0.0)
    vp, vm = np.maximum(v, 0.0), np.maximum(-v, 0.0)
    if sense == Sense.MIN:
        terms = (mul_inf_zero(a, up), -mul_inf_zero(b, um), mul_inf_zero(l, vm), -mul_inf_zero(s, vp))
    else:
        terms = (mul_inf_zero(b, up), -mul_inf_zero(a, um), mul_inf_zero(s, vm), -mul_inf_zero(l, vp))
    return float(sum(t.sum() for t in terms))


@dataclass
class DualProblem:
    """Implicit dual: ``B^T u = P^T w + v``, ``Y^T w >= 0``, ``c^T w = 1``.

    ``u_free_sign`` / ``v_free_sign`` give, per variable, the admissible
    signs (+1 only, -1 only, 0 both, None: fixed to zero) induced by which
    bounds are finite.
    """
    P: np.ndarray
    B: np.ndarray
    Y: np.ndarray
    c: np.ndarray
    a: np.ndarray
    b: np.ndarray
    l: np.ndarray
    s: np.ndarray
    sense: Sense
    u_sign: np.ndarray
    v_sign: np.ndarray

    @property
    def v_columns(self):
        """Columns that carry a ``v`` variable (at least one finite bound)."""
        return np.flatnonzero(self.v_sign != 2)

    def objective(self, u, w, v):
        w = np.asarray(w, dtype=float)
        cq = self.c[-1]
        head = (cq / abs(cq)) * w[:-1]
        return np.append(head, d_value(self.a, self.b, self.l, self.s, u, v, self.sense))

    def residual(self, u, w, v):
        """Largest violation of the dual constraints (0 when feasible)."""
        u, w, v = (np.asarray(t, dtype=float) for t in (u, w, v))
        eq = np.abs(self.B.T @ u - self.P.T @ w - v).max(initial=0.0)
        cone = max(0.0, -np.min(self.Y.T @ w))
        norm = abs(self.c @ w - 1.0)
        sign = max(_sign_violation(u, self.u_sign), _sign_violation(v, self.v_sign))
        return max(eq, cone, norm, sign)


def _sign_pattern(lo, hi, sense):
    # +1: only nonnegative allowed, -1: only nonpositive, 0: free, 2: fixed at zero
    first, second = (lo, hi) if sense == Sense.MIN else (hi, lo)
    pos_ok = np.isfinite(first)
    neg_ok = np.isfinite(second)
    return np.where(pos_ok & neg_ok, 0, np.where(pos_ok, 1, np.where(neg_ok, -1, 2)))


def _sign_violation(x, pattern):
    bad = 0.0
    for xi, pi in zip(x, pattern):
        if pi == 1:
            bad = max(bad, -xi)
        elif pi == -1:
            bad = max(bad, xi)
        elif pi == 2:
            bad = max(bad, abs(xi))
    return bad


def build_dual(p):
    """Dual problem of a validated VLP (any sense, any sign of ``c_q``).

    For MIN, ``u_i > 0`` pairs with ``a_i`` and ``u_i < 0`` with ``b_i``; a
    variable whose paired bound is infinite is sign restricted so the infinite
    term never enters the objective.  ``v`` follows the same rule with ``l``
    and ``s`` (``v_j < 0`` pairs with ``l_j``).
    """
    u_sign = _sign_pattern(p.a, p.b, p.sense)
    # v^- pairs with l (MIN), v^+ with s
    v_sign = _sign_pattern(p.s, p.l, p.sense)
    return DualProblem(p.P, p.B, p.cone.Y, p.c, p.a, p.b, p.l, p.s, p.sense, u_sign, v_sign)


# ---------------------------------------------------------------------------
# lower-image double description in weight coordinates
#
# Coordinates are g = (w_1, ..., w_{q-1}, gamma) with w_q recovered from
# c^T w = 1.  A point v of a polyhedron with recession cone containing C
# contributes gamma <= w @ v, a direction d contributes w @ d >= 0.

def weights(g, c):
    """Full weight vector ``w`` with ``c @ w = 1`` from lower-image coordinates."""
    g = np.asarray(g, dtype=float)
    wq = (1.0 - c[:-1] @ g[:-1]) / c[-1]
    return np.append(g[:-1], wq)


def g_coords(w, gamma, c):
    w = np.asarray(w, dtype=float)
    w = w / (c @ w)
    return np.append(w[:-1], gamma)


def g_halfspace(y, is_point, c):
    y = np.asarray(y, dtype=float)
    normal = np.append(y[:-1] - c[:-1] * y[-1] / c[-1], -1.0 if is_point else 0.0)
    return normal, -y[-1] / c[-1]


def lower_image_dd(c, W0, D0, v0, v0_data=None, d0_data=None, tol_on=None):
    """Initial lower image ``{g : w in conv(W0), gamma <= w @ v0}`` as a double description.

    ``W0`` holds, as columns, generators of the admissible weight cone and
    ``D0`` the directions whose halfspaces cut out that cone.
    """
    c = np.asarray(c, dtype=float)
    q = len(c)
    W0 = np.atleast_2d(np.asarray(W0, dtype=float)).reshape(q, -1)
    v0 = np.asarray(v0, dtype=float)
    pts = []
    for w in W0.T:
        w = w / (c @ w)
        pts.append(np.append(w[:-1], w @ v0))
    normals, offsets, data = [], [], []
    D0 = np.asarray(D0, dtype=float).reshape(q, -1)
    for k, d in enumerate(D0.T):
        nrm, off = g_halfspace(d, False, c)
        if np.linalg.norm(nrm) <= 1e-14:
            continue
        normals.append(nrm)
        offsets.append(off)
        data.append(None if d0_data is None else d0_data[k])
    nrm, off = g_halfspace(v0, True, c)
    normals.append(nrm)
    offsets.append(off)
    data.append(v0_data)
    vertical = np.zeros((1, q))
    vertical[0, -1] = -1.0
    kw = {} if tol_on is None else {"tol_on": tol_on}
    poly = Polyhedron.from_double_description(np.array(pts), vertical, np.array(normals),
                                              np.array(offsets), half_data=data, dim=q, **kw)
    poly.prune_redundant_halfspaces()
    return poly


def hrep_from_vrep(points, directions, c, Y, Z):
    """Facets of ``conv(points) + cone(directions) + C`` via the lower image."""
    c = np.asarray(c, dtype=float)
    points = np.atleast_2d(np.asarray(points, dtype=float))
    q = len(c)
    G = lower_image_dd(c, Z, Y, points[0])
    for v in points[1:]:
        G.cut(*g_halfspace(v, True, c))
    for d in np.asarray(directions, dtype=float).reshape(-1, q):
        nrm, off = g_halfspace(d, False, c)
        if np.linalg.norm(nrm) > 1e-14:
            G.cut(nrm, off)
    normals, offsets = [], []
    for gid in G.point_ids():
        g = G.coords(gid)
        normals.append(weights(g, c))
        offsets.append(g[-1])
    normals, offsets, _ = _unit(normals, offsets)
    return HRep(normals, offsets)
