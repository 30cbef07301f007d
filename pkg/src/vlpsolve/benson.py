"""Primal and dual Benson-type cutting schemes.

Both algorithms run on a canonical form of the problem: minimization with a
duality parameter whose last entry is positive.  Maximization and a negative
``c_q`` are reduced to it by reflecting the image space, and every result is
mapped back before it is returned.

The recession cone of the upper image is found first (the homogeneous phase).
It is described through the polytope of admissible weights ``w`` (those with
``c @ w = 1`` for which the weighted-sum LP is bounded); vertices of that
polytope give the initial outer approximation.
"""
import time
from collections import deque
from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from ._linalg import TOL_CONE, independent_columns
from .dual import (dual_halfspace, g_halfspace, lower_image_dd, weights)
from .lp import LpProblem, LpStatus, SimplexSolver
from .model import Sense, homogenize, validate
from .polytope import HRep, Polyhedron, VRep, merge_close_vertices


class Algorithm(str, Enum):
    PRIMAL = "primal"
    DUAL = "dual"


class Status(str, Enum):
    OPTIMAL = "optimal"
    EPS_OPTIMAL = "eps_optimal"
    UNBOUNDED_IMAGE = "unbounded_image"
    INFEASIBLE = "infeasible"
    NO_VERTEX = "no_vertex"
    ITERATION_LIMIT = "iteration_limit"


class MissingPreimage(RuntimeError):
    pass


class InfeasibleProblem(RuntimeError):
    pass


@dataclass
class SolverConfig:
    algorithm: Algorithm = Algorithm.PRIMAL
    eps: float = 1e-8
    max_iterations: int = 10 ** 6
    merge_delta: float = None
    tol_feas: float = 1e-9
    tol_dual: float = 1e-9
    tol_pivot: float = 1e-11

    def __post_init__(self):
        self.algorithm = Algorithm(self.algorithm)
        if not self.eps > 0:
            raise ValueError("eps must be positive")
        if self.max_iterations < 1:
            raise ValueError("max_iterations must be at least 1")

    def lp_options(self):
        return {"tol_feas": self.tol_feas, "tol_dual": self.tol_dual, "tol_pivot": self.tol_pivot}


@dataclass
class Image:
    vrep: VRep
    hrep: HRep


@dataclass
class VlpSolution:
    """Result of a run, in the coordinates of the original problem.

    ``vertices`` / ``directions`` are image points and minimal directions of
    the upper image (lower image for maximization) with preimages in
    ``vertex_preimages`` / ``direction_preimages``.  ``dual_vertices`` are
    vertices of the dual image with preimages ``(u, w, v)``.
    """
    status: Status
    algorithm: Algorithm
    eps: float
    q: int
    n: int
    vertices: np.ndarray = None
    vertex_preimages: np.ndarray = None
    directions: np.ndarray = None
    direction_preimages: np.ndarray = None
    cone_compartment: np.ndarray = None
    dual_vertices: np.ndarray = None
    dual_preimages: list = None
    primal_outer: Image = None
    primal_inner: Image = None
    dual_outer: Image = None
    dual_inner: Image = None
    lp_count: int = 0
    init_lps: int = 0
    iterations: int = 0
    elapsed: float = 0.0
    message: str = ""
    c: np.ndarray = None
    sense: Sense = Sense.MIN

    def __post_init__(self):
        q, n = self.q, self.n
        for name, width in (("vertices", q), ("vertex_preimages", n), ("directions", q),
                            ("direction_preimages", n), ("cone_compartment", q),
                            ("dual_vertices", q)):
            if getattr(self, name) is None:
                setattr(self, name, np.zeros((0, width)))
        if self.dual_preimages is None:
            self.dual_preimages = []

    @property
    def converged(self):
        return self.status in (Status.OPTIMAL, Status.EPS_OPTIMAL, Status.UNBOUNDED_IMAGE)


# ---------------------------------------------------------------------------
# canonical form and LP kernels

@dataclass(frozen=True)
class Canonical:
    """Minimization data with ``c_q > 0``.

    User image points are ``flip_y * y``; user dual points have their last
    coordinate multiplied by ``flip_dual``; user weights are ``flip_w * w``
    and user ``(u, v)`` are ``flip_dual * (u, v)``.
    """
    P: np.ndarray
    B: np.ndarray
    a: np.ndarray
    b: np.ndarray
    l: np.ndarray
    s: np.ndarray
    Y: np.ndarray
    Z: np.ndarray
    c: np.ndarray
    flip_y: float
    flip_dual: float
    flip_w: float
    problem: object

    @property
    def q(self):
        return self.P.shape[0]

    @property
    def n(self):
        return self.P.shape[1]

    @property
    def m(self):
        return self.B.shape[0]

    def to_user_points(self, Y):
        return self.flip_y * np.asarray(Y, dtype=float)

    def from_user_points(self, Y):
        return self.flip_y * np.asarray(Y, dtype=float)

    def to_user_dual(self, Ys):
        Ys = np.array(Ys, dtype=float, copy=True)
        if Ys.size:
            Ys[..., -1] *= self.flip_dual
        return Ys

    def to_user_dual_preimage(self, info):
        return {"u": self.flip_dual * info["u"], "w": self.flip_w * info["w"],
                "v": self.flip_dual * info["v"]}

    def in_cone(self, d, tol=TOL_CONE):
        d = np.asarray(d, dtype=float)
        nrm = np.abs(d).max()
        return bool(nrm == 0.0 or np.all(self.Z.T @ (d / nrm) >= -tol))


def canonicalize(p):
    if not p.validated:
        p = validate(p)
    flip_dual = -1.0 if p.sense == Sense.MAX else 1.0
    flip_w = 1.0 if p.c[-1] > 0 else -1.0
    fy = flip_dual * flip_w
    Y, Z = p.cone.Y, p.cone.Z
    return Canonical(fy * p.P, p.B, p.a, p.b, p.l, p.s, flip_w * Y, flip_w * Z,
                     flip_w * p.c, fy, flip_dual, flip_w, p)


@dataclass
class WeightedResult:
    status: LpStatus
    value: float = None
    x: np.ndarray = None
    u: np.ndarray = None
    v: np.ndarray = None
    ray: np.ndarray = None


@dataclass
class BoundaryResult:
    status: LpStatus
    z: float = None
    x: np.ndarray = None
    w: np.ndarray = None
    offset: float = None
    u: np.ndarray = None
    v: np.ndarray = None


class Kernel:
    """LPs of the cutting schemes on canonical data, with warm starts and a counter."""

    def __init__(self, cp, cfg=None):
        cfg = cfg or SolverConfig()
        self.cp = cp
        opts = cfg.lp_options()
        self._ws = SimplexSolver(**opts)
        self._bs = SimplexSolver(**opts)
        self.lp_count = 0
        n, m = cp.n, cp.m
        self._wprob = LpProblem(np.zeros(n), cp.B, cp.a, cp.b, cp.l, cp.s)
        k = cp.Z.shape[1]
        A = np.zeros((m + k, n + 1))
        A[:m, :n] = cp.B
        A[m:, :n] = cp.Z.T @ cp.P
        A[m:, n] = -(cp.Z.T @ cp.c)
        cost = np.zeros(n + 1)
        cost[n] = 1.0
        self._bprob = LpProblem(cost, A, np.concatenate([cp.a, np.full(k, -np.inf)]),
                                np.concatenate([cp.b, np.zeros(k)]),
                                np.append(cp.l, -np.inf), np.append(cp.s, np.inf))

    def weighted(self, w):
        """``min w^T P x`` over the feasible set."""
        cp = self.cp
        self._wprob.c = cp.P.T @ np.asarray(w, dtype=float)
        res = self._ws.solve(self._wprob)
        self.lp_count += 1
        if res.status == LpStatus.OPTIMAL:
            return WeightedResult(res.status, res.obj, res.x, res.y_dual, -res.z_reduced)
        if res.status == LpStatus.UNBOUNDED:
            return WeightedResult(res.status, ray=res.ray)
        return WeightedResult(res.status)

    def boundary(self, v):
        """``min z`` s.t. ``x`` feasible and ``P x <=_C v + z c``."""
        cp = self.cp
        n, m = cp.n, cp.m
        self._bprob.row_hi[m:] = cp.Z.T @ np.asarray(v, dtype=float)
        res = self._bs.solve(self._bprob)
        self.lp_count += 1
        if res.status != LpStatus.OPTIMAL:
            return BoundaryResult(res.status)
        lam = -res.y_dual[m:]
        w = cp.Z @ lam
        z = res.x[n]
        return BoundaryResult(res.status, z, res.x[:n], w, float(w @ v + z),
                              res.y_dual[:m], -res.z_reduced[:n])


def boundary_lp(p, v, cfg=None):
    """Distance along ``c`` from ``v`` to the image, in user coordinates.

    Returns a :class:`BoundaryResult` whose ``w`` / ``offset`` describe the
    supporting halfspace ``w @ y >= offset`` (user coordinates) and whose
    ``x`` is the boundary preimage.
    """
    cp = canonicalize(p)
    res = Kernel(cp, cfg).boundary(cp.from_user_points(v))
    if res.status == LpStatus.OPTIMAL:
        res.w = cp.flip_y * res.w
        res.u, res.v = cp.flip_dual * res.u, cp.flip_dual * res.v
    return res


# ---------------------------------------------------------------------------
# homogeneous phase

class HomogeneousKind(str, Enum):
    BOUNDED = "bounded"
    UNBOUNDED_DIRECTIONS = "unbounded_directions"
    CONTAINS_LINES = "contains_lines"
    NO_VERTEX = "no_vertex"


@dataclass
class HomogeneousResult:
    """Recession cone of the image.

    ``rays`` are image directions outside ``C`` found through unbounded LPs
    (with preimages ``ray_preimages``); ``weights`` maps each vertex of the
    admissible weight polytope to its weighted-sum LP result.
    """
    kind: HomogeneousKind
    rays: list = field(default_factory=list)
    ray_preimages: list = field(default_factory=list)
    weights: list = field(default_factory=list)
    lps: int = 0
    init_lps: int = 0


def _homogeneous(kernel):
    cp = kernel.cp
    q = cp.q
    G = lower_image_dd(cp.c, cp.Z, cp.Y, np.zeros(q))
    out = HomogeneousResult(HomogeneousKind.BOUNDED)
    out.init_lps = len(G.point_ids())
    start = kernel.lp_count
    solved = {}
    pending = deque(G.point_ids())
    while pending:
        gid = pending.popleft()
        if gid not in G.gen_data and G._galive[gid]:
            w = weights(G.coords(gid), cp.c)
            res = kernel.weighted(w)
            if res.status == LpStatus.INFEASIBLE:
                raise InfeasibleProblem("feasible set is empty")
            if res.status == LpStatus.OPTIMAL:
                G.gen_data[gid] = True
                solved[gid] = (w, res)
                continue
            x = res.ray
            d = cp.P @ x
            scale = np.linalg.norm(d)
            d, x = d / scale, x / scale
            normal, offset = g_halfspace(d, False, cp.c)
            s = G.values(normal, offset)
            slack = [s[g] for g in G.point_ids()]
            if max(slack) < -G.tol_on:
                out.kind = HomogeneousKind.NO_VERTEX
                break
            if max(slack) <= G.tol_on:
                out.kind = HomogeneousKind.CONTAINS_LINES
                break
            cut = G.cut(normal, offset, data=len(out.rays), start=gid)
            out.rays.append(d)
            out.ray_preimages.append(x)
            out.kind = HomogeneousKind.UNBOUNDED_DIRECTIONS
            if cut is not None:
                pending.extend(cut.new)
    out.lps = kernel.lp_count - start
    if out.kind in (HomogeneousKind.BOUNDED, HomogeneousKind.UNBOUNDED_DIRECTIONS):
        out.weights = [solved[g] for g in G.point_ids()]
        # keep only rays that are extreme directions of the recession cone
        live = {G.half_data.get(h) for h in G.halfspace_ids()}
        keep = [k for k in range(len(out.rays)) if k in live]
        out.rays = [out.rays[k] for k in keep]
        out.ray_preimages = [out.ray_preimages[k] for k in keep]
        if not out.rays:
            out.kind = HomogeneousKind.BOUNDED
    return out


def homogeneous_phase(p, cfg=None):
    """Classify the recession cone of the image; directions are in user coordinates."""
    cp = canonicalize(p)
    res = _homogeneous(Kernel(cp, cfg))
    res.rays = [cp.to_user_points(d) for d in res.rays]
    return res


def _recession_generators(cp, hom):
    dirs = [y for y in cp.Y.T] + list(hom.rays)
    return np.array(dirs).reshape(-1, cp.q)


# ---------------------------------------------------------------------------
# helpers

def _hrep_to_dd(q, halfspaces, tol_on=None):
    """Double description of ``{y : w @ y >= gamma}`` for a list of ``(w, gamma, data)``."""
    W = np.array([h[0] for h in halfspaces]).reshape(-1, q)
    basis = independent_columns(W.T)
    if len(basis) < q:
        return None
    kw = {} if tol_on is None else {"tol_on": tol_on}
    poly = Polyhedron.simplicial(W[basis], [halfspaces[i][1] for i in basis],
                                 half_data=[halfspaces[i][2] for i in basis], **kw)
    for i, (w, gamma, data) in enumerate(halfspaces):
        if i not in basis:
            poly.cut(w, gamma, data=data)
    return poly


def _lower_dd(cp, hom, points):
    """Lower-image double description of ``conv(points) + recession cone``.

    Point halfspaces carry their index in ``points`` as data.
    """
    points = np.asarray(points)
    order = _unique_rows(points)
    G = lower_image_dd(cp.c, cp.Z, cp.Y, points[order[0]], v0_data=order[0],
                       d0_data=[("cone", k) for k in range(cp.Y.shape[1])])
    for k, d in enumerate(hom.rays):
        normal, offset = g_halfspace(d, False, cp.c)
        G.cut(normal, offset, data=("ray", k))
    for k in order[1:]:
        G.cut(*g_halfspace(points[k], True, cp.c), data=k)
    G.prune_redundant_halfspaces()
    return G


def _unique_rows(A, tol=1e-9):
    """Indices of the first occurrence of each row, up to a relative tolerance."""
    A = np.asarray(A, dtype=float)
    keep = []
    for i, row in enumerate(A):
        if keep:
            err = np.abs(A[keep] - row).max(axis=1)
            if err.min() <= tol * (1 + np.abs(row).max()):
                continue
        keep.append(i)
    return keep


def _lex_order(A):
    if len(A) == 0:
        return np.arange(0)
    return np.lexsort(np.asarray(A).T[::-1])


def extract_solution(inner, cone_test, tol=TOL_CONE):
    """Split an inner V-representation into points, minimal directions and the cone compartment.

    ``inner`` carries preimages as point/direction data; ``cone_test(d)``
    decides membership in the ordering cone.  Directions outside the cone
    must have a preimage.
    """
    pts = inner.points
    xs = list(inner.point_data)
    minimal, pre, compartment = [], [], []
    for d, xh in zip(inner.directions, inner.direction_data):
        if np.linalg.norm(d) <= tol:
            continue
        if cone_test(d):
            compartment.append(d)
        else:
            if xh is None:
                raise MissingPreimage("direction outside the cone without a preimage")
            minimal.append(d)
            pre.append(xh)
    return (pts, xs), (minimal, pre), compartment


# ---------------------------------------------------------------------------
# main loops

def _dual_info(w, gamma, u, v):
    return {"w": np.asarray(w, dtype=float), "gamma": float(gamma),
            "u": np.asarray(u, dtype=float), "v": np.asarray(v, dtype=float)}


def _reattach(T, cuts):
    """Restore halfspace data lost when the H-representation was rebuilt."""
    if not cuts:
        return
    N = np.array([c[0] for c in cuts])
    g = np.array([c[1] for c in cuts])
    for h in T.halfspace_ids():
        normal, offset = T.halfspace(h)
        err = np.abs(N - normal).max(axis=1) + np.abs(g - offset) / (1 + abs(offset))
        k = int(np.argmin(err))
        if err[k] <= 1e-7:
            T.half_data[h] = cuts[k][2]


class _Run:

    def __init__(self, p, cfg, progress):
        self.t0 = time.perf_counter()
        self.cfg = cfg
        self.progress = progress
        self.cp = canonicalize(p)
        self.kernel = Kernel(self.cp, cfg)
        self.iterations = 0
        self.points = []
        self.preimages = []

    def solution(self, status, message="", init_lps=0):
        p = self.cp.problem
        return VlpSolution(status, self.cfg.algorithm, self.cfg.eps, p.q, p.n,
                           lp_count=self.kernel.lp_count, init_lps=init_lps,
                           iterations=self.iterations,
                           elapsed=time.perf_counter() - self.t0, message=message,
                           c=p.c, sense=p.sense)

    def record(self, x):
        self.points.append(self.cp.P @ x)
        self.preimages.append(np.asarray(x, dtype=float))

    def report(self, unverified, zmax):
        if self.progress is not None:
            self.progress(self.iterations, unverified, zmax)

    def start(self):
        try:
            hom = _homogeneous(self.kernel)
        except InfeasibleProblem as exc:
            return None, self.solution(Status.INFEASIBLE, str(exc))
        self.iterations = hom.lps - hom.init_lps
        if hom.kind == HomogeneousKind.CONTAINS_LINES:
            return None, self.solution(Status.NO_VERTEX, "image contains a line", hom.init_lps)
        if hom.kind == HomogeneousKind.NO_VERTEX:
            return None, self.solution(Status.NO_VERTEX, "image has no vertex", hom.init_lps)
        for w, res in hom.weights:
            self.record(res.x)
        return hom, None

    # -- primal ----------------------------------------------------------

    def primal(self):
        hom, early = self.start()
        if early is not None:
            return early
        cp, cfg, kernel = self.cp, self.cfg, self.kernel
        init = [(w, res.value, _dual_info(w, res.value, res.u, res.v)) for w, res in hom.weights]
        T = _hrep_to_dd(cp.q, init)
        cuts = [(*T.halfspace(h), T.half_data.get(h)) for h in T.halfspace_ids()]
        dirs = _recession_generators(cp, hom)
        zmax = np.inf
        limit = False
        while True:
            todo = [g for g in T.point_ids() if g not in T.gen_data]
            if not todo:
                break
            if self.iterations >= cfg.max_iterations:
                limit = True
                break
            gid = todo[0]
            v = T.coords(gid)
            res = kernel.boundary(v)
            self.iterations += 1
            if res.status == LpStatus.UNBOUNDED:
                return self.solution(Status.NO_VERTEX, "boundary LP unbounded", hom.init_lps)
            if res.status != LpStatus.OPTIMAL:
                return self.solution(Status.INFEASIBLE, "boundary LP infeasible", hom.init_lps)
            self.record(res.x)
            if res.z <= cfg.eps:
                T.gen_data[gid] = res.z
                continue
            info = _dual_info(res.w, res.offset, res.u, res.v)
            cut = T.cut(res.w, res.offset, data=info, start=gid)
            if cut is None:
                T.gen_data[gid] = res.z
                continue
            cuts.append((*T.halfspace(cut.halfspace), info))
            zmax = res.z
            if self._needs_merge(T, cut.new):
                T, _ = merge_close_vertices(T, cp.c, cp.Z, dirs.T, cfg.merge_delta)
                _reattach(T, cuts)
            self.report(len(todo) - 1 + len(cut.new), zmax)
        T.prune_redundant_halfspaces()

        dual_pts, dual_pre = [], []
        for h in T.halfspace_ids():
            info = T.half_data.get(h)
            if info is None:
                continue
            dual_pts.append(np.append(info["w"][:-1], info["gamma"]))
            dual_pre.append(info)
        G = _lower_dd(cp, hom, self.points)
        status = self._status(limit, max((z for z in T.gen_data.values()), default=0.0))
        return self.finish(status, hom, T, G, dual_pts, dual_pre)

    def _needs_merge(self, T, new):
        if not new:
            return False
        pts = T.points
        if len(pts) < 2:
            return False
        for g in new:
            if not T.is_point(g):
                continue
            y = T.coords(g)
            d = np.linalg.norm(pts - y, axis=1)
            d = d[d > 0.0]
            if self.cfg.merge_delta is not None:
                thresh = self.cfg.merge_delta
            else:
                thresh = 1e-7 * (1.0 + np.linalg.norm(y))
            if d.size and d.min() < thresh:
                return True
        return False

    def _status(self, limit, zmax):
        if limit:
            return Status.ITERATION_LIMIT
        return Status.OPTIMAL if zmax <= self.cfg.tol_feas * 10 else Status.EPS_OPTIMAL

    # -- dual --------------------------------------------------------------

    def dual(self):
        hom, early = self.start()
        if early is not None:
            return early
        cp, cfg, kernel = self.cp, self.cfg, self.kernel
        G = _lower_dd(cp, hom, self.points)
        known = [(w, res) for w, res in hom.weights]
        for g in G.point_ids():
            g_coords = G.coords(g)
            w = weights(g_coords, cp.c)
            for wk, res in known:
                if np.abs(wk - w).max() <= 1e-12 and g_coords[-1] - res.value <= cfg.eps:
                    G.gen_data[g] = (g_coords[-1] - res.value, _dual_info(w, res.value, res.u, res.v))
                    break
        gapmax = np.inf
        limit = False
        while True:
            todo = [g for g in G.point_ids() if g not in G.gen_data]
            if not todo:
                break
            if self.iterations >= cfg.max_iterations:
                limit = True
                break
            gid = todo[0]
            g_coords = G.coords(gid)
            w = weights(g_coords, cp.c)
            res = kernel.weighted(w)
            self.iterations += 1
            if res.status != LpStatus.OPTIMAL:
                return self.solution(Status.NO_VERTEX, "weighted LP failed at an admissible weight",
                                     hom.init_lps)
            gap = g_coords[-1] - res.value
            info = _dual_info(w, res.value, res.u, res.v)
            self.record(res.x)
            if gap <= cfg.eps:
                G.gen_data[gid] = (gap, info)
                continue
            k = len(self.points) - 1
            cut = G.cut(*g_halfspace(self.points[k], True, cp.c), data=k, start=gid)
            if cut is None:
                G.gen_data[gid] = (gap, info)
                continue
            gapmax = gap
            self.report(len(todo) - 1 + len(cut.new), gapmax)
        G.prune_redundant_halfspaces()

        dual_pts, dual_pre, halfspaces = [], [], []
        for g in G.point_ids():
            entry = G.gen_data.get(g)
            if entry is None:
                continue
            info = entry[1]
            dual_pts.append(np.append(info["w"][:-1], info["gamma"]))
            dual_pre.append(info)
            halfspaces.append((info["w"], info["gamma"], info))
        T = _hrep_to_dd(cp.q, halfspaces) if halfspaces else None
        gaps = [e[0] for e in G.gen_data.values() if isinstance(e, tuple)]
        status = self._status(limit, max(gaps, default=0.0))
        return self.finish(status, hom, T, G, dual_pts, dual_pre)

    # -- assembling the solution -------------------------------------------

    def finish(self, status, hom, T, G, dual_pts, dual_pre):
        cp = self.cp
        q = cp.q
        # irredundant inner points are the point halfspaces still alive in G
        idx = sorted({G.half_data[h] for h in G.halfspace_ids()
                      if isinstance(G.half_data.get(h), (int, np.integer))})
        pts = np.array([self.points[k] for k in idx]).reshape(-1, q)
        pre = [self.preimages[k] for k in idx]
        keep = _unique_rows(pts)
        pts, pre = pts[keep], [pre[k] for k in keep]
        tags = [G.half_data.get(h) for h in G.halfspace_ids()]
        ray_ids = sorted({t[1] for t in tags if isinstance(t, tuple) and t[0] == "ray"})
        cone_ids = sorted({t[1] for t in tags if isinstance(t, tuple) and t[0] == "cone"})
        dirs = [cp.Y[:, k] / np.linalg.norm(cp.Y[:, k]) for k in cone_ids] + [hom.rays[k] for k in ray_ids]
        dir_pre = [None] * len(cone_ids) + [hom.ray_preimages[k] for k in ray_ids]
        inner = VRep(pts, np.array(dirs).reshape(-1, q), pre, dir_pre)
        (vpts, vpre), (mdirs, mpre), compartment = extract_solution(inner, cp.in_cone)

        sol = self.solution(status, init_lps=hom.init_lps)
        if status == Status.OPTIMAL and mdirs:
            sol.status = Status.UNBOUNDED_IMAGE
        if status == Status.EPS_OPTIMAL and mdirs:
            sol.status = Status.UNBOUNDED_IMAGE
        order = _lex_order(cp.to_user_points(vpts))
        sol.vertices = cp.to_user_points(vpts)[order].reshape(-1, q)
        sol.vertex_preimages = np.array([vpre[k] for k in order]).reshape(-1, cp.n)
        sol.directions = cp.to_user_points(np.array(mdirs).reshape(-1, q))
        sol.direction_preimages = np.array(mpre).reshape(-1, cp.n)
        sol.cone_compartment = cp.to_user_points(np.array(compartment).reshape(-1, q))

        dual_pts = np.array(dual_pts).reshape(-1, q)
        keep = _unique_rows(dual_pts)
        dual_pts = dual_pts[keep]
        dual_pre = [dual_pre[k] for k in keep]
        user_dual = cp.to_user_dual(dual_pts)
        order = _lex_order(user_dual)
        sol.dual_vertices = user_dual[order].reshape(-1, q)
        sol.dual_preimages = [cp.to_user_dual_preimage(dual_pre[k]) for k in order]

        vertical = np.zeros((1, q))
        vertical[0, -1] = -cp.flip_dual
        # inner image of P and its dual, the outer image of D (= G)
        inner_h = _g_vertices_to_hrep(cp, G)
        sol.primal_inner = Image(VRep(sol.vertices, np.vstack([sol.directions, sol.cone_compartment]),
                                      list(sol.vertex_preimages)), inner_h)
        sol.dual_outer = Image(VRep(cp.to_user_dual(G.points), vertical), _g_hrep_to_user(cp, G))
        if T is not None:
            tv = T.vrep()
            th = T.hrep()
            sol.primal_outer = Image(VRep(cp.to_user_points(tv.points), cp.to_user_points(tv.directions)),
                                     HRep(cp.flip_y * th.normals, th.offsets))
            dh = [dual_halfspace(y, True, _CTX(cp)) for y in tv.points] + \
                 [dual_halfspace(d, False, _CTX(cp)) for d in tv.directions]
            dh = [(nrm, off) for nrm, off in dh if np.linalg.norm(nrm) > 1e-14]
            dn = np.array([h[0] / np.linalg.norm(h[0]) for h in dh]).reshape(-1, q)
            do = np.array([h[1] / np.linalg.norm(h[0]) for h in dh])
            sol.dual_inner = Image(VRep(sol.dual_vertices, vertical, sol.dual_preimages),
                                   _dual_hrep_to_user(cp, dn, do))
        return sol


def _CTX(cp):
    from .dual import CouplingContext
    return CouplingContext(cp.c, Sense.MIN)


def _g_vertices_to_hrep(cp, G):
    normals, offsets = [], []
    for g in G.point_ids():
        coords = G.coords(g)
        w = weights(coords, cp.c)
        nrm = np.linalg.norm(w)
        normals.append(cp.flip_y * w / nrm)
        offsets.append(coords[-1] / nrm)
    return HRep(np.array(normals).reshape(-1, cp.q), np.array(offsets))


def _dual_hrep_to_user(cp, normals, offsets):
    normals = np.array(normals, dtype=float).reshape(-1, cp.q)
    if normals.size:
        normals[:, -1] *= cp.flip_dual
    return HRep(normals, np.asarray(offsets, dtype=float))


def _g_hrep_to_user(cp, G):
    h = G.hrep()
    return _dual_hrep_to_user(cp, h.normals, h.offsets)


def solve_primal(p, cfg=None, progress=None):
    """Outer approximation of the image refined by boundary LPs at its vertices."""
    cfg = cfg or SolverConfig()
    run = _Run(p, cfg, progress)
    return run.primal()


def solve_dual(p, cfg=None, progress=None):
    """Outer approximation of the dual image refined by weighted-sum LPs."""
    cfg = cfg or SolverConfig(algorithm=Algorithm.DUAL)
    run = _Run(p, cfg, progress)
    return run.dual()


def solve(p, cfg=None, progress=None):
    cfg = cfg or SolverConfig()
    if cfg.algorithm == Algorithm.DUAL:
        return _Run(p, cfg, progress).dual()
    return _Run(p, cfg, progress).primal()


def eps_certificate(p, outer, eps, tol=1e-12, cfg=None):
    """Check ``outer + eps * c`` lies in the image (``- eps * c`` for maximization).

    ``outer`` is a V-representation in user coordinates.  Vertices are tested
    with the boundary LP, directions with the same LP on the homogeneous
    problem.  ``tol`` is relative to the size of each vertex and must stay
    well below ``eps``; it only absorbs LP round-off.
    """
    cp = canonicalize(p)
    kernel = Kernel(cp, cfg)
    for v in cp.from_user_points(outer.points):
        res = kernel.boundary(v + eps * cp.c)
        if res.status != LpStatus.OPTIMAL or res.z > tol * (1.0 + np.abs(v).max()):
            return False
    if len(outer.directions):
        a, b, l, s = homogenize(cp.problem).direction_bounds
        hp = Canonical(cp.P, cp.B, a, b, l, s, cp.Y, cp.Z, cp.c, cp.flip_y, cp.flip_dual, cp.flip_w, cp.problem)
        hk = Kernel(hp, cfg)
        for d in cp.from_user_points(outer.directions):
            d = d / np.linalg.norm(d)
            res = hk.boundary(d)
            if res.status == LpStatus.OPTIMAL and res.z > tol:
                return False
            if res.status == LpStatus.INFEASIBLE:
                return False
    return True

