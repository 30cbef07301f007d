"""Independent oracles and validators.

Nothing here calls the solver's LP kernel or double description code:
scalar LPs are cross-checked by basis enumeration, upper images are
computed by exact-integer double descriptions of the feasible set and of
the image cone, and the remaining checks use scipy's HiGHS backend.
"""
import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from math import comb, gcd, lcm

import numpy as np
from scipy.optimize import linprog

from .model import OrderingCone, Sense, VlpProblem, validate


# ---------------------------------------------------------------------------
# scalar LP oracle

def _inequalities(p):
    """Stack every finite bound of an LP as ``G x >= h``."""
    n = p.n_cols
    I = np.eye(n)
    G, h = [], []
    for i in range(p.n_rows):
        if np.isfinite(p.row_lo[i]):
            G.append(p.A[i]); h.append(p.row_lo[i])
        if np.isfinite(p.row_hi[i]):
            G.append(-p.A[i]); h.append(-p.row_hi[i])
    for j in range(n):
        if np.isfinite(p.col_lo[j]):
            G.append(I[j]); h.append(p.col_lo[j])
        if np.isfinite(p.col_hi[j]):
            G.append(-I[j]); h.append(-p.col_hi[j])
    return np.array(G).reshape(-1, n), np.array(h)


def lp_vertex_oracle(p, tol=1e-9):
    """Status and optimal value of an LP with a pointed feasible region.

    Every ``n``-subset of tight constraints is tried; unboundedness is
    decided by enumerating extreme rays of the recession cone.
    Returns ``(status, value)`` with status in ``{"optimal", "infeasible",
    "unbounded"}``.
    """
    G, h = _inequalities(p)
    n = p.n_cols
    K = len(h)
    if K < n or np.linalg.matrix_rank(G) < n:
        raise ValueError("oracle needs a pointed feasible region")
    subsets = np.array(list(itertools.combinations(range(K), n)))
    A = G[subsets]
    rhs = h[subsets]
    ok = np.abs(np.linalg.det(A)) > 1e-9
    A, rhs = A[ok], rhs[ok]
    X = np.linalg.solve(A, rhs[..., None])[..., 0]
    feas = np.all(X @ G.T >= h - tol * (1 + np.abs(h)), axis=1)
    if not feas.any():
        return "infeasible", None
    vals = X[feas] @ p.c
    best = float(vals.min())
    if n == 1:
        rays = np.array([[1.0], [-1.0]])
    else:
        sub = np.array(list(itertools.combinations(range(K), n - 1)))
        _, sv, vt = np.linalg.svd(G[sub])
        keep = sv[:, -1] > 1e-9
        rays = vt[keep, -1, :]
        rays = np.vstack([rays, -rays])
    if len(rays):
        good = np.all(rays @ G.T >= -1e-9, axis=1)
        if np.any(rays[good] @ p.c < -1e-9):
            return "unbounded", None
    return "optimal", best


def random_lp(rng, max_n=8, max_m=8, max_subsets=50_000):
    """Random LP with integer data in [-5, 5] and finite lower column bounds.

    Most instances are built around an integer point so that they are
    feasible; the rest use unrelated row bounds.
    """
    from .lp import LpProblem

    while True:
        n = int(rng.integers(1, max_n + 1))
        m = int(rng.integers(0, max_m + 1))
        A = rng.integers(-5, 6, size=(m, n)).astype(float)
        c = rng.integers(-5, 6, size=n).astype(float)
        col_lo = rng.integers(-5, 6, size=n).astype(float)
        col_hi = np.where(rng.random(n) < 0.5, np.inf, col_lo + rng.integers(0, 6, size=n))
        kind = rng.integers(0, 3, size=m)
        if rng.random() < 0.8:
            x0 = col_lo + rng.integers(0, 3, size=n)
            x0 = np.minimum(x0, col_hi)
            base = A @ x0
            lo_base = base - rng.integers(0, 3, size=m)
            hi_base = base + rng.integers(0, 3, size=m)
        else:
            lo_base = rng.integers(-5, 6, size=m).astype(float)
            hi_base = lo_base + rng.integers(0, 6, size=m)
        row_lo = np.where(kind == 1, -np.inf, lo_base)
        row_hi = np.where(kind == 0, np.inf, hi_base)
        p = LpProblem(c, A, row_lo, row_hi, col_lo, col_hi)
        K = len(_inequalities(p)[1])
        if comb(K, n) <= max_subsets:
            return p


# ---------------------------------------------------------------------------
# exact upper image oracle

class TooLarge(ValueError):
    pass


def _frac(v):
    return Fraction(v).limit_denominator(10**12) if not isinstance(v, Fraction) else v


def _normalize(row):
    """Scale a rational row to coprime integers (sign preserved)."""
    row = [_frac(v) for v in row]
    den = 1
    for v in row:
        den = lcm(den, v.denominator)
    ints = [int(v * den) for v in row]
    g = 0
    for v in ints:
        g = gcd(g, abs(v))
    if g > 1:
        ints = [v // g for v in ints]
    return tuple(ints)


def _rref(rows, ncol):
    M = [[Fraction(v) for v in r] for r in rows]
    pivots = []
    rank = 0
    for col in range(ncol):
        piv = next((i for i in range(rank, len(M)) if M[i][col] != 0), None)
        if piv is None:
            continue
        M[rank], M[piv] = M[piv], M[rank]
        p = M[rank][col]
        M[rank] = [x / p for x in M[rank]]
        for i in range(len(M)):
            if i != rank and M[i][col] != 0:
                f = M[i][col]
                M[i] = [x - f * y for x, y in zip(M[i], M[rank])]
        pivots.append(col)
        rank += 1
    return M[:rank], pivots


def _int_rank(rows):
    if not rows:
        return 0
    return len(_rref(rows, len(rows[0]))[1])


def _nullspace(rows, d):
    """Integer basis of ``{z : rows @ z = 0}``."""
    R, pivots = _rref(rows, d) if rows else ([], [])
    free = [j for j in range(d) if j not in pivots]
    basis = []
    for f in free:
        z = [Fraction(0)] * d
        z[f] = Fraction(1)
        for r, pc in zip(R, pivots):
            z[pc] = -r[f]
        basis.append(_normalize(z))
    return basis


def _solve_exact(A, b):
    R, pivots = _rref([list(row) + [bv] for row, bv in zip(A, b)], len(A))
    return [r[-1] for r in R]


def _ray_normalize(r):
    g = 0
    for v in r:
        g = gcd(g, abs(v))
    return tuple(v // g for v in r) if g > 1 else tuple(r)


def exact_extreme_rays(H):
    """Extreme rays of ``{z : H z >= 0}`` for an integer matrix of full column rank.

    Classical double description with the combinatorial adjacency test, in
    exact integer arithmetic.
    """
    d = len(H[0])
    basis = []
    for i, row in enumerate(H):
        if _int_rank([H[k] for k in basis] + [row]) == len(basis) + 1:
            basis.append(i)
        if len(basis) == d:
            break
    if len(basis) < d:
        raise ValueError("system has a nontrivial lineality space")
    A = [H[i] for i in basis]
    rays = []
    for k in range(d):
        e = [Fraction(int(i == k)) for i in range(d)]
        rays.append(_ray_normalize(_normalize(_solve_exact(A, e))))
    zero = [{i for i in basis if sum(a * b for a, b in zip(H[i], r)) == 0} for r in rays]
    for i, row in enumerate(H):
        if i in basis:
            continue
        vals = [sum(a * b for a, b in zip(row, r)) for r in rays]
        plus = [k for k, v in enumerate(vals) if v > 0]
        minus = [k for k, v in enumerate(vals) if v < 0]
        new_rays, new_zero = [], []
        for kp in plus:
            for km in minus:
                common = zero[kp] & zero[km]
                if len(common) < d - 2:
                    continue
                if any(k not in (kp, km) and common <= zero[k] for k in range(len(rays))):
                    continue
                r = [vals[kp] * b - vals[km] * a for a, b in zip(rays[kp], rays[km])]
                new_rays.append(_ray_normalize(r))
                new_zero.append(common | {i})
        keep = [k for k, v in enumerate(vals) if v >= 0]
        rays = [rays[k] for k in keep] + new_rays
        zero = [zero[k] | ({i} if vals[k] == 0 else set()) for k in keep] + new_zero
    return rays


def cone_generators(H, d):
    """``(rays, lineality)`` of ``{z in Q^d : H z >= 0}`` for integer rows ``H``."""
    lin = _nullspace(H, d)
    rows = [tuple(r) for r in H]
    for l in lin:
        rows.append(tuple(l))
        rows.append(tuple(-v for v in l))
    if not rows or _int_rank(rows) < d:
        return [], lin
    return exact_extreme_rays(rows), lin


@dataclass
class OracleImage:
    status: str
    points: np.ndarray = None
    directions: np.ndarray = None
    hrep: list = field(default_factory=list)
    exact_points: list = field(default_factory=list)


def oracle_upper_image(problem, max_halfspaces=25):
    """Vertices and extreme directions of the upper image by exact arithmetic.

    The homogenized feasible set is generated exactly (rays and lineality),
    its generators are mapped by ``P`` and joined with the generators of
    ``C``; the facets of the resulting cone and then its extreme rays give an
    irredundant description of the image.  For maximization the lower image
    is returned.  ``status`` is ``"ok"``, ``"infeasible"`` or ``"no_vertex"``.
    """
    p = problem if problem.validated else validate(problem)
    q, n, m = p.q, p.n, p.m
    sign = -1 if p.sense == Sense.MAX else 1
    P = [[_frac(sign * v) for v in row] for row in p.P]
    rows = []
    for i in range(m):
        Bi = list(p.B[i])
        if np.isfinite(p.a[i]):
            rows.append(_normalize(Bi + [-p.a[i]]))
        if np.isfinite(p.b[i]):
            rows.append(_normalize([-v for v in Bi] + [p.b[i]]))
    for j in range(n):
        e = [int(k == j) for k in range(n)]
        if np.isfinite(p.l[j]):
            rows.append(_normalize(e + [-p.l[j]]))
        if np.isfinite(p.s[j]):
            rows.append(_normalize([-v for v in e] + [p.s[j]]))
    if len(rows) > max_halfspaces:
        raise TooLarge(f"{len(rows)} halfspaces exceed the oracle limit {max_halfspaces}")
    rows.append(tuple([0] * n + [1]))
    rays, lin = cone_generators(rows, n + 1)
    if not any(r[-1] > 0 for r in rays):
        return OracleImage("infeasible")

    def image(r):
        x = r[:-1]
        return _normalize([sum(Pi[j] * x[j] for j in range(n)) for Pi in P] + [r[-1]])

    gens = {image(r) for r in rays}
    for l in lin:
        g = image(l)
        gens.add(g)
        gens.add(tuple(-v for v in g))
    for col in p.cone.Y.T:
        gens.add(_normalize(list(col) + [0]))
    gens = [g for g in gens if any(g)]
    facets, flin = cone_generators(gens, q + 1)
    if flin:
        raise ValueError("image of a solid cone must be solid")
    ycons = sorted(tuple(f[:-1]) + (-f[-1],) for f in facets if any(f[:-1]))
    H = [tuple(f) for f in facets]
    verts, vlin = cone_generators(H, q + 1)
    if vlin:
        return OracleImage("no_vertex", hrep=ycons)
    pts = [[Fraction(v, r[-1]) for v in r[:-1]] for r in verts if r[-1] > 0]
    dirs = [r[:-1] for r in verts if r[-1] == 0]
    points = sign * np.array([[float(v) for v in pt] for pt in pts]).reshape(-1, q)
    directions = np.array([np.array(d, dtype=float) / np.linalg.norm(np.array(d, dtype=float))
                           for d in dirs]).reshape(-1, q) * sign
    return OracleImage("ok", points, directions, ycons, pts)


# ---------------------------------------------------------------------------
# random instances

def random_vlp(rng, q=None, max_n=5, max_m=5, cone=None, low=-3, high=3, feasible=0.85):
    """Random VLP with integer data in ``[low, high]``.

    With probability ``feasible`` the row bounds are placed around an integer
    point inside the column bounds, so that the instance is feasible.
    """
    if q is None:
        q = int(rng.integers(2, 4))
    n = int(rng.integers(1, max_n + 1))
    m = int(rng.integers(1, max_m + 1))
    P = rng.integers(low, high + 1, size=(q, n)).astype(float)
    B = rng.integers(low, high + 1, size=(m, n)).astype(float)
    l = np.where(rng.random(n) < 0.85, rng.integers(low, 1, size=n).astype(float), -np.inf)
    s = np.where(rng.random(n) < 0.4, np.where(np.isfinite(l), l, 0) + rng.integers(1, 4, size=n), np.inf)
    kind = rng.integers(0, 4, size=m)
    if rng.random() < feasible:
        x0 = np.where(np.isfinite(l), l, 0) + rng.integers(0, 2, size=n)
        x0 = np.minimum(x0, s)
        lo = B @ x0 - rng.integers(0, 3, size=m)
        hi = B @ x0 + rng.integers(0, 3, size=m)
    else:
        lo = rng.integers(low, high + 1, size=m).astype(float)
        hi = lo + rng.integers(0, 3, size=m)
    a = np.where(kind == 1, -np.inf, lo)
    b = np.where((kind == 0) | (kind == 3), np.inf, hi)
    return VlpProblem.create(P, B, a, b, l, s, cone=cone)


SIMPLICIAL_3 = OrderingCone(3, np.array([[1, 1, 1, 1], [0, 1, 0, 1], [0, 0, 1, 1]], dtype=float))
SIMPLICIAL_2 = OrderingCone(2, np.array([[1, 1], [0, 1]], dtype=float))


def hausdorff(A, B):
    A = np.asarray(A, dtype=float)
    B = np.asarray(B, dtype=float)
    if len(A) == 0 and len(B) == 0:
        return 0.0
    if len(A) == 0 or len(B) == 0:
        return np.inf
    D = np.linalg.norm(A[:, None, :] - B[None, :, :], axis=2)
    return float(max(D.min(axis=1).max(), D.min(axis=0).max()))


# ---------------------------------------------------------------------------
# solution and duality validators

@dataclass
class Report:
    """Named pass/fail checks with a short note each; ``None`` means skipped."""
    checks: dict = field(default_factory=dict)
    notes: dict = field(default_factory=dict)

    def add(self, name, passed, note=""):
        self.checks[name] = passed
        self.notes[name] = note

    @property
    def ok(self):
        return all(v is not False for v in self.checks.values())

    def failed(self):
        return [k for k, v in self.checks.items() if v is False]

    def __str__(self):
        word = {True: "pass", False: "FAIL", None: "skip"}
        return "\n".join(f"{word[v]:4s} {k}: {self.notes[k]}" for k, v in self.checks.items())


def _bounds(lo, hi):
    return [(None if not np.isfinite(a) else a, None if not np.isfinite(b) else b)
            for a, b in zip(lo, hi)]


def _row_system(B, a, b):
    fa, fb = np.isfinite(a), np.isfinite(b)
    A_ub = np.vstack([-B[fa], B[fb]]).reshape(-1, B.shape[1])
    b_ub = np.concatenate([-a[fa], b[fb]])
    return A_ub, b_ub


def _hull_member(target, V, D, Z, tol):
    """Is ``target`` in ``conv(V) + cone(D) + cone(Z)^*`` (within ``tol``)?"""
    q = len(target)
    V = np.asarray(V, dtype=float).reshape(-1, q)
    D = np.asarray(D, dtype=float).reshape(-1, q)
    k, r = len(V), len(D)
    if k == 0:
        return False
    G = np.hstack([V.T, D.T])
    A_ub = Z.T @ G
    b_ub = Z.T @ target + tol
    A_eq = np.concatenate([np.ones(k), np.zeros(r)])[None, :]
    res = linprog(np.zeros(k + r), A_ub=A_ub, b_ub=b_ub, A_eq=A_eq, b_eq=[1.0],
                  bounds=[(0, None)] * (k + r), method="highs", options={"presolve": False})
    return res.status == 0


def _cone_member(target, D, Z, tol):
    q = len(target)
    D = np.asarray(D, dtype=float).reshape(-1, q)
    if len(D) == 0:
        return bool(np.all(Z.T @ target >= -tol))
    res = linprog(np.zeros(len(D)), A_ub=Z.T @ D.T, b_ub=Z.T @ target + tol,
                  bounds=[(0, None)] * len(D), method="highs", options={"presolve": False})
    return res.status == 0


def check_solution(p, sol, tol=1e-7, oracle=None):
    """Validate a solution against the problem data with scipy's HiGHS solver.

    Checks: feasibility of preimages, minimality of every returned vertex,
    coverage of the oracle image by the returned sets (shifted by ``eps*c``),
    cone compartment membership, and that no returned direction lies in the
    ordering cone.  ``oracle`` is an :class:`OracleImage`; when omitted it is
    computed if the instance is small enough.
    """
    p = p if p.validated else validate(p)
    rep = Report()
    sgn = -1.0 if p.sense == Sense.MAX else 1.0
    P = sgn * p.P
    Z = p.cone.Z
    V = sgn * np.asarray(sol.vertices).reshape(-1, p.q)
    D = sgn * np.asarray(sol.directions).reshape(-1, p.q)
    K = sgn * np.asarray(sol.cone_compartment).reshape(-1, p.q)
    X = np.asarray(sol.vertex_preimages).reshape(-1, p.n)
    XH = np.asarray(sol.direction_preimages).reshape(-1, p.n)

    # (1) feasibility of preimages and image consistency
    bad = []
    for i, x in enumerate(X):
        scale = 1.0 + np.abs(x).max(initial=0.0)
        Bx = p.B @ x
        if (np.any(Bx < p.a - tol * scale) or np.any(Bx > p.b + tol * scale)
                or np.any(x < p.l - tol * scale) or np.any(x > p.s + tol * scale)):
            bad.append(f"vertex preimage {i} infeasible")
        elif np.abs(P @ x - V[i]).max() > tol * scale:
            bad.append(f"vertex {i} is not the image of its preimage")
    a_h = np.where(np.isfinite(p.a), 0.0, p.a)
    b_h = np.where(np.isfinite(p.b), 0.0, p.b)
    l_h = np.where(np.isfinite(p.l), 0.0, p.l)
    s_h = np.where(np.isfinite(p.s), 0.0, p.s)
    for i, x in enumerate(XH):
        scale = 1.0 + np.abs(x).max(initial=0.0)
        Bx = p.B @ x
        if (np.any(Bx < a_h - tol * scale) or np.any(Bx > b_h + tol * scale)
                or np.any(x < l_h - tol * scale) or np.any(x > s_h + tol * scale)):
            bad.append(f"direction preimage {i} infeasible")
            continue
        img = P @ x
        nrm = np.linalg.norm(img)
        if nrm <= tol:
            bad.append(f"direction preimage {i} lies in ker P")
        elif np.abs(img / nrm - D[i] / np.linalg.norm(D[i])).max() > tol * 10:
            bad.append(f"direction {i} is not the image of its preimage")
    rep.add("feasibility", not bad, "; ".join(bad) or f"{len(X)} points, {len(XH)} directions")

    # (2) minimality: no feasible image dominates a returned vertex
    wbar = Z.sum(axis=1)
    A_rows, b_rows = _row_system(p.B, p.a, p.b)
    bounds = _bounds(p.l, p.s)
    bad = []
    for i, y in enumerate(V):
        A_ub = np.vstack([A_rows, Z.T @ P])
        slack = 1e-9 * (1.0 + np.abs(y).max())
        b_ub = np.concatenate([b_rows, Z.T @ y + slack])
        res = linprog(wbar @ P, A_ub=A_ub, b_ub=b_ub, bounds=bounds, method="highs", options={"presolve": False})
        if res.status != 0:
            bad.append(f"vertex {i}: dominance LP status {res.status}")
            continue
        gain = wbar @ y - res.fun
        if gain > tol * (1.0 + np.abs(y).max()) * (1.0 + np.abs(wbar).max()):
            bad.append(f"vertex {i} dominated by {gain:.3g}")
    rep.add("minimality", not bad, "; ".join(bad) or f"{len(V)} vertices minimal")

    # (3) epsilon-infimizer: the oracle image is covered by the returned sets
    if oracle is None:
        try:
            oracle = oracle_upper_image(p)
        except TooLarge:
            oracle = None
    if oracle is None:
        rep.add("infimizer", None, "no oracle for this instance size")
    elif oracle.status != "ok":
        rep.add("infimizer", len(V) == 0, f"oracle status {oracle.status}")
    else:
        shift = sol.eps * p.c
        gens = np.vstack([D, K]).reshape(-1, p.q)
        bad = [i for i, y in enumerate(sgn * oracle.points)
               if not _hull_member(y + shift, V, gens, Z, tol)]
        bad += [f"d{i}" for i, d in enumerate(sgn * oracle.directions)
                if not _cone_member(d, gens, Z, tol)]
        rep.add("infimizer", not bad,
                f"uncovered oracle generators {bad}" if bad else "all oracle generators covered")

    # (4) cone compartment lies in C
    inside = [bool(np.all(Z.T @ (k / np.abs(k).max()) >= -tol)) for k in K]
    rep.add("cone_compartment", all(inside), f"{sum(inside)}/{len(K)} in C")

    # (5) returned directions are minimal, i.e. not in C
    outside = [bool(np.any(Z.T @ (d / np.abs(d).max()) < -tol)) for d in D]
    rep.add("minimal_directions", all(outside), f"{sum(outside)}/{len(D)} outside C")
    return rep


def _facets(points, directions, tol=1e-7):
    """Facet normals/offsets of ``conv(points) + cone(directions)`` via Qhull.

    Directions are replaced by far points; hull facets touching none of the
    original points are discarded.
    """
    from scipy.spatial import ConvexHull

    points = np.asarray(points, dtype=float)
    q = points.shape[1]
    directions = np.asarray(directions, dtype=float).reshape(-1, q)
    if q == 1:
        return np.ones((1, 1)) if np.all(directions >= 0) else -np.ones((1, 1)), \
            np.array([points.min()]) if np.all(directions >= 0) else np.array([-points.max()])
    spread = 1.0 + np.abs(points).max()
    R = 1e3 * spread
    far = [v + R * d / np.linalg.norm(d) for v in points for d in directions]
    cloud = np.vstack([points] + ([np.array(far)] if far else []))
    hull = ConvexHull(cloud, qhull_options="Qt")
    normals, offsets = [], []
    for eq in hull.equations:
        w, gamma = -eq[:-1], eq[-1]
        nrm = np.linalg.norm(w)
        w, gamma = w / nrm, gamma / nrm
        if not np.any(np.abs(points @ w - gamma) <= tol * spread):
            continue
        if any(np.abs(w - w2).max() <= 1e-6 and abs(gamma - g2) <= 1e-6 * spread
               for w2, g2 in zip(normals, offsets)):
            continue
        normals.append(w)
        offsets.append(gamma)
    return np.array(normals).reshape(-1, q), np.array(offsets)


def check_geometric_duality(Pimg, Dimg, ctx, tol=1e-7):
    """Check the coupling relations between V-representations of both images.

    ``Pimg`` holds the vertices and all extreme directions (cone compartment
    included) of the primal image, ``Dimg`` the vertices and the vertical
    direction of the dual image, both in user coordinates.
    """
    from .dual import coupling

    rep = Report()
    q = ctx.q
    Yp = np.asarray(Pimg.points, dtype=float).reshape(-1, q)
    Yd = np.asarray(Pimg.directions, dtype=float).reshape(-1, q)
    W = np.asarray(Dimg.points, dtype=float).reshape(-1, q)

    phi_p = np.array([[coupling(y, True, ys, ctx) for ys in W] for y in Yp]).reshape(len(Yp), len(W))
    phi_d = np.array([[coupling(d / np.linalg.norm(d), False, ys, ctx) for ys in W]
                      for d in Yd]).reshape(len(Yd), len(W))
    worst = min(phi_p.min(initial=np.inf), phi_d.min(initial=np.inf))
    rep.add("weak_duality", bool(worst >= -tol), f"min coupling {worst:.3g}")

    lonely = [j for j in range(len(W)) if not np.any(np.abs(phi_p[:, j]) <= tol)]
    rep.add("incidence", not lonely and len(W) > 0,
            f"dual vertices without incident primal vertex: {lonely}" if lonely
            else f"{len(W)} dual vertices supported")

    if len(Yp) == 0:
        rep.add("facet_count", False, "no primal vertices")
    else:
        normals, _ = _facets(Yp, Yd)
        rep.add("facet_count", len(normals) == len(W),
                f"{len(normals)} facets vs {len(W)} dual vertices")

    dirs = np.asarray(Dimg.directions, dtype=float).reshape(-1, q)
    has = any(np.allclose(d / np.linalg.norm(d), ctx.vertical) for d in dirs)
    rep.add("vertical_direction", has, "present" if has else "missing")
    return rep
