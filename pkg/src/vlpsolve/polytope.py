"""Double descriptions of image-space polyhedra.

A :class:`Polyhedron` keeps a V-representation (points and directions) and an
H-representation (halfspaces ``w @ y >= gamma``) of a line-free polyhedron
side by side, together with the incidence between generators and
halfspaces.  Refinement happens one halfspace at a time through
:meth:`Polyhedron.cut`.

Internally every generator lives in homogenized space ``R^(q+1)``: a point
``v`` is the ray ``(v, 1)`` and a direction ``d`` the ray ``(d, 0)``.  The
face at infinity ``t >= 0`` is the pseudo-halfspace :data:`INF`, which is
incident to every direction and is never exported.
"""
from collections import Counter, deque
from dataclasses import dataclass, field

import numpy as np

from ._linalg import TOL_CONE, TOL_ON, numeric_rank

INF = 0


class PolytopeError(RuntimeError):
    pass


class EmptyIntersection(PolytopeError):
    """The cut removes the whole polyhedron."""


class AdjacencyCorruption(PolytopeError):
    """Incidence data became inconsistent with the coordinates."""


@dataclass
class HRep:
    """Halfspaces ``normals[i] @ y >= offsets[i]`` with unit normals."""
    normals: np.ndarray
    offsets: np.ndarray
    cone_flags: np.ndarray = None
    data: list = None

    def __post_init__(self):
        self.offsets = np.asarray(self.offsets, dtype=float).reshape(-1)
        normals = np.asarray(self.normals, dtype=float)
        if normals.size or normals.ndim != 2:
            normals = normals.reshape(len(self.offsets), -1)
        self.normals = normals
        if self.cone_flags is None:
            self.cone_flags = np.zeros(len(self.offsets), dtype=bool)
        if self.data is None:
            self.data = [None] * len(self.offsets)

    def __len__(self):
        return len(self.offsets)

    @classmethod
    def empty(cls, q):
        return cls(np.zeros((0, q)), np.zeros(0))


@dataclass
class VRep:
    """Points and directions, optionally carrying preimages."""
    points: np.ndarray
    directions: np.ndarray
    point_data: list = None
    direction_data: list = None
    in_cone: np.ndarray = None

    def __post_init__(self):
        q = max(np.shape(self.points)[-1] if np.size(self.points) else 0,
                np.shape(self.directions)[-1] if np.size(self.directions) else 0)
        self.points = np.asarray(self.points, dtype=float).reshape(-1, q) if q else np.zeros((0, 0))
        self.directions = np.asarray(self.directions, dtype=float).reshape(-1, q) if q else np.zeros((0, 0))
        if self.point_data is None:
            self.point_data = [None] * len(self.points)
        if self.direction_data is None:
            self.direction_data = [None] * len(self.directions)
        if self.in_cone is None:
            self.in_cone = np.zeros(len(self.directions), dtype=bool)


def point_in_hrep(y, h, tol=TOL_ON):
    """True iff ``w @ y >= gamma - tol`` for every halfspace of ``h``."""
    if len(h) == 0:
        return True
    return bool(np.all(h.normals @ np.asarray(y, dtype=float) >= h.offsets - tol))


@dataclass
class CutResult:
    halfspace: int
    new: list = field(default_factory=list)
    removed: list = field(default_factory=list)


class Polyhedron:
    """Mutable double description of a line-free polyhedron in ``R^dim``."""

    def __init__(self, dim, tol_on=TOL_ON):
        self.dim = dim
        self.tol_on = tol_on
        self._G = np.zeros((16, dim + 1))
        self._galive = np.zeros(16, dtype=bool)
        self._ng = 0
        self._H = np.zeros((16, dim + 1))
        self._halive = np.zeros(16, dtype=bool)
        self._nh = 1
        self._H[INF, dim] = 1.0
        self._halive[INF] = True
        self._inc = {}
        self._hinc = {INF: set()}
        self.gen_data = {}
        self.half_data = {}
        self.cone_halfspaces = set()

    # -- construction -------------------------------------------------------

    @classmethod
    def from_double_description(cls, points, directions, normals, offsets,
                                point_data=None, direction_data=None,
                                half_data=None, tol_on=TOL_ON, dim=None):
        """Build from a V- and an H-representation known to describe the same set.

        Incidences are recomputed from coordinates.
        """
        q = dim
        if q is None:
            for arr in (points, directions, normals):
                arr = np.asarray(arr, dtype=float)
                if arr.ndim == 2 and arr.shape[1] > 0:
                    q = arr.shape[1]
                    break
        points = np.asarray(points, dtype=float).reshape(-1, q)
        normals = np.asarray(normals, dtype=float).reshape(-1, q)
        poly = cls(q, tol_on=tol_on)
        hids = []
        for i, (w, g) in enumerate(zip(normals, np.asarray(offsets, dtype=float).reshape(-1))):
            hid = poly._add_halfspace(w, g)
            if hid is None:
                continue
            hids.append(hid)
            if half_data is not None:
                poly.half_data[hid] = half_data[i]
        for i, v in enumerate(points.reshape(-1, q)):
            gid = poly._add_generator(np.append(v, 1.0))
            if point_data is not None:
                poly.gen_data[gid] = point_data[i]
        dirs = np.asarray(directions, dtype=float).reshape(-1, q)
        for i, d in enumerate(dirs):
            gid = poly._add_generator(np.append(d, 0.0))
            if direction_data is not None:
                poly.gen_data[gid] = direction_data[i]
        poly.recompute_incidence()
        return poly

    @classmethod
    def simplicial(cls, normals, offsets, half_data=None, tol_on=TOL_ON):
        """Polyhedron ``{y : W^T y >= beta}`` for ``q`` independent normals."""
        W = np.atleast_2d(np.asarray(normals, dtype=float))
        beta = np.asarray(offsets, dtype=float)
        nrm = np.linalg.norm(W, axis=1)
        W, beta = W / nrm[:, None], beta / nrm
        vertex = np.linalg.solve(W, beta)
        dirs = np.linalg.inv(W).T
        return cls.from_double_description(vertex[None, :], dirs, W, beta,
                                           half_data=half_data, tol_on=tol_on)

    def copy(self):
        other = Polyhedron(self.dim, self.tol_on)
        other._G = self._G.copy()
        other._galive = self._galive.copy()
        other._ng = self._ng
        other._H = self._H.copy()
        other._halive = self._halive.copy()
        other._nh = self._nh
        other._inc = {k: set(v) for k, v in self._inc.items()}
        other._hinc = {k: set(v) for k, v in self._hinc.items()}
        other.gen_data = dict(self.gen_data)
        other.half_data = dict(self.half_data)
        other.cone_halfspaces = set(self.cone_halfspaces)
        return other

    def _add_generator(self, hom):
        hom = np.asarray(hom, dtype=float)
        if hom[-1] == 0.0:
            hom = hom / np.linalg.norm(hom)
        else:
            hom = hom / hom[-1]
        if self._ng == len(self._G):
            self._G = np.vstack([self._G, np.zeros_like(self._G)])
            self._galive = np.concatenate([self._galive, np.zeros_like(self._galive)])
        gid = self._ng
        self._ng += 1
        self._G[gid] = hom
        self._galive[gid] = True
        self._inc[gid] = set()
        return gid

    def _add_halfspace(self, w, gamma):
        w = np.asarray(w, dtype=float)
        nrm = np.linalg.norm(w)
        if nrm == 0.0:
            return None
        if self._nh == len(self._H):
            self._H = np.vstack([self._H, np.zeros_like(self._H)])
            self._halive = np.concatenate([self._halive, np.zeros_like(self._halive)])
        hid = self._nh
        self._nh += 1
        self._H[hid, :-1] = w / nrm
        self._H[hid, -1] = -gamma / nrm
        self._halive[hid] = True
        self._hinc[hid] = set()
        return hid

    def recompute_incidence(self):
        gids = self.generator_ids()
        hids = [h for h in self.halfspace_ids()] + [INF]
        for g in gids:
            self._inc[g] = set()
        for h in hids:
            self._hinc[h] = set()
        if not gids:
            return
        S = self._G[gids] @ self._H[hids].T
        act = np.abs(S) <= self.tol_on
        for a, g in enumerate(gids):
            for b in np.flatnonzero(act[a]):
                h = hids[b]
                self._inc[g].add(h)
                self._hinc[h].add(g)

    # -- accessors ---------------------------------------------------------

    def generator_ids(self):
        return [int(g) for g in np.flatnonzero(self._galive[:self._ng])]

    def point_ids(self):
        return [g for g in self.generator_ids() if self._G[g, -1] != 0.0]

    def direction_ids(self):
        return [g for g in self.generator_ids() if self._G[g, -1] == 0.0]

    def halfspace_ids(self):
        return [int(h) for h in np.flatnonzero(self._halive[:self._nh]) if h != INF]

    def is_point(self, gid):
        return self._G[gid, -1] != 0.0

    def coords(self, gid):
        return self._G[gid, :-1].copy()

    def halfspace(self, hid):
        """``(normal, offset)`` of halfspace ``hid``."""
        return self._H[hid, :-1].copy(), -self._H[hid, -1]

    def incidence(self, gid):
        """Halfspace ids active at generator ``gid`` (the face at infinity excluded)."""
        return {h for h in self._inc[gid] if h != INF}

    def active_generators(self, hid):
        return set(self._hinc[hid])

    @property
    def points(self):
        ids = self.point_ids()
        return self._G[ids, :-1].copy() if ids else np.zeros((0, self.dim))

    @property
    def directions(self):
        ids = self.direction_ids()
        return self._G[ids, :-1].copy() if ids else np.zeros((0, self.dim))

    def vrep(self):
        pids, dids = self.point_ids(), self.direction_ids()
        return VRep(self._G[pids, :-1] if pids else np.zeros((0, self.dim)),
                    self._G[dids, :-1] if dids else np.zeros((0, self.dim)),
                    [self.gen_data.get(g) for g in pids],
                    [self.gen_data.get(g) for g in dids])

    def hrep(self):
        hids = self.halfspace_ids()
        if not hids:
            return HRep.empty(self.dim)
        return HRep(self._H[hids, :-1], -self._H[hids, -1],
                    np.array([h in self.cone_halfspaces for h in hids], dtype=bool),
                    [self.half_data.get(h) for h in hids])

    # -- adjacency ---------------------------------------------------------

    def adjacent(self, g1, g2):
        """Combinatorial adjacency test.

        Two extreme generators are adjacent iff they share at least ``q - 1``
        active halfspaces and no third generator is active on all of them.
        For a minimal double description this is equivalent to the common
        active set having rank ``q - 1``.
        """
        common = self._inc[g1] & self._inc[g2]
        need = self.dim - 1
        if len(common) < need:
            return False
        if need == 0:
            return True
        sets = sorted((self._hinc[h] for h in common), key=len)
        shared = set(sets[0])
        for s in sets[1:]:
            shared &= s
            if len(shared) <= 2:
                break
        shared.discard(g1)
        shared.discard(g2)
        return not shared

    def adjacent_algebraic(self, g1, g2):
        """Rank form of the adjacency test (used by :meth:`check`)."""
        common = self._inc[g1] & self._inc[g2]
        need = self.dim - 1
        if len(common) < need:
            return False
        if need == 0:
            return True
        rows = self._H[sorted(common)]
        rows = rows / np.linalg.norm(rows, axis=1)[:, None]
        return numeric_rank(rows) == need

    def neighbors(self, gid):
        need = self.dim - 1
        if need == 0:
            cand = [g for g in self.generator_ids() if g != gid]
        else:
            count = Counter()
            for h in self._inc[gid]:
                count.update(self._hinc[h])
            cand = [g for g, k in count.items() if k >= need and g != gid]
        return [g for g in cand if self.adjacent(gid, g)]

    # -- refinement --------------------------------------------------------

    def values(self, normal, offset):
        """Slack ``w @ g - gamma * t`` of every live generator, indexed by generator id."""
        h = np.append(normal, -offset)
        s = np.full(self._ng, np.nan)
        alive = self._galive[:self._ng]
        s[alive] = self._G[:self._ng][alive] @ h
        return s

    def cut(self, normal, offset, data=None, start=None, cone=False):
        """Intersect with ``{y : normal @ y >= offset}`` in place.

        The search starts from one violating generator and walks the adjacency
        graph through violating generators only, creating new generators on
        edges that cross the cutting hyperplane.  Returns ``None`` when no
        generator is violated (the halfspace is redundant).
        """
        normal = np.asarray(normal, dtype=float)
        nrm = np.linalg.norm(normal)
        if nrm == 0.0:
            raise ValueError("zero normal")
        normal, offset = normal / nrm, offset / nrm
        s = self.values(normal, offset)
        tol = self.tol_on
        alive = self._galive[:self._ng]
        viol_mask = alive & (s < -tol)
        if not viol_mask.any():
            return None
        violating = [int(g) for g in np.flatnonzero(viol_mask)]
        is_pt = self._G[:self._ng, -1] != 0.0
        if not np.any(alive & ((s > tol) | ((np.abs(s) <= tol) & is_pt))):
            raise EmptyIntersection("cut removes every point of the polyhedron")

        hid = self._add_halfspace(normal, offset)
        if data is not None:
            self.half_data[hid] = data
        if cone:
            self.cone_halfspaces.add(hid)
        result = CutResult(hid)
        pending = set(violating)
        if start is None or start not in pending:
            start = violating[0]
        visited = set()
        created = []
        while pending:
            seed = start if start in pending else next(iter(pending))
            queue = deque([seed])
            visited.add(seed)
            pending.discard(seed)
            while queue:
                g = queue.popleft()
                for h in self.neighbors(g):
                    if s[h] < -tol:
                        if h not in visited:
                            visited.add(h)
                            pending.discard(h)
                            queue.append(h)
                    elif s[h] > tol:
                        created.append((g, h))
        for g, h in created:
            hom = s[h] * self._G[g] - s[g] * self._G[h]
            inc = (self._inc[g] & self._inc[h]) | {hid}
            new = self._add_generator(hom)
            if self._G[new, -1] != 0.0:
                inc.discard(INF)
            self._inc[new] = inc
            for k in inc:
                self._hinc[k].add(new)
            result.new.append(new)
        for g in np.flatnonzero(alive & (np.abs(s) <= tol)):
            g = int(g)
            self._inc[g].add(hid)
            self._hinc[hid].add(g)
        touched = set()
        for g in visited:
            touched |= self._inc[g]
            self._remove_generator(g)
            result.removed.append(g)
        touched.discard(INF)
        touched.discard(hid)
        for h in touched:
            self._prune_if_redundant(h)
        return result

    def _remove_generator(self, gid):
        for h in self._inc.pop(gid):
            self._hinc[h].discard(gid)
        self._galive[gid] = False
        self.gen_data.pop(gid, None)

    def _prune_if_redundant(self, hid):
        act = self._hinc[hid]
        if len(act) >= self.dim and numeric_rank(self._G[sorted(act)]) >= self.dim:
            return False
        self.remove_halfspace(hid)
        return True

    def remove_halfspace(self, hid):
        for g in self._hinc.pop(hid):
            self._inc[g].discard(hid)
        self._halive[hid] = False
        self.half_data.pop(hid, None)
        self.cone_halfspaces.discard(hid)

    def prune_redundant_halfspaces(self):
        for h in self.halfspace_ids():
            self._prune_if_redundant(h)

    # -- checks ------------------------------------------------------------

    def check(self, tol=None):
        """Raise :class:`AdjacencyCorruption` if stored incidences disagree with coordinates."""
        tol = self.tol_on if tol is None else tol
        hids = self.halfspace_ids()
        for g in self.generator_ids():
            vals = self._G[g] @ self._H[hids].T if hids else np.zeros(0)
            if np.any(vals < -10 * tol):
                raise AdjacencyCorruption(f"generator {g} violates a halfspace")
            active = {h for h, v in zip(hids, vals) if abs(v) <= tol}
            if active != self.incidence(g):
                raise AdjacencyCorruption(f"incidence of generator {g} is stale")
            if self.is_point(g) and numeric_rank(self._H[sorted(self._inc[g])]) < self.dim:
                raise AdjacencyCorruption(f"point {g} is not a vertex")
        return True


def cut(poly, normal, offset, **kw):
    """Functional form of :meth:`Polyhedron.cut`; ``poly`` is left untouched."""
    out = poly.copy()
    out.cut(normal, offset, **kw)
    return out


def merge_close_vertices(poly, c, Z, Y, delta=None):
    """Replace clusters of nearly coincident points by one point below them.

    The representative of a cluster is ``midpoint - rho * c`` with the
    smallest ``rho >= 0`` such that every original lies in
    ``representative + C`` (``C = {y : Z^T y >= 0}``), so the merged polyhedron
    contains the input whenever ``C`` is within its recession cone.  The
    H-representation is rebuilt from scratch.  Returns ``(new_poly, merged)``
    where ``merged`` maps new point ids to the old ids they replace.
    """
    from .dual import hrep_from_vrep

    pids = poly.point_ids()
    pts = poly._G[pids, :-1]
    c = np.asarray(c, dtype=float)
    Z = np.atleast_2d(np.asarray(Z, dtype=float))
    parent = list(range(len(pids)))

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    dist = np.linalg.norm(pts[:, None, :] - pts[None, :, :], axis=2)
    if delta is None:
        size = np.linalg.norm(pts, axis=1)
        thresh = 1e-7 * (1.0 + np.maximum(size[:, None], size[None, :]))
    else:
        thresh = delta
    for i, j in zip(*np.nonzero(np.triu(dist < thresh, k=1))):
        parent[find(j)] = find(i)
    clusters = {}
    for i in range(len(pids)):
        clusters.setdefault(find(i), []).append(i)
    if all(len(m) == 1 for m in clusters.values()):
        return poly, {}

    new_pts, new_data, origin = [], [], []
    zc = Z.T @ c
    for members in clusters.values():
        if len(members) == 1:
            i = members[0]
            new_pts.append(pts[i])
            new_data.append(poly.gen_data.get(pids[i]))
            origin.append([pids[i]])
            continue
        mid = pts[members].mean(axis=0)
        rho = 0.0
        for i in members:
            rho = max(rho, float(np.max(-(Z.T @ (pts[i] - mid)) / zc)))
        new_pts.append(mid - rho * c)
        new_data.append(None)
        origin.append([pids[i] for i in members])
    dids = poly.direction_ids()
    dirs = poly._G[dids, :-1] if dids else np.zeros((0, poly.dim))
    h = hrep_from_vrep(np.array(new_pts), dirs, c, Y, Z)
    out = Polyhedron.from_double_description(
        np.array(new_pts), dirs, h.normals, h.offsets,
        point_data=new_data, direction_data=[poly.gen_data.get(g) for g in dids],
        tol_on=poly.tol_on)
    out.prune_redundant_halfspaces()
    new_ids = out.point_ids()
    merged = {gid: origin[k] for k, gid in enumerate(new_ids) if len(origin[k]) > 1}
    return out, merged


def in_cone(d, Z, tol=TOL_CONE):
    """Membership of direction ``d`` in ``{y : Z^T y >= 0}`` (scale-free)."""
    d = np.asarray(d, dtype=float)
    n = np.abs(d).max()
    if n == 0.0:
        return True
    return bool(np.all(np.atleast_2d(Z).T @ (d / n) >= -tol))
