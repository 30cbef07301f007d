"""Problem data for vector linear programs and the ordering cone.

A vector linear program reads::

    min_C  P x   subject to  a <= B x <= b,  l <= x <= s

with a polyhedral, solid and pointed ordering cone ``C``.  Infinite bounds
are stored as ``-inf`` / ``+inf`` floats.
"""
from dataclasses import dataclass, field, replace
from enum import Enum

import numpy as np

from ._linalg import (TOL_CONE, TOL_INT, TOL_RANK, independent_columns,
                      normalize_columns_max, numeric_rank)


class Sense(str, Enum):
    MIN = "min"
    MAX = "max"


class VlpError(ValueError):
    """Base class for invalid problem data."""


class NotSolid(VlpError):
    pass


class NotPointed(VlpError):
    pass


class BadDualityParam(VlpError):
    pass


class InconsistentBounds(VlpError):
    pass


class DimensionMismatch(VlpError):
    pass


def _bounds(v, size, fill):
    if v is None:
        return np.full(size, fill)
    return np.asarray(v, dtype=float).reshape(size)


@dataclass(frozen=True)
class OrderingCone:
    """``C = cone(Y) = {y : Z^T y >= 0}``; matrices hold generators as columns."""
    q: int
    generators: np.ndarray = None
    dual_generators: np.ndarray = None

    @classmethod
    def orthant(cls, q):
        return cls(q, np.eye(q), np.eye(q))

    @property
    def Y(self):
        return self.generators

    @property
    def Z(self):
        return self.dual_generators

    def contains(self, d, tol=TOL_CONE):
        Z = self.dual_generators
        if Z is None:
            raise ValueError("dual representation missing; call complete_cone first")
        d = np.asarray(d, dtype=float)
        n = np.abs(d).max()
        return bool(n == 0.0 or np.all(Z.T @ (d / n) >= -tol))


def _extreme_rays_of_dual(M):
    """Irredundant generators of ``{z : M^T z >= 0}`` for a rank-``q`` matrix ``M``."""
    from .polytope import Polyhedron

    q = M.shape[0]
    basis = independent_columns(M)
    base = M[:, basis].T
    poly = Polyhedron.from_double_description(
        np.zeros((1, q)), np.linalg.inv(base).T, base, np.zeros(q), dim=q)
    for j in range(M.shape[1]):
        if j not in basis:
            poly.cut(M[:, j], 0.0)
    return normalize_columns_max(poly.directions.T)


def complete_cone(cone):
    """Return a cone carrying both representations.

    The missing representation is computed with the double description
    method and is irredundant.  Raises :class:`NotSolid` / :class:`NotPointed`
    when the rank conditions fail.
    """
    q = cone.q
    Y, Z = cone.generators, cone.dual_generators
    if Y is None and Z is None:
        raise VlpError("cone needs generators or dual generators")
    if Y is not None:
        Y = np.asarray(Y, dtype=float).reshape(q, -1)
        Y = normalize_columns_max(Y[:, np.abs(Y).max(axis=0) > 0])
        if numeric_rank(Y, TOL_RANK) < q:
            raise NotSolid(f"rank of cone generators is below {q}")
    if Z is not None:
        Z = np.asarray(Z, dtype=float).reshape(q, -1)
        Z = normalize_columns_max(Z[:, np.abs(Z).max(axis=0) > 0])
        if numeric_rank(Z, TOL_RANK) < q:
            raise NotPointed(f"rank of dual cone generators is below {q}")
    if Z is None:
        Z = _extreme_rays_of_dual(Y)
        if Z.shape[1] < q or numeric_rank(Z) < q:
            raise NotPointed("cone contains a line")
    if Y is None:
        Y = _extreme_rays_of_dual(Z)
        if Y.shape[1] < q or numeric_rank(Y) < q:
            raise NotSolid("cone has empty interior")
    if np.min(Z.T @ Y) < -TOL_CONE:
        raise VlpError("cone and dual cone representations are inconsistent")
    return OrderingCone(q, Y, Z)


@dataclass(frozen=True)
class VlpProblem:
    """Problem instance; after :func:`validate` every field is populated."""
    P: np.ndarray
    B: np.ndarray
    a: np.ndarray
    b: np.ndarray
    l: np.ndarray
    s: np.ndarray
    cone: OrderingCone
    sense: Sense = Sense.MIN
    c: np.ndarray = None
    validated: bool = field(default=False, compare=False)

    @classmethod
    def create(cls, P, B=None, a=None, b=None, l=None, s=None, cone=None,
               sense=Sense.MIN, c=None):
        """Convenience constructor filling defaults (free bounds, ``C = R^q_+``)."""
        P = np.atleast_2d(np.asarray(P.toarray() if hasattr(P, "toarray") else P, dtype=float))
        q, n = P.shape
        if B is None:
            B = np.zeros((0, n))
        B = np.atleast_2d(B.toarray() if hasattr(B, "toarray") else np.asarray(B, dtype=float))
        if B.size and B.shape[1] != n:
            raise DimensionMismatch("P and B must have the same number of columns")
        B = B.reshape(-1, n)
        m = B.shape[0]
        if cone is None:
            cone = OrderingCone.orthant(q)
        return cls(P, B, _bounds(a, m, -np.inf), _bounds(b, m, np.inf),
                   _bounds(l, n, -np.inf), _bounds(s, n, np.inf), cone,
                   Sense(sense), None if c is None else np.asarray(c, dtype=float))

    @property
    def q(self):
        return self.P.shape[0]

    @property
    def n(self):
        return self.P.shape[1]

    @property
    def m(self):
        return self.B.shape[0]


@dataclass(frozen=True)
class FeasibleSets:
    point_bounds: tuple
    direction_bounds: tuple


def default_duality_parameter(Y):
    """Normalized sum of generators, nudged so that its last entry is nonzero."""
    c = Y.sum(axis=1)
    c = c / np.abs(c).max()
    if abs(c[-1]) <= TOL_INT:
        k = int(np.argmax(np.abs(Y[-1])))
        while abs(c[-1]) <= TOL_INT:
            c = c + Y[:, k]
        c = c / np.abs(c).max()
    return c


def validate(problem):
    """Check the standing assumptions and return a fully populated copy.

    Raises the first applicable error out of :class:`DimensionMismatch`,
    :class:`NotSolid`, :class:`NotPointed`, :class:`BadDualityParam` and
    :class:`InconsistentBounds`.
    """
    P, B = problem.P, problem.B
    if P.ndim != 2 or B.ndim != 2 or B.shape[1] != P.shape[1]:
        raise DimensionMismatch("P and B must have the same number of columns")
    q, n, m = problem.q, problem.n, problem.m
    for name, vec, size in (("a", problem.a, m), ("b", problem.b, m),
                            ("l", problem.l, n), ("s", problem.s, n)):
        if np.shape(vec) != (size,):
            raise DimensionMismatch(f"bound vector {name} must have length {size}")
    if problem.cone.q != q:
        raise DimensionMismatch("cone dimension differs from the number of objectives")
    cone = complete_cone(problem.cone)
    c = problem.c
    if c is None:
        c = default_duality_parameter(cone.Y)
    else:
        c = np.asarray(c, dtype=float)
        if c.shape != (q,):
            raise DimensionMismatch(f"duality parameter must have length {q}")
        if not np.all(np.isfinite(c)) or np.abs(c).max() == 0.0:
            raise BadDualityParam("duality parameter must be finite and nonzero")
        if np.min(cone.Z.T @ (c / np.abs(c).max())) <= TOL_INT:
            raise BadDualityParam("duality parameter is not an interior point of C")
        if abs(c[-1]) <= TOL_INT * np.abs(c).max():
            raise BadDualityParam("last component of the duality parameter vanishes")
    if np.any(problem.a > problem.b) or np.any(problem.l > problem.s):
        raise InconsistentBounds("lower bound exceeds upper bound")
    if np.any(problem.a == np.inf) or np.any(problem.b == -np.inf) \
            or np.any(problem.l == np.inf) or np.any(problem.s == -np.inf):
        raise InconsistentBounds("lower bounds may not be +inf, upper bounds not -inf")
    return replace(problem, cone=cone, c=c, validated=True)


def _homog(v):
    # 0 * (+-inf) = +-inf, 0 * finite = 0
    out = np.zeros_like(v)
    out[np.isinf(v)] = v[np.isinf(v)]
    return out


def homogenize(problem):
    """Bounds of the feasible set ``S`` and of the direction set ``S^h``."""
    pb = (problem.a, problem.b, problem.l, problem.s)
    return FeasibleSets(pb, tuple(_homog(v) for v in pb))


def mul_inf_zero(bound, multiplier):
    """Elementwise product with the convention ``(+-inf) * 0 = 0``."""
    bound = np.asarray(bound, dtype=float)
    multiplier = np.asarray(multiplier, dtype=float)
    with np.errstate(invalid="ignore"):
        return np.where(multiplier != 0.0, bound * multiplier, 0.0)
