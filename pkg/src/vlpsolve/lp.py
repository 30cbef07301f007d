"""Bounded-variable revised simplex for small dense LPs.

Solves::

    min c^T x   s.t.  row_lo <= A x <= row_hi,  col_lo <= x <= col_hi

Row activities are modeled as logical variables ``r = A x`` so the working
system is ``[A, -I] (x, r) = 0`` with bounds on every variable; nonbasic
variables sit at one of their bounds (free ones at zero).  Phase 1 minimizes
the sum of bound violations of the basic variables, phase 2 the objective.
"""
from dataclasses import dataclass
from enum import Enum

import numpy as np

from ._linalg import TOL_DUAL, TOL_FEAS, TOL_PIVOT

AT_LO, AT_HI, FREE, BASIC = 0, 1, 2, 3


class LpStatus(str, Enum):
    OPTIMAL = "optimal"
    INFEASIBLE = "infeasible"
    UNBOUNDED = "unbounded"


class NumericalFailure(ArithmeticError):
    """The factorization broke down or the iteration limit was reached."""


@dataclass
class LpProblem:
    c: np.ndarray
    A: np.ndarray
    row_lo: np.ndarray
    row_hi: np.ndarray
    col_lo: np.ndarray
    col_hi: np.ndarray

    def __post_init__(self):
        self.c = np.asarray(self.c, dtype=float)
        A = self.A.toarray() if hasattr(self.A, "toarray") else self.A
        self.A = np.asarray(A, dtype=float).reshape(-1, len(self.c))
        m = self.A.shape[0]
        self.row_lo = np.broadcast_to(np.asarray(self.row_lo, dtype=float), (m,)).copy()
        self.row_hi = np.broadcast_to(np.asarray(self.row_hi, dtype=float), (m,)).copy()
        self.col_lo = np.broadcast_to(np.asarray(self.col_lo, dtype=float), self.c.shape).copy()
        self.col_hi = np.broadcast_to(np.asarray(self.col_hi, dtype=float), self.c.shape).copy()
        if np.any(self.row_lo > self.row_hi) or np.any(self.col_lo > self.col_hi):
            raise ValueError("lower bound exceeds upper bound")

    @property
    def n_cols(self):
        return len(self.c)

    @property
    def n_rows(self):
        return self.A.shape[0]


@dataclass
class Basis:
    head: np.ndarray
    state: np.ndarray


@dataclass
class LpResult:
    status: LpStatus
    x: np.ndarray = None
    obj: float = None
    y_dual: np.ndarray = None
    z_reduced: np.ndarray = None
    ray: np.ndarray = None
    basis: Basis = None
    iterations: int = 0


class SimplexSolver:
    """Stateful solver; keeps the last basis for warm starts."""

    def __init__(self, tol_feas=TOL_FEAS, tol_dual=TOL_DUAL, tol_pivot=TOL_PIVOT,
                 refactor_every=50, max_iter=None):
        self.tol_feas = tol_feas
        self.tol_dual = tol_dual
        self.tol_pivot = tol_pivot
        self.refactor_every = refactor_every
        self.max_iter = max_iter
        self.last_basis = None

    def solve(self, p, warm_basis=None):
        if warm_basis is None:
            warm_basis = self.last_basis
        res = _Simplex(p, self).run(warm_basis)
        if res.basis is not None:
            self.last_basis = res.basis
        return res


def solve_lp(p, warm_basis=None, **kw):
    """Solve ``p``; ``warm_basis`` seeds the initial basis when compatible."""
    return SimplexSolver(**kw).solve(p, warm_basis)


class _Simplex:

    def __init__(self, p, opts):
        self.p = p
        self.o = opts
        n, m = p.n_cols, p.n_rows
        self.n, self.m = n, m
        self.M = np.hstack([p.A, -np.eye(m)])
        self.lo = np.concatenate([p.col_lo, p.row_lo])
        self.hi = np.concatenate([p.col_hi, p.row_hi])
        self.cost = np.concatenate([p.c, np.zeros(m)])
        self.fixed = self.lo == self.hi

    # basis bookkeeping

    def _nonbasic_value(self, j, st):
        if st == AT_LO:
            return self.lo[j]
        if st == AT_HI:
            return self.hi[j]
        return 0.0

    def _install(self, warm):
        n, m = self.n, self.m
        N = n + m
        head = None
        if warm is not None and len(warm.state) == N and len(warm.head) == m:
            head = np.array(warm.head, dtype=int)
            state = np.array(warm.state, dtype=int)
            try:
                Bm = self.M[:, head]
                Binv = np.linalg.inv(Bm)
                if not np.all(np.isfinite(Binv)) or np.abs(Bm @ Binv - np.eye(m)).max(initial=0.0) > 1e-9:
                    head = None
            except np.linalg.LinAlgError:
                head = None
        if head is None:
            head = np.arange(n, N)
            state = np.full(N, FREE)
            state[head] = BASIC
            Binv = -np.eye(m)
        flo, fhi = np.isfinite(self.lo), np.isfinite(self.hi)
        default = np.where(flo, AT_LO, np.where(fhi, AT_HI, FREE))
        stale = (((state == AT_LO) & ~flo) | ((state == AT_HI) & ~fhi)
                 | ((state == FREE) & (flo | fhi)))
        state = np.where(stale, default, state)
        self.head, self.state, self.Binv = head, state, Binv
        self.x = np.where(state == AT_LO, self.lo, np.where(state == AT_HI, self.hi, 0.0))
        self._recompute_basic()

    def _refactor(self):
        B = self.M[:, self.head]
        try:
            self.Binv = np.linalg.inv(B)
        except np.linalg.LinAlgError as exc:
            raise NumericalFailure("singular basis") from exc
        self._recompute_basic()
        self.since_refactor = 0

    def _recompute_basic(self):
        nb = self.state != BASIC
        rhs = -self.M[:, nb] @ self.x[nb]
        self.x[self.head] = self.Binv @ rhs

    # main loop

    def run(self, warm):
        o = self.o
        n, m = self.n, self.m
        N = n + m
        self._install(warm)
        self.since_refactor = 0
        max_iter = o.max_iter or 100 * (N + 10)
        degenerate = 0
        bland = False
        fresh = True
        it = 0
        if warm is not None and m > 0:
            it, infeasible = self._dual_phase(max_iter)
            if infeasible:
                return LpResult(LpStatus.INFEASIBLE, basis=self._basis(), iterations=it)
            fresh = it == 0
        tf, td = o.tol_feas, o.tol_dual
        while True:
            if it > max_iter:
                raise NumericalFailure("iteration limit reached")
            xb = self.x[self.head]
            lob, hib = self.lo[self.head], self.hi[self.head]
            scale_b = 1.0 + np.abs(xb)
            below = xb < lob - tf * scale_b
            above = xb > hib + tf * scale_b
            phase1 = bool(below.any() or above.any())
            if phase1:
                cb = below * -1.0 + above * 1.0
                cost_n = np.zeros(N)
            else:
                cb = self.cost[self.head]
                cost_n = self.cost
            y = cb @ self.Binv
            d = cost_n - y @ self.M
            d[self.head] = 0.0
            st = self.state
            can_up = ((st == AT_LO) | (st == FREE)) & ~self.fixed & (d < -td)
            can_dn = ((st == AT_HI) | (st == FREE)) & ~self.fixed & (d > td)
            elig = np.flatnonzero(can_up | can_dn)
            if elig.size == 0:
                if not fresh:
                    self._refactor()
                    fresh = True
                    continue
                if phase1:
                    return LpResult(LpStatus.INFEASIBLE, basis=self._basis(), iterations=it)
                return self._optimal(y, d, it)
            fresh = False
            if bland:
                j = int(elig[0])
            else:
                j = int(elig[np.argmax(np.abs(d[elig]))])
            direction = 1.0 if can_up[j] else -1.0
            alpha = self.Binv @ self.M[:, j]
            rate = -direction * alpha
            t_best, leave, leave_to = self._ratio_test(alpha, rate, xb, lob, hib, below, above,
                                                       self.hi[j] - self.lo[j], bland)
            if not np.isfinite(t_best):
                if phase1:
                    raise NumericalFailure("phase 1 objective unbounded")
                ray = np.zeros(N)
                ray[j] = direction
                ray[self.head] = rate
                return LpResult(LpStatus.UNBOUNDED, ray=ray[:n], basis=self._basis(), iterations=it)
            it += 1
            if t_best < 1e-12:
                degenerate += 1
                if degenerate > 3 * N:
                    bland = True
            else:
                degenerate = 0
            self.x[j] += direction * t_best
            self.x[self.head] += rate * t_best
            if leave < 0:
                self.state[j] = AT_HI if direction > 0 else AT_LO
                self.x[j] = self._nonbasic_value(j, self.state[j])
                continue
            k = self.head[leave]
            self.state[k] = leave_to
            self.x[k] = self._nonbasic_value(k, leave_to)
            self.state[j] = BASIC
            self.head[leave] = j
            piv = alpha[leave]
            row = self.Binv[leave] / piv
            self.Binv -= np.outer(alpha, row)
            self.Binv[leave] = row
            self.since_refactor += 1
            if self.since_refactor >= o.refactor_every:
                self._refactor()

    def _ratio_test(self, alpha, rate, xb, lob, hib, below, above, t_flip, bland):
        """Longest step keeping feasible basics feasible (infeasible ones may not worsen).

        Returns ``(step, leaving position or -1 for a bound flip, leaving state)``.
        """
        rows = np.flatnonzero(np.abs(alpha) > self.o.tol_pivot)
        if rows.size == 0:
            return t_flip, -1, None
        r = rate[rows]
        x = xb[rows]
        dec = r < 0.0
        # decreasing: blocked by hi if above, by lo if feasible, never if below
        bound = np.where(dec, np.where(above[rows], hib[rows], lob[rows]),
                         np.where(below[rows], lob[rows], hib[rows]))
        skip = np.where(dec, below[rows], above[rows]) | ~np.isfinite(bound)
        with np.errstate(invalid="ignore"):
            t = np.where(dec, np.maximum(x - bound, 0.0) / -r, np.maximum(bound - x, 0.0) / r)
        t[skip] = np.inf
        tmin = t.min()
        if not tmin < t_flip - 1e-12:
            return t_flip, -1, None
        ties = np.flatnonzero(t <= tmin + 1e-12)
        if bland:
            pick = ties[np.argmin(self.head[rows[ties]])]
        else:
            pick = ties[np.argmax(np.abs(alpha[rows[ties]]))]
        i = int(rows[pick])
        to = (AT_HI if above[i] else AT_LO) if dec[pick] else (AT_LO if below[i] else AT_HI)
        k = self.head[i]
        if self.lo[k] == self.hi[k]:
            to = AT_LO
        return float(t[pick]), i, to

    def _dual_feasible(self, d):
        st, td = self.state, self.o.tol_dual
        free = ~self.fixed
        bad = (((st == AT_LO) & free & (d < -td)) | ((st == AT_HI) & free & (d > td))
               | ((st == FREE) & (np.abs(d) > td)))
        return not bad.any()

    def _dual_phase(self, max_iter):
        """Dual simplex from a dual feasible basis until primal feasibility.

        Used after warm starts where only bounds changed.  Leaves the basis
        untouched when it is not dual feasible; returns ``(pivots, infeasible)``.
        """
        o = self.o
        tf, tp = o.tol_feas, o.tol_pivot
        it = 0
        while it <= max_iter:
            y = self.cost[self.head] @ self.Binv
            d = self.cost - y @ self.M
            d[self.head] = 0.0
            if it == 0 and not self._dual_feasible(d):
                return it, False
            xb = self.x[self.head]
            lob, hib = self.lo[self.head], self.hi[self.head]
            scale = 1.0 + np.abs(xb)
            viol = np.maximum(lob - xb, xb - hib)
            i = int(np.argmax(viol / scale))
            if viol[i] <= tf * scale[i]:
                return it, False
            raise_it = xb[i] < lob[i]
            row = self.Binv[i] @ self.M
            st = self.state
            nb = (st != BASIC) & ~self.fixed
            # moving x_j by delta changes x_B[i] by -row[j] * delta
            if raise_it:
                cand = nb & (((st == AT_LO) & (row < -tp)) | ((st == AT_HI) & (row > tp))
                             | ((st == FREE) & (np.abs(row) > tp)))
            else:
                cand = nb & (((st == AT_LO) & (row > tp)) | ((st == AT_HI) & (row < -tp))
                             | ((st == FREE) & (np.abs(row) > tp)))
            idx = np.flatnonzero(cand)
            if idx.size == 0:
                return it, True
            ratio = np.abs(d[idx]) / np.abs(row[idx])
            best = ratio.min()
            ties = idx[ratio <= best + 1e-12]
            j = int(ties[np.argmax(np.abs(row[ties]))])
            bound = lob[i] if raise_it else hib[i]
            delta = (xb[i] - bound) / row[j]
            alpha = self.Binv @ self.M[:, j]
            self.x[j] += delta
            self.x[self.head] -= alpha * delta
            k = self.head[i]
            self.state[k] = AT_LO if raise_it else AT_HI
            if self.lo[k] == self.hi[k]:
                self.state[k] = AT_LO
            self.x[k] = self._nonbasic_value(k, self.state[k])
            self.state[j] = BASIC
            self.head[i] = j
            piv = alpha[i]
            prow = self.Binv[i] / piv
            self.Binv -= np.outer(alpha, prow)
            self.Binv[i] = prow
            it += 1
            self.since_refactor += 1
            if self.since_refactor >= o.refactor_every:
                self._refactor()
        raise NumericalFailure("iteration limit reached in dual phase")

    def _basis(self):
        return Basis(self.head.copy(), self.state.copy())

    def _optimal(self, y, d, it):
        n = self.n
        x = self.x[:n].copy()
        obj = float(self.p.c @ x)
        return LpResult(LpStatus.OPTIMAL, x=x, obj=obj, y_dual=y.copy(),
                        z_reduced=d[:n].copy(), basis=self._basis(), iterations=it)


def check_certificates(p, res, tol=1e-7):
    """Residuals of an optimal result: primal, dual, complementarity and gap."""
    x, y, z = res.x, res.y_dual, res.z_reduced
    ax = p.A @ x
    scale = 1.0 + np.abs(np.concatenate([x, ax])).max(initial=0.0)
    primal = max(np.max(p.row_lo - ax, initial=0.0), np.max(ax - p.row_hi, initial=0.0),
                 np.max(p.col_lo - x, initial=0.0), np.max(x - p.col_hi, initial=0.0))
    stat = np.abs(p.c - p.A.T @ y - z).max(initial=0.0)

    def side(mult, val, lo, hi):
        worst, total = 0.0, 0.0
        for mu, v, a, b in zip(mult, val, lo, hi):
            if mu > tol:
                worst = max(worst, abs(v - a) if np.isfinite(a) else np.inf)
                total += mu * a
            elif mu < -tol:
                worst = max(worst, abs(v - b) if np.isfinite(b) else np.inf)
                total += mu * b
            else:
                total += mu * (a if np.isfinite(a) else b if np.isfinite(b) else 0.0)
        return worst, total

    cs_row, dual_row = side(y, ax, p.row_lo, p.row_hi)
    cs_col, dual_col = side(z, x, p.col_lo, p.col_hi)
    gap = abs(res.obj - dual_row - dual_col)
    return {"primal": primal / scale, "stationarity": stat,
            "complementarity": max(cs_row, cs_col) / scale,
            "gap": gap / (1.0 + abs(res.obj))}
