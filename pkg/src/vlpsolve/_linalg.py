"""Shared tolerances and small dense linear-algebra helpers."""
import numpy as np

TOL_RANK = 1e-9
TOL_CONE = 1e-9
TOL_INT = 1e-7
TOL_FEAS = 1e-9
TOL_DUAL = 1e-9
TOL_PIVOT = 1e-11
TOL_ON = 1e-8


def numeric_rank(M, tol=TOL_RANK):
    """Rank of ``M`` with singular values below ``tol * s_max`` treated as zero."""
    M = np.atleast_2d(np.asarray(M, dtype=float))
    if M.size == 0:
        return 0
    s = np.linalg.svd(M, compute_uv=False)
    if s[0] == 0.0:
        return 0
    return int(np.sum(s > tol * s[0]))


def independent_columns(M, tol=TOL_RANK):
    """Greedy list of column indices forming a maximal independent set."""
    M = np.atleast_2d(np.asarray(M, dtype=float))
    chosen = []
    for j in range(M.shape[1]):
        trial = chosen + [j]
        if numeric_rank(M[:, trial], tol) == len(trial):
            chosen = trial
            if len(chosen) == M.shape[0]:
                break
    return chosen


def normalize_columns_max(M):
    """Scale every column to unit max-norm (zero columns are left alone)."""
    M = np.array(M, dtype=float)
    if M.size == 0:
        return M
    scale = np.abs(M).max(axis=0)
    scale[scale == 0.0] = 1.0
    return M / scale
