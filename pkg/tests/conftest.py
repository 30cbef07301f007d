import numpy as np
import pytest

from vlpsolve.model import VlpProblem, validate

INF = np.inf


def simplex2_problem():
    """min (x1, x2) s.t. x1 + x2 >= 1, x >= 0 written through three rows."""
    B = np.array([[1.0, 1.0], [1.0, 0.0], [0.0, 1.0]])
    return VlpProblem.create(np.eye(2), B, a=[1, 0, 0], b=[INF] * 3)


@pytest.fixture
def simplex2():
    return validate(simplex2_problem())


def same_rows(A, B, tol=1e-7):
    """Row sets agree up to order."""
    A = np.asarray(A, dtype=float).reshape(-1, np.shape(B)[-1] if np.size(B) else np.shape(A)[-1])
    B = np.asarray(B, dtype=float).reshape(-1, A.shape[1])
    if len(A) != len(B):
        return False
    return all(np.min(np.abs(B - a).max(axis=1)) <= tol for a in A) and \
        all(np.min(np.abs(A - b).max(axis=1)) <= tol for b in B)


def unit_rows(A):
    A = np.asarray(A, dtype=float)
    return A / np.linalg.norm(A, axis=1)[:, None] if len(A) else A


ACCEPTANCE_LINES = []


@pytest.fixture
def criterion(capsys):
    """Record one acceptance line, echo it, and return whether it passed."""
    def record(number, passed, detail):
        line = f"criterion {number}: {'PASS' if passed else 'FAIL'} ({detail})"
        ACCEPTANCE_LINES.append(line)
        with capsys.disabled():
            print("\n" + line)
        return passed
    return record


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
