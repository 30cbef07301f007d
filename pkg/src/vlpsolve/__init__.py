"""Primal and dual outer-approximation solvers for vector linear programs."""
from .benson import Algorithm, SolverConfig, Status, VlpSolution, eps_certificate, solve, solve_dual, solve_primal
from .io import format_vlp, parse_vlp, read_vlp, write_results
from .model import OrderingCone, Sense, VlpProblem, validate

__all__ = [
    "Algorithm", "OrderingCone", "Sense", "SolverConfig", "Status", "VlpProblem", "VlpSolution",
    "eps_certificate", "format_vlp", "parse_vlp", "read_vlp", "solve", "solve_dual", "solve_primal",
    "validate", "write_results",
]
