"""A random three-objective MOLP, solved to eps = 1e-4, with plot-ready output.

The result files land in demos/out/random_q3 as text and JSON.  Each ``v``
line of primal_img.txt is a vertex of the upper image; each ``h`` line of
primal_hrep.txt is a facet ``w . y >= gamma``.  Together they are enough to
draw the Pareto frontier with any 3-d plotting tool.
"""
import sys
from pathlib import Path

import numpy as np

from vlpsolve import SolverConfig, VlpProblem, solve, validate, write_results


def make_problem(seed=0, n=30, m=30):
    rng = np.random.default_rng(seed)
    P = rng.integers(0, 11, size=(3, n)).astype(float)
    B = rng.integers(0, 11, size=(m, n)).astype(float)
    return validate(VlpProblem.create(P, B, a=B.sum(axis=1) / 4, l=np.zeros(n)))


def main(seed=0):
    p = make_problem(seed)

    shown = [0]

    def progress(iteration, unverified, distance):
        if iteration // 100 > shown[0]:
            shown[0] = iteration // 100
            print(f"  iteration {iteration}: {unverified} vertices left to check, "
                  f"largest distance so far {distance:.2e}")

    sol = solve(p, SolverConfig(eps=1e-4), progress=progress)
    print(f"{sol.status.value}: {len(sol.vertices)} vertices, {len(sol.dual_vertices)} facets, "
          f"{sol.iterations} iterations, {sol.lp_count} LPs, {sol.elapsed:.2f} s")
    out = Path(__file__).parent / "out" / "random_q3"
    write_results(sol, out)
    write_results(sol, out, "json")
    print(f"results written to {out}")
    lo, hi = sol.vertices.min(axis=0), sol.vertices.max(axis=0)
    print("bounding box of the frontier:", lo, hi)


if __name__ == "__main__":
    main(int(sys.argv[1]) if len(sys.argv) > 1 else 0)
