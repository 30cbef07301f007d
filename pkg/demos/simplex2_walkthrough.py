"""Solve the two-objective simplex problem and inspect both images.

    min (x1, x2)  subject to  x1 + x2 >= 1,  x >= 0

The upper image is the set of points above the segment from (1,0) to (0,1).
Its lower (dual) image has three vertices, one per facet of the upper image.
"""
from pathlib import Path

import numpy as np

from vlpsolve import Algorithm, SolverConfig, read_vlp, solve, validate
from vlpsolve.dual import CouplingContext
from vlpsolve.io import dual_hrep, primal_hrep
from vlpsolve.verify import check_geometric_duality, check_solution, oracle_upper_image

HERE = Path(__file__).parent


def show(title, rows):
    print(f"{title}:")
    for r in np.atleast_2d(rows):
        if np.size(r):
            print("   ", np.array2string(np.asarray(r), precision=4, suppress_small=True))


def main():
    p = validate(read_vlp(HERE / "simplex2.vlp"))
    for alg in (Algorithm.PRIMAL, Algorithm.DUAL):
        sol = solve(p, SolverConfig(algorithm=alg))
        print(f"== {alg.value} algorithm: {sol.status.value}, {sol.iterations} iterations, "
              f"{sol.lp_count} LPs")
        show("upper image vertices", sol.vertices)
        show("their preimages x", sol.vertex_preimages)
        show("cone compartment", sol.cone_compartment)
        show("dual image vertices", sol.dual_vertices)
        for name, h in (("upper", primal_hrep(sol)), ("dual", dual_hrep(sol))):
            show(f"{name} image facets (w, gamma) with w.y >= gamma",
                 np.column_stack([h.normals, h.offsets]))

    sol = solve(p)
    print("\n== independent checks")
    print(check_solution(p, sol, oracle=oracle_upper_image(p)))
    print(check_geometric_duality(sol.primal_inner.vrep, sol.dual_inner.vrep, CouplingContext(sol.c, sol.sense)))


if __name__ == "__main__":
    main()
