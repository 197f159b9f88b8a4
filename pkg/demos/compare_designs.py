"""Density and level-set designs for the reference heat-sink problem, side by side.

The level-set run ends with much less gray material.  Mesh size defaults to
32 so the demo runs in about a minute; the acceptance suite uses 64.

    python3 demos/compare_designs.py [n]
"""

import sys

from radopt import RunConfig, build_rect_mesh, optimize_density, optimize_levelset
from radopt.problem import intermediate_fraction

n = int(sys.argv[1]) if len(sys.argv) > 1 else 32
SHADES = " .:-=+*#%@"


def picture(theta):
    # triangles come in pairs per square, row by row from the bottom
    sq = theta.reshape(n, n, 2).mean(axis=2)
    return ["".join(SHADES[min(int(c * len(SHADES)), len(SHADES) - 1)] for c in row) for row in sq[::-2]]


mesh = build_rect_mesh(n, n)
for mode, run in (("density", optimize_density), ("levelset", optimize_levelset)):
    cfg = RunConfig()
    cfg.mesh.nx = cfg.mesh.ny = n
    cfg.optimize.mode = mode
    state, hist = run(cfg)
    print(f"\n{mode}: converged={state.converged} after {hist[-1].iter} iterations, E = {state.energy:.6e}, "
          f"intermediate fraction {intermediate_fraction(mesh, state.theta):.3f}")
    print("\n".join(picture(state.theta)))
