"""Solve the radiation state once, then check the adjoint derivative by finite differences.

    python3 demos/gradient_check.py [n]
"""

import sys

import numpy as np

from radopt import PhysicsParams, build_rect_mesh, solve_adjoint, solve_state
from radopt.adjoint import energy_derivative
from radopt.diagnostics import energy_balance
from radopt.state import dirichlet_form

n = int(sys.argv[1]) if len(sys.argv) > 1 else 16
phys = PhysicsParams()  # alpha 1, beta 10, sigma 1, r 4
mesh = build_rect_mesh(n, n)
kappa = phys.kappa(np.full(mesh.n_triangles, 0.6))
f = np.full(mesh.n_triangles, 0.001)

sol = solve_state(mesh, kappa, f, phys)
print(f"{n}x{n} mesh, {mesh.n_nodes} nodes; Newton converged in {sol.newton_iters} steps")
print("temperature range %.6f .. %.6f" % (sol.u.min(), sol.u.max()))
for line in energy_balance(mesh, kappa, sol.u, f, phys).lines():
    print("  " + line)

# one adjoint solve gives the derivative in every direction
v = solve_adjoint(mesh, kappa, f, sol.u, phys)
rng = np.random.default_rng(0)
print("\ndirection   adjoint          central FD       rel. error")
for k in range(5):
    h = rng.uniform(-1, 1, mesh.n_triangles)
    d = 1e-6 * kappa.max()
    ep = dirichlet_form(mesh, kappa + d * h, solve_state(mesh, kappa + d * h, f, phys).u)
    em = dirichlet_form(mesh, kappa - d * h, solve_state(mesh, kappa - d * h, f, phys).u)
    fd = (ep - em) / (2 * d)
    ad = energy_derivative(mesh, sol.u, v, h)
    print(f"{k:9d}   {ad: .8e}  {fd: .8e}  {abs(ad - fd) / abs(fd):.1e}")
