"""Quick invariant checks run by ``radopt validate``."""

import numpy as np

from . import assembly as asm
from .adjoint import energy_derivative, solve_adjoint
from .diagnostics import energy_balance, laminate_bounds_check
from .mesh import build_rect_mesh
from .opt_density import project_volume
from .state import PhysicsParams, dirichlet_form, radiative_power, solve_state, total_potential


def _mesh_areas(rng):
    m = build_rect_mesh(7, 5, 2.0, 3.0)
    err = max(abs(m.area - 6.0) / 6.0, abs(m.edge_length.sum() - 10.0) / 10.0)
    return err <= 1e-12, f"area/perimeter relative error {err:.1e}"


def _stiffness(rng):
    m = build_rect_mesh(6, 6)
    K = asm.assemble_stiffness(m, rng.uniform(1, 10, m.n_triangles))
    asym = abs(K - K.T).max()
    rows = np.abs(K @ np.ones(m.n_nodes)).max()
    return asym == 0 and rows <= 1e-12, f"asymmetry {asym:.1e}, max row sum {rows:.1e}"


def _energy_identity(rng):
    m = build_rect_mesh(16, 16)
    phys = PhysicsParams()
    kappa = phys.kappa(np.full(m.n_triangles, 0.6))
    f = np.full(m.n_triangles, 0.001)
    sol = solve_state(m, kappa, f, phys)
    rep = energy_balance(m, kappa, sol.u, f, phys)
    flux = abs(radiative_power(m, sol.u, phys, power=phys.r - 1) - 0.001) / 0.001
    return rep.balance_residual <= 1e-6 and flux <= 1e-6, f"balance {rep.balance_residual:.1e}, flux {flux:.1e}"


def _nonnegativity(rng):
    m = build_rect_mesh(12, 12)
    phys = PhysicsParams()
    worst = np.inf
    for _ in range(5):
        kappa = phys.kappa(rng.uniform(0, 1, m.n_triangles))
        f = rng.uniform(0, 1, m.n_triangles)
        worst = min(worst, solve_state(m, kappa, f, phys).u.min())
    return worst >= -1e-10, f"min u {worst:.3e}"


def _gradient(rng):
    m = build_rect_mesh(8, 8)
    phys = PhysicsParams()
    kappa = phys.kappa(np.full(m.n_triangles, 0.6))
    f = np.full(m.n_triangles, 0.001)
    u = solve_state(m, kappa, f, phys).u
    v = solve_adjoint(m, kappa, f, u, phys)
    worst = 0.0
    for _ in range(2):
        h = rng.uniform(-1, 1, m.n_triangles)
        d = 1e-6 * kappa.max()
        ep = dirichlet_form(m, kappa + d * h, solve_state(m, kappa + d * h, f, phys).u)
        em = dirichlet_form(m, kappa - d * h, solve_state(m, kappa - d * h, f, phys).u)
        fd = (ep - em) / (2 * d)
        ad = energy_derivative(m, u, v, h)
        worst = max(worst, abs(ad - fd) / abs(fd))
    return worst <= 1e-3, f"adjoint vs finite difference {worst:.1e}"


def _projection(rng):
    m = build_rect_mesh(10, 10)
    raw = rng.normal(0.5, 0.4, m.n_triangles)
    th, _ = project_volume(raw, 0.4, 0.0, 1.0, 1e-4, m.element_area)
    err = abs(float(m.element_area @ th) - 0.4)
    return th.min() >= 0 and th.max() <= 1 and err <= 1e-4, f"volume error {err:.1e}"


def _laminate(rng):
    r = laminate_bounds_check(1.0, 10.0, 0.5, layers=16)
    return r.holds, f"perp {r.kappa_perp:.4f} (harmonic {r.harmonic:.4f}), par {r.kappa_par:.4f} (arithmetic {r.arithmetic:.4f})"


def _minimality(rng):
    m = build_rect_mesh(8, 8)
    phys = PhysicsParams()
    kappa = phys.kappa(rng.uniform(0, 1, m.n_triangles))
    f = np.full(m.n_triangles, 0.001)
    u = solve_state(m, kappa, f, phys).u
    j0 = total_potential(m, kappa, f, phys, u)
    gaps = [total_potential(m, kappa, f, phys, u + 1e-3 * rng.uniform(-1, 1, m.n_nodes)) - j0 for _ in range(3)]
    return min(gaps) >= 0, f"smallest potential increase {min(gaps):.2e}"


CHECKS = [
    ("mesh_measures", _mesh_areas),
    ("stiffness_symmetry", _stiffness),
    ("energy_identity", _energy_identity),
    ("nonnegativity", _nonnegativity),
    ("adjoint_gradient", _gradient),
    ("volume_projection", _projection),
    ("laminate_bounds", _laminate),
    ("variational_minimality", _minimality),
]


def run_checks(seed=0):
    """List of ``(name, passed, detail)``."""
    rng = np.random.default_rng(seed)
    out = []
    for name, fn in CHECKS:
        try:
            ok, detail = fn(rng)
        except Exception as exc:  # report, do not abort the suite
            ok, detail = False, f"{type(exc).__name__}: {exc}"
        out.append((name, bool(ok), detail))
    return out
