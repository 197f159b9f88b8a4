"""Energy bookkeeping, laminate homogenization checks and state assumptions."""

from dataclasses import dataclass

import numpy as np

from . import assembly as asm
from .errors import InvalidArgument
from .mesh import build_rect_mesh, mark_boundary
from .state import dirichlet_form, radiative_power


def dirichlet_energy(mesh, kappa, u):
    """``int kappa |grad u|^2`` (exact for P1 fields and element-constant kappa)."""
    return dirichlet_form(mesh, kappa, u)


@dataclass(frozen=True)
class EnergyReport:
    e_in: float
    e_rad: float
    e_source: float
    balance_residual: float

    def lines(self):
        return [f"{k} = {getattr(self, k)!r}" for k in ("e_in", "e_rad", "e_source", "balance_residual")]


def energy_balance(mesh, kappa, u, f, phys):
    """Split of the source work ``int f u`` into conduction and radiation parts."""
    e_in = dirichlet_energy(mesh, kappa, u)
    e_rad = radiative_power(mesh, u, phys)
    e_src = float(asm.assemble_load(mesh, f) @ np.asarray(u, dtype=float))
    res = abs(e_in + e_rad - e_src) / max(e_src, np.finfo(float).tiny)
    return EnergyReport(e_in, e_rad, e_src, res)


@dataclass(frozen=True)
class AssumptionReport:
    max_u: float
    min_radiative: float
    positive_fraction: float  # length fraction of radiative edges with u > threshold
    flagged: bool


def check_assumption_u(mesh, u, threshold=1e-10):
    """Check that ``u`` stays above a positive constant on part of the radiative boundary.

    Flags (does not raise) when no radiative edge of positive length has
    ``u > threshold`` at both end points; the linearized boundary operator
    of the adjoint then degenerates.
    """
    u = np.asarray(u, dtype=float)
    e = mesh.radiative_edges
    L = mesh.radiative_length
    pos = np.all(u[e] > threshold, axis=1)
    frac = float(L[pos].sum() / L.sum()) if len(L) else 0.0
    min_rad = float(u[mesh.radiative_nodes].min()) if len(e) else float("nan")
    return AssumptionReport(float(u.max()), min_rad, frac, not frac > 0)


@dataclass(frozen=True)
class LaminateReport:
    kappa_perp: float
    kappa_par: float
    harmonic: float
    arithmetic: float
    theta: float  # strong-material fraction realized on the mesh
    rel_tol: float

    @property
    def perp_ok(self):
        return self.kappa_perp >= self.harmonic * (1 - self.rel_tol)

    @property
    def par_ok(self):
        return self.kappa_par <= self.arithmetic * (1 + self.rel_tol)

    @property
    def holds(self):
        return self.perp_ok and self.par_ok


def _effective_conductivity(mesh, kappa, inlet, outlet, length, width, h):
    # Robin closure: h (u - 1) on the inlet side, h u on the outlet side
    m = mark_boundary(mesh, [inlet, outlet])
    mid = m.edge_midpoints[m.markers == 1]
    lo, hi = m.bbox
    axis = 0 if inlet in ("left", "right") else 1
    on_in = np.abs(mid[:, axis] - (lo[axis] if inlet in ("left", "bottom") else hi[axis])) < 1e-12
    amb = np.repeat(on_in.astype(float)[:, None], 2, axis=1)  # ambient at Gauss points
    A = asm.assemble_stiffness(m, kappa) + asm.assemble_boundary_mass(m, h)
    b = asm.assemble_boundary_load(m, h * amb)
    u = asm.solve_spd(A, b, tol=1e-13)
    uq = asm.boundary_values(m, u)
    Lr = m.radiative_length
    q_in = h * float(np.sum(((1.0 - uq) @ asm.GAUSS_W * Lr)[on_in]))
    q_out = h * float(np.sum((uq @ asm.GAUSS_W * Lr)[~on_in]))
    q = 0.5 * (q_in + q_out)
    t_in = float(np.sum((uq @ asm.GAUSS_W * Lr)[on_in]) / Lr[on_in].sum())
    t_out = float(np.sum((uq @ asm.GAUSS_W * Lr)[~on_in]) / Lr[~on_in].sum())
    return q * length / ((t_in - t_out) * width)


def laminate_bounds_check(alpha, beta, theta_fraction, layers=64, cells_per_layer=None, ny=4, rel_tol=0.05):
    """Effective conductivities of a striped laminate against the harmonic/arithmetic means.

    Layers are vertical stripes aligned with mesh cells.  Heat driven
    left to right crosses the layers (``kappa_perp``); heat driven bottom
    to top runs along them (``kappa_par``).  Both use a linear Robin
    closure and read the temperature drop off the boundary means.
    """
    if layers < 8:
        raise InvalidArgument("laminate check needs at least 8 layers")
    if not 0 <= theta_fraction <= 1:
        raise InvalidArgument("theta_fraction must lie in [0, 1]")
    if cells_per_layer is None:
        # smallest cell count representing the fraction exactly, capped at 20
        cells_per_layer = next((c for c in range(1, 21) if abs(theta_fraction * c - round(theta_fraction * c)) < 1e-12), 20)
    nx = layers * cells_per_layer
    mesh = build_rect_mesh(nx, ny, 1.0, 1.0)
    n_strong = int(round(theta_fraction * cells_per_layer))
    cell_x = np.floor(mesh.centroids[:, 0] * nx + 1e-9).astype(int)
    strong = (cell_x % cells_per_layer) < n_strong
    kappa = np.where(strong, beta, alpha).astype(float)
    theta = n_strong / cells_per_layer
    h = 100.0 * max(alpha, beta) * nx
    k_perp = _effective_conductivity(mesh, kappa, "left", "right", 1.0, 1.0, h)
    k_par = _effective_conductivity(mesh, kappa, "bottom", "top", 1.0, 1.0, h)
    harm = 1.0 / (theta / beta + (1 - theta) / alpha)
    arit = theta * beta + (1 - theta) * alpha
    return LaminateReport(k_perp, k_par, harm, arit, theta, rel_tol)
