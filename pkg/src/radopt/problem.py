"""Turn a RunConfig into the discrete problem: mesh, source and physics."""

import logging
from dataclasses import dataclass

import numpy as np

from .adjoint import SensitivityMode, positive_sensitivity_rate, sensitivity, solve_adjoint
from .mesh import Mesh, build_rect_mesh, element_indicator, mark_boundary
from .state import PhysicsParams, dirichlet_form, solve_state

log = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class Problem:
    mesh: Mesh
    f: np.ndarray  # element source
    phys: PhysicsParams


def source_field(mesh, src):
    """Element-constant source from a SourceConfig (centroid membership)."""
    if src.kind == "uniform":
        ind = np.ones(mesh.n_triangles, dtype=bool)
    elif src.kind == "disk":
        ind = element_indicator(
            mesh, lambda p: (p[:, 0] - src.cx) ** 2 + (p[:, 1] - src.cy) ** 2 <= src.radius**2
        )
    else:  # box
        ind = element_indicator(
            mesh,
            lambda p: (p[:, 0] >= src.xmin) & (p[:, 0] <= src.xmax) & (p[:, 1] >= src.ymin) & (p[:, 1] <= src.ymax),
        )
    return np.where(ind, src.magnitude, 0.0)


def build_problem(cfg):
    m = cfg.mesh
    mesh = build_rect_mesh(m.nx, m.ny, m.width, m.height)
    if cfg.boundary.radiative.strip() != "all":
        mesh = mark_boundary(mesh, cfg.boundary.radiative)
    p = cfg.physics
    phys = PhysicsParams(sigma=p.sigma, r=p.r, alpha=p.alpha, beta=p.beta)
    return Problem(mesh, source_field(mesh, cfg.source), phys)


def intermediate_fraction(mesh, theta, lo=0.05, hi=0.95):
    """Area fraction of elements whose material fraction is strictly in (lo, hi)."""
    theta = np.asarray(theta)
    sel = (theta > lo) & (theta < hi)
    return float(mesh.element_area[sel].sum() / mesh.area)


@dataclass
class Evaluation:
    u: np.ndarray
    energy: float  # Dirichlet energy a(u, u)
    objective: float  # energy, or minus the energy in worst mode
    sens: np.ndarray  # element derivative density of the objective
    newton_iters: int


def evaluate_design(problem, theta, opt, u_prev=None):
    """State solve, energy and objective sensitivity for element fraction ``theta``.

    In worst mode the objective is ``-E`` with the material roles swapped;
    the two sign changes cancel, so the sensitivity formula is the same.
    """
    mesh, phys = problem.mesh, problem.phys
    kappa = phys.kappa(theta, worst=opt.worst)
    sol = solve_state(mesh, kappa, problem.f, phys, eta3=opt.eta3, max_newton=opt.max_newton, u_init=u_prev)
    mode = SensitivityMode(opt.sensitivity_mode)
    v = solve_adjoint(mesh, kappa, problem.f, sol.u, phys) if mode is SensitivityMode.ADJOINT else None
    E = dirichlet_form(mesh, kappa, sol.u)
    sens = sensitivity(mesh, sol.u, v, phys, mode)
    if mode is SensitivityMode.ADJOINT and log.isEnabledFor(logging.DEBUG):
        log.debug("positive sensitivity on %.3f of the area", positive_sensitivity_rate(mesh, sens))
    return Evaluation(sol.u, E, -E if opt.worst else E, sens, sol.newton_iters)
