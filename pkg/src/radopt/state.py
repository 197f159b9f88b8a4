"""Steady diffusion with a Stefan-Boltzmann radiation boundary condition.

The state ``u`` solves ``-div(kappa grad u) = f`` in the domain and
``-kappa du/dn = sigma |u|^(r-2) u`` on the radiative boundary; insulated
edges carry the natural condition.  The boundary term is linearized
around the previous iterate and the linear problems are solved for the
Newton correction, which keeps the nearly constant temperature fields of
weak sources accurate.
"""

import logging
from dataclasses import dataclass, field

import numpy as np

from . import assembly as asm
from .errors import InternalConsistencyError, InvalidArgument, NoConvergence

log = logging.getLogger(__name__)



@dataclass(frozen=True)
class PhysicsParams:
    sigma: float = 1.0
    r: float = 4.0
    alpha: float = 1.0
    beta: float = 10.0

    def __post_init__(self):
        if not self.sigma > 0:
            raise InvalidArgument("sigma must be positive")
        if not self.r >= 2:
            raise InvalidArgument("radiation exponent r must be >= 2")
        if not self.beta > self.alpha > 0:
            raise InvalidArgument("conductivities must satisfy beta > alpha > 0")

    def kappa(self, theta, worst=False):
        """Conductivity of a composite with strong-material fraction ``theta``.

        With ``worst=True`` the roles are swapped: ``theta`` is the fraction
        of the weak material.
        """
        theta = np.asarray(theta, dtype=float)
        if worst:
            return self.alpha * theta + self.beta * (1.0 - theta)
        return self.alpha * (1.0 - theta) + self.beta * theta


@dataclass
class StateSolution:
    u: np.ndarray
    newton_iters: int
    final_residual: float
    residuals: list = field(default_factory=list)


def equilibrium_temperature(mesh, f, phys):
    """Uniform temperature whose radiation balances the total source."""
    total = float(np.sum(np.asarray(f) * mesh.element_area))
    if total <= 0:
        return 0.0
    return (total / (phys.sigma * float(mesh.radiative_length.sum()))) ** (1.0 / (phys.r - 1.0))


ETA3_RELATIVE = 1e-12


def default_eta3(F, u0):
    """Energy-identity tolerance relative to the source work ``<f, u0>`` of the first iterate."""
    return max(ETA3_RELATIVE * abs(float(F @ u0)), 1e-300)


def dirichlet_form(mesh, kappa, u, w=None):
    """``a(u, w) = int kappa grad u . grad w`` (``w = u`` by default)."""
    gu = asm.gradients(mesh, u)
    gw = gu if w is None else asm.gradients(mesh, w)
    return float(np.sum(np.asarray(kappa) * mesh.element_area * np.einsum("td,td->t", gu, gw)))


def radiative_power(mesh, u, phys, power=None):
    """``sigma int_{Gamma_R} |u|^power`` (``power = r`` by default)."""
    p = phys.r if power is None else power
    uq = asm.boundary_values(mesh, u)
    return phys.sigma * asm.boundary_integral(mesh, np.abs(uq) ** p)


def energy_residual(mesh, kappa, F, u, phys):
    """Absolute residual of ``a(u,u) + sigma int |u|^r = int f u``."""
    return abs(dirichlet_form(mesh, kappa, u) + radiative_power(mesh, u, phys) - float(F @ u))


def _robin_coefficient(mesh, f, phys):
    c = equilibrium_temperature(mesh, f, phys)
    if phys.r == 2 or c <= 0:
        return phys.sigma
    return phys.sigma * c ** (phys.r - 2.0)


def _linearized_step(mesh, kappa, K_data, u_old, F, phys, tol):
    """One Newton update, solved for the correction against an accurate defect."""
    uq = np.maximum(asm.boundary_values(mesh, u_old), 0.0)
    s, r = phys.sigma, phys.r
    wq = s * (r - 1.0) * uq ** (r - 2.0)
    B_data = asm.boundary_mass_data(mesh, wq)
    A = asm.pattern(mesh).matrix(K_data + B_data)
    rhs = F + asm.assemble_boundary_load(mesh, s * (r - 2.0) * uq ** (r - 1.0))
    Au = asm.apply_stiffness(mesh, kappa, u_old) + asm.pattern(mesh).matrix(B_data) @ u_old
    return u_old + asm.solve_spd(A, rhs - Au, tol=tol)


def solve_state(mesh, kappa, f, phys, eta3=None, max_newton=50, u_init=None, tol=1e-10):
    """Solve the radiation problem by successive linearization.

    Without ``u_init`` the first iterate solves the Robin problem
    ``a(u, phi) + h int u phi = <f, phi>`` with ``h = sigma c^(r-2)``, where
    ``c`` is the uniform temperature radiating the total source away (so
    ``h = sigma`` for ``r = 2``).  With ``u_init``, Newton starts from it.  Iteration stops once the energy identity
    residual is at most ``eta3`` (default: :func:`default_eta3` of the first
    iterate).
    """
    if len(mesh.radiative_edges) == 0:
        raise InvalidArgument("state problem needs at least one radiative edge")
    kappa = np.asarray(kappa, dtype=float)
    f = np.asarray(f, dtype=float)
    if eta3 is not None and not eta3 > 0:
        raise InvalidArgument("eta3 must be positive")
    K_data = asm.stiffness_data(mesh, kappa)
    if not np.all(kappa > 0):
        raise InvalidArgument("kappa must be positive")
    F = asm.assemble_load(mesh, f)
    nonneg_source = bool(np.all(f >= 0))

    residuals = []
    if u_init is None:
        B = asm.pattern(mesh).matrix(asm.boundary_mass_data(mesh, _robin_coefficient(mesh, f, phys)))
        A = asm.pattern(mesh).matrix(K_data) + B
        u = asm.solve_spd(A, F, tol=tol)
        u = u + asm.solve_spd(A, F - asm.apply_stiffness(mesh, kappa, u) - B @ u, tol=tol)
    else:
        u = np.array(u_init, dtype=float)
        if phys.r > 2 and np.max(asm.boundary_values(mesh, u), initial=0.0) <= 0:
            raise InvalidArgument("warm start must be positive somewhere on the radiative boundary")
    if eta3 is None:
        eta3 = default_eta3(F, u)
    res = energy_residual(mesh, kappa, F, u, phys)
    residuals.append(res)
    it = 1
    while res > eta3:
        if it >= max_newton:
            sol = StateSolution(u, it, res, residuals)
            raise NoConvergence(f"Newton did not reach eta3={eta3:.3e} in {max_newton} iterations", sol, res)
        u = _linearized_step(mesh, kappa, K_data, u, F, phys, tol)
        it += 1
        prev, res = res, energy_residual(mesh, kappa, F, u, phys)
        residuals.append(res)
        if it > 2 and res >= prev:
            log.info("Newton residual did not decrease: %.3e -> %.3e", prev, res)
    # intermediate iterates may dip below zero and are clamped in the weights;
    # a converged state may not
    if nonneg_source and u.min() < -1e-8 * max(u.max(), 1e-300):
        raise InternalConsistencyError(f"negative temperature {u.min():.3e} with a nonnegative source")
    return StateSolution(u, it, res, residuals)


def total_potential(mesh, kappa, f, phys, w):
    """``1/2 a(w,w) - <f,w> + sigma/r int_{Gamma_R} |w|^r``; minimized by the state."""
    w = np.asarray(w, dtype=float)
    F = asm.assemble_load(mesh, f)
    return 0.5 * dirichlet_form(mesh, kappa, w) - float(F @ w) + radiative_power(mesh, w, phys) / phys.r


@dataclass
class BoundReport:
    lhs: float
    rhs: float

    @property
    def holds(self):
        return self.lhs <= self.rhs

    @property
    def violated(self):
        return not self.holds


def check_gradient_bound(mesh, kappa, f, phys, u, v):
    """Compare ``||grad(u - v)||^2`` with its a priori bound in terms of ``f``.

    The bound is ``(r-1)/a1 * sqrt(2/a0) * ||f|| * sqrt(||f||^2/(2 a0) +
    (r-2)/2 sigma |Gamma_R|)`` with ``a1 = min kappa`` and
    ``a0 = min(a1, r sigma / 2)``.
    """
    u = np.asarray(u, dtype=float)
    v = np.asarray(v, dtype=float)
    g = asm.gradients(mesh, u - v)
    lhs = float(np.sum(mesh.element_area * np.einsum("td,td->t", g, g)))
    r, s = phys.r, phys.sigma
    a1 = float(np.min(kappa))
    a0 = min(a1, 0.5 * r * s)
    fn = float(np.sqrt(np.sum(np.asarray(f, dtype=float) ** 2 * mesh.element_area)))
    perim = float(mesh.radiative_length.sum())
    rhs = (r - 1.0) / a1 * np.sqrt(2.0 / a0) * fn * np.sqrt(fn**2 / (2.0 * a0) + 0.5 * (r - 2.0) * s * perim)
    return BoundReport(lhs, float(rhs))
