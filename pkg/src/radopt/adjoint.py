"""Adjoint state, energy sensitivities and the state derivative."""

from enum import Enum

import numpy as np

from . import assembly as asm
from .errors import IllPosedAdjoint, InvalidArgument


class SensitivityMode(str, Enum):
    ADJOINT = "adjoint"
    SELF_ADJOINT = "self_adjoint"


def _tangent_operator(mesh, kappa, u, phys):
    """Matrix of ``a(w, phi) + sigma (r-1) int u^(r-2) w phi`` and its boundary part."""
    uq = np.maximum(asm.boundary_values(mesh, u), 0.0)
    if phys.r > 2 and not uq.max(initial=0.0) > 1e-12:
        raise IllPosedAdjoint(
            "state vanishes on the radiative boundary; the linearized boundary operator degenerates"
        )
    B_data = asm.boundary_mass_data(mesh, phys.sigma * (phys.r - 1.0) * uq ** (phys.r - 2.0))
    p = asm.pattern(mesh)
    return p.matrix(asm.stiffness_data(mesh, kappa) + B_data), p.matrix(B_data), uq


def _refined_solve(mesh, kappa, A, B, rhs, tol):
    # one defect-correction pass with the matrix-free stiffness action
    w = asm.solve_spd(A, rhs, tol=tol)
    d = rhs - asm.apply_stiffness(mesh, kappa, w) - B @ w
    return w + asm.solve_spd(A, d, tol=tol)


def solve_adjoint(mesh, kappa, f, u, phys, tol=1e-10):
    """Adjoint state ``v``.

    Solves ``a(v, phi) + sigma (r-1) int u^(r-2) v phi
    = <f, phi> - sigma r int u^(r-1) phi`` on the radiative boundary.
    """
    A, B, uq = _tangent_operator(mesh, kappa, u, phys)
    rhs = asm.assemble_load(mesh, f) - asm.assemble_boundary_load(mesh, phys.sigma * phys.r * uq ** (phys.r - 1.0))
    return _refined_solve(mesh, kappa, A, B, rhs, tol)


def sensitivity(mesh, u, v, phys, mode=SensitivityMode.ADJOINT):
    """Per-element derivative density of the energy with respect to the volume fraction.

    ``-(beta - alpha) grad u . grad v`` in ADJOINT mode and
    ``-(beta - alpha) |grad u|^2`` in SELF_ADJOINT mode (``v`` unused).
    """
    mode = SensitivityMode(mode)
    gu = asm.gradients(mesh, u)
    if mode is SensitivityMode.SELF_ADJOINT:
        dot = np.einsum("td,td->t", gu, gu)
    else:
        if v is None:
            raise InvalidArgument("ADJOINT mode needs the adjoint state")
        dot = np.einsum("td,td->t", gu, asm.gradients(mesh, v))
    return -(phys.beta - phys.alpha) * dot


def energy_derivative(mesh, u, v, h):
    """``<E'(kappa), h> = -int h grad u . grad v`` for a conductivity perturbation ``h``."""
    dot = np.einsum("td,td->t", asm.gradients(mesh, u), asm.gradients(mesh, v))
    return -float(np.sum(np.asarray(h) * mesh.element_area * dot))


def solve_state_derivative(mesh, kappa, u, phys, h, tol=1e-10):
    """Derivative ``u~`` of the state in the conductivity direction ``h``.

    ``a(u~, phi) + sigma (r-1) int u^(r-2) u~ phi = -int h grad u . grad phi``.
    """
    h = np.asarray(h, dtype=float)
    if not np.any(h):
        return np.zeros(mesh.n_nodes)
    A, B, _ = _tangent_operator(mesh, kappa, u, phys)
    rhs = -asm.apply_stiffness(mesh, h, u)
    return _refined_solve(mesh, kappa, A, B, rhs, tol)


def energy_derivative_direct(mesh, kappa, u, ut, h):
    """``d/dt int (kappa + t h) |grad u_t|^2`` at ``t = 0`` from the state derivative."""
    gu = asm.gradients(mesh, u)
    gt = asm.gradients(mesh, ut)
    a = mesh.element_area
    return float(np.sum(np.asarray(h) * a * np.einsum("td,td->t", gu, gu))
                 + 2.0 * np.sum(np.asarray(kappa) * a * np.einsum("td,td->t", gu, gt)))


def positive_sensitivity_rate(mesh, sens):
    """Area fraction where the adjoint sensitivity is positive (logged as a diagnostic)."""
    return float(np.sum(mesh.element_area[np.asarray(sens) > 0]) / mesh.area)
