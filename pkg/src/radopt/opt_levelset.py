"""Level-set optimization driven by an implicit doubly nonlinear diffusion step.

The design variable is a nodal ``phi`` in ``[-1, 1]``; the strong material
fills ``phi_+``.  Each iteration solves

    (M_w / tau + eps K) phi_new = (M_w / tau) phi + b,

with ``M_w`` the lumped mass weighted by ``(|phi| + delta_w)^(q-1)``, ``K``
the unit stiffness (natural boundary condition) and ``b`` the load of
``-m phi_+^(m-1) chi(phi) s`` for the objective sensitivity density ``s``,
then shifts and clamps ``phi`` back onto the positive-part volume.
"""

import logging
import time
from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp

from . import assembly as asm
from .errors import InvalidArgument
from .history import ConvergenceHistory, HistoryRow
from .opt_density import project_volume, resolve_tau
from .problem import build_problem, evaluate_design, intermediate_fraction

log = logging.getLogger(__name__)


@dataclass
class LevelSetState:
    phi: np.ndarray
    iteration: int
    energy: float
    objective: float
    volume_error: float
    step_change: float
    intermediate_fraction: float
    epsilon: float
    q: float
    m: int
    converged: bool
    u: np.ndarray
    tau: float
    theta: np.ndarray  # element material fraction, vertex mean of phi_+ ** m


def smoothed_characteristic(phi, width=0.1):
    """``0.5 tanh(phi / width) + 0.5``, evaluated so that ``chi(-phi) == 1 - chi(phi)`` bit for bit."""
    if not width > 0:
        raise InvalidArgument("smoothing width must be positive")
    phi = np.asarray(phi, dtype=float)
    c = 0.5 * np.tanh(np.abs(phi) / width) + 0.5  # in [0.5, 1]; 1 - c is exact
    return np.where(phi >= 0, c, 1.0 - c)


def material_fraction(mesh, phi, m=1):
    """Element field: mean over vertices of ``phi_+ ** m``."""
    return asm.element_mean(mesh, np.maximum(phi, 0.0) ** m)


def levelset_operator(mesh, phi, tau, epsilon, q=0.95, delta_w=1e-6):
    """``(M_w / tau + eps K, diag(M_w) / tau)``; the lumped weighted mass is returned as a vector."""
    if not (tau > 0 and epsilon > 0 and 0 < q < 1 and delta_w > 0):
        raise InvalidArgument("need tau > 0, epsilon > 0, 0 < q < 1 and delta_w > 0")
    mw = mesh.lumped_mass * (np.abs(phi) + delta_w) ** (q - 1.0) / tau
    p = asm.pattern(mesh)
    K = p.matrix(asm.stiffness_data(mesh, epsilon))
    return K + sp.diags(mw, format="csr"), mw


def levelset_forcing(mesh, phi, sens, m=1, width=0.1):
    """Nodal load of ``-m phi_+^(m-1) chi(phi) sens``; vanishes where ``phi_+ = 0`` if ``m > 1``."""
    g = smoothed_characteristic(phi, width)
    if m != 1:
        g = m * np.maximum(phi, 0.0) ** (m - 1) * g
    return asm.assemble_weighted_load(mesh, -np.asarray(sens, dtype=float), g)


def levelset_step(mesh, phi, sens, tau, epsilon, q=0.95, m=1, width=0.1, delta_w=1e-6, tol=1e-10):
    """One implicit update of ``phi`` (before volume projection).

    ``epsilon`` here is the absolute diffusion coefficient; the design loop
    passes ``epsilon * S`` in relative penalty mode.
    """
    phi = np.asarray(phi, dtype=float)
    A, mw = levelset_operator(mesh, phi, tau, epsilon, q, delta_w)
    rhs = mw * phi + levelset_forcing(mesh, phi, sens, m, width)
    return asm.solve_spd(A, rhs, tol=tol, x0=phi)


def penalty_coefficient(opt, sens0):
    """Diffusion coefficient of the implicit step.

    With ``penalty_scale = sensitivity`` the configured ``epsilon`` is read in
    units of ``S = max |initial sensitivity|``, which makes the loop
    invariant under source scaling whenever the state is linear in the
    source; ``absolute`` uses ``epsilon`` as given.
    """
    if opt.penalty_scale == "absolute":
        return opt.epsilon
    smax = float(np.max(np.abs(sens0)))
    return opt.epsilon * smax if smax > 0 else opt.epsilon


def optimize_levelset(config, callback=None, problem=None):
    """Level-set design loop from ``phi = gamma``; same contract as the density optimizer."""
    opt = config.optimize
    prob = problem or build_problem(config)
    mesh = prob.mesh
    lm = mesh.lumped_mass
    phi = np.full(mesh.n_nodes, float(opt.gamma))
    hist = ConvergenceHistory()
    best = None
    tau = None
    u_prev = None
    change = 0.0
    for it in range(opt.max_iters + 1):
        t0 = time.perf_counter()
        theta = material_fraction(mesh, phi, opt.m)
        ev = evaluate_design(prob, theta, opt, u_prev)
        u_prev = ev.u
        if tau is None:
            tau = resolve_tau(opt, ev.sens, "levelset")
            eps = penalty_coefficient(opt, ev.sens)
        vol_err = abs(opt.gamma * mesh.area - float(lm @ np.maximum(phi, 0.0)))
        ifrac = intermediate_fraction(mesh, theta)
        state = LevelSetState(phi, it, ev.energy, ev.objective, vol_err, change, ifrac,
                              opt.epsilon, opt.q, opt.m, False, ev.u, tau, theta)
        converged = it > 0 and change <= opt.eta2
        state.converged = converged
        if best is None or ev.objective < best.objective:
            best = state
        if not converged and it < opt.max_iters:
            if tau > 0:
                raw = levelset_step(mesh, phi, ev.sens, tau, eps, opt.q, opt.m, opt.width, opt.delta_w)
            else:
                raw = phi
            new, _ = project_volume(raw, opt.gamma, -1.0, 1.0, opt.eta1, lm, positive_part=True)
            change_next = float(lm @ np.abs(new - phi))
        wall = (time.perf_counter() - t0) * 1e3 if config.output.timing else 0.0
        hist.append(HistoryRow(it, ev.objective, vol_err, change, ev.newton_iters, ifrac, wall))
        if callback is not None:
            callback(state)
        if converged:
            return state, hist
        if it == opt.max_iters:
            break
        phi, change = new, change_next
    log.warning("level-set optimization stopped at max_iters=%d without meeting eta2", opt.max_iters)
    return best, hist
