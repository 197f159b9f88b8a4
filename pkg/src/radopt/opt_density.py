"""Projected-gradient optimization of the strong-material volume fraction."""

import logging
import time
from dataclasses import dataclass

import numpy as np

from .errors import InfeasibleVolume, InvalidArgument, ToleranceNotMet
from .history import ConvergenceHistory, HistoryRow
from .problem import build_problem, evaluate_design, intermediate_fraction

log = logging.getLogger(__name__)


@dataclass
class DensityState:
    theta: np.ndarray
    iteration: int
    energy: float
    objective: float
    volume_error: float
    step_change: float
    converged: bool
    u: np.ndarray
    tau: float


def density_step(theta, sensitivity, tau):
    """Raw steepest-descent update ``theta - tau * sensitivity`` (no clamping)."""
    if tau < 0:
        raise InvalidArgument("step width must be nonnegative")
    return np.asarray(theta, dtype=float) - tau * np.asarray(sensitivity, dtype=float)


def project_volume(field, gamma, lo, hi, eta1, weights, positive_part=False, max_iter=200):
    """Shift-and-clamp ``field`` onto the volume constraint.

    Finds ``lam`` with ``|gamma |Omega| - sum w g(clip(field + lam, lo, hi))| <= eta1``
    where ``g`` is the identity or, with ``positive_part``, ``max(., 0)``;
    ``weights`` are element areas or lumped nodal masses.  The clamped mass
    is monotone in ``lam``, so bisection converges; it is run until the
    bracket collapses to machine width, which makes the result
    deterministic and continuous in the data.
    """
    field = np.asarray(field, dtype=float)
    w = np.asarray(weights, dtype=float)
    if field.shape != w.shape:
        raise InvalidArgument("field and weights must have the same shape")
    target = gamma * w.sum()

    def clamp(lam):
        return np.clip(field + lam, lo, hi)

    def mass(lam):
        c = clamp(lam)
        return float(w @ (np.maximum(c, 0.0) if positive_part else c))

    g_lo, g_hi = (max(lo, 0.0), max(hi, 0.0)) if positive_part else (lo, hi)
    if not (g_lo * w.sum() - eta1 <= target <= g_hi * w.sum() + eta1):
        raise InfeasibleVolume(f"volume {target:.6g} not attainable within [{lo}, {hi}] clamps")

    if abs(mass(0.0) - target) <= 1e-12 * w.sum():
        return clamp(0.0), 0.0
    span = hi - lo
    a = min(-span, lo - field.max())
    b = max(span, hi - field.min())
    for _ in range(max_iter):
        mid = 0.5 * (a + b)
        if not a < mid < b:
            break
        if mass(mid) < target:
            a = mid
        else:
            b = mid
    lam = 0.5 * (a + b)
    err = abs(mass(lam) - target)
    if err > eta1:
        raise ToleranceNotMet(f"volume projection error {err:.3e} exceeds eta1={eta1:.3e}", achieved=err)
    return clamp(lam), lam


TAU_FRACTION = {"density": 0.05, "levelset": 1.0}


def resolve_tau(opt, sens0, method):
    """Configured step width, or ``tau_fraction / max |sens0|`` (0 if the sensitivity vanishes)."""
    if opt.tau is not None:
        return float(opt.tau)
    frac = TAU_FRACTION[method] if opt.tau_fraction is None else opt.tau_fraction
    smax = float(np.max(np.abs(sens0)))
    return frac / smax if smax > 0 else 0.0


def optimize_density(config, callback=None, problem=None):
    """Projected gradient descent on the volume fraction.

    Starts from ``theta = gamma`` and stops once the L1 change of an update
    is at most ``eta2``.  Returns ``(DensityState, ConvergenceHistory)``;
    when ``max_iters`` is reached the best design seen so far is returned
    with ``converged = False``.  ``callback(state)`` is called after every
    state evaluation.
    """
    opt = config.optimize
    prob = problem or build_problem(config)
    mesh = prob.mesh
    area = mesh.element_area
    theta = np.full(mesh.n_triangles, float(opt.gamma))
    hist = ConvergenceHistory()
    best = None
    tau = None
    u_prev = None
    change = 0.0
    for it in range(opt.max_iters + 1):
        t0 = time.perf_counter()
        ev = evaluate_design(prob, theta, opt, u_prev)
        u_prev = ev.u
        if tau is None:
            tau = resolve_tau(opt, ev.sens, "density")
        vol_err = abs(opt.gamma * mesh.area - float(area @ theta))
        state = DensityState(theta, it, ev.energy, ev.objective, vol_err, change, False, ev.u, tau)
        converged = it > 0 and change <= opt.eta2
        if converged:
            state.converged = True
        if best is None or ev.objective < best.objective:
            best = state
        if not converged and it < opt.max_iters:
            raw = density_step(theta, ev.sens, tau)
            new, _ = project_volume(raw, opt.gamma, 0.0, 1.0, opt.eta1, area)
            change_next = float(area @ np.abs(new - theta))
        wall = (time.perf_counter() - t0) * 1e3 if config.output.timing else 0.0
        hist.append(HistoryRow(it, ev.objective, vol_err, change, ev.newton_iters,
                               intermediate_fraction(mesh, theta), wall))
        if callback is not None:
            callback(state)
        if converged:
            return state, hist
        if it == opt.max_iters:
            break
        if it > 0 and ev.objective > hist[-2].energy:
            log.debug("objective increased at iteration %d", it)
        theta, change = new, change_next
    log.warning("density optimization stopped at max_iters=%d without meeting eta2", opt.max_iters)
    best.converged = False
    return best, hist

