"""Command-line driver.

    radopt solve        --config default --out out/
    radopt opt-density  --config energy_density
    radopt opt-levelset --config energy_eps1e-7 [--worst]
    radopt validate     [--seed N]

Exit codes: 0 success, 2 configuration error (including usage errors),
3 non-convergence, 1 failed validation.
"""

import argparse
import logging
import sys
from pathlib import Path

import numpy as np

from . import diagnostics as dg
from .adjoint import SensitivityMode, positive_sensitivity_rate, sensitivity, solve_adjoint
from .config import dump_config, parse_config
from .errors import ConfigError, NoConvergence
from .io import write_field_vtk, write_history, write_text_report
from .opt_density import optimize_density
from .opt_levelset import optimize_levelset
from .problem import build_problem
from .state import solve_state

log = logging.getLogger("radopt")

EXIT_OK, EXIT_FAILED, EXIT_CONFIG, EXIT_NOCONV = 0, 1, 2, 3


def _parser():
    p = argparse.ArgumentParser(prog="radopt", description="Two-material conductor optimization with radiation boundaries.")
    p.add_argument("-v", "--verbose", action="count", default=0)
    sub = p.add_subparsers(dest="command", required=True)
    for name, help_ in [("solve", "state, adjoint and energy report at theta = gamma"),
                        ("opt-density", "volume-fraction projected gradient"),
                        ("opt-levelset", "level-set doubly nonlinear diffusion"),
                        ("validate", "run the built-in invariant checks")]:
        s = sub.add_parser(name, help=help_)
        s.add_argument("--config", default="default", help="config file or shipped config name")
        s.add_argument("--out", help="output directory (overrides output.directory)")
        s.add_argument("--worst", action="store_true", help="maximize the energy with swapped materials")
        s.add_argument("--seed", type=int, default=0, help="seed for randomized checks (validate only)")
    return p


def _load(args):
    cfg = parse_config(args.config)
    if args.out:
        cfg.output.directory = args.out
    if args.worst:
        cfg.optimize.worst = True
    if args.command == "opt-density":
        cfg.optimize.mode = "density"
    elif args.command == "opt-levelset":
        cfg.optimize.mode = "levelset"
    cfg.validate()
    out = Path(cfg.output.directory)
    out.mkdir(parents=True, exist_ok=True)
    (out / "config.cfg").write_text(dump_config(cfg))
    return cfg, out


def cmd_solve(cfg, out):
    prob = build_problem(cfg)
    mesh, phys, opt = prob.mesh, prob.phys, cfg.optimize
    theta = np.full(mesh.n_triangles, opt.gamma)
    kappa = phys.kappa(theta, worst=opt.worst)
    sol = solve_state(mesh, kappa, prob.f, phys, eta3=opt.eta3, max_newton=opt.max_newton)
    assumption = dg.check_assumption_u(mesh, sol.u)
    fields = {"u": sol.u}
    if not assumption.flagged:
        v = solve_adjoint(mesh, kappa, prob.f, sol.u, phys)
        fields["v"] = v
        fields["sensitivity"] = sensitivity(mesh, sol.u, v, phys, SensitivityMode.ADJOINT)
    else:
        log.warning("state vanishes on the radiative boundary; adjoint skipped")
    fields["theta"] = theta
    fields["kappa"] = kappa
    write_field_vtk(mesh, fields, out / "u.vtk", kinds={"u": "point", "v": "point", "theta": "cell",
                                                         "kappa": "cell", "sensitivity": "cell"})
    rep = dg.energy_balance(mesh, kappa, sol.u, prob.f, phys)
    lines = rep.lines() + [
        f"newton_iters = {sol.newton_iters}",
        f"newton_residual = {sol.final_residual!r}",
        f"max_u = {assumption.max_u!r}",
        f"min_radiative_u = {assumption.min_radiative!r}",
        f"positive_boundary_fraction = {assumption.positive_fraction!r}",
        f"assumption_flagged = {str(assumption.flagged).lower()}",
    ]
    if "sensitivity" in fields:
        lines.append(f"positive_sensitivity_rate = {positive_sensitivity_rate(mesh, fields['sensitivity'])!r}")
    write_text_report(out / "energy_report.txt", lines)
    return EXIT_OK


def _run_optimizer(cfg, out, levelset):
    stride = cfg.output.snapshot_stride
    prob = build_problem(cfg)
    mesh = prob.mesh
    kinds = {"phi": "point", "u": "point", "theta": "cell"}

    def snapshot(state):
        if stride and state.iteration % stride == 0:
            name = "phi" if levelset else "theta"
            fields = {"phi": state.phi} if levelset else {}
            fields["theta"] = state.theta
            fields["u"] = state.u
            write_field_vtk(mesh, fields, out / f"{name}_{state.iteration:05d}.vtk", kinds=kinds)

    run = optimize_levelset if levelset else optimize_density
    state, hist = run(cfg, callback=snapshot, problem=prob)
    write_history(hist, out / "history.csv")
    fields = {"phi": state.phi} if levelset else {}
    fields["theta"] = state.theta
    fields["u"] = state.u
    write_field_vtk(mesh, fields, out / ("phi.vtk" if levelset else "theta.vtk"), kinds=kinds)
    summary = [
        f"mode = {cfg.optimize.mode}",
        f"converged = {str(state.converged).lower()}",
        f"iteration = {state.iteration}",
        f"iterations_run = {hist[-1].iter}",
        f"energy = {state.energy!r}",
        f"objective = {state.objective!r}",
        f"volume_error = {state.volume_error!r}",
        f"tau = {state.tau!r}",
        f"intermediate_fraction = {hist[state.iteration].intermediate_fraction!r}",
    ]
    write_text_report(out / "summary.txt", summary)
    return EXIT_OK if state.converged else EXIT_NOCONV


def cmd_validate(cfg, out, seed):
    from .validation import run_checks

    results = run_checks(seed=seed)
    lines = [f"{'PASS' if ok else 'FAIL'} {name}: {detail}" for name, ok, detail in results]
    write_text_report(out / "validate.txt", lines)
    for line in lines:
        print(line)
    return EXIT_OK if all(ok for _, ok, _ in results) else EXIT_FAILED


def run_cli(argv=None):
    parser = _parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:  # argparse exits 2 on usage errors
        return int(exc.code or 0)
    logging.basicConfig(level=logging.WARNING - 10 * min(args.verbose, 2), format="%(levelname)s %(name)s: %(message)s")
    try:
        cfg, out = _load(args)
        if args.command == "solve":
            return cmd_solve(cfg, out)
        if args.command == "validate":
            return cmd_validate(cfg, out, args.seed)
        return _run_optimizer(cfg, out, levelset=args.command == "opt-levelset")
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except NoConvergence as exc:
        print(f"no convergence: {exc}", file=sys.stderr)
        return EXIT_NOCONV


def main():
    sys.exit(run_cli())


if __name__ == "__main__":
    main()
