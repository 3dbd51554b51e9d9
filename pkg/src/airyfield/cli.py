"""Command line entry point: ``python -m airyfield <subcommand> [options]``.

Exit codes: 0 success, 2 configuration error, 3 tolerance failure,
4 bound-validity failure.
"""

import argparse
import csv
import json
import math
import os
import sys

import numpy as np

from . import bounds as bd
from . import covariance as cov
from . import montecarlo as mc
from . import simulation as sim
from . import special
from .config import ExperimentConfig, apply_overrides, load_config
from .errors import ConfigError, InfeasibleBetaError, ToleranceError

EXIT_OK, EXIT_CONFIG, EXIT_TOL, EXIT_BOUND = 0, 2, 3, 4


def _dump_json(path, payload):
    with open(path, "w") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True, default=_jsonable)
        fh.write("\n")


def _jsonable(obj):
    if isinstance(obj, (np.floating, np.integer)):
        return obj.item()
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    if isinstance(obj, np.bool_):
        return bool(obj)
    raise TypeError(f"not serialisable: {type(obj)}")


def _write_csv(path, header, rows, cfg):
    with open(path, "w", newline="") as fh:
        fh.write("# config: " + json.dumps(cfg.resolved(), sort_keys=True) + "\n")
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for r in rows:
            w.writerow([repr(float(v)) if isinstance(v, (float, np.floating)) else v for v in r])


def _grid(cfg):
    return sim.SpaceTimeGrid.rectangle(cfg.t_min, cfg.t_max, cfg.x_min, cfg.x_max, cfg.nt, cfg.nx)


def _phi(cfg):
    return bd.PhiFunction.quadratic() if cfg.phi == "quadratic" else bd.PhiFunction.power(cfg.phi_alpha)


def _ensemble(cfg, model, coeff_kind=None):
    plan = sim.plan_synthesis(model, cfg.tol, cfg.modes, cfg.dispersion_alpha)
    return sim.synthesize(plan, _grid(cfg), cfg.reps, cfg.seed, coeff_kind or cfg.coeff_kind, cfg.workers)


# --- subcommands ---------------------------------------------------------------


def cmd_simulate(cfg, out):
    model = cfg.spectral_model()
    ens = _ensemble(cfg, model)
    ens = sim.FieldEnsemble(ens.grid, ens.replicates, ens.master_seed, ens.coeff_kind, ens.plan, {"config": cfg.resolved()})
    ens.save(os.path.join(out, "ensemble.bin"))
    _dump_json(os.path.join(out, "simulate.json"), {
        "config": cfg.resolved(),
        "shape": list(ens.replicates.shape),
        "lambda_max": ens.plan.lambda_max,
        "mass_deficit": ens.plan.mass_deficit,
    })
    return EXIT_OK


def cmd_covariance(cfg, out):
    model = cfg.spectral_model()
    dts = np.linspace(0.0, cfg.t_max - cfg.t_min, cfg.nt)
    dxs = np.linspace(-(cfg.x_max - cfg.x_min), cfg.x_max - cfg.x_min, 2 * cfg.nx - 1)
    surf = cov.covariance_surface(model, dts, dxs, cfg.dispersion_alpha)
    _write_csv(os.path.join(out, "covariance.csv"), ["dt", "dx", "B"], surf.to_rows(), cfg)
    pts = np.column_stack([np.linspace(cfg.t_min, cfg.t_max, 6), np.linspace(cfg.x_min, cfg.x_max, 6)])
    psd = cov.psd_check(model, pts, cfg.dispersion_alpha)
    _dump_json(os.path.join(out, "covariance.json"), {
        "config": cfg.resolved(),
        "B00": float(surf.values[0, cfg.nx - 1]),
        "max_abs_over_B00": float(np.max(np.abs(surf.values)) / surf.values[0, cfg.nx - 1]),
        "psd": {"min_eig": psd.min_eig, "max_eig": psd.max_eig, "psd": psd.psd},
    })
    return EXIT_OK


def _bound_payload(cfg, model):
    kappa = _grid(cfg).kappa
    ctx = bd.bound_context(model, cfg.beta, kappa, cfg.c_eta, cfg.dispersion_alpha)
    phi = _phi(cfg)
    s = math.sqrt(model.total_mass)
    vs = np.linspace(0.5 * s, 20.0 * s, cfg.n_v)
    reports = {
        variant.value: bd.sup_bound_report(phi, ctx, vs, variant).as_dict() for variant in bd.A1Variant
    }
    gauss = {}
    if cfg.phi == "quadratic":
        gctx = bd.bound_context(model, cfg.beta, kappa, 1.0, cfg.dispersion_alpha)
        for ex in bd.GaussExponent:
            gauss[ex.value] = bd.sup_bound_report(phi, gctx, vs, bd.A1Variant.THM_GENERAL, ex).as_dict()
    return ctx, phi, {"context": ctx.as_dict(), "sup_bound": reports, "gaussian_exponents": gauss}


def cmd_bounds(cfg, out):
    model = cfg.spectral_model()
    _, _, payload = _bound_payload(cfg, model)
    payload["config"] = cfg.resolved()
    _dump_json(os.path.join(out, "bounds.json"), payload)
    return EXIT_OK


def _validity(cfg, model, ens, phi, ctx):
    gauss = bd.GaussExponent.CONSISTENT if cfg.phi == "quadratic" else None

    def bound(v):
        return bd.sup_tail_bound(phi, ctx, v, gauss=gauss).raw

    s = math.sqrt(model.total_mass)
    v_hi = mc.resolvable_v_max(bound, ens.n_reps, 0.1 * s, 40.0 * s)
    vs = np.linspace(0.1 * s, v_hi, cfg.n_v)
    est = mc.estimate_sup_exceedance(ens, vs)
    rows = mc.compare_report(est, [bound(v) for v in vs])
    return rows


def cmd_montecarlo(cfg, out):
    model = cfg.spectral_model()
    ctx = bd.bound_context(model, cfg.beta, _grid(cfg).kappa, cfg.c_eta, cfg.dispersion_alpha)
    ens = _ensemble(cfg, model)
    rows = _validity(cfg, model, ens, _phi(cfg), ctx)
    _write_csv(os.path.join(out, "verdict.csv"), ["v", "bound", "ci_high", "p_hat", "verdict"],
               [(r.v, r.bound, r.ci_high, r.p_hat, r.verdict) for r in rows], cfg)
    ok = all(r.verdict == "PASS" for r in rows)
    _dump_json(os.path.join(out, "montecarlo.json"), {
        "config": cfg.resolved(), "context": ctx.as_dict(), "all_pass": ok,
        "rows": [r.__dict__ for r in rows],
    })
    return EXIT_OK if ok else EXIT_BOUND


def cmd_special(cfg, out, x_min=-10.0, x_max=10.0, n=201):
    xs = np.linspace(x_min, x_max, n)
    if cfg.dispersion_alpha == 3.0:
        rows = [(x, special.airy_ai(x).value) for x in xs]
    else:
        rows = [(x, special.airy_ai_alpha(x, cfg.dispersion_alpha).value) for x in xs]
    _write_csv(os.path.join(out, "special.csv"), ["x", "value"], rows, cfg)
    return EXIT_OK


# --- validate ------------------------------------------------------------------------


def _check(name, passed, kind="tolerance", **detail):
    return {"name": name, "passed": bool(passed), "kind": kind, **detail}


def run_validation(cfg, out):
    """A compact, deterministic pass over the library's core guarantees."""
    model = cfg.spectral_model()
    alpha = cfg.dispersion_alpha
    checks = []

    # spectral covariance at zero time lag against the model's own B_eta
    xs = [0.0, 0.5, 1.0, 2.0]
    if cfg.model == "ou":
        ref = [cfg.ou_gamma**2 / 2 * math.exp(-abs(x)) for x in xs]
    else:
        ref = [cov.theoretical_cov(model, 0.0, x, alpha) for x in xs]
    got = [cov.theoretical_cov(model, 0.0, x, alpha) for x in xs]
    dev = max(abs(a - b) for a, b in zip(got, ref))
    checks.append(_check("covariance_time_marginal", dev < cfg.quad_tol, max_dev=dev))

    lags = [(dt, dx) for dt in (0.0, 0.25, 0.5) for dx in (-0.5, 0.0, 0.5)]
    dev = max(cov.msq_increment(model, dt, dx, alpha).discrepancy for dt, dx in lags)
    checks.append(_check("increment_identity", dev < cfg.quad_tol, max_dev=dev))

    rep = cov.psd_check(model, np.column_stack([np.linspace(0, 1, 8), np.linspace(1, 0, 8) ** 2]), alpha)
    checks.append(_check("psd", rep.psd, min_eig=rep.min_eig, max_eig=rep.max_eig))

    xs = np.linspace(-10, 10, 9)
    dev = max(abs(special.airy_integral(x, 3.0, "damped") - special.airy_integral(x, 3.0, "series")) for x in xs)
    checks.append(_check("airy_damped_vs_series", dev < 1e-8, max_dev=dev))

    ctx = bd.bound_context(model, cfg.beta, _grid(cfg).kappa, cfg.c_eta, alpha)
    hs = [2.0**-k for k in range(0, 6)]
    margin = min(ctx.c_beta * h**cfg.beta - cov.sigma_modulus(model, h, alpha, n=5) for h in hs)
    checks.append(_check("modulus_bound", margin >= 0, min_margin=margin))

    ens = _ensemble(cfg, model)
    ens = sim.FieldEnsemble(ens.grid, ens.replicates, ens.master_seed, ens.coeff_kind, ens.plan, {"config": cfg.resolved()})
    ens.save(os.path.join(out, "ensemble.bin"))
    g = ens.grid
    worst = 0.0
    for lag in [(0, 0), (0, 1), (1, 0), (2, 3), (0, g.x_values.size - 1)]:
        if lag[0] >= g.t_values.size or lag[1] >= g.x_values.size:
            continue
        est, se = cov.empirical_cov(ens, lag)
        dt = (g.t_values[lag[0]] - g.t_values[0]) if lag[0] else 0.0
        dx = (g.x_values[lag[1]] - g.x_values[0]) if lag[1] else 0.0
        worst = max(worst, abs(est - cov.theoretical_cov(model, dt, dx, alpha)) / se)
    checks.append(_check("simulator_covariance", worst <= cfg.mc_sigma, worst_z=worst))

    rows = _validity(cfg, model, ens, _phi(cfg), ctx)
    _write_csv(os.path.join(out, "verdict.csv"), ["v", "bound", "ci_high", "p_hat", "verdict"],
               [(r.v, r.bound, r.ci_high, r.p_hat, r.verdict) for r in rows], cfg)
    checks.append(_check("sup_bound_validity", all(r.verdict == "PASS" for r in rows), kind="bound",
                         rows=len(rows), failures=sum(r.verdict == "FAIL" for r in rows)))

    summary = {"config": cfg.resolved(), "checks": checks, "all_pass": all(c["passed"] for c in checks)}
    _dump_json(os.path.join(out, "summary.json"), summary)
    if any(not c["passed"] and c["kind"] == "bound" for c in checks):
        return EXIT_BOUND
    if not summary["all_pass"]:
        return EXIT_TOL
    return EXIT_OK


COMMANDS = {
    "simulate": cmd_simulate,
    "covariance": cmd_covariance,
    "bounds": cmd_bounds,
    "montecarlo": cmd_montecarlo,
    "special": cmd_special,
    "validate": run_validation,
}


def build_parser():
    p = argparse.ArgumentParser(prog="airyfield", description=__doc__.splitlines()[0])
    p.add_argument("subcommand", choices=sorted(COMMANDS))
    p.add_argument("--config", help="key = value configuration file (default: shipped OU config)")
    p.add_argument("--set", action="append", default=[], metavar="KEY=VALUE", help="override a config key")
    p.add_argument("--seed", type=int)
    p.add_argument("--reps", type=int)
    p.add_argument("--modes", type=int)
    p.add_argument("--tol", type=float)
    p.add_argument("--workers", type=int)
    p.add_argument("--output", help="run directory")
    return p


def resolve_config(args):
    cfg = load_config(args.config)
    apply_overrides(cfg, args.set)
    for key in ("seed", "reps", "modes", "tol", "workers", "output"):
        val = getattr(args, key)
        if val is not None:
            setattr(cfg, key, val)
    return cfg.validate()


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        cfg = resolve_config(args)
        out = cfg.output
        os.makedirs(out, exist_ok=True)
        return COMMANDS[args.subcommand](cfg, out)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except InfeasibleBetaError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except ToleranceError as exc:
        print(f"tolerance failure: {exc}", file=sys.stderr)
        return EXIT_TOL
    except OSError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
