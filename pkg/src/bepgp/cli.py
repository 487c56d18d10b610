"""Command-line entry point.

Subcommands: list, describe, validate, run, verify, bench.  Exit codes:
0 success, 1 validation failure, 2 runtime failure.  Reports land under
--out-dir (default $BEPGP_OUT_DIR or ./bepgp_out).
"""
from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

import numpy as np

from .errors import BepgpError, ConfigError
from .families import catalog_lookup, family_ids, variety_residual
from . import families as fam_mod

EXIT_OK = 0
EXIT_VALIDATION = 1
EXIT_RUNTIME = 2

VERIFY_DRAWS_VARIETY = 1000
VERIFY_DRAWS_BOUNDARY = 100
VERIFY_DRAWS_PDE = 100
TOL_VARIETY = 1e-12
TOL_BOUNDARY = 1e-10
TOL_PDE_ANALYTIC = 1e-10
TOL_PDE_FD = 1e-5


def _fail(msg, code):
    print(f"error: {msg}", file=sys.stderr)
    return code


def _pin_threads(n):
    if n is None:
        return None
    try:
        from threadpoolctl import threadpool_limits

        return threadpool_limits(limits=int(n))
    except Exception:
        for var in ("OMP_NUM_THREADS", "OPENBLAS_NUM_THREADS", "MKL_NUM_THREADS"):
            os.environ[var] = str(n)
        return None


def cmd_list(args):
    for name in family_ids():
        fam = catalog_lookup(name)
        bcs = ", ".join(f"{b.kind}" for b in fam.boundary_ops) or "none"
        print(f"{name:32s} dim={fam.dim} kind={fam.kind:10s} boundary: {bcs}")
    return EXIT_OK


def cmd_describe(args):
    try:
        fam = catalog_lookup(args.family)
    except KeyError as exc:
        return _fail(str(exc), EXIT_VALIDATION)
    print(f"family:     {fam.name}")
    print(f"kind:       {fam.kind} ({fam.free_params} parameters per element)")
    print(f"coordinates:{fam.dim} (time first)" if fam.variety != "laplace"
          else f"coordinates:{fam.dim} (spatial only)")
    print(f"operator:   {fam.variety}")
    print(f"domain:     {fam.domain_geometry}")
    for b in fam.boundary_ops:
        plane = " + ".join(
            f"{c:+g}*{n}" for c, n in zip(b.normal, "txyz"[: fam.dim]) if c
        )
        print(f"boundary:   {b.kind} on {{{plane} = {b.offset:g}}}")
    print(f"element:    {fam.formula}")
    return EXIT_OK


def _verify_family(name, seed=0):
    """Run the exactness suites for one family; returns list of check rows."""
    fam = catalog_lookup(name)
    rng = np.random.default_rng(seed)
    rows = []

    thetas = fam.sample_theta(rng, VERIFY_DRAWS_VARIETY)
    worst = max(variety_residual(fam, th) for th in thetas)
    rows.append(("variety", worst, TOL_VARIETY, worst <= TOL_VARIETY))

    worst_b = 0.0
    for bc in fam.boundary_ops:
        for th in fam.sample_theta(rng, max(1, VERIFY_DRAWS_BOUNDARY // 10)):
            pts = fam.sample_boundary(rng, 10, bc)
            for x in pts:
                worst_b = max(
                    worst_b, fam_mod.boundary_residual_element(fam, th, x, bc)
                )
    if fam.boundary_ops:
        rows.append(("boundary", worst_b, TOL_BOUNDARY, worst_b <= TOL_BOUNDARY))

    worst_p, worst_fd = 0.0, 0.0
    for th in fam.sample_theta(rng, 10):
        pts = fam.sample_interior(rng, VERIFY_DRAWS_PDE // 10, margin=0.01)
        for x in pts:
            scale = fam_mod.term_magnitude(fam, th, x)
            r = fam.apply_operator(
                lambda d: fam_mod.eval_basis(fam, th, x, d), x
            )
            worst_p = max(worst_p, abs(r) / scale)
            worst_fd = max(worst_fd, _fd_residual(fam, th, x) / scale)
    rows.append(("pde_analytic", worst_p, TOL_PDE_ANALYTIC, worst_p <= TOL_PDE_ANALYTIC))
    rows.append(("pde_fd", worst_fd, TOL_PDE_FD, worst_fd <= TOL_PDE_FD))
    return rows


def _fd_residual(fam, th, x, h=1e-3):
    def val(q):
        return fam_mod.eval_basis(fam, th, q)

    def d2(i):
        e = np.zeros(fam.dim)
        e[i] = 1.0
        return (
            -val(x + 2 * h * e) + 16 * val(x + h * e) - 30 * val(x)
            + 16 * val(x - h * e) - val(x + (-2 * h) * e)
        ) / (12 * h * h)

    def d1(i):
        e = np.zeros(fam.dim)
        e[i] = 1.0
        return (
            val(x - 2 * h * e) - 8 * val(x - h * e)
            + 8 * val(x + h * e) - val(x + 2 * h * e)
        ) / (12 * h)

    if fam.variety == "heat":
        r = d1(0) - sum(d2(i) for i in range(1, fam.dim))
    elif fam.variety == "wave":
        r = d2(0) - sum(d2(i) for i in range(1, fam.dim))
    else:
        r = d2(0) + d2(1)
    return abs(r)


def cmd_verify(args):
    targets = family_ids() if args.family == "all" else (args.family,)
    try:
        for t in targets:
            catalog_lookup(t)
    except KeyError as exc:
        return _fail(str(exc), EXIT_VALIDATION)
    all_ok = True
    for name in targets:
        for check, worst, tol, ok in _verify_family(name, seed=args.seed):
            status = "PASS" if ok else "FAIL"
            all_ok &= ok
            print(f"{status} {name:32s} {check:14s} worst={worst:.3e} tol={tol:.0e}")
    return EXIT_OK if all_ok else EXIT_RUNTIME


def _load_config(spec):
    from .experiments import ExperimentConfig, shipped_configs

    path = Path(spec)
    if path.exists():
        return ExperimentConfig.load(path)
    cat = shipped_configs()
    if spec in cat:
        return cat[spec]
    raise ConfigError(f"no config file or shipped config named {spec!r}")


def cmd_validate(args):
    try:
        cfg = _load_config(args.config)
        cfg.validate()
    except (BepgpError, OSError, KeyError, TypeError, ValueError) as exc:
        return _fail(str(exc), EXIT_VALIDATION)
    print(f"OK {cfg.name} (family {cfg.family})")
    return EXIT_OK


def cmd_run(args):
    from .experiments import run

    try:
        cfg = _load_config(args.config)
        cfg.validate()
    except (BepgpError, OSError, KeyError, TypeError, ValueError) as exc:
        return _fail(str(exc), EXIT_VALIDATION)
    limiter = _pin_threads(args.threads)
    try:
        report = run(cfg, out_dir=args.out_dir, epochs_scale=args.epochs_scale,
                     seed=args.seed)
    except BepgpError as exc:
        return _fail(str(exc), EXIT_RUNTIME)
    finally:
        if limiter is not None:
            limiter.unregister()
    if args.format == "json":
        print(report.to_json(indent=1))
    else:
        _print_report_csv(report)
    if not report.final:
        return _fail("; ".join(report.errors), EXIT_RUNTIME)
    return EXIT_OK


def _print_report_csv(report):
    print("key,value")
    print(f"name,{report.name}")
    print(f"family,{report.family}")
    print(f"n_basis,{report.n_basis}")
    for k, v in (report.metrics or {}).items():
        print(f"metrics.{k},{v}")
    for k, v in report.residuals.items():
        print(f"residuals.{k},{v}")
    if report.energy:
        print(f"energy.max_relative_drift,{report.energy['max_relative_drift']}")


def cmd_bench(args):
    from .experiments import REFERENCE_CONSTANTS, run, shipped_configs

    cat = shipped_configs()
    if args.name not in cat:
        return _fail(f"unknown benchmark {args.name!r}", EXIT_VALIDATION)
    limiter = _pin_threads(args.threads)
    try:
        report = run(cat[args.name], out_dir=args.out_dir,
                     epochs_scale=args.epochs_scale, seed=args.seed)
    except BepgpError as exc:
        return _fail(str(exc), EXIT_RUNTIME)
    finally:
        if limiter is not None:
            limiter.unregister()
    print(report.to_json(indent=1))
    ref = REFERENCE_CONSTANTS.get(args.name)
    if ref:
        print(f"reference constants: {json.dumps(ref, sort_keys=True)}")
    return EXIT_OK if report.final else EXIT_RUNTIME


def build_parser():
    ap = argparse.ArgumentParser(
        prog="bepgp",
        description="PDE-exact Gaussian process regression toolkit",
    )
    ap.add_argument("--seed", type=int, default=None, help="override config seed")
    ap.add_argument("--threads", type=int, default=None,
                    help="pin linear-algebra thread count")
    ap.add_argument("--out-dir", default=os.environ.get("BEPGP_OUT_DIR", "bepgp_out"))
    ap.add_argument("--epochs-scale", type=float, default=1.0,
                    help="multiply every schedule stage (desk-scale runs)")
    ap.add_argument("--format", choices=("json", "csv"), default="json")
    sub = ap.add_subparsers(dest="command", required=True)

    sub.add_parser("list", help="list the family catalog")
    p = sub.add_parser("describe", help="closed form and constraints of a family")
    p.add_argument("family")
    p = sub.add_parser("validate", help="check a config file or shipped name")
    p.add_argument("config")
    p = sub.add_parser("run", help="run an experiment config")
    p.add_argument("config")
    p = sub.add_parser("verify", help="exactness suites for a family or 'all'")
    p.add_argument("family")
    p = sub.add_parser("bench", help="run a shipped benchmark and print references")
    p.add_argument("name")
    return ap


def main(argv=None):
    args = build_parser().parse_args(argv)
    if args.seed is None:
        args.seed = 0 if args.command == "verify" else None
    handlers = {
        "list": cmd_list,
        "describe": cmd_describe,
        "validate": cmd_validate,
        "run": cmd_run,
        "verify": cmd_verify,
        "bench": cmd_bench,
    }
    try:
        return handlers[args.command](args)
    except BepgpError as exc:
        return _fail(str(exc), EXIT_RUNTIME)


if __name__ == "__main__":
    sys.exit(main())
