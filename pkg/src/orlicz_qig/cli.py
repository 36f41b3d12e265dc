"""
Command-line front end: ``orlicz-qig {model,compute,verify,sweep}``.

Every subcommand can write a JSON run report with ``--report``; ``--json``
prints that report to stdout in place of the human-readable summary.  The
exit status is 0 on success, 1 when a check fails or a computation raises,
and 2 on a usage error.
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import sys
import time
from pathlib import Path

import numpy as np

from . import __version__
from .bkm import bkm_inner, relative_entropy, von_neumann_entropy
from .duality import CotangentVector, conjugate_phi, dual_luxemburg_norm
from .linalg import hermitian
from .quantum_young import luxemburg_norm, phi
from .recipes import RECIPES, SWEEP_QUANTITIES, Recipe, sweep
from .report import RunReport
from .states import (
    gibbs_model,
    load_model,
    make_oscillator,
    make_random_model,
    matrix_from_dict,
    perturb,
    save_model,
)
from .suites import DEFAULT_TOLERANCES, SUITES, criterion_status, run_suites

TASKS = ("phi", "norm", "dualnorm", "bkm", "entropy", "conjugate")


def parse_dims(text: str) -> list[int]:
    """``"2,4,8"`` or ``"4-32"`` or a mix such as ``"2,4-6"``."""
    dims = []
    for part in text.split(","):
        part = part.strip()
        if "-" in part:
            lo, hi = (int(p) for p in part.split("-", 1))
            dims.extend(range(lo, hi + 1))
        elif part:
            dims.append(int(part))
    if not dims or min(dims) < 2:
        raise argparse.ArgumentTypeError(f"bad dimension list {text!r}")
    return dims


def _floats(text: str) -> tuple[float, ...]:
    try:
        return tuple(float(t) for t in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from None


def _tolerance(text: str) -> tuple[str, float]:
    name, _, value = text.partition("=")
    if name not in DEFAULT_TOLERANCES or not value:
        raise argparse.ArgumentTypeError(f"expected NAME=VALUE with a known check name, got {text!r}")
    return name, float(value)


def _add_recipe(p: argparse.ArgumentParser, prefix: str, default: str) -> None:
    p.add_argument(f"--{prefix}", default=default, choices=RECIPES,
                   help=f"perturbation recipe for {prefix.upper()} (default: {default})")
    p.add_argument(f"--{prefix}-scale", type=float, default=None,
                   help="multiplier applied to the recipe")
    p.add_argument(f"--{prefix}-seed", type=int, default=0)
    p.add_argument(f"--{prefix}-bandwidth", type=int, default=1)
    p.add_argument(f"--{prefix}-values", type=_floats, default=())
    p.add_argument(f"--{prefix}-file", default=None, help="matrix JSON for the file recipe")


def _recipe(args, prefix: str) -> Recipe:
    scale = getattr(args, f"{prefix}_scale")
    return Recipe(
        getattr(args, prefix),
        1.0 if scale is None else scale,
        getattr(args, f"{prefix}_seed"),
        getattr(args, f"{prefix}_bandwidth"),
        getattr(args, f"{prefix}_values"),
        getattr(args, f"{prefix}_file"),
    )


def _recipe_inputs(r: Recipe) -> dict:
    d = {"recipe": r.name, "scale": r.scale}
    if r.name in ("random", "banded-random"):
        d["seed"] = r.seed
    if r.name == "banded-random":
        d["bandwidth"] = r.bandwidth
    if r.name == "diag" and r.values:
        d["values"] = list(r.values)
    if r.name == "file":
        d["path"] = r.path
    return d


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="orlicz-qig",
        description="Orlicz norms, BKM geometry and duality checks for finite quantum models.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--report", default=None, help="write the JSON run report here")
        p.add_argument("--json", action="store_true", help="print the JSON report to stdout")

    p = sub.add_parser("model", help="build a Gibbs model and save it as JSON")
    p.add_argument("--family", required=True, choices=("oscillator", "random", "custom"))
    p.add_argument("--levels", type=int, help="oscillator truncation")
    p.add_argument("--dim", type=int, help="random model dimension")
    p.add_argument("--omega", type=float, default=1.0)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--scale", type=float, default=1.0, help="random model scale")
    p.add_argument("--energies", type=_floats, help="custom raw energies, comma separated")
    p.add_argument("--out", default=None, help="model JSON path")
    common(p)

    p = sub.add_parser("compute", help="evaluate one quantity on a saved model")
    p.add_argument("--model", required=True, help="model JSON written by 'model'")
    p.add_argument("--task", required=True, choices=TASKS)
    _add_recipe(p, "x", "zero")
    _add_recipe(p, "y", "zero")
    p.add_argument("--scale", type=float, default=None, help="alias for --x-scale")
    p.add_argument("--sigma-file", default=None,
                   help="density matrix JSON; default is the perturbed state rho_X")
    p.add_argument("--a", type=float, default=1.0, help="Luxemburg threshold")
    p.add_argument("--prefactor", type=float, default=0.5, help="BKM prefactor")
    p.add_argument("--max-iter", type=int, default=500)
    p.add_argument("--tol", type=float, default=1e-8, help="conjugate gradient-norm tolerance")
    common(p)

    p = sub.add_parser("verify", help="run property suites")
    p.add_argument("--suite", default="all", choices=SUITES + ("all",))
    p.add_argument("--trials", type=int, default=100)
    p.add_argument("--dims", type=parse_dims, default=[2, 4, 8, 16])
    p.add_argument("--seed", type=int, default=42)
    p.add_argument("--tolerance", type=_tolerance, action="append", default=[],
                   metavar="NAME=VALUE", help="override one check tolerance (repeatable)")
    p.add_argument("--workers", type=int, default=None,
                   help="parallel workers (default: ORLICZ_QIG_THREADS or 1)")
    common(p)

    p = sub.add_parser("sweep", help="follow one quantity across truncation dimensions")
    p.add_argument("--family", default="oscillator", choices=("oscillator", "random"))
    p.add_argument("--dims", type=parse_dims, default=list(range(4, 33)))
    p.add_argument("--quantity", required=True, choices=SWEEP_QUANTITIES)
    _add_recipe(p, "x", "identity")
    p.add_argument("--omega", type=float, default=1.0)
    p.add_argument("--seed", type=int, default=0, help="random family seed")
    p.add_argument("--a", type=float, default=1.0)
    p.add_argument("--beta", type=float, default=0.5)
    p.add_argument("--b", type=float, default=1.0, help="Kato profile shift")
    p.add_argument("--out", default=None, help="CSV path (default: stdout)")
    p.add_argument("--report", default=None, help="write the JSON run report here")
    return parser


def _emit(report: RunReport, args, lines: list[str]) -> None:
    if not report.timing_ms:
        report.timing_ms = 1e3 * (time.perf_counter() - args.start)
    if args.report:
        report.save(args.report)
    if args.json:
        print(report.to_json())
    else:
        for line in lines:
            print(line)


def cmd_model(args, parser) -> int:
    if args.family == "oscillator":
        if args.levels is None:
            parser.error("--levels is required for the oscillator family")
        m = make_oscillator(args.levels, args.omega)
    elif args.family == "random":
        if args.dim is None:
            parser.error("--dim is required for the random family")
        m = make_random_model(args.dim, args.seed, args.scale)
    else:
        if not args.energies:
            parser.error("--energies is required for the custom family")
        m = gibbs_model(np.diag(args.energies), "custom", {"energies": list(args.energies)})
    if args.out:
        save_model(m, args.out)
    shift = m.family_params["shift"]
    lines = [f"family {m.family}  dim {m.dim}  shift {shift:.10g}",
             f"{'beta':>6} {'Tr rho0^beta':>16}"]
    lines += [f"{b:6.1f} {v:16.10g}" for b, v in m.beta_profile]
    if args.out:
        lines.append(f"wrote {args.out}")
    inputs = {"family": args.family, "levels": args.levels, "dim": args.dim,
              "omega": args.omega, "seed": args.seed, "scale": args.scale,
              "energies": list(args.energies) if args.energies else None, "out": args.out}
    results = {"shift": shift, "dim": float(m.dim)}
    results.update({f"trace_rho0_beta_{b:.1f}": v for b, v in m.beta_profile})
    _emit(RunReport("model", inputs, results), args, lines)
    return 0


def _sigma(args, m, x) -> np.ndarray:
    if args.sigma_file:
        sigma = matrix_from_dict(json.loads(Path(args.sigma_file).read_text()))
        if sigma.shape != (m.dim, m.dim):
            raise ValueError(f"density file has dimension {sigma.shape[0]}, model has {m.dim}")
        return sigma
    return perturb(m, x).rho_x


def cmd_compute(args, parser) -> int:
    if args.scale is not None:
        if args.x_scale is not None:
            parser.error("give --scale or --x-scale, not both")
        args.x_scale = args.scale
    m = load_model(args.model)
    x = hermitian(_recipe(args, "x").build(m))
    inputs = {"model": args.model, "task": args.task, "x": _recipe_inputs(_recipe(args, "x"))}
    results: dict[str, float] = {}
    if args.task == "phi":
        results["phi"] = phi(m, x).value
    elif args.task == "norm":
        inputs["a"] = args.a
        results["norm"] = luxemburg_norm(m, x, args.a)
    elif args.task == "bkm":
        y = hermitian(_recipe(args, "y").build(m))
        inputs["y"] = _recipe_inputs(_recipe(args, "y"))
        inputs["prefactor"] = args.prefactor
        results["bkm"] = bkm_inner(m.rho0, x, y, args.prefactor)
    else:
        sigma = _sigma(args, m, x)
        inputs["sigma_file"] = args.sigma_file
        if args.task == "entropy":
            results["relative_entropy_sigma_rho0"] = relative_entropy(sigma, m.rho0)
            results["relative_entropy_rho0_sigma"] = relative_entropy(m.rho0, sigma)
            results["von_neumann_sigma"] = von_neumann_entropy(sigma)
            results["von_neumann_rho0"] = von_neumann_entropy(m.rho0)
        elif args.task == "conjugate":
            res = conjugate_phi(m, CotangentVector.from_state(m, sigma),
                                max_iter=args.max_iter, tol=args.tol)
            results.update(conjugate=res.value, iterations=float(res.iterations),
                           grad_norm=res.grad_norm, converged=float(res.converged))
        else:
            inputs["a"] = args.a
            results["dualnorm"] = dual_luxemburg_norm(m, CotangentVector.from_state(m, sigma), args.a)
    report = RunReport("compute", inputs, results)
    _emit(report, args, [f"{k} = {v:.12g}" for k, v in results.items()])
    return 0


def cmd_verify(args, parser) -> int:
    tolerances = dict(args.tolerance)
    checks, elapsed = run_suites(args.suite, args.trials, args.dims, args.seed, tolerances,
                                 args.workers)
    status = criterion_status(checks)
    results = {f"criterion_{k}": float(v) for k, v in sorted(status.items())}
    inputs = {"suite": args.suite, "trials": args.trials, "dims": list(args.dims),
              "seed": args.seed, "tolerances": tolerances}
    report = RunReport("verify", inputs, results, checks, elapsed)
    lines = []
    for c in checks:
        where = "all dims" if c.dim is None else f"dim {c.dim}"
        lines.append(f"{'PASS' if c.passed else 'FAIL'}  {c.name:<28} {where:<9} "
                     f"worst margin {c.margin: .3e}  tol {c.tolerance:.0e}")
    lines += [f"criterion {k:>2}: {'PASS' if v else 'FAIL'}" for k, v in sorted(status.items())]
    lines.append(f"{sum(c.passed for c in checks)}/{len(checks)} checks passed "
                 f"in {elapsed / 1e3:.1f} s")
    _emit(report, args, lines)
    return 0 if report.ok else 1


def cmd_sweep(args, parser) -> int:
    recipe = _recipe(args, "x")
    if not recipe.extendable:
        parser.error("the file recipe cannot be rebuilt at other dimensions; "
                     "use identity, scaled-h0, diag, random or banded-random")
    rows = sweep(args.family, args.dims, args.quantity, recipe, omega=args.omega, seed=args.seed,
                 a=args.a, beta=args.beta, b=args.b)
    handle = open(args.out, "w", newline="") if args.out else sys.stdout
    try:
        w = csv.writer(handle, lineterminator="\n")
        w.writerow(["dim", "value", "drift"])
        for d, v, drift in rows:
            w.writerow([d, repr(v), "" if math.isnan(drift) else repr(drift)])
    finally:
        if args.out:
            handle.close()
    inputs = {"family": args.family, "dims": list(args.dims), "quantity": args.quantity,
              "x": _recipe_inputs(recipe), "omega": args.omega, "seed": args.seed,
              "a": args.a, "beta": args.beta, "b": args.b}
    results = {f"value_dim_{d}": v for d, v, _ in rows}
    report = RunReport("sweep", inputs, results, timing_ms=1e3 * (time.perf_counter() - args.start))
    if args.report:
        report.save(args.report)
    return 0


COMMANDS = {"model": cmd_model, "compute": cmd_compute, "verify": cmd_verify, "sweep": cmd_sweep}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    args.start = time.perf_counter()
    try:
        return COMMANDS[args.command](args, parser)
    except (ValueError, ArithmeticError, RuntimeError, OSError) as exc:
        print(f"orlicz-qig {args.command}: error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
