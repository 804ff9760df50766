"""Command-line interface.

Single binary, subcommand style: JSON model descriptors in, JSON/CSV
artifacts out.  Angles are radians everywhere; ``--degrees`` converts
angle *inputs* (``--theta`` values and ``--data`` files) on ingestion
only.  Every JSON output echoes the resolved configuration, including
defaulted values and the seed, so a run can be reproduced exactly from
its artifact; identical configurations produce byte-identical outputs.

Exit codes: 0 success (including the "inconsistent" characterization
verdict, which is a result, not a failure), 1 domain errors (malformed
descriptors, constraint violations, bad arguments), 2 accuracy or
resource errors (failed convergence checks, collapsed sampling
envelopes).
"""

import argparse
import json
import os
import sys

import numpy as np

from .densities import DEFAULT_GRID_N
from .descriptors import model_to_dict, read_model_file
from .errors import (
    ConstraintError,
    DomainError,
    InconsistentEvidenceError,
    TorusSkewError,
)
from .estimation import fit_mle, rate_experiment, write_rate_csv
from .fisher import DEFAULT_TOL_REL, fim_report
from .singularity import DEFAULT_INVARIANCE_TOL, characterize, verdict_to_json
from .skewing import SineSkew, sample, write_samples_csv

__all__ = ["main", "build_parser"]

PROG = "torusskew"


class _Parser(argparse.ArgumentParser):
    """argparse's usage failures are domain errors here (exit 1, not 2)."""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def build_parser():
    parser = _Parser(
        prog=PROG,
        description=(
            "Sine-skewed torus distributions: density evaluation, sampling, "
            "Fisher information at the symmetric point, singularity "
            "characterization, maximum-likelihood fitting, and "
            "convergence-rate experiments."
        ),
    )
    sub = parser.add_subparsers(dest="command", required=True, metavar="command")

    def add(name, help_text, **kwargs):
        p = sub.add_parser(name, help=help_text, description=help_text, **kwargs)
        return p

    def model_flag(p, multiple=False):
        if multiple:
            p.add_argument(
                "--model",
                action="append",
                required=True,
                metavar="FILE",
                help="JSON model descriptor (repeat for a paired design)",
            )
        else:
            p.add_argument(
                "--model",
                required=True,
                metavar="FILE",
                help="JSON model descriptor",
            )

    p = add("validate", "Check a model descriptor against its exact constraints.")
    model_flag(p)
    p.add_argument("--out", metavar="FILE", help="write the JSON report here")
    p.set_defaults(handler=cmd_validate)

    p = add("density", "Evaluate the (log-)density at given angles.")
    model_flag(p)
    p.add_argument(
        "--theta",
        action="append",
        metavar="A1,A2,...",
        help="one point as comma-separated angles (repeatable)",
    )
    p.add_argument("--data", metavar="FILE", help="CSV of points, one row each")
    p.add_argument("--degrees", action="store_true", help="inputs are in degrees")
    p.add_argument("--grid-n", type=int, default=DEFAULT_GRID_N, metavar="N",
                   help="normalization grid nodes per dimension (default %(default)s)")
    p.add_argument("--out", metavar="FILE", help="write the JSON report here")
    p.set_defaults(handler=cmd_density)

    p = add("sample", "Draw from a skewed model into a CSV (with .meta.json).")
    model_flag(p)
    p.add_argument("--n", type=int, required=True, help="number of draws")
    p.add_argument("--seed", type=int, default=0, help="RNG seed (default %(default)s)")
    p.add_argument("--threads", type=int, default=1, metavar="W",
                   help="worker streams (default %(default)s); the sample is a "
                        "deterministic function of (seed, threads), independent "
                        "of scheduling")
    p.add_argument("--out", required=True, metavar="FILE", help="output CSV path")
    p.set_defaults(handler=cmd_sample)

    p = add("fim", "Fisher information matrix at the symmetric point, with "
                   "eigenvalues, rank, and null basis.")
    model_flag(p)
    p.add_argument("--grid-n", type=int, default=DEFAULT_GRID_N, metavar="N",
                   help="quadrature nodes per dimension (default %(default)s)")
    p.add_argument("--tol", type=float, default=DEFAULT_TOL_REL,
                   help="relative eigenvalue tolerance for the rank decision "
                        "(default %(default)s)")
    p.add_argument("--out", metavar="FILE", help="write the JSON report here")
    p.set_defaults(handler=cmd_fim)

    p = add("characterize", "Singular/nonsingular verdict with a line-invariance "
                            "certificate when singular.")
    model_flag(p)
    p.add_argument("--grid-n", type=int, default=DEFAULT_GRID_N, metavar="N",
                   help="quadrature nodes per dimension (default %(default)s)")
    p.add_argument("--tol", type=float, default=DEFAULT_INVARIANCE_TOL,
                   help="certificate invariance tolerance (default %(default)s)")
    p.add_argument("--out", metavar="FILE", help="write the JSON verdict here")
    p.set_defaults(handler=cmd_characterize)

    p = add("fit", "Maximum-likelihood fit of location and skewness to data.")
    model_flag(p)
    p.add_argument("--data", required=True, metavar="FILE",
                   help="CSV of observed angles (header optional)")
    p.add_argument("--degrees", action="store_true", help="data are in degrees")
    p.add_argument("--out", metavar="FILE", help="write the JSON report here")
    p.set_defaults(handler=cmd_fit)

    p = add("rates", "RMSE-vs-n convergence experiment for one or more models "
                     "(paired seeds), CSV per model plus a JSON summary.")
    model_flag(p, multiple=True)
    p.add_argument("--n-grid", default="500,2000,8000,32000", metavar="N1,N2,...",
                   help="sample sizes (default %(default)s)")
    p.add_argument("--reps", type=int, default=200,
                   help="replications per sample size (default %(default)s)")
    p.add_argument("--seed", type=int, default=0, help="RNG seed (default %(default)s)")
    p.add_argument("--threads", type=int, default=1, metavar="W",
                   help="parallel workers (default %(default)s); any value "
                        "gives the same table")
    p.add_argument("--out", required=True, metavar="FILE",
                   help="summary JSON path; per-model CSVs are written next to it")
    p.set_defaults(handler=cmd_rates)

    return parser


def _emit(payload, out_path):
    text = json.dumps(payload, indent=2, sort_keys=True) + "\n"
    if out_path:
        with open(out_path, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _json_floats(values):
    """Non-finite floats have no strict-JSON form; emit them as null."""
    return [float(v) if np.isfinite(v) else None for v in np.asarray(values, float)]


def _read_angle_rows(path, dim, degrees):
    """Load a CSV of angles (optional header), as an (n, dim) array."""
    try:
        with open(path, "r", encoding="utf-8") as fh:
            first = fh.readline()
        skip = 1 if any(ch.isalpha() for ch in first) else 0
        data = np.loadtxt(path, delimiter=",", skiprows=skip, ndmin=2, dtype=float)
    except OSError as exc:
        raise DomainError(f"cannot read data file {path!r}: {exc}") from exc
    except ValueError as exc:
        raise DomainError(f"malformed CSV in {path!r}: {exc}") from exc
    if data.shape[1] != dim:
        raise DomainError(
            f"data file {path!r} has {data.shape[1]} columns, model has "
            f"dimension {dim}"
        )
    if degrees:
        data = np.deg2rad(data)
    return data


def _parse_theta(values, dim, degrees):
    points = []
    for item in values:
        try:
            point = [float(tok) for tok in item.split(",")]
        except ValueError as exc:
            raise DomainError(f"--theta {item!r}: {exc}") from exc
        if len(point) != dim:
            raise DomainError(
                f"--theta {item!r} has {len(point)} angles, model has "
                f"dimension {dim}"
            )
        points.append(point)
    points = np.asarray(points, dtype=float)
    if degrees:
        points = np.deg2rad(points)
    return points


def cmd_validate(args):
    config = {"command": "validate", "model": args.model, "out": args.out}
    try:
        model = read_model_file(args.model)
    except ConstraintError as exc:
        _emit(
            {
                "config": config,
                "valid": False,
                "violations": [str(v) for v in exc.violations],
            },
            args.out,
        )
        print(f"{PROG}: invalid model: {exc}", file=sys.stderr)
        return 1
    _emit(
        {
            "config": config,
            "model": model_to_dict(model),
            "valid": True,
            "violations": [],
        },
        args.out,
    )
    return 0


def cmd_density(args):
    model = read_model_file(args.model)
    pieces = []
    if args.theta:
        pieces.append(_parse_theta(args.theta, model.base.dim, args.degrees))
    if args.data:
        pieces.append(_read_angle_rows(args.data, model.base.dim, args.degrees))
    if not pieces:
        raise DomainError("density needs points: pass --theta and/or --data")
    points = np.vstack(pieces)
    log_density = np.atleast_1d(model.log_density(points, grid_N=args.grid_n))
    _emit(
        {
            "config": {
                "command": "density",
                "model": args.model,
                "theta": list(args.theta or []),
                "data": args.data,
                "degrees": bool(args.degrees),
                "grid_n": args.grid_n,
                "out": args.out,
            },
            "model": model_to_dict(model),
            "points": [[float(x) for x in row] for row in points],
            "log_density": _json_floats(log_density),
            "density": [float(x) for x in np.exp(log_density)],
        },
        args.out,
    )
    return 0


def cmd_sample(args):
    model = read_model_file(args.model)
    draws = sample(model, args.n, seed=args.seed, workers=args.threads)
    write_samples_csv(args.out, draws)
    meta_path = os.path.splitext(args.out)[0] + ".meta.json"
    _emit(
        {
            "config": {
                "command": "sample",
                "model": args.model,
                "n": args.n,
                "seed": args.seed,
                "threads": args.threads,
                "out": args.out,
            },
            "model": model_to_dict(model),
            "columns": [f"theta_{j + 1}" for j in range(draws.shape[1])],
            "rows": int(draws.shape[0]),
        },
        meta_path,
    )
    return 0


def cmd_fim(args):
    model = read_model_file(args.model)
    report = fim_report(
        model.base,
        mu=model.mu,
        grid_N=args.grid_n,
        tol_rel=args.tol,
        skew_scale=model.mechanism.score_scale,
    )
    payload = report.to_json_dict()
    payload["config"] = {
        "command": "fim",
        "model": args.model,
        "grid_n": args.grid_n,
        "tol": args.tol,
        "out": args.out,
    }
    payload["model"] = model_to_dict(model)
    _emit(payload, args.out)
    return 0


def cmd_characterize(args):
    model = read_model_file(args.model)
    try:
        verdict = characterize(
            model.base,
            grid_N=args.grid_n,
            tol=args.tol,
            skew_scale=model.mechanism.score_scale,
        )
    except InconsistentEvidenceError as exc:
        verdict = exc  # a result, not a failure
    payload = verdict_to_json(verdict)
    payload["config"] = {
        "command": "characterize",
        "model": args.model,
        "grid_n": args.grid_n,
        "tol": args.tol,
        "out": args.out,
    }
    payload["model"] = model_to_dict(model)
    _emit(payload, args.out)
    return 0


def cmd_fit(args):
    init = read_model_file(args.model)
    data = _read_angle_rows(args.data, init.base.dim, args.degrees)
    result = fit_mle(data, init)
    _emit(
        {
            "config": {
                "command": "fit",
                "model": args.model,
                "data": args.data,
                "degrees": bool(args.degrees),
                "out": args.out,
            },
            "init": model_to_dict(init),
            "model": model_to_dict(result.model),
            "log_likelihood": result.log_likelihood,
            "iterations": result.iterations,
            "function_evals": result.function_evals,
            "restarts": result.restarts,
            "converged": result.converged,
            "constraint_active": result.constraint_active,
        },
        args.out,
    )
    return 0


def _parse_n_grid(text):
    try:
        values = [int(tok) for tok in text.split(",")]
    except ValueError as exc:
        raise DomainError(f"--n-grid {text!r}: {exc}") from exc
    return values


def cmd_rates(args):
    n_grid = _parse_n_grid(args.n_grid)
    models = [read_model_file(path) for path in args.model]
    for path, model in zip(args.model, models):
        if not isinstance(model.mechanism, SineSkew):
            raise DomainError(
                f"rates requires the sine mechanism; {path!r} declares "
                f"{model.mechanism.descriptor()!r}"
            )
    stem = args.out[:-5] if args.out.endswith(".json") else args.out
    experiments = []
    for index, (path, model) in enumerate(zip(args.model, models)):
        table = rate_experiment(
            model.base,
            model.lam,
            n_grid,
            reps=args.reps,
            seed=args.seed,
            workers=args.threads,
        )
        csv_path = f"{stem}_{index + 1}_{model.base.family_name}.csv"
        write_rate_csv(csv_path, table)
        entry = table.to_json_dict()
        entry["model"] = model_to_dict(model)
        entry["model_path"] = path
        entry["csv"] = csv_path
        experiments.append(entry)
    _emit(
        {
            "config": {
                "command": "rates",
                "model": list(args.model),
                "n_grid": n_grid,
                "reps": args.reps,
                "seed": args.seed,
                "threads": args.threads,
                "out": args.out,
            },
            "experiments": experiments,
        },
        args.out,
    )
    return 0


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.handler(args)
    except DomainError as exc:
        print(f"{PROG}: error: {exc}", file=sys.stderr)
        return 1
    except TorusSkewError as exc:
        print(f"{PROG}: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
