"""Command-line interface.

Subcommands: ``run`` (single EA run), ``experiment`` (preset batches),
``check`` (assumption report and oracle spot queries), ``dist`` (tail and
tail-ratio tables).  Exit codes: 0 = completed, including censored runs and
FAIL reports (scientific outcomes are data, not process failures); 2 = usage
error; 3 = I/O error.  Output files are written atomically and are
byte-identical across repeated invocations with identical flags.
"""

from __future__ import annotations

import argparse
import io
import json
import math
import os
import sys

from . import ea, experiments, oracle, prf
from .distributions import (
    DistributionError,
    TailVanishesError,
    format_spec,
    parse_spec,
    sigma_ratio,
    tail,
)
from .landscape import FrozenLandscape

OUTPUT_DIR_ENV = "DISOM_OUT"
_LONG_RUN_EVALS = 10**8  # per-run worst case above which --allow-long is required


class _CliError(Exception):
    """Usage-level failure raised after parsing; converted to exit code 2."""


def _atomic_write(path: str, data: str) -> None:
    tmp = path + ".tmp"
    with open(tmp, "w", newline="") as f:
        f.write(data)
    os.replace(tmp, path)


def _out_dir(args) -> str:
    directory = args.out or os.environ.get(OUTPUT_DIR_ENV) or "."
    os.makedirs(directory, exist_ok=True)
    return directory


def _json_dumps(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True) + "\n"


def _parse_dist(text: str):
    try:
        return parse_spec(text)
    except DistributionError as e:
        raise _CliError(str(e))


# --- run -----------------------------------------------------------------------

def run_config_from_dict(data: dict) -> tuple[FrozenLandscape, ea.EAConfig]:
    """Rebuild the landscape and EA config from a result.json "config" block."""
    dist = parse_spec(data["dist"])
    seed = int(data["seed"])
    land_seed = prf.derive_seed(seed, "landscape")
    rng_seed = prf.derive_seed(seed, "rng")
    L = FrozenLandscape(n=int(data["n"]), p=float(data["p"]), dist=dist, seed=land_seed)
    config = ea.EAConfig(
        variant=data["algo"],
        n=int(data["n"]),
        lam=int(data["lambda"]),
        kstar=float(data["kstar"]),
        cutoff_generations=int(data["cutoff"]),
        rng_seed=rng_seed,
        dense_trace=bool(data.get("dense_trace", False)),
    )
    return L, config


def _result_payload(result: ea.RunResult, config_block: dict) -> dict:
    return {
        "config": config_block,
        "prf_version": prf.PRF_VERSION,
        "success": result.success,
        "generations": result.generations,
        "evaluations": result.evaluations,
        "final": {
            "om": result.final.om,
            "distorted": result.final.distorted,
            "distortion": result.final.distortion,
            "total": result.final.total,
        },
        "om_reached_target": result.om_reached_target,
        "max_mutation_flips": result.max_mutation_flips,
        "trace_rows": len(result.trace),
    }


def _cmd_run(args) -> int:
    if args.dense_trace and args.cutoff > 10**7:
        raise _CliError("--dense-trace stores every generation; refuse cutoffs above 1e7")
    config_block = {
        "algo": args.algo,
        "n": args.n,
        "lambda": args.lam,
        "p": args.p,
        "kstar": args.kstar,
        "dist": format_spec(_parse_dist(args.dist)),
        "seed": args.seed,
        "cutoff": args.cutoff,
        "dense_trace": args.dense_trace,
    }
    try:
        L, config = run_config_from_dict(config_block)
    except ValueError as e:
        raise _CliError(str(e))
    result = ea.run(L, config, engine=args.engine)
    out = _out_dir(args)
    buf = io.StringIO()
    ea.write_trace_csv(result, config, buf)
    _atomic_write(os.path.join(out, "trace.csv"), buf.getvalue())
    _atomic_write(os.path.join(out, "result.json"), _json_dumps(_result_payload(result, config_block)))
    status = "success" if result.success else "censored"
    print(
        f"{args.algo} n={args.n} lambda={args.lam}: {status} after "
        f"{result.generations} generations ({result.evaluations} evaluations), "
        f"final total {result.final.total:.6g}"
    )
    return 0


# --- experiment ------------------------------------------------------------------

def _cmd_experiment(args) -> int:
    if args.config:
        try:
            with open(args.config) as f:
                config = experiments.ExperimentConfig.from_dict(json.load(f))
        except (OSError, json.JSONDecodeError) as e:
            raise _CliError(f"cannot read config {args.config!r}: {e}")
        if args.preset not in ("custom", config.preset):
            raise _CliError(f"--preset {args.preset!r} conflicts with config preset {config.preset!r}")
    elif args.preset == "custom":
        raise _CliError("--preset custom requires --config FILE")
    else:
        config = experiments.preset(args.preset, scale=args.scale)
    if args.runs is not None:
        config = experiments.ExperimentConfig.from_dict({**config.as_dict(), "runs": args.runs})
    config = experiments.ExperimentConfig.from_dict(
        {**config.as_dict(), "master_seed": args.master_seed}
    )

    worst = 1 + max(
        (cell.lam * cell.cutoff_generations for cell in experiments.expand_cells(config)),
        default=0,
    )
    if worst > _LONG_RUN_EVALS and not args.allow_long:
        raise _CliError(
            f"worst-case single run needs {worst:.3g} evaluations; pass --allow-long "
            f"to accept a potentially very long run, or reduce --scale"
        )

    out = _out_dir(args)
    _atomic_write(
        os.path.join(out, "experiment_config.json"), _json_dumps(config.as_dict())
    )
    jobs = args.jobs if args.jobs is not None else os.cpu_count()

    if config.preset == "fig1":
        land_seed = prf.derive_seed(config.master_seed, "fig1/landscape")
        for algo in config.algorithms:
            L = FrozenLandscape(
                n=config.n, p=config.p, dist=config.distribution, seed=land_seed
            )
            run_config = ea.EAConfig(
                variant=algo,
                n=config.n,
                lam=config.lam,
                kstar=config.kstar,
                cutoff_generations=config.cutoff_generations,
                rng_seed=prf.derive_seed(config.master_seed, f"fig1/{algo}/rng"),
            )
            result = ea.run(L, run_config, engine=args.engine)
            buf = io.StringIO()
            ea.write_trace_csv(result, run_config, buf)
            _atomic_write(os.path.join(out, f"trace_{algo}.csv"), buf.getvalue())
            block = {
                "algo": algo,
                "n": config.n,
                "lambda": config.lam,
                "p": config.p,
                "kstar": config.kstar,
                "dist": format_spec(config.distribution),
                "seed": config.master_seed,
                "cutoff": config.cutoff_generations,
                "dense_trace": False,
            }
            _atomic_write(
                os.path.join(out, f"result_{algo}.json"),
                _json_dumps(_result_payload(result, block)),
            )
            status = "success" if result.success else "censored"
            print(f"fig1 {algo}: {status} after {result.generations} generations")
        return 0

    cell_results = experiments.run_batch(config, jobs=jobs, engine=args.engine)
    for cr in cell_results:
        s = cr.stats
        label = f"n={s.n} {s.algorithm} {s.distribution} p={s.p:.4g}"
        if s.trunc_cutoff is not None:
            label += f" d={s.trunc_cutoff:g}"
        print(
            f"{label}: median={s.median_generations:g} mean={s.mean_generations:.6g} "
            f"censored={s.censored}/{s.runs}"
        )
    if config.p_cutoff_pairs:
        buf = io.StringIO()
        experiments.write_normalized_csv(cell_results, buf)
        _atomic_write(os.path.join(out, "normalized.csv"), buf.getvalue())
    else:
        buf = io.StringIO()
        experiments.write_median_csv(cell_results, buf)
        _atomic_write(os.path.join(out, "median.csv"), buf.getvalue())
    return 0


# --- check ------------------------------------------------------------------------

def _parse_gain(text: str) -> oracle.LayerQuery:
    values: dict[str, int] = {}
    for token in text.split(","):
        key, eq, val = token.partition("=")
        key = key.strip()
        if not eq or key not in ("n", "k", "l", "t"):
            raise _CliError(f"malformed --gain token {token!r} (expected n=..,k=..,l=..,t=..)")
        try:
            values[key] = int(val)
        except ValueError:
            raise _CliError(f"non-integer value in --gain token {token!r}")
    missing = [k for k in ("n", "k", "l", "t") if k not in values]
    if missing:
        raise _CliError(f"--gain missing {missing}")
    try:
        return oracle.LayerQuery(n=values["n"], k=values["k"], ell=values["l"], t=values["t"])
    except ValueError as e:
        raise _CliError(str(e))


def _cmd_check(args) -> int:
    if args.gain:
        q = _parse_gain(args.gain)
        prob = oracle.fitness_gain_prob(q)
        print(f"Pr[gain >= {q.t} | {q.ell} flips, k={q.k}, n={q.n}] = {prob:.17g}")
        if not (args.n and args.dist):
            return 0
    required = {"--n": args.n, "--kstar": args.kstar, "--lambda": args.lam, "--p": args.p, "--dist": args.dist}
    missing = [flag for flag, value in required.items() if value is None]
    if missing:
        raise _CliError(f"assumption report requires {', '.join(missing)}")
    dist = _parse_dist(args.dist)
    d_values = _d_grid(args.d_max, args.step)
    report = experiments.check_assumptions(
        n=args.n, kstar=args.kstar, lam=args.lam, p=args.p, dist=dist,
        epsilon=args.epsilon, d_values=d_values,
    )
    print(f"eta = {report.eta:.6f}   q = eta^-lambda = {report.q:.6g}")
    print(
        f"lambda window: {report.lambda_lower:.4f} <= lambda <= {report.lambda_upper:.4f} "
        f"(lambda = {args.lam})"
    )
    if report.sigma_violation_d is None:
        print(f"sigma estimate over d <= {args.d_max:g}: {report.sigma_estimate:.6g}")
    else:
        print(f"tail vanishes at d = {report.sigma_violation_d:g} (bounded support)")
    for f in report.flags:
        status = "PASS" if f.passed else "FAIL"
        advisory = " (advisory)" if f.advisory else ""
        print(f"  [{status}] {f.name}{advisory}: {f.reason}")
    if args.json:
        payload = {
            "config": {
                "n": args.n, "kstar": args.kstar, "lambda": args.lam, "p": args.p,
                "dist": format_spec(dist), "epsilon": args.epsilon,
                "d_max": args.d_max, "step": args.step,
            },
            "report": report.as_dict(),
        }
        _atomic_write(args.json, _json_dumps(payload))
    return 0


# --- dist --------------------------------------------------------------------------

def _d_grid(d_max: float, step: float) -> list[float]:
    if d_max < 0 or step <= 0:
        raise _CliError("--d-max must be >= 0 and --step > 0")
    count = int(math.floor(d_max / step + 1e-9)) + 1
    return [i * step for i in range(count)]


def _cmd_dist(args) -> int:
    spec = _parse_dist(args.dist)
    rows = ["d,tail,sigma_ratio"]
    for d in _d_grid(args.d_max, args.step):
        t = tail(spec, d)
        try:
            ratio = f"{sigma_ratio(spec, d):.17g}"
        except TailVanishesError:
            ratio = "violation"
        rows.append(f"{d:.17g},{t:.17g},{ratio}")
    text = "\n".join(rows) + "\n"
    if args.out:
        _atomic_write(args.out, text)
    else:
        sys.stdout.write(text)
    return 0


# --- parser --------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="disom",
        description="Distorted-OneMax landscapes and (1+lambda)/(1,lambda) EA experiments.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    run_p = sub.add_parser("run", help="single EA run; writes trace.csv and result.json")
    run_p.add_argument("--algo", required=True, choices=(ea.PLUS, ea.COMMA))
    run_p.add_argument("--n", required=True, type=int)
    run_p.add_argument("--lambda", dest="lam", required=True, type=int)
    run_p.add_argument("--p", required=True, type=float)
    run_p.add_argument("--kstar", required=True, type=float)
    run_p.add_argument("--dist", required=True, help="distribution spec, e.g. exp:rate=0.4")
    run_p.add_argument("--seed", required=True, type=int)
    run_p.add_argument("--cutoff", required=True, type=int)
    run_p.add_argument("--dense-trace", action="store_true")
    run_p.add_argument("--engine", default="auto", choices=("auto", "python", "jit"))
    run_p.add_argument("--out", default=None, help=f"output directory (default ${OUTPUT_DIR_ENV} or .)")
    run_p.set_defaults(func=_cmd_run)

    exp_p = sub.add_parser("experiment", help="preset batch; writes median.csv / normalized.csv")
    exp_p.add_argument("--preset", required=True, choices=("fig1", "fig2", "fig3", "custom"))
    exp_p.add_argument("--master-seed", required=True, type=int)
    exp_p.add_argument("--scale", type=float, default=1.0, help="rescale n values and cutoff")
    exp_p.add_argument("--runs", type=int, default=None, help="override runs per cell")
    exp_p.add_argument("--jobs", type=int, default=None, help="parallel runs (default: cpu count)")
    exp_p.add_argument("--config", default=None, help="JSON ExperimentConfig (required for custom)")
    exp_p.add_argument("--allow-long", action="store_true", help="accept very long runs (e.g. full fig1)")
    exp_p.add_argument("--engine", default="auto", choices=("auto", "python", "jit"))
    exp_p.add_argument("--out", default=None)
    exp_p.set_defaults(func=_cmd_experiment)

    check_p = sub.add_parser("check", help="assumption report and oracle spot queries")
    check_p.add_argument("--n", type=int)
    check_p.add_argument("--kstar", type=float)
    check_p.add_argument("--lambda", dest="lam", type=int)
    check_p.add_argument("--p", type=float)
    check_p.add_argument("--dist")
    check_p.add_argument("--epsilon", type=float, default=0.05)
    check_p.add_argument("--d-max", type=float, default=10.0)
    check_p.add_argument("--step", type=float, default=0.5)
    check_p.add_argument("--gain", help="exact fitness-gain query, e.g. n=4,k=2,l=2,t=0")
    check_p.add_argument("--json", default=None, help="also write the report as JSON")
    check_p.set_defaults(func=_cmd_check)

    dist_p = sub.add_parser("dist", help="tail and tail-ratio table for a distribution")
    dist_p.add_argument("--dist", required=True)
    dist_p.add_argument("--d-max", type=float, required=True)
    dist_p.add_argument("--step", type=float, required=True)
    dist_p.add_argument("--out", default=None, help="CSV path (default: stdout)")
    dist_p.set_defaults(func=_cmd_dist)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return e.code if isinstance(e.code, int) else 2
    try:
        return args.func(args)
    except _CliError as e:
        print(f"error: {e}", file=sys.stderr)
        return 2
    except OSError as e:
        print(f"io error: {e}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
