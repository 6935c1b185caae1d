"""``gvlab`` command line.

Exit status: 0 on success, 2 for invalid flags or config values, 1 for
runtime refusals (cost or memory ceilings, a refused decay fit).
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
from pathlib import Path
from typing import Sequence

from . import __version__
from .codes import (
    CodeError,
    CodeSample,
    cumulative_enumerator,
    distance_profile_about,
    growth_rate,
    min_distance,
    pairwise_distance_distribution,
    read_code,
    weight_distribution,
    write_code,
    code_rate,
)
from .experiments import (
    CostCeilingExceeded,
    DecayFitError,
    ExperimentConfig,
    STATISTICS,
    critical_decay_config,
    fit_critical_decay,
    run_sweep,
    to_csv,
    to_jsonl,
)
from .field import FieldError, default_alphabet
from .greedy import (
    LEX,
    PERM,
    SpaceCeilingExceeded,
    finite_gv_rate_check,
    greedy_code,
    greedy_linear_code,
    verify_min_distance,
)
from .numerics import (
    GENERAL,
    LINEAR,
    beta_asymptotic,
    beta_exact,
    classify_region,
    delta0,
    entropy_q,
    gv_bound,
    gv_distance,
    kl_divergence,
    plotkin_line,
    scaled_round,
    Params,
)
from .samplers import ENSEMBLES, LINEAR_ENSEMBLES, LINEAR_INJECTIVE, SeedSpec, sample


class UsageError(Exception):
    """Invalid flag or config value (exit status 2)."""


def _fmt(x) -> str:
    if isinstance(x, float):
        if x == -math.inf:
            return "-inf"
        return "%.12g" % x
    return str(x)


def _json_value(x):
    if isinstance(x, float) and not math.isfinite(x):
        return _fmt(x)
    return x


def _emit(text: str, out: str | None) -> None:
    if out and out != "-":
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def _int_list(text: str, flag: str) -> list[int]:
    try:
        return [int(tok) for tok in str(text).split(",") if tok.strip()]
    except ValueError:
        raise UsageError(f"{flag}: expected comma-separated integers, got {text!r}") from None


def _float_list(text: str, flag: str) -> list[float]:
    try:
        return [float(tok) for tok in str(text).split(",") if tok.strip()]
    except ValueError:
        raise UsageError(f"{flag}: expected comma-separated numbers, got {text!r}") from None


# -- subcommands --


def cmd_bounds(args) -> int:
    q = args.q
    lines = [("q", q), ("delta0", delta0(q))]
    if args.delta is not None:
        d0 = delta0(q)
        if not 0.0 <= args.delta <= d0:
            raise UsageError(f"--delta: {args.delta} outside [0, {d0:g}]")
        lines += [("delta", args.delta), ("entropy", entropy_q(args.delta, q)),
                  ("kl", kl_divergence(args.delta, d0, q)), ("gv_bound", gv_bound(args.delta, q)),
                  ("plotkin", plotkin_line(args.delta, q))]
    if args.r is not None:
        if not 0.0 <= args.r <= 1.0:
            raise UsageError(f"--r: {args.r} outside [0, 1]")
        if args.tol <= 0:
            raise UsageError("--tol: must be positive")
        lines += [("r", args.r), ("gv_distance", gv_distance(args.r, q, args.tol))]
    sys.stdout.write("".join(f"{k} {_fmt(v)}\n" for k, v in lines))
    return 0


def cmd_beta(args) -> int:
    q, n = args.q, args.n
    if n < 1:
        raise UsageError("--n: must be >= 1")
    d0 = delta0(q)
    if not 0.0 < args.delta < d0:
        raise UsageError(f"--delta: {args.delta} outside (0, {d0:g})")
    d = scaled_round(args.delta, n)
    est = beta_exact(n, d, q, exact=args.exact)
    lines = [("n", n), ("d", d), ("log_q_beta", est.exact_log_q)]
    if args.exact:
        lines += [("numerator", est.exact_numerator), ("denominator", est.exact_denominator)]
    if args.asymptotic:
        asym = beta_asymptotic(n, args.delta, q)
        lines += [("log_q_beta_asymptotic", asym), ("ratio", float(q) ** (est.exact_log_q - asym))]
    sys.stdout.write("".join(f"{k} {_fmt(v)}\n" for k, v in lines))
    return 0


def _code_summary(code: CodeSample) -> dict:
    info = {"q": code.q, "n": code.n, "origin": code.origin, "size": code.size, "rate": code_rate(code)}
    if code.is_linear:
        info["dimension"] = code.dimension
    if code.size >= 2:
        info["min_distance"] = min_distance(code)
    return info


def cmd_sample(args) -> int:
    if args.ensemble not in ENSEMBLES:
        raise UsageError(f"--ensemble: expected one of {ENSEMBLES}")
    fld = default_alphabet(args.q)
    if args.ensemble in LINEAR_ENSEMBLES and not fld.is_field:
        raise UsageError(f"--q: linear ensembles need a field; none of order {args.q} is available")
    try:
        params = Params.from_k(args.q, args.n, args.k)
    except ValueError as exc:
        raise UsageError(f"--k/--n: {exc}") from None
    code = sample(args.ensemble, params, SeedSpec(args.seed, args.trial), fld)
    if args.dump:
        write_code(code, args.dump)
    info = {"ensemble": args.ensemble, "seed": args.seed, "trial": args.trial, "k": args.k}
    info.update(_code_summary(code))
    sys.stdout.write(json.dumps(info) + "\n")
    return 0


def cmd_enumerate(args) -> int:
    if not args.input:
        raise UsageError("--input: a code file is required")
    try:
        code = read_code(args.input)
    except (OSError, CodeError, ValueError) as exc:
        raise UsageError(f"--input: {exc}") from None
    n, q = code.n, code.q
    if not 0.0 <= args.delta <= 1.0:
        raise UsageError(f"--delta: {args.delta} outside [0, 1]")
    d = scaled_round(args.delta, n)
    if code.is_linear:
        profile = weight_distribution(code)
    else:
        if code.size < 2:
            raise UsageError("--input: pairwise distances need at least two codewords")
        profile = pairwise_distance_distribution(code)
    count = cumulative_enumerator(profile, d)
    out = {"q": q, "n": n, "size": code.size, "kind": profile.kind, "d": d,
           "counts": list(profile.counts), "cumulative": count,
           "growth_rate": _json_value(growth_rate(count, n, q))}
    if args.per_codeword:
        rows = []
        for i, word in enumerate(code.words):
            prof = distance_profile_about(code, word)
            c = cumulative_enumerator(prof, d)
            rows.append({"index": i, "cumulative": c, "growth_rate": _json_value(growth_rate(c, n, q))})
        out["per_codeword"] = rows
    sys.stdout.write(json.dumps(out) + "\n")
    return 0


def _listify(val, parse, flag: str) -> list:
    if isinstance(val, (list, tuple)):
        return list(val)
    return parse(val, flag)


def cmd_experiment(args) -> int:
    cfg: dict = {}
    if args.cells is not None:
        cfg["cells"] = args.cells
    for key in ("ensemble", "q", "trials", "seed", "statistic"):
        if getattr(args, key) is not None:
            cfg[key] = getattr(args, key)
    if args.cost_ceiling is not None:
        cfg["cost-ceiling"] = args.cost_ceiling
    grid = {}
    if args.n is not None:
        grid["n"] = _listify(args.n, _int_list, "--n")
    if args.delta is not None:
        grid["delta"] = _listify(args.delta, _float_list, "--delta")
    if args.r is not None:
        grid["r"] = _listify(args.r, _float_list, "--r")
    if args.t is not None:
        grid["t"] = args.t if isinstance(args.t, list) else [tok.strip() for tok in str(args.t).split(",") if tok.strip()]
    if grid:
        if "cells" in cfg and {"n", "delta", "r"} & set(grid):
            cfg.pop("cells")  # an explicit grid replaces a cell list
        cfg.update(grid)
    try:
        config = ExperimentConfig.from_dict(cfg)
    except (ValueError, TypeError, KeyError) as exc:
        raise UsageError(f"experiment config: {exc}") from None
    results = run_sweep(config, workers=args.workers)
    text = to_csv(results) if args.format == "csv" else to_jsonl(results)
    _emit(text, args.out)
    return 0


def cmd_decay(args) -> int:
    if args.ensemble not in ENSEMBLES:
        raise UsageError(f"--ensemble: expected one of {ENSEMBLES}")
    grid = _int_list(args.n_grid, "--n-grid")
    if len(grid) < 4:
        raise UsageError("--n-grid: need at least four block lengths")
    try:
        config = critical_decay_config(args.ensemble, args.q, args.delta, grid, args.trials, args.seed,
                                       args.cost_ceiling)
    except ValueError as exc:
        raise UsageError(f"decay: {exc}") from None
    results = run_sweep(config, workers=args.workers)
    if args.out:
        _emit(to_csv(results), args.out)
    fit = fit_critical_decay(results, resamples=args.resamples, seed=args.seed)
    summary = {"ensemble": args.ensemble, "q": args.q, "delta": args.delta, "r": results[0].r,
               "n_grid": grid, "slope": fit.slope, "intercept": fit.intercept,
               "slope_ci": list(fit.slope_ci), "points": [list(p) for p in fit.points]}
    sys.stdout.write(json.dumps(summary) + "\n")
    return 0


def cmd_greedy(args) -> int:
    if args.n < 1:
        raise UsageError("--n: must be >= 1")
    if not 0 <= args.d <= args.n:
        raise UsageError(f"--d: {args.d} outside [0, n={args.n}]")
    if args.linear:
        if not default_alphabet(args.q).is_field:
            raise UsageError(f"--q: the linear greedy needs a field; none of order {args.q} is available")
        report = greedy_linear_code(args.n, args.q, args.d)
    else:
        report = greedy_code(args.n, args.q, args.d, order=args.order, seed=args.seed)
    if args.dump:
        write_code(report.code, args.dump)
    check = finite_gv_rate_check(report)
    out = {"q": args.q, "n": args.n, "d": args.d, "linear": bool(args.linear), "size": report.achieved_size,
           "gv_lower": report.gv_lower, "covering_verified": report.covering_verified,
           "min_distance_exceeds_d": verify_min_distance(report), "rate": check.rate,
           "finite_bound": check.finite_bound, "gv_asymptotic": check.gv_asymptotic, "margin": check.margin,
           "meets_finite_bound": check.meets_finite_bound}
    if args.linear:
        out["dimension"] = report.code.dimension
    sys.stdout.write(json.dumps(out) + "\n")
    return 0


def region_grid(q: int, resolution: int, ensemble: str) -> str:
    """CSV of grid midpoints with their labels, followed by the boundary curves."""
    d0 = delta0(q)
    lines = ["kind,delta,r,label"]
    for i in range(resolution):
        dl = (i + 0.5) * d0 / resolution
        for j in range(resolution):
            r = (j + 0.5) / resolution
            lines.append(f"point,{_fmt(dl)},{_fmt(r)},{classify_region(dl, r, q, ensemble)}")
    for i in range(resolution + 1):
        dl = i * d0 / resolution
        gv = gv_bound(dl, q)
        for name, val in (("gv", gv), ("half-gv", gv / 2.0), ("plotkin", plotkin_line(dl, q))):
            lines.append(f"curve,{_fmt(dl)},{_fmt(val)},{name}")
    return "\n".join(lines) + "\n"


def cmd_regions(args) -> int:
    ens = args.ensemble
    if ens not in (LINEAR, GENERAL):
        raise UsageError(f"--ensemble: expected {LINEAR!r} or {GENERAL!r}")
    if args.grid:
        if args.resolution < 16:
            raise UsageError("--resolution: must be >= 16")
        _emit(region_grid(args.q, args.resolution, ens), args.out)
        return 0
    if args.delta is None or args.r is None:
        raise UsageError("--delta and --r are required unless --grid is given")
    d0 = delta0(args.q)
    if not 0.0 < args.delta < d0:
        raise UsageError(f"--delta: {args.delta} outside (0, {d0:g})")
    if not 0.0 < args.r < 1.0:
        raise UsageError(f"--r: {args.r} outside (0, 1)")
    sys.stdout.write(classify_region(args.delta, args.r, args.q, ens) + "\n")
    return 0


# -- parser --


def _q_type(text: str) -> int:
    try:
        q = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected an integer, got {text!r}") from None
    if q < 2:
        raise argparse.ArgumentTypeError(f"q must be >= 2, got {q}")
    return q


def _seed_type(text: str) -> int:
    try:
        s = int(text, 0)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected an integer, got {text!r}") from None
    if not 0 <= s < 1 << 64:
        raise argparse.ArgumentTypeError("seed must be a 64-bit unsigned integer")
    return s


def _pos_int(text: str) -> int:
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected an integer, got {text!r}") from None
    if v < 1:
        raise argparse.ArgumentTypeError(f"must be >= 1, got {v}")
    return v


def build_parser() -> argparse.ArgumentParser:
    fmt = argparse.ArgumentDefaultsHelpFormatter
    parser = argparse.ArgumentParser(prog="gvlab", formatter_class=fmt,
                                     description="Gilbert-Varshamov numerics, random code ensembles and threshold experiments.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    subs = parser.add_subparsers(dest="command", required=True, metavar="COMMAND")

    def sub(name: str, help_text: str) -> argparse.ArgumentParser:
        p = subs.add_parser(name, help=help_text, description=help_text, formatter_class=fmt)
        p.add_argument("--config", default=None, help="JSON file whose keys mirror the long flags; flags win")
        p.set_defaults(command=name)
        return p

    p = sub("bounds", "KL divergence, entropy, GV bound and GV distance")
    p.add_argument("--q", type=_q_type, default=2, help="alphabet size")
    p.add_argument("--delta", type=float, default=None, help="relative distance in [0, 1 - 1/q]")
    p.add_argument("--r", type=float, default=None, help="rate in [0, 1] to invert into a GV distance")
    p.add_argument("--tol", type=float, default=1e-12, help="bisection tolerance for the GV distance")

    p = sub("beta", "exact and asymptotic binomial tail beta_n(delta)")
    p.add_argument("--q", type=_q_type, default=2, help="alphabet size")
    p.add_argument("--n", type=int, default=64, help="block length")
    p.add_argument("--delta", type=float, default=0.25, help="relative distance in (0, 1 - 1/q)")
    p.add_argument("--exact", action="store_true", help="also print the exact numerator and denominator")
    p.add_argument("--asymptotic", action="store_true", help="also print the asymptotic estimate and ratio")

    p = sub("sample", "draw one code from an ensemble")
    p.add_argument("--ensemble", choices=ENSEMBLES, default=LINEAR_INJECTIVE, help="random code ensemble")
    p.add_argument("--q", type=_q_type, default=2, help="alphabet size")
    p.add_argument("--n", type=int, default=16, help="block length")
    p.add_argument("--k", type=int, default=4, help="message length (code has up to q^k words)")
    p.add_argument("--seed", type=_seed_type, default=0, help="master seed")
    p.add_argument("--trial", type=int, default=0, help="trial index within the seed's stream family")
    p.add_argument("--dump", default=None, help="write the code to this file (q n k origin header)")

    p = sub("enumerate", "distance enumerators of a code file")
    p.add_argument("--input", default=None, help="code file written by 'sample --dump' or 'greedy --dump'")
    p.add_argument("--delta", type=float, default=0.25, help="relative radius; d = round(delta * n)")
    p.add_argument("--per-codeword", action="store_true", help="also report the enumerator about every codeword")

    p = sub("experiment", "Monte Carlo sweep, one CSV row per cell")
    p.add_argument("--ensemble", choices=ENSEMBLES, default=None, help="random code ensemble (config default: linear-injective)")
    p.add_argument("--q", type=_q_type, default=None, help="alphabet size (config default: 2)")
    p.add_argument("--n", default=None, help="comma-separated block lengths")
    p.add_argument("--delta", default=None, help="comma-separated relative distances")
    p.add_argument("--r", default=None, help="comma-separated rates")
    p.add_argument("--t", default=None, help="comma-separated growth thresholds; '-inf' allowed (config default: 0)")
    p.add_argument("--trials", type=_pos_int, default=None, help="trials per cell (config default: 100)")
    p.add_argument("--statistic", choices=STATISTICS, default=None, help="statistic (config default: growth-rate-geq-t)")
    p.add_argument("--seed", type=_seed_type, default=None, help="master seed (config default: 0)")
    p.add_argument("--workers", type=_pos_int, default=os.cpu_count() or 1, help="worker processes")
    p.add_argument("--cost-ceiling", type=float, default=None, dest="cost_ceiling",
                   help="per-cell work ceiling (default: $GVLAB_COST_CEILING or 2^36)")
    p.add_argument("--out", default=None, help="output path (standard output when omitted)")
    p.add_argument("--format", choices=("csv", "jsonl"), default="csv", help="output format")
    p.set_defaults(cells=None)

    p = sub("decay", "fit the 1/sqrt(n) decay at the critical rate")
    p.add_argument("--ensemble", choices=ENSEMBLES, default=LINEAR_INJECTIVE, help="random code ensemble")
    p.add_argument("--q", type=_q_type, default=2, help="alphabet size")
    p.add_argument("--delta", type=float, default=0.3, help="relative distance")
    p.add_argument("--n-grid", default="16,24,32,48,64", dest="n_grid", help="comma-separated block lengths")
    p.add_argument("--trials", type=_pos_int, default=5000, help="trials per cell")
    p.add_argument("--seed", type=_seed_type, default=0, help="master seed")
    p.add_argument("--workers", type=_pos_int, default=os.cpu_count() or 1, help="worker processes")
    p.add_argument("--resamples", type=_pos_int, default=1000, help="bootstrap resamples for the slope interval")
    p.add_argument("--cost-ceiling", type=float, default=None, dest="cost_ceiling",
                   help="per-cell work ceiling (default: $GVLAB_COST_CEILING or 2^36)")
    p.add_argument("--out", default=None, help="also write the per-cell CSV here")

    p = sub("greedy", "greedy codes meeting the finite GV bound")
    p.add_argument("--q", type=_q_type, default=2, help="alphabet size")
    p.add_argument("--n", type=int, default=10, help="block length (q^n <= 2^26)")
    p.add_argument("--d", type=int, default=2, help="kept words are at distance > d")
    p.add_argument("--linear", action="store_true", help="grow a linear code instead")
    p.add_argument("--order", choices=(LEX, PERM), default=LEX, help="visiting order of F^n")
    p.add_argument("--seed", type=_seed_type, default=0, help="seed for --order perm")
    p.add_argument("--dump", default=None, help="write the code to this file")

    p = sub("regions", "classify (delta, r) or emit a labelled grid")
    p.add_argument("--q", type=_q_type, default=2, help="alphabet size")
    p.add_argument("--delta", type=float, default=None, help="relative distance")
    p.add_argument("--r", type=float, default=None, help="rate")
    p.add_argument("--ensemble", choices=(LINEAR, GENERAL), default=LINEAR, help="linear or general codes")
    p.add_argument("--grid", action="store_true", help="emit a CSV grid plus boundary curves")
    p.add_argument("--resolution", type=int, default=64, help="grid points per axis")
    p.add_argument("--out", default=None, help="grid output path (standard output when omitted)")
    return parser


_HANDLERS = {
    "bounds": cmd_bounds, "beta": cmd_beta, "sample": cmd_sample, "enumerate": cmd_enumerate,
    "experiment": cmd_experiment, "decay": cmd_decay, "greedy": cmd_greedy, "regions": cmd_regions,
}


def _apply_config(parser: argparse.ArgumentParser, args, argv: Sequence[str] | None):
    """Load ``--config`` and re-parse so explicit flags override file values."""
    path = getattr(args, "config", None)
    if not path:
        return args
    try:
        data = json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise UsageError(f"--config: cannot read {path}: {exc}") from None
    if not isinstance(data, dict):
        raise UsageError("--config: expected a JSON object")
    subparser = parser._subparsers._group_actions[0].choices[args.command]
    dests = {a.dest for a in subparser._actions}
    extra = {"cells"} if args.command == "experiment" else set()
    defaults = {}
    for key, val in data.items():
        dest = key.replace("-", "_")
        if dest in extra:
            defaults[dest] = val
        elif dest not in dests or dest in ("help", "config"):
            raise UsageError(f"--config: unknown key {key!r} for '{args.command}'")
        else:
            defaults[dest] = val
    subparser.set_defaults(**defaults)
    return parser.parse_args(argv)


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        args = _apply_config(parser, args, argv)
        return _HANDLERS[args.command](args)
    except (UsageError, FieldError) as exc:
        print(f"gvlab {args.command}: error: {exc}", file=sys.stderr)
        return 2
    except (CostCeilingExceeded, SpaceCeilingExceeded, DecayFitError, CodeError) as exc:
        print(f"gvlab {args.command}: {exc}", file=sys.stderr)
        return 1
    except ValueError as exc:
        print(f"gvlab {args.command}: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
