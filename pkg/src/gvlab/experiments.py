"""Seeded Monte Carlo sweeps over random code ensembles.

A sweep is a list of cells ``(n, delta, r, t)``.  For each ``(n, delta, r)``
the harness draws ``trials`` codes and records, per trial, the cumulative
count at ``d = round(delta n)`` (low-weight codewords for linear ensembles,
close pairs for general ones) and, when a statistic needs it, the minimum
distance.  Every ``t`` and statistic at that point reuses the same codes.

Trial ``i`` of a cell always uses the substream keyed by
``(master_seed, cell_id, i)`` and results are folded in trial order, so the
output does not depend on the number of worker processes.
"""

from __future__ import annotations

import csv
import hashlib
import io
import json
import math
import os
from concurrent.futures import Executor, ProcessPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

import numpy as np

from .codes import (
    linear_enumeration_cost,
    min_distance,
    pair_counts_upto,
    pair_search_cost,
    weight_counts_upto,
)
from .field import FieldSpec, default_alphabet
from .moments import linear_first_moment, linear_second_moment, pairwise_first_moment
from .numerics import NEG_INF, Params, ball_volume_exact, gv_bound, gv_distance
from .samplers import (
    ENSEMBLES,
    FULL_ENSEMBLES,
    GENERAL_INJECTIVE,
    LINEAR_ENSEMBLES,
    LINEAR_INJECTIVE,
    SeedSpec,
    sample,
)

GROWTH_GEQ_T = "growth-rate-geq-t"
REL_DIST_LEQ = "relative-distance-leq-delta"
REL_DIST_GT = "relative-distance-gt-delta"
FIRST_MOMENT = "first-moment"
SECOND_MOMENT_RATIO = "second-moment-ratio"
DISTANCE_HISTOGRAM = "distance-histogram"
STATISTICS = (GROWTH_GEQ_T, REL_DIST_LEQ, REL_DIST_GT, FIRST_MOMENT, SECOND_MOMENT_RATIO, DISTANCE_HISTOGRAM)
_NEEDS_DMIN = (REL_DIST_LEQ, REL_DIST_GT, DISTANCE_HISTOGRAM)

CSV_FIELDS = (
    "ensemble", "q", "n", "k", "delta", "d", "r", "t", "statistic", "trials", "seed",
    "successes", "p_hat", "ci_low", "ci_high", "exact_expectation", "mean_stat", "var_stat",
    "image_deficit",
)

DEFAULT_COST_CEILING = 1 << 36
COST_ENV = "GVLAB_COST_CEILING"
_Z95 = 1.959963984540054


class CostCeilingExceeded(RuntimeError):
    pass


class DecayFitError(ValueError):
    pass


def cost_ceiling(override: float | None = None) -> float:
    """Per-cell work budget: explicit value, else ``$GVLAB_COST_CEILING``, else 2^36."""
    if override is not None:
        return float(override)
    env = os.environ.get(COST_ENV)
    if env:
        try:
            return float(env)
        except ValueError:
            raise ValueError(f"{COST_ENV}={env!r} is not a number") from None
    return float(DEFAULT_COST_CEILING)


# -- configuration --


def parse_t(value) -> float:
    if isinstance(value, str):
        v = value.strip().lower()
        if v in ("-inf", "-infinity", "neg-inf"):
            return NEG_INF
        value = float(v)
    value = float(value)
    if math.isnan(value) or value == math.inf:
        raise ValueError(f"t must be -inf or a finite real, got {value}")
    return value


@dataclass(frozen=True)
class Cell:
    n: int
    delta: float
    r: float
    t: float = 0.0


@dataclass(frozen=True)
class ExperimentConfig:
    ensemble: str
    q: int
    cells: tuple[Cell, ...]
    trials: int
    master_seed: int
    statistic: str
    cost_ceiling: float | None = None

    def __post_init__(self):
        if self.ensemble not in ENSEMBLES:
            raise ValueError(f"ensemble must be one of {ENSEMBLES}, got {self.ensemble!r}")
        if self.statistic not in STATISTICS:
            raise ValueError(f"statistic must be one of {STATISTICS}, got {self.statistic!r}")
        if self.trials < 1:
            raise ValueError("trials must be >= 1")
        if not self.cells:
            raise ValueError("a sweep needs at least one cell")
        if self.ensemble in LINEAR_ENSEMBLES and not default_alphabet(self.q).is_field:
            raise ValueError(f"linear ensembles need a field; no field of order {self.q} is available")
        for c in self.cells:
            p = Params.make(self.q, c.n, c.delta, c.r)
            top = (1 if self.ensemble in LINEAR_ENSEMBLES else 2) * p.r
            if c.t != NEG_INF and not 0.0 <= c.t < top:
                raise ValueError(f"t={c.t} outside {{-inf}} U [0, {top:g}) for r={p.r}")

    @classmethod
    def from_dict(cls, cfg: dict) -> "ExperimentConfig":
        """Build from a mapping whose keys mirror the CLI flags.

        Cells come either from ``"cells"`` (a list of objects with n, delta,
        r and optional t) or from the Cartesian product of the lists (or
        scalars) under ``"n"``, ``"delta"``, ``"r"`` and ``"t"``.
        """
        known = {"ensemble", "q", "trials", "seed", "statistic", "cells", "n", "delta", "r", "t",
                 "cost-ceiling", "cost_ceiling", "workers", "out", "format", "config"}
        unknown = set(cfg) - known
        if unknown:
            raise ValueError(f"unknown config keys: {sorted(unknown)}")

        def as_list(v):
            return list(v) if isinstance(v, (list, tuple)) else [v]

        if "cells" in cfg:
            cells = [Cell(int(c["n"]), float(c["delta"]), float(c["r"]), parse_t(c.get("t", 0.0)))
                     for c in cfg["cells"]]
        else:
            for key in ("n", "delta", "r"):
                if key not in cfg:
                    raise ValueError(f"config needs {key!r} (or an explicit 'cells' list)")
            cells = [Cell(int(n), float(dl), float(r), parse_t(t))
                     for n in as_list(cfg["n"]) for dl in as_list(cfg["delta"])
                     for r in as_list(cfg["r"]) for t in as_list(cfg.get("t", 0.0))]
        ceiling = cfg.get("cost-ceiling", cfg.get("cost_ceiling"))
        return cls(
            ensemble=str(cfg.get("ensemble", LINEAR_INJECTIVE)),
            q=int(cfg.get("q", 2)),
            cells=tuple(cells),
            trials=int(cfg.get("trials", 100)),
            master_seed=int(cfg.get("seed", 0)),
            statistic=str(cfg.get("statistic", GROWTH_GEQ_T)),
            cost_ceiling=None if ceiling is None else float(ceiling),
        )


def cell_id(ensemble: str, q: int, n: int, delta: float, r: float) -> int:
    """Stable 64-bit id of a sweep point; t and the statistic are excluded on purpose."""
    key = f"{ensemble}|{q}|{n}|{float(delta)!r}|{float(r)!r}".encode()
    return int.from_bytes(hashlib.blake2b(key, digest_size=8).digest(), "little")


# -- cost model --


def _expected_dmin_radius(ensemble: str, p: Params) -> int:
    """A radius at which a handful of close codewords/pairs is expected."""
    if ensemble in LINEAR_ENSEMBLES:
        return min(p.n, math.ceil(gv_distance(p.k / p.n, p.q) * p.n) + 2)
    N = p.q**p.k
    pairs = N * (N - 1) / 2
    for w in range(1, p.n + 1):
        if pairs * ball_volume_exact(p.n, w, p.q) / float(p.q) ** p.n >= 2.0:
            return w
    return p.n


def trial_cost(ensemble: str, p: Params, need_dmin: bool) -> float:
    """Estimated word operations for one trial (vector ops times words per vector)."""
    w = p.d
    if need_dmin:
        w = min(p.n, max(w, _expected_dmin_radius(ensemble, p)))
    packed = p.q == 2 and p.n <= 64
    if ensemble in LINEAR_ENSEMBLES:
        vectors = linear_enumeration_cost(p.k, p.n, p.q, w) + p.k * p.k
        return float(vectors) * (1 if packed else p.n)
    N = p.q**p.k
    return float(pair_search_cost(N, p.n, w, p.q)) + float(N) * p.n


def cell_cost(ensemble: str, p: Params, trials: int, need_dmin: bool) -> float:
    return trial_cost(ensemble, p, need_dmin) * trials


# -- per-trial work --


@dataclass(frozen=True)
class TrialBatch:
    """Per-trial raw values for one sweep point, in trial order.

    ``dmin`` holds -1 where it was not computed or is undefined (a code
    with fewer than two codewords).
    """

    ensemble: str
    params: Params
    master_seed: int
    counts: tuple[int, ...]
    dmin: tuple[int, ...]
    deficit: tuple[bool, ...]
    has_dmin: bool = False

    @property
    def trials(self) -> int:
        return len(self.counts)


def _one_trial(ensemble: str, p: Params, fld: FieldSpec, seed: SeedSpec, need_dmin: bool) -> tuple[int, int, bool]:
    code = sample(ensemble, p, seed, fld)
    # One search up to a radius where the minimum distance is likely found.
    w = max(p.d, _expected_dmin_radius(ensemble, p)) if need_dmin else p.d
    if ensemble in LINEAR_ENSEMBLES:
        deficit = code.dimension < p.k
        if code.dimension == 0:
            return 0, -1, deficit
        hist = weight_counts_upto(code, w)
    else:
        deficit = code.size < p.q**p.k
        if code.size < 2:
            return 0, -1, deficit
        hist = pair_counts_upto(code, w)
    count = int(hist[1: p.d + 1].sum())
    dmin = -1
    if need_dmin:
        nz = np.flatnonzero(hist[1:])
        dmin = int(nz[0]) + 1 if nz.size else min_distance(code)
    return count, dmin, deficit


def _trial_chunk(args) -> list[tuple[int, int, bool]]:
    ensemble, p, fld, master_seed, cid, start, stop, need_dmin = args
    return [_one_trial(ensemble, p, fld, SeedSpec(master_seed, i, cid), need_dmin) for i in range(start, stop)]


def simulate(ensemble: str, p: Params, trials: int, master_seed: int, need_dmin: bool = False,
             fld: FieldSpec | None = None, workers: int = 1, executor: Executor | None = None,
             ceiling: float | None = None) -> TrialBatch:
    """Draw ``trials`` codes at one sweep point and record the raw per-trial values."""
    if ensemble not in ENSEMBLES:
        raise ValueError(f"ensemble must be one of {ENSEMBLES}, got {ensemble!r}")
    if trials < 1:
        raise ValueError("trials must be >= 1")
    budget = cost_ceiling(ceiling)
    cost = cell_cost(ensemble, p, trials, need_dmin)
    if cost > budget:
        raise CostCeilingExceeded(
            f"cell {ensemble} q={p.q} n={p.n} k={p.k} d={p.d}: estimated {cost:.3g} word operations "
            f"for {trials} trials exceeds the ceiling {budget:.3g} (set --cost-ceiling or ${COST_ENV})")
    fld = fld or default_alphabet(p.q)
    cid = cell_id(ensemble, p.q, p.n, p.delta, p.r)
    nchunks = 1 if workers <= 1 else min(trials, 4 * workers)
    bounds = [trials * i // nchunks for i in range(nchunks + 1)]
    jobs = [(ensemble, p, fld, master_seed, cid, bounds[i], bounds[i + 1], need_dmin) for i in range(nchunks)]
    if workers <= 1:
        parts = [_trial_chunk(j) for j in jobs]
    elif executor is not None:
        parts = list(executor.map(_trial_chunk, jobs))
    else:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(_trial_chunk, jobs))
    rows = [row for part in parts for row in part]
    return TrialBatch(ensemble, p, master_seed, tuple(r[0] for r in rows), tuple(r[1] for r in rows),
                      tuple(r[2] for r in rows), need_dmin)


# -- summaries --


def wilson_interval(successes: int, trials: int, z: float = _Z95) -> tuple[float, float]:
    if trials <= 0:
        raise ValueError("trials must be positive")
    p = successes / trials
    denom = 1.0 + z * z / trials
    centre = (p + z * z / (2 * trials)) / denom
    half = z * math.sqrt(p * (1 - p) / trials + z * z / (4 * trials * trials)) / denom
    return max(0.0, min(centre - half, p)), min(1.0, max(centre + half, p))


def meets_growth(count: int, t: float, n: int, q: int) -> bool:
    """``count >= q^(t n)``, i.e. growth rate >= t (always true for t = -inf)."""
    if t == NEG_INF:
        return True
    if count <= 0:
        return False
    lhs = math.log(count)
    rhs = t * n * math.log(q)
    return lhs >= rhs - 1e-12 * max(1.0, abs(rhs))


@dataclass(frozen=True)
class ExperimentResult:
    ensemble: str
    q: int
    n: int
    k: int
    delta: float
    d: int
    r: float
    t: float
    statistic: str
    trials: int
    seed: int
    successes: int
    p_hat: float
    ci_low: float
    ci_high: float
    exact_expectation: float | None
    mean_stat: float
    var_stat: float
    image_deficit: int

    @property
    def standard_error(self) -> float:
        """Standard error of ``mean_stat``."""
        return math.sqrt(max(self.var_stat, 0.0) / self.trials)

    def row(self) -> dict:
        return {k: getattr(self, k) for k in CSV_FIELDS}


def _mean_var(xs: Sequence[float]) -> tuple[float, float]:
    arr = np.asarray(xs, dtype=float)
    if arr.size == 0:
        return math.nan, math.nan
    return float(arr.mean()), float(arr.var(ddof=1)) if arr.size > 1 else 0.0


def _exact_first(ensemble: str, p: Params) -> Fraction | None:
    if ensemble == LINEAR_INJECTIVE:
        return linear_first_moment(p.q, p.n, p.k, p.d)
    if ensemble == GENERAL_INJECTIVE:
        return pairwise_first_moment(p.q, p.n, p.k, p.d)
    return None


def summarize(batch: TrialBatch, statistic: str, t: float = 0.0) -> ExperimentResult:
    """Reduce a batch to one result row for a statistic and threshold t."""
    p, T = batch.params, batch.trials
    counts = batch.counts
    exact = None
    if statistic in (GROWTH_GEQ_T, FIRST_MOMENT, SECOND_MOMENT_RATIO):
        if statistic == GROWTH_GEQ_T:
            hits = [meets_growth(c, t, p.n, p.q) for c in counts]
        else:
            hits = [c >= 1 for c in counts]
        e1 = _exact_first(batch.ensemble, p)
        if statistic == SECOND_MOMENT_RATIO:
            mean, var = _ratio_stats(counts)
            if batch.ensemble == LINEAR_INJECTIVE and e1:
                exact = float(linear_second_moment(p.q, p.n, p.k, p.d) / e1**2)
        else:
            mean, var = _mean_var([float(c) for c in counts])
            exact = None if e1 is None else float(e1)
    elif statistic in _NEEDS_DMIN:
        if not batch.has_dmin:
            raise ValueError("batch was simulated without minimum distances")
        # A code without two distinct codewords has no close pair: treat as distance > d.
        leq = [0 <= x <= p.d for x in batch.dmin]
        hits = [not h for h in leq] if statistic == REL_DIST_GT else leq
        mean, var = _mean_var([x / p.n for x in batch.dmin if x >= 0])
    else:
        raise ValueError(f"unknown statistic {statistic!r}")
    successes = int(sum(hits))
    lo, hi = wilson_interval(successes, T)
    deficit = int(sum(batch.deficit)) if batch.ensemble in FULL_ENSEMBLES else 0
    return ExperimentResult(
        ensemble=batch.ensemble, q=p.q, n=p.n, k=p.k, delta=p.delta, d=p.d, r=p.r, t=t,
        statistic=statistic, trials=T, seed=batch.master_seed, successes=successes,
        p_hat=successes / T, ci_low=lo, ci_high=hi, exact_expectation=exact,
        mean_stat=mean, var_stat=var, image_deficit=deficit,
    )


def _ratio_stats(counts: Sequence[int]) -> tuple[float, float]:
    """``m2 / m1^2`` and its per-trial asymptotic variance (delta method)."""
    x = np.asarray(counts, dtype=float)
    m1, m2 = x.mean(), (x * x).mean()
    if m1 == 0.0:
        return math.nan, math.nan
    ratio = m2 / m1**2
    if x.size < 2:
        return float(ratio), 0.0
    cov = np.cov(np.vstack([x, x * x]), ddof=1)
    grad = np.array([-2.0 * m2 / m1**3, 1.0 / m1**2])
    return float(ratio), float(grad @ cov @ grad)


def run_cell(ensemble: str, q: int, cell: Cell, trials: int, master_seed: int, statistic: str,
             workers: int = 1, ceiling: float | None = None) -> ExperimentResult:
    cfg = ExperimentConfig(ensemble, q, (cell,), trials, master_seed, statistic, ceiling)
    return run_sweep(cfg, workers=workers)[0]


def run_sweep(config: ExperimentConfig, workers: int = 1) -> list[ExperimentResult]:
    """One result per cell, sorted by (n, delta, r, t).

    Every cell's cost is checked before any simulation starts.
    """
    return sweep(config, workers)[0]


def sweep(config: ExperimentConfig, workers: int = 1
          ) -> tuple[list[ExperimentResult], dict[tuple[int, float, float], TrialBatch]]:
    """Like :func:`run_sweep` but also returns the raw batch of every (n, delta, r)."""
    need_dmin = config.statistic in _NEEDS_DMIN
    points: dict[tuple[int, float, float], list[float]] = {}
    for c in config.cells:
        ts = points.setdefault((c.n, c.delta, c.r), [])
        if c.t not in ts:
            ts.append(c.t)
    budget = cost_ceiling(config.cost_ceiling)
    for (n, delta, r) in points:
        p = Params.make(config.q, n, delta, r)
        cost = cell_cost(config.ensemble, p, config.trials, need_dmin)
        if cost > budget:
            raise CostCeilingExceeded(
                f"cell n={n} delta={delta} r={r} (k={p.k}, d={p.d}): estimated {cost:.3g} word operations "
                f"exceeds the ceiling {budget:.3g} (set --cost-ceiling or ${COST_ENV})")
    results, batches = [], {}
    pool = ProcessPoolExecutor(max_workers=workers) if workers > 1 else None
    try:
        for (n, delta, r), ts in sorted(points.items()):
            p = Params.make(config.q, n, delta, r)
            batch = simulate(config.ensemble, p, config.trials, config.master_seed, need_dmin,
                             workers=workers, executor=pool, ceiling=budget)
            batches[(n, delta, r)] = batch
            results.extend(summarize(batch, config.statistic, t) for t in ts)
    finally:
        if pool is not None:
            pool.shutdown()
    results.sort(key=lambda res: (res.n, res.delta, res.r, res.t))
    return results, batches


# -- output --


def _fmt(v) -> str:
    if v is None:
        return ""
    if isinstance(v, bool):
        return str(int(v))
    if isinstance(v, int):
        return str(v)
    if isinstance(v, float):
        if v == NEG_INF:
            return "-inf"
        return "%.12g" % v
    return str(v)


def to_csv(results: Iterable[ExperimentResult]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_FIELDS)
    for res in results:
        writer.writerow([_fmt(res.row()[k]) for k in CSV_FIELDS])
    return buf.getvalue()


def to_jsonl(results: Iterable[ExperimentResult]) -> str:
    lines = []
    for res in results:
        row = {}
        for k, v in res.row().items():
            if isinstance(v, float) and not math.isfinite(v):
                v = _fmt(v)  # -inf / nan as strings keep the JSON valid
            row[k] = v
        lines.append(json.dumps(row))
    return "".join(line + "\n" for line in lines)


_INT_FIELDS = {"q", "n", "k", "d", "trials", "seed", "successes", "image_deficit"}
_STR_FIELDS = {"ensemble", "statistic"}


def read_csv(text: str) -> list[dict]:
    """Parse CSV written by :func:`to_csv`; checks the header exactly."""
    reader = csv.reader(io.StringIO(text))
    header = next(reader)
    if tuple(header) != CSV_FIELDS:
        raise ValueError(f"unexpected header {header}")
    rows = []
    for rec in reader:
        row = {}
        for k, v in zip(CSV_FIELDS, rec):
            if k in _STR_FIELDS:
                row[k] = v
            elif k in _INT_FIELDS:
                row[k] = int(v)
            elif v == "":
                row[k] = None
            else:
                row[k] = float(v)
        rows.append(row)
    return rows


# -- distributions --


@dataclass(frozen=True)
class Distribution:
    """Empirical distribution of a per-trial statistic."""

    values: tuple[float, ...]
    undefined: int = 0

    @property
    def median(self) -> float:
        return float(np.median(self.values)) if self.values else math.nan

    def quantile(self, q: float) -> float:
        return float(np.quantile(self.values, q)) if self.values else math.nan

    def histogram(self) -> dict[float, int]:
        vals, cnt = np.unique(np.asarray(self.values), return_counts=True)
        return {float(v): int(c) for v, c in zip(vals, cnt)}


def distance_histogram(batch: TrialBatch) -> Distribution:
    """Relative minimum distances ``dmin / n`` across trials."""
    vals = tuple(x / batch.params.n for x in batch.dmin if x >= 0)
    return Distribution(vals, undefined=batch.trials - len(vals))


def growth_rate_distribution(batch: TrialBatch) -> Distribution:
    """Growth rates ``log_q(count)/n`` across trials (``-inf`` for zero counts)."""
    p = batch.params
    vals = tuple(NEG_INF if c == 0 else math.log(c) / (p.n * math.log(p.q)) for c in batch.counts)
    return Distribution(vals)


# -- critical decay --


@dataclass(frozen=True)
class DecayFit:
    points: tuple[tuple[float, float], ...]
    slope: float
    intercept: float
    slope_ci: tuple[float, float]


def _ls(x: np.ndarray, y: np.ndarray) -> tuple[float, float]:
    slope, intercept = np.polyfit(x, y, 1)
    return float(slope), float(intercept)


def fit_critical_decay(results: Sequence[ExperimentResult], resamples: int = 1000, seed: int = 0) -> DecayFit:
    """Least-squares slope of ``log p_hat`` against ``log n``.

    Cells with no successes (log undefined) or only successes (no decay
    visible) are dropped; at least four remaining cells are required.  The
    interval is a 95% percentile bootstrap that redraws each cell's success
    count from its binomial.
    """
    usable = [res for res in results if 0 < res.successes < res.trials]
    if len(usable) < 4:
        raise DecayFitError(
            f"only {len(usable)} cells with 0 < successes < trials; need >= 4 to fit a decay")
    usable.sort(key=lambda res: res.n)
    x = np.log([res.n for res in usable])
    y = np.log([res.p_hat for res in usable])
    slope, intercept = _ls(x, y)
    rng = np.random.Generator(np.random.Philox(key=np.array([seed & (2**64 - 1), 0x5EED], dtype=np.uint64)))
    trials = np.array([res.trials for res in usable])
    probs = np.array([res.p_hat for res in usable])
    boot = []
    for _ in range(resamples):
        s = rng.binomial(trials, probs)
        s = np.maximum(s, 0.5)  # keep the log finite for an empty resample
        boot.append(_ls(x, np.log(s / trials))[0])
    lo, hi = np.quantile(boot, [0.025, 0.975])
    return DecayFit(tuple(zip(x.tolist(), y.tolist())), slope, intercept, (float(lo), float(hi)))


def critical_rate(ensemble: str, delta: float, q: int) -> float:
    """The rate at the exceptional point: ``r_delta`` for linear, ``r_delta / 2`` otherwise."""
    r = gv_bound(delta, q)
    return r if ensemble in LINEAR_ENSEMBLES else r / 2.0


def critical_decay_config(ensemble: str, q: int, delta: float, n_grid: Sequence[int], trials: int,
                          seed: int, ceiling: float | None = None) -> ExperimentConfig:
    r = critical_rate(ensemble, delta, q)
    cells = tuple(Cell(int(n), float(delta), r, 0.0) for n in n_grid)
    return ExperimentConfig(ensemble, q, cells, trials, seed, GROWTH_GEQ_T, ceiling)
