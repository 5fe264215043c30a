"""Monte Carlo campaigns: one sampled matrix per (n, trial), one record each.

A campaign is described by a flat ``key = value`` config.  Trial (n, t)
draws its matrix from the stream ``make_rng(master_seed, n, t)``, so records
do not depend on how trials are scheduled across threads.
"""

from __future__ import annotations

import csv
import json
import math
import os
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field, fields

import numpy as np

from .dist import HeavyTailLaw, make_rng, quantile_b_n
from .errors import ConfigError, HTLabError, TrialTimeout
from .limits import (ReferenceDistribution, TheoremId, TheoremParams, check_valid,
                     fluctuation_scale, ks_distance, ks_two_sample, normalize_statistic,
                     reference_for)
from .mat import decompose, default_thresholds, diagnostics, sample_matrix
from .norms import (ENUM_MAX_N, INF, NormProblem, ansatz_bounds, conj, ground_state,
                    grothendieck_value, operator_norm)

REQUIRED = ("theorem", "alpha", "n_grid", "trials")
QUANTILES = (0.05, 0.25, 0.5, 0.75, 0.95)


@dataclass
class ExperimentConfig:
    theorem: TheoremId
    alpha: float
    n_grid: tuple
    trials: int
    r: float = 2.0
    p: float = 2.0
    mu: float = 0.0
    master_seed: int = 0
    sv: str = "constant"
    c: float = 0.0
    sign: str = "symmetric"
    q: float = 0.5
    method: str = "auto"
    restarts: int = 0               # 0: 50 up to n = 100, 20 above
    tol: float = 1e-12
    max_iter: int = 10_000
    timeout: float = 0.0            # seconds per trial, 0 disables
    mc_size: int = 5000
    summands: int = 100_000
    records: str = ""
    summary: str = ""
    plotdata: str = ""

    def __post_init__(self):
        self.theorem = TheoremId(self.theorem)
        self.n_grid = tuple(int(n) for n in self.n_grid)
        if not self.n_grid or any(b <= a for a, b in zip(self.n_grid, self.n_grid[1:])):
            raise ConfigError("n_grid must be nonempty and strictly increasing")
        if self.n_grid[0] < 1:
            raise ConfigError("dimensions must be >= 1")
        if self.trials < 1:
            raise ConfigError("trials must be >= 1")

    @property
    def params(self) -> TheoremParams:
        return TheoremParams(self.alpha, self.r, self.p, self.mu)

    @property
    def law(self) -> HeavyTailLaw:
        """Entry law; the mean shift of GRO3/RTOP3 is added after sampling."""
        shift = 0.0 if self.theorem.has_mean_shift else self.mu
        return HeavyTailLaw(self.alpha, self.sv, self.c, shift, self.sign, self.q,
                            centered=self.theorem.is_centered)

    def restarts_for(self, n: int) -> int:
        if self.restarts:
            return self.restarts
        return 50 if n <= 100 else 20


@dataclass
class TrialRecord:
    theorem: str
    n: int
    trial_index: int
    seed: int
    status: str
    raw_statistic: float | None = None
    normalized_statistic: float | None = None
    solver_method: str | None = None
    kkt_residual: float | None = None
    sandwich_lower: float | None = None
    sandwich_upper: float | None = None
    large_part_statistic: float | None = None
    b_n: float | None = None
    diagnostics: dict = field(default_factory=dict)
    note: str = ""
    wall_time: float = 0.0


# ------------------------------------------------------------------ config

def _parse_value(name, text, kind):
    try:
        if name == "n_grid":
            return tuple(int(t) for t in text.replace(",", " ").split())
        if name == "theorem":
            return TheoremId(text.strip().upper())
        if kind in ("float", float):
            return float(text)
        if kind in ("int", int):
            return int(text)
        return text.strip()
    except ValueError as exc:
        raise ConfigError(f"bad value for {name}: {text!r}") from exc


def parse_config(text: str) -> ExperimentConfig:
    """Flat ``key = value`` lines; ``#`` starts a comment."""
    types = {f.name: f.type for f in fields(ExperimentConfig)}
    values = {}
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected key = value")
        key, val = (s.strip() for s in line.split("=", 1))
        if key not in types:
            raise ConfigError(f"unknown config key {key!r}")
        values[key] = _parse_value(key, val, types[key])
    for key in REQUIRED:
        if key not in values:
            raise ConfigError(f"missing required config key {key!r}")
    return ExperimentConfig(**values)


def load_config(path) -> ExperimentConfig:
    with open(path, encoding="utf-8") as fh:
        return parse_config(fh.read())


# ------------------------------------------------------------------ trials

def _clean(x):
    if x is None:
        return None
    x = float(x)
    return None if math.isnan(x) else x


def _threshold_plan(cfg: ExperimentConfig):
    """(regime, r, p) used to split the matrix for sandwich and surrogate."""
    t = cfg.theorem
    if t is TheoremId.GROUND:
        return "small_alpha", INF, 1.0
    if t.is_grothendieck:
        return ("centered_alpha" if t.has_mean_shift else "small_alpha"), cfg.r, conj(cfg.r)
    if t.is_norm:
        return ("centered_alpha" if t.has_mean_shift else "small_alpha"), cfg.r, cfg.p
    return None


def run_trial(cfg: ExperimentConfig, n: int, t: int) -> TrialRecord:
    start = time.monotonic()
    deadline = start + cfg.timeout if cfg.timeout > 0 else None
    tid = cfg.theorem
    rec = TrialRecord(tid.value, n, t, cfg.master_seed, "ok")
    law = cfg.law
    b_n = quantile_b_n(law, n)
    rec.b_n = b_n
    rng = make_rng(cfg.master_seed, n, t)
    S = sample_matrix(law, n, rng, seed=(cfg.master_seed, n, t))
    A = S.dense()
    if tid.has_mean_shift:
        A = A + cfg.mu
    try:
        raw, method, kkt = _statistic(cfg, A, n, deadline, make_rng(cfg.master_seed, n, t, 1))
        rec.raw_statistic, rec.solver_method, rec.kkt_residual = raw, method, _clean(kkt)
        rec.normalized_statistic = normalize_statistic(tid, raw, n, b_n, cfg.params)
        _structure(cfg, rec, S, n, b_n)
    except TrialTimeout as exc:
        rec.status, rec.note = "timeout", str(exc)
    except HTLabError as exc:
        rec.status, rec.note = "refused", f"{type(exc).__name__}: {exc}"
    rec.wall_time = time.monotonic() - start
    return rec


def _statistic(cfg, A, n, deadline, rng):
    tid = cfg.theorem
    if tid is TheoremId.GROUND:
        if n <= ENUM_MAX_N:
            return ground_state(A), "hypercube", math.nan
        eta, zeta = default_thresholds("small_alpha", cfg.alpha, INF, 1.0)
        dec = decompose(A, cfg.alpha, eta, zeta)
        return 2.0 * float(np.abs(dec.large.vals[dec.large.rows != dec.large.cols]).sum()) \
            + float(np.abs(dec.large.vals[dec.large.rows == dec.large.cols]).sum()), \
            "large_part_surrogate", math.nan
    if tid.is_grothendieck:
        cert = grothendieck_value(A, cfg.r, cfg.restarts_for(n), rng, cfg.tol, cfg.max_iter,
                                  deadline)
        return cert.value, cert.method, cert.kkt_residual
    cert = operator_norm(A, NormProblem(cfg.r, cfg.p), cfg.method, cfg.restarts_for(n),
                         cfg.tol, cfg.max_iter, rng, deadline)
    return cert.value, cert.method, cert.kkt_residual


def _structure(cfg, rec, S, n, b_n):
    """Large-part surrogate, sandwich bounds and diagnostics on the centered matrix."""
    plan = _threshold_plan(cfg)
    if plan is None or cfg.theorem in (TheoremId.GRO1, TheoremId.RTOP1):
        rep = diagnostics(S, cfg.alpha, b_n=b_n)
        rec.diagnostics = {"a_star_over_b_n": rep.max_abs / b_n,
                           "row_sum_ratio": _clean(rep.row_sum_ratio),
                           "diag_exceed_count": rep.diag_exceed_count,
                           "rows_with_two_big": rep.rows_with_two_big}
        return
    regime, r, p = plan
    eta, zeta = default_thresholds(regime, cfg.alpha, r, p)
    dec = decompose(S, cfg.alpha, eta, zeta)
    L = dec.large
    off = L.rows != L.cols
    g = 1.0 / p - 1.0 / r
    w = np.abs(L.vals[off]) / b_n
    rec.large_part_statistic = float((2.0 * np.sum(w ** (1.0 / g))) ** g) if w.size else 0.0
    rec.diagnostics = {"large_count": int(len(L)),
                       "kappa_observed": int(dec.inter.row_counts().max(initial=0)),
                       "pairable": bool(not np.any(~off) and L.row_counts().max(initial=0) <= 1)}
    if cfg.theorem.has_mean_shift:
        lo, hi = ansatz_bounds(cfg.mu, dec.inter, L, NormProblem(r, p))
        rec.sandwich_lower, rec.sandwich_upper = lo, hi


def _threads() -> int:
    try:
        return max(1, int(os.environ.get("HTLAB_THREADS", "1")))
    except ValueError:
        return 1


def run_experiment(cfg: ExperimentConfig, threads: int | None = None, reference=None):
    """All trials of ``cfg`` plus a per-n summary against the theorem's limit law."""
    check_valid(cfg.theorem, cfg.params)
    cfg.law  # validates the entry law
    jobs = [(n, t) for n in cfg.n_grid for t in range(cfg.trials)]
    k = threads if threads is not None else _threads()
    if k <= 1:
        records = [run_trial(cfg, n, t) for n, t in jobs]
    else:
        with ThreadPoolExecutor(max_workers=k) as pool:
            records = list(pool.map(lambda job: run_trial(cfg, *job), jobs))
    records.sort(key=lambda rec: (rec.n, rec.trial_index))
    if reference is None:
        reference = build_reference(cfg)
    return records, summarize(records, cfg, reference)


def build_reference(cfg: ExperimentConfig) -> ReferenceDistribution:
    return reference_for(cfg.theorem, cfg.params, cfg.law, cfg.mc_size,
                         make_rng(cfg.master_seed, 0), cfg.summands)


def _ks(values, reference: ReferenceDistribution | None):
    if reference is None or not len(values):
        return None
    if reference.kind == "frechet":
        return ks_distance(values, reference.cdf)
    return ks_two_sample(values, reference.sample)


def summarize(records, cfg: ExperimentConfig | None = None,
              reference: ReferenceDistribution | None = None):
    """One row per n: KS distances, quantiles, sandwich width, surrogate drift."""
    rows = []
    for n in sorted({rec.n for rec in records}):
        group = [rec for rec in records if rec.n == n]
        ok = [rec for rec in group if rec.status == "ok"]
        stat = np.array([rec.normalized_statistic for rec in ok], dtype=float)
        row = {"n": n, "trials": len(group), "ok": len(ok)}
        row["ks"] = _ks(stat, reference)
        large = [rec for rec in ok if rec.large_part_statistic is not None]
        lp = np.array([rec.large_part_statistic for rec in large], dtype=float)
        paired = cfg is not None and not cfg.theorem.has_mean_shift
        row["ks_large_part"] = _ks(lp, reference) if paired else None
        for qv in QUANTILES:
            row[f"q{int(qv * 100):02d}"] = float(np.quantile(stat, qv)) if stat.size else None
        if large and paired:
            drift = np.abs(np.array([rec.normalized_statistic for rec in large]) - lp)
            row["median_large_part_gap"] = float(np.median(drift))
        else:
            row["median_large_part_gap"] = None
        sw = [rec for rec in ok if rec.sandwich_lower is not None]
        if sw and cfg is not None:
            width = [(rec.sandwich_upper - rec.sandwich_lower)
                     / fluctuation_scale(cfg.theorem, n, rec.b_n, cfg.params) for rec in sw]
            row["median_sandwich_width"] = float(np.median(width))
        else:
            row["median_sandwich_width"] = None
        rows.append(row)
    return rows


# ------------------------------------------------------------------ output

SUMMARY_COLUMNS = ("n", "trials", "ok", "ks", "ks_large_part", "q05", "q25", "q50", "q75",
                   "q95", "median_large_part_gap", "median_sandwich_width")


def _open(path, mode):
    try:
        return open(path, mode, encoding="utf-8", newline="")
    except OSError as exc:
        raise OSError(f"{path}: {exc.strerror or exc}") from exc


def emit_records(records, path) -> None:
    with _open(path, "w") as fh:
        for rec in records:
            fh.write(json.dumps(asdict(rec), sort_keys=True, allow_nan=False) + "\n")


def parse_records(path):
    out = []
    with _open(path, "r") as fh:
        for line in fh:
            if line.strip():
                out.append(TrialRecord(**json.loads(line)))
    return out


def emit_summary(summary, path) -> None:
    """CSV keyed by n; ``path`` may also be an open text stream."""
    if hasattr(path, "write"):
        _write_summary(summary, path)
        return
    with _open(path, "w") as fh:
        _write_summary(summary, fh)


def _write_summary(summary, fh):
    w = csv.DictWriter(fh, fieldnames=SUMMARY_COLUMNS, lineterminator="\n")
    w.writeheader()
    for row in summary:
        w.writerow({k: ("" if row.get(k) is None else row[k]) for k in SUMMARY_COLUMNS})


def emit_plotdata(records, reference: ReferenceDistribution, path) -> None:
    """Per n: sorted normalized statistics with empirical and reference CDFs."""
    with _open(path, "w") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["n", "x", "empirical_cdf", "reference_cdf"])
        for n in sorted({rec.n for rec in records}):
            xs = np.sort([rec.normalized_statistic for rec in records
                          if rec.n == n and rec.status == "ok"])
            ref = np.asarray(reference.cdf(xs), dtype=float) if xs.size else xs
            for i, x in enumerate(xs):
                w.writerow([n, repr(float(x)), repr((i + 1) / xs.size), repr(float(ref[i]))])
