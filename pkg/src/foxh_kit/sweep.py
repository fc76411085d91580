"""Metric sweeps over average SNR, and the delimited report format.

A sweep evaluates one or more metrics (outage probability, average symbol
error probability, generalized MGF values) over a grid of average-SNR points,
by one or more methods:

* ``analytic``    -- the H-function closed forms,
* ``asymptotic``  -- the deep-fade power-law approximations,
* ``mc``          -- Monte Carlo estimates with confidence intervals.

Rows are emitted in a deterministic order (metric, then method, then SNR) and
formatted with fixed precision, so identical inputs produce byte-identical
reports.  The header line carries the package version and a schema number so
downstream parsers can detect format changes.
"""

from __future__ import annotations

import csv
import io
import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np

from . import SCHEMA_VERSION, __version__
from .errors import ParameterError
from .fading import (
    FadingParams,
    Modulation,
    asymptotic_outage,
    asymptotic_sep,
    db_to_linear,
    gen_mgf,
    outage,
    parse_modulation,
    sep,
)
from .montecarlo import (
    MCResult,
    SamplerConfig,
    empirical_mean,
    empirical_outage,
    empirical_sep,
)

__all__ = [
    "METHODS",
    "MetricSpec",
    "Row",
    "parse_metric",
    "parse_grid",
    "sweep",
    "format_csv",
    "write_csv",
    "worker_count",
]

METHODS = ("analytic", "asymptotic", "mc")

#: Environment variable naming the default number of sweep worker processes.
WORKERS_ENV = "FOXH_WORKERS"


@dataclass(frozen=True)
class MetricSpec:
    """One metric column of a sweep, parsed from its textual label."""

    label: str
    kind: str  # "outage" | "sep" | "mgf"
    threshold: float = math.nan  # linear SNR threshold (outage)
    modulation: Modulation | None = None  # detection scheme (sep)
    n: int = 0  # moment order (mgf)
    s: float = math.nan  # transform variable (mgf)


def parse_metric(text: str) -> MetricSpec:
    """Parse a metric label.

    Accepted forms:
      outage:th_db=<float>   threshold given in dB
      outage:th=<float>      threshold given on the linear scale
      sep:<modulation>       e.g. sep:bpsk, sep:mpsk:16, sep:lmpsk:8
      mgf:n=<int>,s=<float>  generalized MGF value E[g^n exp(-s g)]
    """
    label = text.strip()
    kind, _, rest = label.partition(":")
    if kind == "outage":
        key, _, val = rest.partition("=")
        try:
            num = float(val)
        except ValueError as exc:
            raise ParameterError(f"bad outage threshold in {text!r}") from exc
        if key == "th_db":
            return MetricSpec(label, "outage", threshold=db_to_linear(num))
        if key == "th":
            if num < 0:
                raise ParameterError("linear outage threshold must be >= 0")
            return MetricSpec(label, "outage", threshold=num)
        raise ParameterError(f"unknown outage option {key!r} in {text!r}")
    if kind == "sep":
        return MetricSpec(label, "sep", modulation=parse_modulation(rest))
    if kind == "mgf":
        opts = {}
        for item in rest.split(","):
            key, _, val = item.partition("=")
            opts[key.strip()] = val.strip()
        try:
            n = int(opts["n"])
            s = float(opts["s"])
        except (KeyError, ValueError) as exc:
            raise ParameterError(
                f"mgf metric needs n=<int>,s=<float>, got {text!r}"
            ) from exc
        if n < 0 or not s > 0:
            raise ParameterError("mgf metric needs n >= 0 and s > 0")
        return MetricSpec(label, "mgf", n=n, s=s)
    raise ParameterError(
        f"unknown metric {text!r}; expected outage:..., sep:... or mgf:..."
    )


def parse_grid(text: str) -> np.ndarray:
    """Parse an SNR grid: 'lo:hi:n' (inclusive linspace), 'a,b,c' or 'x'."""
    text = text.strip()
    try:
        if ":" in text:
            lo_s, hi_s, n_s = text.split(":")
            lo, hi, n = float(lo_s), float(hi_s), int(n_s)
            if n < 1:
                raise ValueError("grid needs at least one point")
            if n == 1 and hi != lo:
                raise ValueError("single-point grid must have lo == hi")
            return np.linspace(lo, hi, n)
        if "," in text:
            return np.array([float(v) for v in text.split(",")])
        return np.array([float(text)])
    except ValueError as exc:
        raise ParameterError(
            f"bad grid {text!r}; expected 'lo:hi:n', 'a,b,c' or a single value"
        ) from exc


@dataclass(frozen=True)
class Row:
    """One report line: a metric value at one average-SNR point."""

    x: float
    metric: str
    value: float
    method: str
    ci_low: float = math.nan
    ci_high: float = math.nan

    @property
    def sort_key(self):
        return (self.metric, self.method, self.x)


def _analytic_value(params: FadingParams, spec: MetricSpec, rtol: float) -> float:
    if spec.kind == "outage":
        return outage(params, spec.threshold, rtol=rtol)
    if spec.kind == "sep":
        return sep(params, spec.modulation, rtol=rtol)
    return gen_mgf(params, spec.n, spec.s, rtol=rtol)


def _asymptotic_value(params: FadingParams, spec: MetricSpec) -> float:
    if spec.kind == "outage":
        return asymptotic_outage(params, spec.threshold)
    if spec.kind == "sep":
        return asymptotic_sep(params, spec.modulation)
    raise ParameterError("the asymptotic method applies to outage and sep only")


def _mc_value(params: FadingParams, spec: MetricSpec, cfg: SamplerConfig) -> MCResult:
    if spec.kind == "outage":
        return empirical_outage(params, spec.threshold, cfg)
    if spec.kind == "sep":
        return empirical_sep(params, spec.modulation, cfg)
    n, s = spec.n, spec.s
    return empirical_mean(params, lambda g: g**n * np.exp(-s * g), cfg)


def _curve(args) -> list[Row]:
    """Worker task: one (metric, method) curve over the full SNR grid."""
    params, spec, method, db_grid, cfg, rtol = args
    rows = []
    for db in db_grid:
        p = params.with_mean_snr(db_to_linear(db))
        if method == "analytic":
            rows.append(Row(db, spec.label, _analytic_value(p, spec, rtol), method))
        elif method == "asymptotic":
            rows.append(Row(db, spec.label, _asymptotic_value(p, spec), method))
        elif method == "mc":
            r = _mc_value(p, spec, cfg)
            rows.append(Row(db, spec.label, r.estimate, method, r.ci_low, r.ci_high))
        else:
            raise ParameterError(f"unknown method {method!r}")
    return rows


def worker_count(explicit: int | None = None) -> int:
    """Resolve the worker-process count: explicit flag, else environment."""
    if explicit is not None:
        if explicit < 1:
            raise ParameterError("worker count must be >= 1")
        return explicit
    env = os.environ.get(WORKERS_ENV, "").strip()
    if env:
        try:
            n = int(env)
        except ValueError as exc:
            raise ParameterError(f"{WORKERS_ENV} must be an integer") from exc
        if n < 1:
            raise ParameterError(f"{WORKERS_ENV} must be >= 1")
        return n
    return 1


def sweep(
    params: FadingParams,
    metrics,
    db_grid,
    *,
    methods=("analytic",),
    mc_config: SamplerConfig | None = None,
    rtol: float = 1e-10,
    workers: int | None = None,
) -> list[Row]:
    """Evaluate all (metric, method) curves and return sorted rows."""
    specs = [m if isinstance(m, MetricSpec) else parse_metric(m) for m in metrics]
    if not specs:
        raise ParameterError("at least one metric is required")
    for m in methods:
        if m not in METHODS:
            raise ParameterError(f"unknown method {m!r}; valid: {METHODS}")
    if "mc" in methods and mc_config is None:
        mc_config = SamplerConfig()
    db_grid = np.asarray(db_grid, dtype=float)
    tasks = [
        (params, spec, method, db_grid, mc_config, rtol)
        for spec in specs
        for method in methods
    ]
    n_workers = worker_count(workers)
    if n_workers > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=min(n_workers, len(tasks))) as pool:
            curves = list(pool.map(_curve, tasks))
    else:
        curves = [_curve(t) for t in tasks]
    rows = [row for curve in curves for row in curve]
    rows.sort(key=lambda r: r.sort_key)
    return rows


# ---------------------------------------------------------------------------
# Delimited output
# ---------------------------------------------------------------------------


def _fmt(v: float) -> str:
    if math.isnan(v):
        return ""
    return f"{v:.12g}"


def format_csv(rows, x_name: str = "gamma_bar_dB") -> str:
    """Render rows as CSV with the versioned header comment line."""
    buf = io.StringIO()
    buf.write(f"# foxh-kit v{__version__} schema {SCHEMA_VERSION}\n")
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow([x_name, "metric", "value", "method", "ci_low", "ci_high"])
    for r in rows:
        writer.writerow(
            [_fmt(r.x), r.metric, _fmt(r.value), r.method, _fmt(r.ci_low),
             _fmt(r.ci_high)]
        )
    return buf.getvalue()


def write_csv(rows, path: str, x_name: str = "gamma_bar_dB") -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(format_csv(rows, x_name))
