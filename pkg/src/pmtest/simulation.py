"""Simulation designs, warp-speed Monte Carlo harness, and table emitters.

The harness estimates size/power with one bootstrap draw per replication:
for replication m it simulates a dataset, computes the test statistic and a
single bootstrap statistic, and after all replications rejects replication
m when its statistic exceeds the empirical 1-alpha quantile of the pooled
bootstrap statistics.  Several contact-set thresholds and several trimming
measures are scored on the same datasets and the same resamples, which
makes the threshold comparison exact rather than statistical.
"""
from __future__ import annotations

import math
import time
from dataclasses import dataclass, replace
from pathlib import Path

import numpy as np

from ._parallel import replication_map
from .bootstrap import (
    _draw_valid_resample,
    contact_statistics,
    critical_value,
    evaluate_test,
)
from .config import TestConfig
from .data import Dataset, InstrumentGrid, validate_dataset
from .errors import (
    DegenerateTreatmentError,
    EmptyInstrumentCellError,
    EmptyReportError,
    ExcessiveRedrawsError,
    UnknownDgpError,
)
from .moments import table_from_sample
from .rng import BOOT_STREAM, DATA_STREAM, derived_seed, stream_rng
from .statistic import sup_values

DGP_NAMES = ("null", "p1", "p2", "p3", "p4", "p5", "p6")

# (n, instrument probability) pairs used by the power tables
POWER_DESIGNS = ((200, 0.5), (600, 1 / 6), (1000, 0.5), (1100, 1 / 11), (2000, 0.5))

# threshold ladder used by the size table
TAU_LADDER = (0.1, 0.5, 1.0, 2.0, 3.0, 4.0, math.inf)

SIM_GRID = InstrumentGrid(supports=((0.0, 1.0), (0.0, 1.0)))

MAX_SIM_REDRAWS = 100

_P4_CUM = np.asarray([0.15, 0.35, 0.65, 0.85])
_P4_MEANS = np.asarray([-1.0, -0.5, 0.0, 0.5, 1.0])


@dataclass(frozen=True)
class DgpSpec:
    """A simulation design: generator name, sample size, and P(Z_j = 1)."""

    dgp: str
    n: int
    r_n: float = 0.5

    def __post_init__(self):
        name = str(self.dgp).lower()
        if name not in DGP_NAMES:
            raise UnknownDgpError(f"unknown DGP {self.dgp!r}; known: {DGP_NAMES}")
        object.__setattr__(self, "dgp", name)
        if int(self.n) < 1:
            raise ValueError("n must be positive")
        if not (0.0 < self.r_n < 1.0):
            raise ValueError("r_n must lie in (0, 1)")


def _steps(v: np.ndarray, hi2: float, hi1: float) -> np.ndarray:
    return np.where(v <= hi2, 2.0, np.where(v <= hi1, 1.0, 0.0))


def gen_null(n: int, rng: np.random.Generator) -> Dataset:
    """Valid-instrument design: treatment ignores z entirely.

    Draw order (fixed): u (n,2), v (n), outcome noise (n).
    """
    u = rng.random((n, 2))
    v = rng.random(n)
    eps = rng.standard_normal(n)
    z = (u <= 0.5).astype(np.float64)
    d = _steps(v, 0.33, 0.66)
    return Dataset(y=d + eps, d=d, z=z)


def gen_power(dgp: str, n: int, r_n: float, rng: np.random.Generator) -> Dataset:
    """Six violating designs.

    p1-p4 break outcome exclusion in cell (0,0) for the top treatment arm
    (location shift, two variance scalings, five-component mixture); p5 and
    p6 break partial monotonicity with a defiant treatment pattern in one
    cell.  Draw order (fixed): u (n,2), v (n), outcome noise (n), then the
    mixture uniform (n) for p4 only.
    """
    if dgp not in DGP_NAMES or dgp == "null":
        raise UnknownDgpError(f"unknown power DGP {dgp!r}")
    u = rng.random((n, 2))
    v = rng.random(n)
    eps = rng.standard_normal(n)
    z = (u <= r_n).astype(np.float64)
    cell00 = (z[:, 0] == 0.0) & (z[:, 1] == 0.0)

    if dgp in ("p1", "p2", "p3", "p4"):
        d = _steps(v, 0.45, 0.55)
        y = eps.copy()
        mask = cell00 & (d == 2.0)
        if dgp == "p1":
            y[mask] = -0.7 + eps[mask]
        elif dgp == "p2":
            y[mask] = 1.675 * eps[mask]
        elif dgp == "p3":
            y[mask] = 0.515 * eps[mask]
        else:
            w = rng.random(n)
            comp = np.searchsorted(_P4_CUM, w, side="left")
            y[mask] = _P4_MEANS[comp[mask]] + 0.125 * eps[mask]
        return Dataset(y=y, d=d, z=z)

    defiant = _steps(v, 0.6, 0.8)
    base = _steps(v, 0.33, 0.66)
    if dgp == "p5":
        d = np.where(cell00, defiant, base)
    else:
        cell01 = (z[:, 0] == 0.0) & (z[:, 1] == 1.0)
        d = np.where(cell01, defiant, base)
    return Dataset(y=d + eps, d=d, z=z)


def simulate_dataset(spec: DgpSpec, rng: np.random.Generator) -> Dataset:
    if spec.dgp == "null":
        return gen_null(spec.n, rng)
    return gen_power(spec.dgp, spec.n, spec.r_n, rng)


def _simulate_valid_sample(spec: DgpSpec, rng: np.random.Generator):
    """Simulate until the dataset passes validation on the binary grid.

    Small n or tiny r_n can empty a cell; redrawing inside the same stream
    keeps the replication count and determinism intact.
    """
    redraws = 0
    while True:
        ds = simulate_dataset(spec, rng)
        try:
            return ds, validate_dataset(ds, SIM_GRID), redraws
        except (EmptyInstrumentCellError, DegenerateTreatmentError):
            redraws += 1
            if redraws > MAX_SIM_REDRAWS:
                raise ExcessiveRedrawsError(
                    f"more than {MAX_SIM_REDRAWS} consecutive simulated datasets "
                    f"failed validation for {spec}"
                ) from None


@dataclass
class McReport:
    """Monte Carlo output: one rate per (threshold, measure) plus raw
    per-replication statistics for exact cross-threshold checks."""

    dgp: str
    n: int
    r_n: float
    n_mc: int
    alpha: float
    seed: int
    taus: tuple[float, ...]
    measure_labels: tuple[str, ...]
    rates: np.ndarray
    crit: np.ndarray
    ts: np.ndarray
    ts_star: np.ndarray
    contact_sizes: np.ndarray
    n_candidates: np.ndarray
    saturated: np.ndarray
    n_sim_redraws: int
    n_boot_redraws: int
    elapsed_seconds: float
    mode: str = "warp"


def _warp_worker(payload, m):
    spec, seed, taus, xis, sels, wts, xi0 = payload
    rng = stream_rng(seed, m, DATA_STREAM)
    _, sample, sim_redraws = _simulate_valid_sample(spec, rng)
    table = table_from_sample(sample)

    sups, _ = sup_values(table, xis)
    ts_m = np.asarray([float(np.dot(sups[sel], w)) for sel, w in zip(sels, wts)])

    brng = stream_rng(seed, m, BOOT_STREAM)
    (phi_star, sigma_star, t_star), boot_redraws = _draw_valid_resample(table, brng)

    u = contact_statistics(table, xi0)
    # unstable sort is fine: every threshold boundary falls between distinct
    # u values, so each prefix is the same candidate set either way
    order = np.argsort(u)
    u_sorted = u[order]
    pos = np.searchsorted(u_sorted, np.asarray(taus), side="right")

    num = math.sqrt(t_star) * (phi_star - table.phi)
    num_ord = num[order]
    sig_ord = sigma_star[order]
    buf = np.empty_like(num_ord)
    star = np.empty((len(taus), len(xis)), dtype=np.float64)
    for k, xi in enumerate(xis):
        np.maximum(sig_ord, xi, out=buf)
        np.divide(num_ord, buf, out=buf)
        np.maximum.accumulate(buf, out=buf)
        for t in range(len(taus)):
            p = int(pos[t])
            v = float(buf[p - 1]) if p > 0 else 0.0
            star[t, k] = v if v > 0.0 else 0.0

    ts_star_m = np.asarray(
        [[float(np.dot(star[t, sel], w)) for sel, w in zip(sels, wts)] for t in range(len(taus))]
    )
    return (
        ts_m,
        ts_star_m,
        int(table.n_candidates),
        pos.astype(np.int64),
        sim_redraws,
        boot_redraws,
    )


def warp_speed_mc(
    spec: DgpSpec,
    config: TestConfig | None = None,
    n_mc: int = 1000,
    taus=None,
    measures=None,
    n_jobs=None,
) -> McReport:
    """Warp-speed rejection rates for spec under every (tau, measure).

    config.n_bootstrap is ignored here: each replication contributes one
    bootstrap statistic, and critical values come from the pooled draws.
    With n_mc=1 the single replication reproduces run_test with
    n_bootstrap=1 on the same simulated dataset exactly.
    """
    config = config or TestConfig()
    if n_mc < 1:
        raise ValueError("n_mc must be positive")
    taus = tuple(float(t) for t in (taus if taus is not None else (config.tau_n,)))
    if any(t <= 0 for t in taus):
        raise ValueError("thresholds must be positive")
    measures = list(measures) if measures is not None else [config.xi_measure]

    xis = sorted({float(x) for mm in measures for x in mm.points})
    xi_pos = {x: k for k, x in enumerate(xis)}
    sels = tuple(
        np.asarray([xi_pos[float(x)] for x in mm.points], dtype=np.int64)
        for mm in measures
    )
    wts = tuple(np.asarray(mm.weights, dtype=np.float64) for mm in measures)

    t0 = time.perf_counter()
    payload = (spec, int(config.seed), taus, tuple(xis), sels, wts, config.xi0)
    out = replication_map(_warp_worker, payload, int(n_mc), n_jobs)
    elapsed = time.perf_counter() - t0

    ts = np.stack([o[0] for o in out])
    ts_star = np.stack([o[1] for o in out])
    n_cands = np.asarray([o[2] for o in out], dtype=np.int64)
    contact_sizes = np.stack([o[3] for o in out])
    n_sim_redraws = int(sum(o[4] for o in out))
    n_boot_redraws = int(sum(o[5] for o in out))

    T, M = len(taus), len(measures)
    crit = np.empty((T, M), dtype=np.float64)
    rates = np.empty((T, M), dtype=np.float64)
    for t in range(T):
        for j in range(M):
            crit[t, j] = critical_value(ts_star[:, t, j], config.alpha)
            rates[t, j] = float(np.mean(ts[:, j] > crit[t, j]))
    saturated = np.asarray(
        [bool(np.all(contact_sizes[:, t] == n_cands)) for t in range(T)]
    )

    return McReport(
        dgp=spec.dgp,
        n=spec.n,
        r_n=spec.r_n,
        n_mc=int(n_mc),
        alpha=config.alpha,
        seed=int(config.seed),
        taus=taus,
        measure_labels=tuple(mm.label for mm in measures),
        rates=rates,
        crit=crit,
        ts=ts,
        ts_star=ts_star,
        contact_sizes=contact_sizes,
        n_candidates=n_cands,
        saturated=saturated,
        n_sim_redraws=n_sim_redraws,
        n_boot_redraws=n_boot_redraws,
        elapsed_seconds=elapsed,
    )


def _full_worker(payload, m):
    spec, config, measures = payload
    rng = stream_rng(config.seed, m, DATA_STREAM)
    ds, _, sim_redraws = _simulate_valid_sample(spec, rng)
    cfg_m = replace(config, seed=derived_seed(config.seed, m, 2))
    results = evaluate_test(ds, SIM_GRID, cfg_m, measures)
    return (
        np.asarray([r.ts for r in results]),
        np.asarray([float(r.reject) for r in results]),
        results[0].contact_set_size,
        results[0].n_candidates,
        sim_redraws,
        results[0].n_redraws,
    )


def full_mc(
    spec: DgpSpec,
    config: TestConfig | None = None,
    n_mc: int = 100,
    measures=None,
    n_jobs=None,
) -> McReport:
    """Non-warp cross-check: a complete n_bootstrap test per replication.

    Far slower than warp_speed_mc; meant for small n_mc sanity runs.  Each
    replication uses its own derived test seed, so critical values vary by
    replication and the report's crit matrix is NaN.
    """
    config = config or TestConfig()
    measures = list(measures) if measures is not None else [config.xi_measure]
    t0 = time.perf_counter()
    payload = (spec, config, measures)
    out = replication_map(_full_worker, payload, int(n_mc), n_jobs)
    elapsed = time.perf_counter() - t0

    ts = np.stack([o[0] for o in out])
    rejects = np.stack([o[1] for o in out])
    contact_sizes = np.asarray([o[2] for o in out], dtype=np.int64)[:, None]
    n_cands = np.asarray([o[3] for o in out], dtype=np.int64)
    M = len(measures)
    return McReport(
        dgp=spec.dgp,
        n=spec.n,
        r_n=spec.r_n,
        n_mc=int(n_mc),
        alpha=config.alpha,
        seed=int(config.seed),
        taus=(config.tau_n,),
        measure_labels=tuple(mm.label for mm in measures),
        rates=rejects.mean(axis=0)[None, :],
        crit=np.full((1, M), np.nan),
        ts=ts,
        ts_star=np.zeros((0, 1, M)),
        contact_sizes=contact_sizes,
        n_candidates=n_cands,
        saturated=np.asarray([bool(np.all(contact_sizes[:, 0] == n_cands))]),
        n_sim_redraws=int(sum(o[4] for o in out)),
        n_boot_redraws=int(sum(o[5] for o in out)),
        elapsed_seconds=elapsed,
        mode="full",
    )


def _column_token(label: str) -> str:
    if label.startswith("dirac:"):
        return label.split(":", 1)[1]
    return "nu_bar"


def _fmt_tau(t: float) -> str:
    return "inf" if math.isinf(t) else format(t, "g")


def emit_tables(reports, out_dir=".", stem: str = "mc"):
    """Write the rate matrices as a fixed-width text table and as
    machine-readable CSV rows (dgp, n, tau, xi, rate).

    Text values are rounded for display; the CSV stores full precision.
    Returns (text_path, csv_path).
    """
    reports = list(reports)
    if not reports:
        raise EmptyReportError("no reports to emit")
    labels = reports[0].measure_labels
    for r in reports:
        if r.measure_labels != labels:
            raise EmptyReportError("reports disagree on measure columns")
    cols = [_column_token(l) for l in labels]

    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    text_path = out_dir / f"{stem}_table.txt"
    csv_path = out_dir / f"{stem}_rows.csv"

    width = max(7, max(len(c) for c in cols) + 2)
    lines = []
    for r in reports:
        lines.append(
            f"# dgp={r.dgp} n={r.n} r_n={format(r.r_n, 'g')} n_mc={r.n_mc} "
            f"alpha={format(r.alpha, 'g')} seed={r.seed} mode={r.mode}"
        )
    header = f"{'dgp':>6} {'n':>6} {'tau':>6}" + "".join(f"{c:>{width}}" for c in cols)
    lines.append(header)
    csv_lines = ["dgp,n,tau,xi,rate"]
    for r in reports:
        for t, tau in enumerate(r.taus):
            row = f"{r.dgp:>6} {r.n:>6} {_fmt_tau(tau):>6}"
            row += "".join(f"{r.rates[t, j]:>{width}.3f}" for j in range(len(cols)))
            lines.append(row)
            for j, c in enumerate(cols):
                csv_lines.append(
                    f"{r.dgp},{r.n},{_fmt_tau(tau)},{c},{format(r.rates[t, j], '.17g')}"
                )
    text_path.write_text("\n".join(lines) + "\n")
    csv_path.write_text("\n".join(csv_lines) + "\n")
    return text_path, csv_path
