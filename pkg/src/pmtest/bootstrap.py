"""Contact-set bootstrap: resampling, critical value, and the full test.

One bootstrap replication resamples n rows with replacement, recomputes the
candidate moments on the resample (keeping the original interval endpoints
and thresholds), and takes the floored sup of the recentered studentized
moments over the contact set for each trimming value.  The critical value
is the empirical 1-alpha quantile of the replicated statistics.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ._parallel import replication_map
from .config import TestConfig, XiMeasure
from .data import CellPair, Dataset, InstrumentGrid, validate_dataset
from .errors import EmptyBootstrapCellError, ExcessiveRedrawsError
from .moments import (
    KIND_SIGNS,
    MomentTable,
    _block_counts,
    _moments_from_counts,
    table_from_sample,
)
from .rng import BOOT_STREAM, stream_rng
from .statistic import SupProfile, sup_values

MAX_REDRAWS = 100


@dataclass(frozen=True)
class ContactSet:
    """Candidate ids whose studentized moment is within tau_n of binding."""

    member_ids: np.ndarray
    tau_n: float
    xi0: float

    @property
    def size(self) -> int:
        return len(self.member_ids)


def contact_statistics(table: MomentTable, xi0: float) -> np.ndarray:
    """Per-candidate membership statistic sqrt(t_n) * |phi| / max(xi0, sigma)."""
    root = math.sqrt(table.t_n)
    return root * np.abs(table.phi) / np.maximum(xi0, table.sigma)


def contact_set(table: MomentTable, tau_n: float, xi0: float = 1e-10) -> ContactSet:
    """Members are exactly the candidates with
    sqrt(t_n) * |phi| / max(xi0, sigma) <= tau_n."""
    stat = contact_statistics(table, xi0)
    members = np.flatnonzero(stat <= tau_n)
    return ContactSet(member_ids=members, tau_n=float(tau_n), xi0=float(xi0))


def bootstrap_draw(dataset: Dataset, rng: np.random.Generator) -> Dataset:
    """n rows drawn i.i.d. uniformly with replacement."""
    idx = rng.integers(0, dataset.n, size=dataset.n)
    return Dataset(y=dataset.y[idx], d=dataset.d[idx], z=dataset.z[idx])


def resample_indices(n: int, rng: np.random.Generator) -> np.ndarray:
    return rng.integers(0, n, size=n)


def _resample_moments(table: MomentTable, idx: np.ndarray):
    """phi*, sigma*, t_n* on the resample given by row indices idx."""
    sample = table.sample
    n = sample.n
    counts = np.bincount(sample.cell_ids[idx], minlength=sample.grid.n_cells)
    if (counts[sample.counted_cells] == 0).any():
        raise EmptyBootstrapCellError("resample left an instrument cell empty")
    t_star = float(n * np.prod(counts[sample.counted_cells] / n))
    scale = t_star / n
    phi_star = np.empty(table.n_candidates, dtype=np.float64)
    sigma_star = np.empty(table.n_candidates, dtype=np.float64)
    for block in table.blocks:
        cum_lo, cum_hi = _block_counts(block, block.codes[idx])
        ph, sg = _moments_from_counts(
            cum_lo,
            cum_hi,
            block.a,
            block.b,
            KIND_SIGNS[block.kind],
            int(counts[block.cell_low]),
            int(counts[block.cell_high]),
            n,
            scale,
        )
        sl = slice(block.start, block.start + block.size)
        phi_star[sl] = ph
        sigma_star[sl] = sg
    return phi_star, sigma_star, t_star


def centered_sup_values(table, members, phi_star, sigma_star, t_star, xis):
    """Per-xi floored sup over the contact members of
    sqrt(t_n*) * (phi* - phi) / max(xi, sigma*)."""
    out = np.zeros(len(xis), dtype=np.float64)
    if len(members) == 0:
        return out
    num = math.sqrt(t_star) * (phi_star[members] - table.phi[members])
    sig = sigma_star[members]
    for k, xi in enumerate(xis):
        v = float(np.max(num / np.maximum(xi, sig)))
        out[k] = v if v > 0.0 else 0.0
    return out


def _draw_valid_resample(table: MomentTable, rng: np.random.Generator):
    """Resample until no instrument cell is empty; cap the redraws."""
    redraws = 0
    while True:
        idx = resample_indices(table.sample.n, rng)
        try:
            return _resample_moments(table, idx), redraws
        except EmptyBootstrapCellError:
            redraws += 1
            if redraws > MAX_REDRAWS:
                raise ExcessiveRedrawsError(
                    f"more than {MAX_REDRAWS} consecutive resamples had an empty cell"
                ) from None


def bootstrap_statistic(resample, table: MomentTable, contact: ContactSet, nu: XiMeasure) -> float:
    """One bootstrap statistic for the resample given as row indices.

    Empty contact set gives 0 by the empty-sup convention.
    """
    if contact.size == 0:
        return 0.0
    idx = np.asarray(resample, dtype=np.int64)
    phi_star, sigma_star, t_star = _resample_moments(table, idx)
    sups = centered_sup_values(
        table, contact.member_ids, phi_star, sigma_star, t_star, nu.points
    )
    return float(np.dot(sups, np.asarray(nu.weights)))


def critical_value(boot_stats, alpha: float) -> float:
    """Smallest order statistic c with #{stats <= c}/n_B >= 1 - alpha.

    The 1e-9 nudge guards against (1-alpha)*n_B rounding up in floating
    point; true quantile boundaries differ by at least 1/n_B.
    """
    s = np.sort(np.asarray(boot_stats, dtype=np.float64))
    if s.size == 0:
        raise ValueError("need at least one bootstrap statistic")
    j = max(0, math.ceil((1.0 - alpha) * s.size - 1e-9) - 1)
    return float(s[j])


def p_value(boot_stats, ts: float) -> float:
    s = np.asarray(boot_stats, dtype=np.float64)
    return float((1 + int(np.sum(s >= ts))) / (s.size + 1))


@dataclass(frozen=True)
class PairDiagnostic:
    pair: CellPair
    count_low: int
    count_high: int
    n_candidates: int
    n_in_contact: int
    max_violation: float
    max_stat: float


@dataclass(frozen=True)
class TestResult:
    ts: float
    critical_value: float
    p_value: float
    reject: bool
    contact_set_size: int
    n_bootstrap_used: int
    xi_spec: str
    seed: int
    config: TestConfig
    t_n: float
    n_candidates: int
    n_redraws: int
    sup_profile: SupProfile
    pair_diagnostics: tuple[PairDiagnostic, ...]
    dropped_pairs: tuple[CellPair, ...]
    cell_counts: tuple[int, ...]


def _boot_worker(payload, b):
    table, members, xis, seed = payload
    rng = stream_rng(seed, b, BOOT_STREAM)
    if len(members) == 0:
        return np.zeros(len(xis), dtype=np.float64), 0
    (phi_star, sigma_star, t_star), redraws = _draw_valid_resample(table, rng)
    row = centered_sup_values(table, members, phi_star, sigma_star, t_star, xis)
    return row, redraws


def evaluate_test(
    dataset: Dataset,
    grid: InstrumentGrid | None = None,
    config: TestConfig | None = None,
    measures=None,
    n_jobs=None,
) -> list[TestResult]:
    """Run the test once and score several trimming measures on shared
    bootstrap draws (one TestResult per measure)."""
    config = config or TestConfig()
    measures = list(measures) if measures is not None else [config.xi_measure]
    sample = validate_dataset(
        dataset,
        grid,
        policy=config.empty_cell_policy,
        treatment_support=config.treatment_support,
    )
    table = table_from_sample(sample)

    xis = sorted({float(x) for m in measures for x in m.points})
    xi_pos = {x: k for k, x in enumerate(xis)}
    sups, argmax = sup_values(table, xis)
    contact = contact_set(table, config.tau_n, config.xi0)

    payload = (table, contact.member_ids, xis, config.seed)
    out = replication_map(_boot_worker, payload, int(config.n_bootstrap), n_jobs)
    rows = np.stack([r for r, _ in out])
    n_redraws = int(sum(rd for _, rd in out))

    u = contact_statistics(table, config.xi0)
    member_mask = np.zeros(table.n_candidates, dtype=bool)
    member_mask[contact.member_ids] = True
    diags = []
    for pid, pair in enumerate(sample.pairs):
        mask = table.pair_id == pid
        diags.append(
            PairDiagnostic(
                pair=pair,
                count_low=int(sample.cell_counts[pair.cell_low]),
                count_high=int(sample.cell_counts[pair.cell_high]),
                n_candidates=int(mask.sum()),
                n_in_contact=int((mask & member_mask).sum()),
                max_violation=float(table.phi[mask].max()),
                max_stat=float(u[mask].max()),
            )
        )

    results = []
    for m in measures:
        sel = [xi_pos[float(x)] for x in m.points]
        w = np.asarray(m.weights, dtype=np.float64)
        ts = float(np.dot(sups[sel], w))
        stats = np.asarray([float(np.dot(rows[b, sel], w)) for b in range(len(rows))])
        c = critical_value(stats, config.alpha)
        profile = SupProfile(
            xis=tuple(m.points),
            weights=tuple(m.weights),
            sups=tuple(float(sups[k]) for k in sel),
            argmax=tuple(argmax[k] for k in sel),
            ts=ts,
        )
        results.append(
            TestResult(
                ts=ts,
                critical_value=c,
                p_value=p_value(stats, ts),
                reject=bool(ts > c),
                contact_set_size=contact.size,
                n_bootstrap_used=int(config.n_bootstrap),
                xi_spec=m.label,
                seed=int(config.seed),
                config=config,
                t_n=float(table.t_n),
                n_candidates=table.n_candidates,
                n_redraws=n_redraws,
                sup_profile=profile,
                pair_diagnostics=tuple(diags),
                dropped_pairs=sample.dropped_pairs,
                cell_counts=tuple(int(c_) for c_ in sample.cell_counts),
            )
        )
    return results


def run_test(
    dataset: Dataset,
    grid: InstrumentGrid | None = None,
    config: TestConfig | None = None,
    n_jobs=None,
) -> TestResult:
    """The full pipeline for one dataset and one trimming measure."""
    config = config or TestConfig()
    return evaluate_test(dataset, grid, config, [config.xi_measure], n_jobs)[0]
