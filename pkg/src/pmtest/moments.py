"""Candidate family enumeration and the empirical moment engine.

Every candidate couples an adjacent cell pair g = (g1, g2) with a direction
h: an outcome interval restricted to a boundary treatment arm (kinds "max"
and "min"), or a lower treatment set D <= c (kind "fosd").  The engine
stores, per candidate, phi_hat = s * (m2/n2 - m1/n1) and the studentized
scale sigma_hat, where m_j counts qualifying observations in cell j, n_j is
the cell size, and s is -1 for "max" and +1 otherwise, so a positive
phi_hat always points in the violation direction.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .config import TestConfig
from .data import CellPair, Dataset, InstrumentGrid, Sample, TreatmentClass, validate_dataset
from .errors import DivisionByZeroCellError

KIND_MAX = 0
KIND_MIN = 1
KIND_FOSD = 2
KIND_NAMES = ("max", "min", "fosd")
KIND_SIGNS = (-1.0, 1.0, 1.0)


@dataclass(frozen=True)
class Candidate:
    """One (direction, cell pair) element of the candidate family."""

    pair: CellPair
    kind: str
    interval: tuple[float, float] | None = None
    threshold: float | None = None
    klass: TreatmentClass | None = None

    @property
    def sign(self) -> float:
        return KIND_SIGNS[KIND_NAMES.index(self.kind)]


@dataclass(frozen=True)
class _Block:
    """All candidates sharing one (pair, kind): per-observation slot codes
    plus the (start, end) slot index of each candidate.

    codes[i] = 2*slot + cellbit for observations that can enter a count
    (cellbit 1 for the upper cell), -1 otherwise.  Interval blocks give the
    candidate with slots (a, b) the count sum over slots a..b; threshold
    blocks always start at a = 0.
    """

    pair_id: int
    kind: int
    cell_low: int
    cell_high: int
    codes: np.ndarray
    grid_len: int
    a: np.ndarray
    b: np.ndarray
    start: int

    @property
    def size(self) -> int:
        return len(self.a)


@dataclass
class MomentTable:
    """Per-candidate empirical moments plus the global scale factor."""

    sample: Sample
    t_n: float
    cell_probs: np.ndarray
    pair_id: np.ndarray
    kind: np.ndarray
    lo: np.ndarray
    hi: np.ndarray
    phi: np.ndarray
    sigma: np.ndarray
    blocks: list

    @property
    def n_candidates(self) -> int:
        return len(self.phi)

    def candidate(self, i: int) -> Candidate:
        pair = self.sample.pairs[int(self.pair_id[i])]
        kind = KIND_NAMES[int(self.kind[i])]
        s = self.sample
        if kind == "fosd":
            return Candidate(pair=pair, kind=kind, threshold=float(self.hi[i]))
        klass = TreatmentClass(kind=kind, d_min=s.d_min, d_max=s.d_max)
        return Candidate(
            pair=pair,
            kind=kind,
            interval=(float(self.lo[i]), float(self.hi[i])),
            klass=klass,
        )


def empirical_measure(dataset: Dataset, v) -> float:
    """Mean of v(Y_i, D_i, Z_i) over the sample; v is a vectorized callable."""
    vals = np.asarray(v(dataset.y, dataset.d, dataset.z), dtype=float)
    return float(np.mean(vals))


def candidate_thresholds(dataset: Dataset, treatment_support=None) -> list[float]:
    """Distinct observed treatment values strictly below d_max.

    Thresholds at or above d_max make both conditional probabilities 1 and
    the moment identically zero, so they are excluded.
    """
    d_max = max(treatment_support) if treatment_support is not None else float(
        np.max(dataset.d)
    )
    vals = np.unique(dataset.d)
    return [float(v) for v in vals if v < d_max]


def candidate_intervals(dataset: Dataset, pair: CellPair, klass: TreatmentClass):
    """All closed intervals over the pooled sorted distinct outcomes of the
    pair's two cells restricted to the class arm; the full line when that
    pool is empty.

    Empirical conditional measures are step functions jumping only at data
    points, so the weighted sup over all closed intervals is attained on
    this finite family (or at zero, on intervals missing the data).
    """
    in_pair = _pair_membership(dataset, pair)
    arm = in_pair & (dataset.d == klass.value)
    vals = np.unique(dataset.y[arm])
    if vals.size == 0:
        return [(-np.inf, np.inf)]
    return [
        (float(vals[i]), float(vals[j]))
        for i in range(vals.size)
        for j in range(i, vals.size)
    ]


def _pair_membership(dataset: Dataset, pair: CellPair) -> np.ndarray:
    low = np.all(dataset.z.astype(float) == np.asarray(pair.low), axis=1)
    high = np.all(dataset.z.astype(float) == np.asarray(pair.high), axis=1)
    return low | high


def _candidate_h(candidate: Candidate, dataset: Dataset) -> np.ndarray:
    if candidate.kind == "fosd":
        return (dataset.d <= candidate.threshold).astype(float)
    lo, hi = candidate.interval
    ind = (dataset.d == candidate.klass.value) & (dataset.y >= lo) & (dataset.y <= hi)
    return candidate.sign * ind.astype(float)


def _cell_probs_for(candidate: Candidate, dataset: Dataset):
    z = dataset.z.astype(float)
    g1 = np.all(z == np.asarray(candidate.pair.low), axis=1).astype(float)
    g2 = np.all(z == np.asarray(candidate.pair.high), axis=1).astype(float)
    q1 = float(np.mean(g1))
    q2 = float(np.mean(g2))
    if q1 == 0.0 or q2 == 0.0:
        raise DivisionByZeroCellError(
            f"cell pair {candidate.pair.describe()} has an empty cell"
        )
    return g1, g2, q1, q2


def phi_hat(candidate: Candidate, dataset: Dataset) -> float:
    """Reference implementation of the candidate moment: the difference of
    h-conditional means across the pair, P(h g2)/P(g2) - P(h g1)/P(g1)."""
    g1, g2, q1, q2 = _cell_probs_for(candidate, dataset)
    h = _candidate_h(candidate, dataset)
    p1 = float(np.mean(h * g1))
    p2 = float(np.mean(h * g2))
    return p2 / q2 - p1 / q1


def sigma_hat(candidate: Candidate, dataset: Dataset, t_n: float) -> float:
    """Reference variance scale: sqrt of (t_n/n) times the four-term
    bracket, clamped at zero before the root."""
    g1, g2, q1, q2 = _cell_probs_for(candidate, dataset)
    h = _candidate_h(candidate, dataset)
    p1 = float(np.mean(h * g1))
    p2 = float(np.mean(h * g2))
    s1 = float(np.mean(h * h * g1))
    s2 = float(np.mean(h * h * g2))
    bracket = s2 / q2**2 - p2**2 / q2**3 + s1 / q1**2 - p1**2 / q1**3
    return float(np.sqrt((t_n / dataset.n) * max(0.0, bracket)))


def _moments_from_counts(cum_lo, cum_hi, a, b, sign, n_lo, n_hi, n, scale):
    """Vectorized phi/sigma for one block given cumulative slot counts."""
    base_lo = np.where(a > 0, cum_lo[a - 1], 0)
    base_hi = np.where(a > 0, cum_hi[a - 1], 0)
    m1 = (cum_lo[b] - base_lo).astype(np.float64)
    m2 = (cum_hi[b] - base_hi).astype(np.float64)
    phi = sign * (m2 / n_hi - m1 / n_lo)
    q1 = n_lo / n
    q2 = n_hi / n
    r1 = m1 / n
    r2 = m2 / n
    bracket = r2 / q2**2 - (r2 * r2) / q2**3 + r1 / q1**2 - (r1 * r1) / q1**3
    sigma = np.sqrt(scale * np.maximum(bracket, 0.0))
    return phi, sigma


def _block_counts(block: _Block, codes: np.ndarray):
    keep = codes >= 0
    bc = np.bincount(codes[keep], minlength=2 * block.grid_len)
    counts = bc.reshape(block.grid_len, 2)
    return np.cumsum(counts[:, 0]), np.cumsum(counts[:, 1])


def _build_blocks(sample: Sample):
    """Enumerate blocks and candidate endpoint arrays for every pair."""
    n = sample.n
    d = sample.d
    y = sample.y
    thresholds = np.asarray(
        [v for v in np.unique(d) if v < sample.d_max], dtype=np.float64
    )
    blocks = []
    lo_parts, hi_parts, pair_parts, kind_parts = [], [], [], []
    start = 0
    for pair_id, pair in enumerate(sample.pairs):
        in_lo = sample.cell_ids == pair.cell_low
        in_hi = sample.cell_ids == pair.cell_high
        in_pair = in_lo | in_hi
        for kind, d_class in ((KIND_MAX, sample.d_max), (KIND_MIN, sample.d_min)):
            arm = in_pair & (d == d_class)
            vals = np.unique(y[arm])
            m = vals.size
            codes = np.full(n, -1, dtype=np.int64)
            if m:
                codes[arm] = 2 * np.searchsorted(vals, y[arm]) + in_hi[arm]
                a, b = np.triu_indices(m)
                lo_parts.append(vals[a])
                hi_parts.append(vals[b])
            else:
                a = np.zeros(1, dtype=np.int64)
                b = np.zeros(1, dtype=np.int64)
                lo_parts.append(np.asarray([-np.inf]))
                hi_parts.append(np.asarray([np.inf]))
            block = _Block(
                pair_id=pair_id,
                kind=kind,
                cell_low=pair.cell_low,
                cell_high=pair.cell_high,
                codes=codes,
                grid_len=max(m, 1),
                a=a,
                b=b,
                start=start,
            )
            blocks.append(block)
            pair_parts.append(np.full(block.size, pair_id, dtype=np.int64))
            kind_parts.append(np.full(block.size, kind, dtype=np.int8))
            start += block.size

        mt = thresholds.size
        arm = in_pair & (d <= thresholds[-1]) if mt else np.zeros(n, dtype=bool)
        codes = np.full(n, -1, dtype=np.int64)
        if mt:
            codes[arm] = 2 * np.searchsorted(thresholds, d[arm], side="left") + in_hi[arm]
            a = np.zeros(mt, dtype=np.int64)
            b = np.arange(mt, dtype=np.int64)
            lo_parts.append(np.full(mt, -np.inf))
            hi_parts.append(thresholds.copy())
        else:
            a = np.zeros(1, dtype=np.int64)
            b = np.zeros(1, dtype=np.int64)
            lo_parts.append(np.asarray([-np.inf]))
            hi_parts.append(np.asarray([-np.inf]))
        block = _Block(
            pair_id=pair_id,
            kind=KIND_FOSD,
            cell_low=pair.cell_low,
            cell_high=pair.cell_high,
            codes=codes,
            grid_len=max(mt, 1),
            a=a,
            b=b,
            start=start,
        )
        blocks.append(block)
        pair_parts.append(np.full(block.size, pair_id, dtype=np.int64))
        kind_parts.append(np.full(block.size, KIND_FOSD, dtype=np.int8))
        start += block.size

    lo = np.concatenate(lo_parts) if lo_parts else np.zeros(0)
    hi = np.concatenate(hi_parts) if hi_parts else np.zeros(0)
    pair_id_arr = np.concatenate(pair_parts) if pair_parts else np.zeros(0, np.int64)
    kind_arr = np.concatenate(kind_parts) if kind_parts else np.zeros(0, np.int8)
    return blocks, lo, hi, pair_id_arr, kind_arr


def table_from_sample(sample: Sample) -> MomentTable:
    n = sample.n
    probs = sample.cell_counts / n
    t_n = float(n * np.prod(probs[sample.counted_cells]))
    scale = t_n / n
    blocks, lo, hi, pair_id_arr, kind_arr = _build_blocks(sample)

    phi = np.empty(len(lo), dtype=np.float64)
    sigma = np.empty(len(lo), dtype=np.float64)
    for block in blocks:
        cum_lo, cum_hi = _block_counts(block, block.codes)
        n_lo = int(sample.cell_counts[block.cell_low])
        n_hi = int(sample.cell_counts[block.cell_high])
        if n_lo == 0 or n_hi == 0:
            raise DivisionByZeroCellError(
                f"pair {sample.pairs[block.pair_id].describe()} has an empty cell"
            )
        ph, sg = _moments_from_counts(
            cum_lo, cum_hi, block.a, block.b, KIND_SIGNS[block.kind], n_lo, n_hi, n, scale
        )
        sl = slice(block.start, block.start + block.size)
        phi[sl] = ph
        sigma[sl] = sg

    return MomentTable(
        sample=sample,
        t_n=t_n,
        cell_probs=probs,
        pair_id=pair_id_arr,
        kind=kind_arr,
        lo=lo,
        hi=hi,
        phi=phi,
        sigma=sigma,
        blocks=blocks,
    )


def build_moment_table(
    dataset: Dataset,
    grid: InstrumentGrid | None = None,
    config: TestConfig | None = None,
) -> MomentTable:
    """Validate the dataset and materialize the full candidate moment table."""
    config = config or TestConfig()
    sample = validate_dataset(
        dataset,
        grid,
        policy=config.empty_cell_policy,
        treatment_support=config.treatment_support,
    )
    return table_from_sample(sample)
