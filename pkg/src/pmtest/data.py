"""Domain types: dataset, rectangular instrument grid, cell pairs, validation."""
from __future__ import annotations

import itertools
import warnings
from dataclasses import dataclass

import numpy as np
import pandas as pd

from .errors import (
    DegenerateTreatmentError,
    EmptyInstrumentCellError,
    LengthMismatchError,
    PmtestError,
    UnknownColumnError,
    UnknownInstrumentValueError,
)


@dataclass(frozen=True)
class Dataset:
    """One sample of (outcome, ordered discrete treatment, discrete instrument).

    y and d are float vectors of length n; z is an (n, L) array of discrete
    instrument codes with L >= 2 dimensions.
    """

    y: np.ndarray
    d: np.ndarray
    z: np.ndarray

    def __post_init__(self):
        y = np.asarray(self.y, dtype=np.float64)
        d = np.asarray(self.d, dtype=np.float64)
        z = np.asarray(self.z)
        if y.ndim != 1 or d.ndim != 1 or z.ndim != 2:
            raise LengthMismatchError(
                f"expected y (n,), d (n,), z (n, L); got {y.shape}, {d.shape}, {z.shape}"
            )
        if not (len(y) == len(d) == len(z)):
            raise LengthMismatchError(
                f"column lengths differ: y={len(y)}, d={len(d)}, z={len(z)}"
            )
        if len(y) < 1:
            raise LengthMismatchError("empty dataset")
        if z.shape[1] < 2:
            raise PmtestError(
                f"need at least two instrument dimensions, got L={z.shape[1]}"
            )
        if not (np.isfinite(y).all() and np.isfinite(d).all()):
            raise PmtestError("y and d must be finite")
        object.__setattr__(self, "y", y)
        object.__setattr__(self, "d", d)
        object.__setattr__(self, "z", z)

    @property
    def n(self) -> int:
        return len(self.y)

    @property
    def n_dims(self) -> int:
        return self.z.shape[1]


@dataclass(frozen=True)
class InstrumentGrid:
    """Rectangular instrument support: one ordered value list per dimension.

    supports are stored ascending; directions[l] is +1 when the monotonicity
    ordering follows ascending values in dimension l and -1 when it is
    reversed.  Cells are numbered row-major over ascending support indices,
    so ids do not change when a direction flag flips.
    """

    supports: tuple[tuple[float, ...], ...]
    directions: tuple[int, ...] = ()

    def __post_init__(self):
        sups = tuple(tuple(float(v) for v in s) for s in self.supports)
        if len(sups) < 2:
            raise PmtestError("need at least two instrument dimensions")
        for s in sups:
            if len(s) < 1:
                raise PmtestError("each dimension needs a nonempty support")
            if any(b <= a for a, b in zip(s, s[1:])):
                raise PmtestError("supports must be strictly increasing")
        dirs = self.directions or (1,) * len(sups)
        dirs = tuple(int(v) for v in dirs)
        if len(dirs) != len(sups) or any(v not in (-1, 1) for v in dirs):
            raise PmtestError("directions must be +1/-1, one per dimension")
        object.__setattr__(self, "supports", sups)
        object.__setattr__(self, "directions", dirs)

    @classmethod
    def from_dataset(cls, dataset: Dataset, directions=()) -> "InstrumentGrid":
        sups = tuple(
            tuple(np.unique(dataset.z[:, l]).astype(float))
            for l in range(dataset.n_dims)
        )
        return cls(sups, tuple(directions))

    @property
    def n_dims(self) -> int:
        return len(self.supports)

    @property
    def shape(self) -> tuple[int, ...]:
        return tuple(len(s) for s in self.supports)

    @property
    def n_cells(self) -> int:
        out = 1
        for k in self.shape:
            out *= k
        return out

    def cell_ids(self, z: np.ndarray) -> np.ndarray:
        """Map rows of instrument codes to cell ids; unknown values raise."""
        z = np.asarray(z)
        idx = np.empty(z.shape, dtype=np.int64)
        for l, sup in enumerate(self.supports):
            vals = np.asarray(sup)
            col = z[:, l].astype(float)
            pos = np.searchsorted(vals, col)
            pos_clip = np.minimum(pos, len(vals) - 1)
            bad = vals[pos_clip] != col
            if bad.any():
                i = int(np.flatnonzero(bad)[0])
                raise UnknownInstrumentValueError(
                    f"z[{i},{l}]={col[i]} not in support {sup} of dimension {l}"
                )
            idx[:, l] = pos_clip
        return np.ravel_multi_index(tuple(idx.T), self.shape)

    def cell_coords(self, cell_id: int) -> tuple[float, ...]:
        idx = np.unravel_index(int(cell_id), self.shape)
        return tuple(self.supports[l][i] for l, i in enumerate(idx))

    def cell_id_of(self, coords) -> int:
        row = np.asarray([list(coords)], dtype=float)
        return int(self.cell_ids(row)[0])


@dataclass(frozen=True)
class CellPair:
    """Adjacent instrument cells along one dimension; low is first under the
    dimension's direction flag."""

    dim: int
    low: tuple[float, ...]
    high: tuple[float, ...]
    cell_low: int
    cell_high: int

    def describe(self) -> str:
        return f"{self.low}->{self.high}"


@dataclass(frozen=True)
class TreatmentClass:
    """Boundary treatment arm entering the interval candidates.

    kind "max" compares the top arm (constraint sign -1 so that the null
    keeps phi <= 0); kind "min" compares the bottom arm (sign +1).
    """

    kind: str
    d_min: float
    d_max: float

    def __post_init__(self):
        if self.kind not in ("max", "min"):
            raise ValueError(f"kind must be 'max' or 'min', got {self.kind!r}")
        if not (self.d_min < self.d_max):
            raise ValueError("need d_min < d_max")

    @property
    def value(self) -> float:
        return self.d_max if self.kind == "max" else self.d_min

    @property
    def sign(self) -> float:
        return -1.0 if self.kind == "max" else 1.0


def enumerate_adjacent_pairs(grid: InstrumentGrid) -> tuple[CellPair, ...]:
    """All ordered adjacent cell pairs: for each dimension l and each fixed
    context of the other coordinates, consecutive support values under the
    dimension's direction flag.  Count is sum_l (k_l - 1) * prod_{m != l} k_m.
    """
    pairs = []
    for l in range(grid.n_dims):
        ordered = grid.supports[l]
        if grid.directions[l] < 0:
            ordered = ordered[::-1]
        others = [grid.supports[m] for m in range(grid.n_dims) if m != l]
        for ctx in itertools.product(*others):
            for j in range(len(ordered) - 1):
                low = list(ctx[:l]) + [ordered[j]] + list(ctx[l:])
                high = list(ctx[:l]) + [ordered[j + 1]] + list(ctx[l:])
                pairs.append(
                    CellPair(
                        dim=l,
                        low=tuple(low),
                        high=tuple(high),
                        cell_low=grid.cell_id_of(low),
                        cell_high=grid.cell_id_of(high),
                    )
                )
    return tuple(pairs)


@dataclass(frozen=True)
class Sample:
    """Validated dataset bound to a grid: cell ids, occupancy, treatment
    support, and the pair family actually in force."""

    y: np.ndarray
    d: np.ndarray
    cell_ids: np.ndarray
    grid: InstrumentGrid
    cell_counts: np.ndarray
    d_support: tuple[float, ...]
    d_min: float
    d_max: float
    pairs: tuple[CellPair, ...]
    dropped_pairs: tuple[CellPair, ...]
    counted_cells: np.ndarray

    @property
    def n(self) -> int:
        return len(self.y)


def validate_dataset(
    dataset: Dataset,
    grid: InstrumentGrid | None = None,
    policy: str = "error",
    treatment_support=None,
) -> Sample:
    """Bind a dataset to a grid and check the rectangular-support contract.

    policy "error" raises on any empty instrument cell; "drop-pair" removes
    every adjacent pair touching an empty cell (warning emitted) and the
    scale factor then multiplies over occupied cells only.
    """
    if grid is None:
        grid = InstrumentGrid.from_dataset(dataset)
    cell_ids = grid.cell_ids(dataset.z)
    counts = np.bincount(cell_ids, minlength=grid.n_cells)

    observed = np.unique(dataset.d)
    if treatment_support is not None:
        support = tuple(float(v) for v in treatment_support)
        extra = [v for v in observed if v not in support]
        if extra:
            raise DegenerateTreatmentError(
                f"observed treatment values {extra} outside declared support {support}"
            )
    else:
        support = tuple(float(v) for v in observed)
    if len(observed) < 2:
        raise DegenerateTreatmentError(
            f"treatment takes {len(observed)} distinct value(s); need at least 2"
        )

    pairs = enumerate_adjacent_pairs(grid)
    empty = np.flatnonzero(counts == 0)
    dropped: tuple[CellPair, ...] = ()
    counted = np.ones(grid.n_cells, dtype=bool)
    if empty.size:
        if policy == "error":
            coords = [grid.cell_coords(c) for c in empty[:8]]
            raise EmptyInstrumentCellError(
                f"{empty.size} empty instrument cell(s), e.g. {coords}"
            )
        if policy != "drop-pair":
            raise PmtestError(f"unknown empty_cell_policy {policy!r}")
        empty_set = set(int(c) for c in empty)
        keep, drop = [], []
        for p in pairs:
            (drop if (p.cell_low in empty_set or p.cell_high in empty_set) else keep).append(p)
        pairs, dropped = tuple(keep), tuple(drop)
        counted = counts > 0
        warnings.warn(
            f"dropped {len(dropped)} pair(s) touching empty cells: "
            + "; ".join(p.describe() for p in dropped[:8]),
            stacklevel=2,
        )

    return Sample(
        y=dataset.y,
        d=dataset.d,
        cell_ids=cell_ids,
        grid=grid,
        cell_counts=counts,
        d_support=support,
        d_min=float(support[0]),
        d_max=float(support[-1]),
        pairs=pairs,
        dropped_pairs=dropped,
        counted_cells=counted,
    )


def read_csv_dataset(path, y_col="y", d_col="d", z_cols=None) -> Dataset:
    """Load a dataset from a headed CSV.

    z_cols defaults to every column named z1, z2, ... in index order.
    """
    df = pd.read_csv(path)
    if z_cols is None:
        z_cols = sorted(
            (c for c in df.columns if c.startswith("z") and c[1:].isdigit()),
            key=lambda c: int(c[1:]),
        )
    missing = [c for c in [y_col, d_col, *z_cols] if c not in df.columns]
    if missing:
        raise UnknownColumnError(
            f"missing column(s) {missing}; header has {list(df.columns)}"
        )
    if len(z_cols) < 2:
        raise UnknownColumnError(
            f"need at least two instrument columns, found {list(z_cols)}"
        )
    try:
        y = df[y_col].to_numpy(dtype=float)
        d = df[d_col].to_numpy(dtype=float)
        z = df[list(z_cols)].to_numpy(dtype=float)
    except (TypeError, ValueError) as exc:
        raise PmtestError(f"non-numeric entries in input columns: {exc}") from exc
    return Dataset(y=y, d=d, z=z)
