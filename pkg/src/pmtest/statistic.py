"""Weighted sup statistic and its integral over the trimming measure.

The candidate family implicitly contains directions supported on regions
with no data (intervals beyond the sample range, thresholds below every
treatment value); those have phi_hat = sigma_hat = 0 and studentized value
exactly 0, so every sup is floored at zero rather than materializing them.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .config import XiMeasure
from .errors import EmptyCandidateSetError
from .moments import MomentTable


@dataclass(frozen=True)
class SupProfile:
    """Per-xi sups, their maximizing candidate ids, and the integrated value.

    argmax entries are None when the zero floor binds (no candidate attains
    a nonnegative value).
    """

    xis: tuple[float, ...]
    weights: tuple[float, ...]
    sups: tuple[float, ...]
    argmax: tuple
    ts: float


def sup_values(table: MomentTable, xis):
    """Floored sup of sqrt(t_n) * phi / max(xi, sigma) for each xi.

    Numerators are computed once; each xi only changes the denominator.
    Returns (sups, argmax ids) with ties broken by lowest candidate id.
    """
    if table.n_candidates == 0:
        raise EmptyCandidateSetError("no candidates; cannot take a sup")
    num = np.sqrt(table.t_n) * table.phi
    sups = np.empty(len(xis), dtype=np.float64)
    arg: list = []
    denom = np.empty_like(table.sigma)
    for k, xi in enumerate(xis):
        np.maximum(table.sigma, xi, out=denom)
        vals = num / denom
        j = int(np.argmax(vals))
        v = float(vals[j])
        if v < 0.0:
            sups[k] = 0.0
            arg.append(None)
        else:
            sups[k] = v
            arg.append(j)
    return sups, arg


def weighted_sup(table: MomentTable, xi: float):
    """Sup at a single xi; returns (value, maximizing candidate id or None)."""
    sups, arg = sup_values(table, [float(xi)])
    return float(sups[0]), arg[0]


def ts_statistic(table: MomentTable, nu: XiMeasure) -> SupProfile:
    """Integrate the per-xi sups against the measure nu."""
    sups, arg = sup_values(table, nu.points)
    ts = float(np.dot(np.asarray(nu.weights), sups))
    return SupProfile(
        xis=tuple(nu.points),
        weights=tuple(nu.weights),
        sups=tuple(float(s) for s in sups),
        argmax=tuple(arg),
        ts=ts,
    )
