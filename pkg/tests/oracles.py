"""Straight-line reference implementations used to pin the engine down.

Everything here favors literalness over speed: plain loops over
observations, dense enumeration of interval endpoints (including one
interval beyond the data range, whose moments are identically zero), and
term-by-term variance arithmetic.  No code is shared with the package
beyond numpy itself.
"""
from __future__ import annotations

import itertools
import math


def _in_cell(zrow, cell) -> bool:
    return all(float(a) == float(b) for a, b in zip(zrow, cell))


def cell_supports(z):
    L = len(z[0])
    return [sorted({float(row[l]) for row in z}) for l in range(L)]


def all_cells(z):
    return list(itertools.product(*cell_supports(z)))


def cell_count(z, cell) -> int:
    return sum(1 for row in z if _in_cell(row, cell))


def scale_factor(z) -> float:
    n = len(z)
    t = float(n)
    for cell in all_cells(z):
        t *= cell_count(z, cell) / n
    return t


def adjacent_pairs(z):
    sups = cell_supports(z)
    L = len(sups)
    pairs = []
    for l in range(L):
        others = [sups[m] for m in range(L) if m != l]
        for ctx in itertools.product(*others):
            for j in range(len(sups[l]) - 1):
                low = tuple(ctx[:l]) + (sups[l][j],) + tuple(ctx[l:])
                high = tuple(ctx[:l]) + (sups[l][j + 1],) + tuple(ctx[l:])
                pairs.append((low, high))
    return pairs


def phi_sigma(y, d, z, pair, kind, lo, hi, d_min, d_max, t_n):
    """Literal four-term moment computation for one candidate.

    kind "max"/"min" uses the interval [lo, hi] on the boundary arm with
    signs -1/+1; kind "fosd" uses hi as the threshold c of D <= c.
    """
    n = len(y)
    low, high = pair

    def h(i) -> float:
        if kind == "fosd":
            return 1.0 if d[i] <= hi else 0.0
        d_class = d_max if kind == "max" else d_min
        sign = -1.0 if kind == "max" else 1.0
        if d[i] == d_class and lo <= y[i] <= hi:
            return sign
        return 0.0

    g1 = [1.0 if _in_cell(z[i], low) else 0.0 for i in range(n)]
    g2 = [1.0 if _in_cell(z[i], high) else 0.0 for i in range(n)]
    q1 = sum(g1) / n
    q2 = sum(g2) / n
    if q1 == 0.0 or q2 == 0.0:
        raise ZeroDivisionError("empty cell in oracle")
    p1 = sum(h(i) * g1[i] for i in range(n)) / n
    p2 = sum(h(i) * g2[i] for i in range(n)) / n
    s1 = sum(h(i) ** 2 * g1[i] for i in range(n)) / n
    s2 = sum(h(i) ** 2 * g2[i] for i in range(n)) / n
    phi = p2 / q2 - p1 / q1
    bracket = s2 / q2**2 - p2**2 / q2**3 + s1 / q1**2 - p1**2 / q1**3
    sigma = math.sqrt((t_n / n) * max(0.0, bracket))
    return phi, sigma


def candidates(y, d, z):
    """Every candidate with literal moments, including explicit zero-mass
    entries (an interval beyond the data range, a threshold below every
    treatment value) that realize the floor of the continuum family."""
    n = len(y)
    t_n = scale_factor(z)
    d_vals = sorted(set(d))
    d_min, d_max = d_vals[0], d_vals[-1]
    beyond = max(y) + 1.0
    out = []
    for pair in adjacent_pairs(z):
        low, high = pair
        for kind in ("max", "min"):
            d_class = d_max if kind == "max" else d_min
            pool = sorted(
                {
                    y[i]
                    for i in range(n)
                    if d[i] == d_class and (_in_cell(z[i], low) or _in_cell(z[i], high))
                }
            )
            if pool:
                intervals = [
                    (pool[i], pool[j])
                    for i in range(len(pool))
                    for j in range(i, len(pool))
                ]
                intervals.append((beyond, beyond))
            else:
                intervals = [(-math.inf, math.inf), (beyond, beyond)]
            for lo, hi in intervals:
                phi, sigma = phi_sigma(y, d, z, pair, kind, lo, hi, d_min, d_max, t_n)
                out.append(
                    {
                        "pair": pair,
                        "kind": kind,
                        "lo": lo,
                        "hi": hi,
                        "phi": phi,
                        "sigma": sigma,
                        "empty": lo == beyond,
                    }
                )
        thresholds = [v for v in d_vals if v < d_max]
        thresholds.append(d_vals[0] - 1.0)
        for c in thresholds:
            phi, sigma = phi_sigma(y, d, z, pair, "fosd", -math.inf, c, d_min, d_max, t_n)
            out.append(
                {
                    "pair": pair,
                    "kind": "fosd",
                    "lo": -math.inf,
                    "hi": c,
                    "phi": phi,
                    "sigma": sigma,
                    "empty": c < d_vals[0],
                }
            )
    return out, t_n


def sup_at(cands, t_n, xi) -> float:
    root = math.sqrt(t_n)
    return max(root * c["phi"] / max(xi, c["sigma"]) for c in cands)


def ts_value(y, d, z, points, weights) -> float:
    cands, t_n = candidates(y, d, z)
    return sum(w * sup_at(cands, t_n, xi) for xi, w in zip(points, weights))


def contact_members(cands, t_n, tau, xi0):
    root = math.sqrt(t_n)
    return [
        c for c in cands if root * abs(c["phi"]) / max(xi0, c["sigma"]) <= tau
    ]


def bootstrap_ts(y, d, z, idx, tau, xi0, points, weights) -> float:
    """Literal one-draw bootstrap statistic: contact set from the original
    sample, candidate endpoints kept, moments recomputed on the resample."""
    cands, t_n = candidates(y, d, z)
    members = contact_members(cands, t_n, tau, xi0)
    d_vals = sorted(set(d))
    d_min, d_max = d_vals[0], d_vals[-1]
    yr = [y[i] for i in idx]
    dr = [d[i] for i in idx]
    zr = [z[i] for i in idx]
    t_star = float(len(yr))
    for cell in all_cells(z):
        t_star *= cell_count(zr, cell) / len(yr)
    root = math.sqrt(t_star)
    out = []
    for c in members:
        phi_star, sigma_star = phi_sigma(
            yr, dr, zr, c["pair"], c["kind"], c["lo"], c["hi"], d_min, d_max, t_star
        )
        out.append(
            [root * (phi_star - c["phi"]) / max(xi, sigma_star) for xi in points]
        )
    sups = [max(row[k] for row in out) for k in range(len(points))] if out else [0.0] * len(points)
    return sum(w * s for w, s in zip(weights, sups))
