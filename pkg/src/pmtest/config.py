"""Test configuration and the measure used to integrate the trimming parameter."""
from __future__ import annotations

import math
from dataclasses import dataclass, field

# equal-weight sweep used by the reporting tables: nine small trims plus 1
DEFAULT_XI_SWEEP = (0.02, 0.03, 0.04, 0.05, 0.06, 0.07, 0.08, 0.09, 0.1, 1.0)


def _fmt(x: float) -> str:
    return format(float(x), "g")


@dataclass(frozen=True)
class XiMeasure:
    """Finite positive measure on the trimming parameter xi.

    The test statistic integrates the per-xi sup against this measure, so
    ``ts = sum_j weights[j] * S(points[j])``.  A Dirac measure has a single
    point with weight 1; grids carry equal weights by construction.
    """

    points: tuple[float, ...]
    weights: tuple[float, ...]

    def __post_init__(self):
        if len(self.points) == 0:
            raise ValueError("measure needs at least one point")
        if len(self.points) != len(self.weights):
            raise ValueError("points and weights differ in length")
        for x in self.points:
            if not (0.0 < x <= 1.0):
                raise ValueError(f"xi must lie in (0, 1], got {x}")
        for w in self.weights:
            if not (w > 0.0 and math.isfinite(w)):
                raise ValueError(f"weights must be positive and finite, got {w}")
        if len(set(self.points)) != len(self.points):
            raise ValueError("duplicate xi points")

    @classmethod
    def dirac(cls, xi: float) -> "XiMeasure":
        return cls((float(xi),), (1.0,))

    @classmethod
    def grid(cls, xis) -> "XiMeasure":
        pts = tuple(float(x) for x in xis)
        if not pts:
            raise ValueError("empty grid")
        w = 1.0 / len(pts)
        return cls(pts, (w,) * len(pts))

    @property
    def is_dirac(self) -> bool:
        return len(self.points) == 1

    @property
    def label(self) -> str:
        if self.is_dirac:
            return f"dirac:{_fmt(self.points[0])}"
        return "grid:" + ",".join(_fmt(x) for x in self.points)

    @classmethod
    def parse(cls, text: str) -> "XiMeasure":
        """Parse ``dirac:<xi>`` or ``grid:<xi1,...,xim>`` (equal weights)."""
        kind, _, rest = text.partition(":")
        if kind == "dirac" and rest:
            return cls.dirac(float(rest))
        if kind == "grid" and rest:
            return cls.grid(float(tok) for tok in rest.split(","))
        raise ValueError(f"bad measure spec {text!r}; expected dirac:<xi> or grid:<xi,...>")


def sweep_measures() -> list[XiMeasure]:
    """The table layout: one Dirac per sweep point plus the equal-weight grid."""
    out = [XiMeasure.dirac(x) for x in DEFAULT_XI_SWEEP]
    out.append(XiMeasure.grid(DEFAULT_XI_SWEEP))
    return out


NU_BAR = XiMeasure.grid(DEFAULT_XI_SWEEP)

_POLICIES = ("error", "drop-pair")


@dataclass(frozen=True)
class TestConfig:
    """Knobs for one run of the test.

    tau_n bounds the studentized moment below which a candidate is kept in
    the contact set; math.inf keeps every candidate (conservative variant).
    xi0 floors the denominator of the contact statistic only.
    treatment_support optionally declares the full ordered treatment support
    when a boundary arm may be unobserved; None means use observed values.
    """

    alpha: float = 0.05
    n_bootstrap: int = 1000
    tau_n: float = 2.0
    xi0: float = 1e-10
    xi_measure: XiMeasure = field(default_factory=lambda: XiMeasure.dirac(0.05))
    seed: int = 0
    empty_cell_policy: str = "error"
    treatment_support: tuple[float, ...] | None = None

    def __post_init__(self):
        if not (0.0 < self.alpha < 1.0):
            raise ValueError(f"alpha must be in (0,1), got {self.alpha}")
        if int(self.n_bootstrap) < 1:
            raise ValueError("n_bootstrap must be a positive integer")
        if not (self.tau_n > 0.0):
            raise ValueError("tau_n must be positive (math.inf allowed)")
        if not (self.xi0 > 0.0 and math.isfinite(self.xi0)):
            raise ValueError("xi0 must be a positive finite real")
        if self.empty_cell_policy not in _POLICIES:
            raise ValueError(f"empty_cell_policy must be one of {_POLICIES}")
        if not (0 <= int(self.seed) < 2**64):
            raise ValueError("seed must fit in 64 bits")
        if self.treatment_support is not None:
            sup = tuple(float(v) for v in self.treatment_support)
            if len(sup) < 2 or any(b <= a for a, b in zip(sup, sup[1:])):
                raise ValueError("treatment_support must be >=2 strictly increasing values")
            object.__setattr__(self, "treatment_support", sup)
