"""Count series, exponential rate fits and truncated Poincare series."""

from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass, field

import numpy as np

from ..errors import UsageError
from ..spectral import common_span

KINDS = ("full-orbit", "coset", "cylinder-restricted", "conjugacy")


@dataclass
class CountSeries:
    """Cumulative counts ``N(T)`` at increasing thresholds.

    ``lengths``/``mult`` keep the realised values with their multiplicities
    when they are known, so the series can be re-sampled at any threshold.
    Multiplicities may be Python integers beyond 64 bits.
    """

    thresholds: np.ndarray
    counts: list
    kind: str
    provenance: str = ""
    lengths: np.ndarray | None = None
    mult: list | None = None
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.kind not in KINDS:
            raise UsageError(f"unknown series kind {self.kind!r}")
        self.thresholds = np.asarray(self.thresholds, dtype=float)
        self.counts = [int(c) for c in self.counts]
        if len(self.counts) != len(self.thresholds):
            raise UsageError("thresholds and counts differ in length")
        if np.any(np.diff(self.thresholds) <= 0):
            raise UsageError("thresholds must increase strictly")
        if any(b < a for a, b in zip(self.counts, self.counts[1:])):
            raise UsageError("counts must be nondecreasing")

    @classmethod
    def from_lengths(cls, lengths, mult, kind, grid=None, T_max=None, provenance="", meta=None) -> "CountSeries":
        """Build a series from realised values ``lengths`` with multiplicities ``mult``."""
        lengths = np.asarray(lengths, dtype=float)
        order = np.argsort(lengths, kind="stable")
        lengths = lengths[order]
        mult = [int(mult[i]) for i in order]
        if grid is None:
            grid = default_grid(lengths, T_max)
        grid = np.asarray(grid, dtype=float)
        cum = [0]
        for m in mult:
            cum.append(cum[-1] + m)
        pos = np.searchsorted(lengths, grid + 1e-9, side="right")
        counts = [cum[p] for p in pos]
        return cls(grid, counts, kind, provenance, lengths, mult, dict(meta or {}))

    def count_at(self, T: float) -> int:
        if self.lengths is None:
            i = np.searchsorted(self.thresholds, T + 1e-12, side="right") - 1
            if i < 0:
                return 0
            return self.counts[i]
        return sum(m for v, m in zip(self.lengths, self.mult) if v <= T + 1e-9)

    def resample(self, grid) -> "CountSeries":
        if self.lengths is None:
            raise UsageError("series without realised lengths cannot be resampled")
        return CountSeries.from_lengths(self.lengths, self.mult, self.kind, grid, None, self.provenance, self.meta)

    def to_csv(self, fh) -> None:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["T", "N", "kind", "config_hash"])
        for t, n in zip(self.thresholds, self.counts):
            w.writerow([f"{t:.17g}", n, self.kind, self.provenance])


def default_grid(lengths: np.ndarray, T_max: float | None, max_points: int = 500) -> np.ndarray:
    """The distinct realised values when there are few of them, otherwise an even grid."""
    top = T_max if T_max is not None else (float(lengths.max()) if len(lengths) else 0.0)
    vals = np.unique(np.round(lengths[lengths <= top + 1e-9], 9))
    if 0 < len(vals) <= max_points:
        return vals
    return np.linspace(0.0, top, 201)[1:]


@dataclass
class RateFit:
    rate: float
    intercept: float
    window: tuple
    residual: float
    lattice_mode: float | None = None
    n_points: int = 0

    def to_dict(self) -> dict:
        return {
            "rate": self.rate,
            "intercept": self.intercept,
            "window": list(self.window),
            "residual": self.residual,
            "lattice_mode": self.lattice_mode,
            "n_points": self.n_points,
        }

    def to_json(self, fh) -> None:
        json.dump(self.to_dict(), fh, indent=2, sort_keys=True, default=_json_float)
        fh.write("\n")


def _json_float(x):
    if isinstance(x, (np.floating, np.integer)):
        return x.item()
    raise TypeError(f"cannot serialise {type(x).__name__}")


def fit_rate(series: CountSeries, window=None, lattice_mode=None) -> RateFit:
    """Least-squares slope of ``log N(T)`` against ``T``.

    ``lattice_mode`` may be a span ``b`` or ``True`` to detect one from the
    realised lengths; the fit then samples only the progression of realised
    values, which avoids the staircase bias of an even grid.
    """
    lo, hi = window if window is not None else (float(series.thresholds[0]), float(series.thresholds[-1]))
    span = None
    if lattice_mode:
        if series.lengths is None:
            raise UsageError("lattice mode needs the realised lengths of the series")
        vals = np.unique(np.round(series.lengths, 9))
        # realised values form offset + span * Z; the span comes from their gaps
        span = float(lattice_mode) if lattice_mode is not True else common_span(vals - vals[0])
        if span is None:
            raise UsageError("realised lengths are not arithmetic; lattice mode does not apply")
        span = float(span)
        offset = vals[0] - span * math.floor(vals[0] / span + 1e-9)
        k0 = math.ceil((lo - offset) / span - 1e-9)
        k1 = math.floor((hi - offset) / span + 1e-9)
        ts = offset + span * np.arange(k0, k1 + 1)
        ns = [series.count_at(t) for t in ts]
    else:
        mask = (series.thresholds >= lo - 1e-12) & (series.thresholds <= hi + 1e-12)
        ts = series.thresholds[mask]
        ns = [c for c, m in zip(series.counts, mask) if m]
    pts = [(t, math.log(n)) for t, n in zip(ts, ns) if n > 0]
    if len(pts) < 5:
        raise UsageError(f"fit window [{lo}, {hi}] holds {len(pts)} usable points; at least 5 are needed")
    t, y = np.array(pts).T
    if np.ptp(t) == 0:
        raise UsageError("degenerate fit window")
    (rate, intercept), res, *_ = np.polyfit(t, y, 1, full=True)
    residual = float(math.sqrt(res[0] / len(t))) if len(res) else 0.0
    return RateFit(float(rate), float(intercept), (float(lo), float(hi)), residual, span, len(t))


@dataclass
class PoincareValue:
    s: float
    value: float
    tail_bound: float
    converged: bool
    max_T: float
    reliable: bool = True

    def __float__(self):
        return self.value


def poincare_partial(series: CountSeries, s: float, max_T: float | None = None, rate: float | None = None,
                     margin: float = 0.1) -> PoincareValue:
    """Truncated Laplace-Stieltjes transform ``sum exp(-s L)`` over realised lengths ``L <= max_T``.

    When ``rate`` is given the tail beyond ``max_T`` is bounded by assuming
    ``N(T) <= N(max_T) exp(rate (T - max_T))``.  ``s <= rate`` is flagged as
    divergent and carries no tail bound; ``s <= rate + margin`` is flagged as
    not reliable.
    """
    if series.lengths is not None:
        lengths, mult = series.lengths, series.mult
    else:
        lengths = series.thresholds
        mult = np.diff([0] + series.counts).tolist()
    top = float(lengths[-1]) if max_T is None else float(max_T)
    # logs keep multiplicities beyond the float range usable
    terms = [math.exp(math.log(m) - s * float(L)) for L, m in zip(lengths, mult) if m > 0 and L <= top + 1e-9]
    value = math.fsum(terms)
    converged = rate is None or s > rate
    tail = float("nan")
    if rate is not None and converged:
        n_top = series.count_at(top)
        # integrate exp(-sT) dN with N growing at most like exp(rate T)
        tail = math.exp(math.log(n_top) - s * top) * s / (s - rate) if n_top > 0 else 0.0
    reliable = rate is None or s > rate + margin
    return PoincareValue(float(s), value, tail, converged, top, reliable)
