"""Configuration- and series-level observables.

The microscopic stability factor (MSF) of two configurations is the
fraction of spins holding the same state in both, i.e. 1 minus the
normalized Hamming distance. Log returns are taken on |M| with a
positive floor (default one spin's worth, 1/P): the magnetization
crosses zero routinely near criticality and the floor both keeps the
logarithm defined and caps the resulting spikes. This flooring shapes
the extreme return tails; see the README for discussion.

All statistics are two-pass computations, no streaming approximations.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DegenerateSeries, SizeMismatch
from .lattice import SpinLattice


def msf(config_a: SpinLattice, config_b: SpinLattice) -> float:
    """Fraction of spins with the same state in both configurations."""
    if config_a.side != config_b.side:
        raise SizeMismatch(f"lattice sides differ: {config_a.side} vs {config_b.side}")
    same = int(np.count_nonzero(config_a.spins == config_b.spins))
    return same / config_a.n_sites


def log_return(m_now: float, m_prev: float, floor: float) -> float:
    """ln |M(t)| - ln |M(t-1)| with both magnitudes floored at ``floor``."""
    if not (floor > 0):
        raise ValueError("floor must be > 0")
    return math.log(max(abs(m_now), floor)) - math.log(max(abs(m_prev), floor))


def autocorrelation(series, max_lag: int) -> np.ndarray:
    """Sample autocorrelation rho(lag) for lag = 0..max_lag.

    rho(l) = sum_t (x_t - xbar)(x_{t+l} - xbar) / sum_t (x_t - xbar)^2,
    with the mean and variance of the full series. rho(0) = 1.

    Raises DegenerateSeries when the series variance is zero.
    """
    x = np.asarray(series, dtype=np.float64)
    if max_lag < 0:
        raise ValueError("max_lag must be >= 0")
    if len(x) < max_lag + 2:
        raise ValueError(f"series length {len(x)} < max_lag + 2 = {max_lag + 2}")
    centered = x - x.mean()
    denom = float(centered @ centered)
    if denom == 0.0:
        raise DegenerateSeries("series variance is zero")
    out = np.empty(max_lag + 1, dtype=np.float64)
    out[0] = 1.0
    for lag in range(1, max_lag + 1):
        out[lag] = float(centered[:-lag] @ centered[lag:]) / denom
    return out


def excess_kurtosis(series) -> float:
    """Fourth standardized sample moment minus 3 (0 for a Gaussian)."""
    x = np.asarray(series, dtype=np.float64)
    if len(x) < 4:
        raise ValueError(f"need at least 4 points, got {len(x)}")
    centered = x - x.mean()
    m2 = float((centered ** 2).mean())
    if m2 == 0.0:
        raise DegenerateSeries("series variance is zero")
    m4 = float((centered ** 4).mean())
    return m4 / (m2 * m2) - 3.0


def volatility_clustering(returns, max_lag: int) -> np.ndarray:
    """Autocorrelation of absolute returns (clustering diagnostic)."""
    return autocorrelation(np.abs(np.asarray(returns, dtype=np.float64)), max_lag)


@dataclass
class RunSeries:
    """Time-indexed record of a run: M, returns, MSF and temperature.

    ``r`` and ``msf_series`` may hold NaN where a value is undefined
    (nothing recorded before the first frame). Steps are sweep counts
    from the start of the measurement phase and strictly increase.
    """

    steps: np.ndarray              # (n,) int64
    temperature: np.ndarray        # (n,) float64
    m: np.ndarray                  # (n,) float64
    r: np.ndarray                  # (n,) float64, NaN where absent
    msf_series: np.ndarray         # (n,) float64, NaN where absent
    floor: float = 0.0

    def __len__(self) -> int:
        return len(self.steps)

    def validate(self) -> None:
        if not (np.diff(self.steps) > 0).all():
            raise ValueError("steps must be strictly increasing")
        if np.nanmax(np.abs(self.m), initial=0.0) > 1.0:
            raise ValueError("M out of [-1, 1]")
        finite_msf = self.msf_series[np.isfinite(self.msf_series)]
        if len(finite_msf) and (finite_msf.min() < 0.0 or finite_msf.max() > 1.0):
            raise ValueError("MSF out of [0, 1]")
        lengths = {len(self.steps), len(self.temperature), len(self.m),
                   len(self.r), len(self.msf_series)}
        if len(lengths) != 1:
            raise ValueError("column lengths differ")

    def segment(self, t_low: float = -np.inf, t_high: float = np.inf) -> np.ndarray:
        """Boolean mask of frames with t_low <= temperature < t_high."""
        return (self.temperature >= t_low) & (self.temperature < t_high)

    def returns(self, mask: np.ndarray | None = None) -> np.ndarray:
        """Finite return values, optionally restricted to a frame mask."""
        r = self.r if mask is None else self.r[mask]
        return r[np.isfinite(r)]

    def msf_values(self, mask: np.ndarray | None = None) -> np.ndarray:
        v = self.msf_series if mask is None else self.msf_series[mask]
        return v[np.isfinite(v)]


def returns_from_magnetization(m: np.ndarray, floor: float,
                               m_before_first: float | None = None) -> np.ndarray:
    """Vector of log returns for a magnetization series under the floor rule.

    Entry k is the return from frame k-1 to frame k; entry 0 uses
    ``m_before_first`` when given and is NaN otherwise.
    """
    m = np.asarray(m, dtype=np.float64)
    if not (floor > 0):
        raise ValueError("floor must be > 0")
    logs = np.log(np.maximum(np.abs(m), floor))
    out = np.empty(len(m), dtype=np.float64)
    out[1:] = logs[1:] - logs[:-1]
    if m_before_first is None:
        out[0] = np.nan
    else:
        out[0] = logs[0] - math.log(max(abs(m_before_first), floor))
    return out
