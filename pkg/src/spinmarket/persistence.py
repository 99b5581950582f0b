"""Short-time persistence (STP) of clusters between two configurations.

For each cluster C at time t, the best-matching same-sign cluster D at
time t + dt is the one sharing the most sites; N_max = |C intersect D|.
The direct and inverse persistence of C are

    stp_d = N_max / |C|        stp_i = N_max / |D|

and the configuration-level value averages (stp_d + stp_i) / 2 over
clusters weighted by their size at time t. A cluster whose spins all
flipped has no same-sign partner and contributes zero persistence.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .clusters import ClusterLabeling, largest_cluster
from .errors import MissingSnapshots, SizeMismatch

STP_MODES = ("all", "largest")
SIGN_BOTH = 0  # sign code for values pooled over both spin signs


@dataclass
class MatchResult:
    """Best same-sign match in b for every cluster of a."""

    matched: np.ndarray   # (K_a,) int32 cluster id in b, -1 when none
    overlap: np.ndarray   # (K_a,) int64 shared-site count N_max


@dataclass
class StpReport:
    """Per-cluster and weighted persistence for one configuration pair."""

    delta_t: int
    signs: np.ndarray        # (K_a,) int8, sign of each cluster at t
    sizes_t: np.ndarray      # (K_a,) int64, N_i^t
    matched: np.ndarray      # (K_a,) int32, partner id at t+dt or -1
    n_max: np.ndarray        # (K_a,) int64
    stp_d: np.ndarray        # (K_a,) float64
    stp_i: np.ndarray        # (K_a,) float64
    weighted_stp_d: float
    weighted_stp_i: float
    combined: float

    def weighted(self, sign: int = SIGN_BOTH) -> tuple[float, float, float]:
        """Size-weighted (stp_d, stp_i, combined), optionally one sign only."""
        mask = np.ones(len(self.signs), dtype=bool) if sign == SIGN_BOTH \
            else self.signs == sign
        w = self.sizes_t[mask].astype(np.float64)
        total = w.sum()
        if total == 0:
            return (0.0, 0.0, 0.0)
        d = float((w * self.stp_d[mask]).sum() / total)
        i = float((w * self.stp_i[mask]).sum() / total)
        return (d, i, (d + i) / 2.0)


@dataclass
class StpPoint:
    """One row of an STP time series."""

    step: int
    delta_t: int
    mode: str
    sign: int          # +1, -1, or SIGN_BOTH
    stp_d: float
    stp_i: float
    combined: float


def match_clusters(a: ClusterLabeling, b: ClusterLabeling) -> MatchResult:
    """Best same-sign overlap partner in b for each cluster of a.

    Ties are broken by larger partner size, then lower partner id. Runs
    in one joint pass over the sites.
    """
    if a.side != b.side:
        raise SizeMismatch(f"lattice sides differ: {a.side} vs {b.side}")
    sign_a = a.signs[a.labels]
    sign_b = b.signs[b.labels]
    same = sign_a == sign_b  # a site in both clusters implies equal sign
    keys = a.labels[same].astype(np.int64) * b.n_clusters + b.labels[same]
    pair_keys, pair_counts = np.unique(keys, return_counts=True)
    ca = pair_keys // b.n_clusters
    cb = pair_keys % b.n_clusters
    matched = np.full(a.n_clusters, -1, dtype=np.int32)
    overlap = np.zeros(a.n_clusters, dtype=np.int64)
    if len(pair_keys):
        # order so the best candidate per a-cluster comes first
        order = np.lexsort((cb, -b.sizes[cb], -pair_counts, ca))
        ca, cb, pair_counts = ca[order], cb[order], pair_counts[order]
        first = np.ones(len(ca), dtype=bool)
        first[1:] = ca[1:] != ca[:-1]
        matched[ca[first]] = cb[first].astype(np.int32)
        overlap[ca[first]] = pair_counts[first]
    return MatchResult(matched=matched, overlap=overlap)


def stp_pair(a: ClusterLabeling, b: ClusterLabeling,
             delta_t: int | None = None) -> StpReport:
    """Persistence report for the pair (a at t, b at t + delta_t)."""
    match = match_clusters(a, b)
    if delta_t is None:
        delta_t = b.source_step - a.source_step
    n_max = match.overlap
    stp_d = n_max / a.sizes
    stp_i = np.zeros(a.n_clusters, dtype=np.float64)
    has = match.matched >= 0
    stp_i[has] = n_max[has] / b.sizes[match.matched[has]]
    w = a.sizes.astype(np.float64)
    total = w.sum()
    weighted_d = float((w * stp_d).sum() / total)
    weighted_i = float((w * stp_i).sum() / total)
    return StpReport(delta_t=int(delta_t), signs=a.signs.copy(),
                     sizes_t=a.sizes.copy(), matched=match.matched,
                     n_max=n_max, stp_d=stp_d, stp_i=stp_i,
                     weighted_stp_d=weighted_d, weighted_stp_i=weighted_i,
                     combined=(weighted_d + weighted_i) / 2.0)


def _largest_points(report: StpReport, a: ClusterLabeling, step: int) -> list[StpPoint]:
    points = []
    entries = []
    for sign in (1, -1):
        cid = largest_cluster(a, sign)
        if cid is None:
            continue
        d = float(report.stp_d[cid])
        i = float(report.stp_i[cid])
        points.append(StpPoint(step, report.delta_t, "largest", sign,
                               d, i, (d + i) / 2.0))
        entries.append((float(a.sizes[cid]), d, i))
    if entries:
        w, dv, iv = (np.array(col, dtype=np.float64) for col in zip(*entries))
        d = float((w * dv).sum() / w.sum())
        i = float((w * iv).sum() / w.sum())
        points.append(StpPoint(step, report.delta_t, "largest", SIGN_BOTH,
                               d, i, (d + i) / 2.0))
    return points


def stp_series(labelings: Sequence[ClusterLabeling], delta_t: int = 1,
               mode: str = "all") -> list[StpPoint]:
    """STP time series over all frame pairs separated by ``delta_t`` sweeps.

    "all" averages every cluster weighted by its size; "largest" tracks
    only the largest +1 and -1 clusters. Each pair emits rows for sign
    +1, -1 and the pooled value (sign 0).

    Raises MissingSnapshots when no frame pair at the requested spacing
    exists.
    """
    if mode not in STP_MODES:
        raise ValueError(f"mode must be one of {STP_MODES}, got {mode!r}")
    by_step = {lab.source_step: lab for lab in labelings}
    points: list[StpPoint] = []
    for step in sorted(by_step):
        partner = by_step.get(step + delta_t)
        if partner is None:
            continue
        a, b = by_step[step], partner
        report = stp_pair(a, b, delta_t)
        if mode == "largest":
            points.extend(_largest_points(report, a, step))
        else:
            for sign in (1, -1, SIGN_BOTH):
                if sign != SIGN_BOTH and not (report.signs == sign).any():
                    continue  # an absent sign contributes nothing
                d, i, c = report.weighted(sign)
                points.append(StpPoint(step, delta_t, "all", sign, d, i, c))
    if not points:
        raise MissingSnapshots(
            f"no configuration pairs at spacing delta_t={delta_t}")
    return points


def ensemble_mean_stp(series_per_replica: Iterable[Sequence[StpPoint]],
                      mode: str, sign: int) -> tuple[float, float, int]:
    """Mean and standard error over replicas of the per-replica mean STP.

    Returns (mean, stderr, n_replicas); stderr is 0 for a single replica.
    """
    means = []
    for series in series_per_replica:
        vals = [p.combined for p in series if p.mode == mode and p.sign == sign]
        if vals:
            means.append(float(np.mean(vals)))
    if not means:
        raise MissingSnapshots("no STP values for the requested mode/sign")
    n = len(means)
    mean = float(np.mean(means))
    stderr = float(np.std(means, ddof=1) / np.sqrt(n)) if n > 1 else 0.0
    return mean, stderr, n
