"""Same-sign cluster identification and size-distribution analysis.

A cluster is a maximal set of equal-sign spins connected through
4-neighbour adjacency on the torus (lattice spacing 1). Labeling is
union-find; the size distributions and the discrete power-law fits of
their tails are the main morphology observables.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import minimize_scalar
from scipy.special import zeta

from . import _kernels
from .errors import DegenerateTail, InsufficientTail
from .lattice import SpinLattice


@dataclass
class ClusterLabeling:
    """Partition of lattice sites into same-sign 4-connected clusters.

    Cluster ids are compact (0..n_clusters-1) and ordered by each
    cluster's smallest site index, so ids are deterministic.
    """

    side: int
    labels: np.ndarray        # (P,) int32 cluster id per site
    sizes: np.ndarray         # (K,) int64
    signs: np.ndarray         # (K,) int8, +-1
    source_step: int = 0

    @property
    def n_sites(self) -> int:
        return self.side * self.side

    @property
    def n_clusters(self) -> int:
        return len(self.sizes)

    def members(self, cluster_id: int) -> np.ndarray:
        """Site indices belonging to one cluster."""
        return np.flatnonzero(self.labels == cluster_id)


@dataclass
class ClusterStats:
    """Per-sign cluster-size histograms for one or more labelings."""

    hist: dict[int, dict[int, int]] = field(
        default_factory=lambda: {1: {}, -1: {}})
    n_sites_total: int = 0

    def add(self, labeling: ClusterLabeling) -> "ClusterStats":
        for size, sign in zip(labeling.sizes, labeling.signs):
            h = self.hist[int(sign)]
            h[int(size)] = h.get(int(size), 0) + 1
        self.n_sites_total += labeling.n_sites
        return self

    def merge(self, other: "ClusterStats") -> "ClusterStats":
        for sign in (1, -1):
            h = self.hist[sign]
            for size, count in other.hist[sign].items():
                h[size] = h.get(size, 0) + count
        self.n_sites_total += other.n_sites_total
        return self

    def largest_size(self, sign: int) -> int:
        h = self.hist[sign]
        return max(h) if h else 0

    def n_clusters(self, sign: int) -> int:
        return sum(self.hist[sign].values())

    def mass(self, sign: int) -> int:
        """Total sites covered by clusters of this sign."""
        return sum(s * c for s, c in self.hist[sign].items())

    def tail(self, xmin: int, sign: int | None = None) -> tuple[np.ndarray, np.ndarray]:
        """(sizes, counts) of clusters with size >= xmin, pooled or per sign."""
        pooled: dict[int, int] = {}
        signs = (1, -1) if sign is None else (sign,)
        for s in signs:
            for size, count in self.hist[s].items():
                if size >= xmin:
                    pooled[size] = pooled.get(size, 0) + count
        sizes = np.array(sorted(pooled), dtype=np.int64)
        counts = np.array([pooled[s] for s in sizes], dtype=np.int64)
        return sizes, counts


@dataclass
class PowerLawFit:
    """Discrete maximum-likelihood power-law fit of a size tail."""

    exponent: float
    xmin: int
    n_tail: int
    stderr: float


def label_clusters(lattice: SpinLattice) -> ClusterLabeling:
    """Label all same-sign 4-connected clusters of the configuration."""
    labels, sizes, signs = _kernels.label_sites(lattice.spins, lattice.side)
    return ClusterLabeling(lattice.side, labels, sizes, signs,
                           source_step=lattice.step_count)


def size_distribution(labeling: ClusterLabeling) -> ClusterStats:
    """Per-sign histogram of cluster sizes for a single labeling."""
    return ClusterStats().add(labeling)


def largest_cluster(labeling: ClusterLabeling, sign: int) -> int | None:
    """Id of the largest cluster with the given sign (ties: lowest id)."""
    if sign not in (1, -1):
        raise ValueError("sign must be +1 or -1")
    mask = labeling.signs == sign
    if not mask.any():
        return None
    sizes = np.where(mask, labeling.sizes, -1)
    return int(np.argmax(sizes))  # argmax takes the first = lowest id


def fit_power_law(stats: ClusterStats, xmin: int = 5,
                  sign: int | None = None) -> PowerLawFit:
    """Fit P(size) ~ size^-gamma for sizes >= xmin by discrete MLE.

    The likelihood is the zeta (Zipf) form truncated below at xmin; the
    exponent maximises it via bounded 1-D search (tolerance 1e-6) and the
    standard error is the asymptotic one from the observed curvature of
    the log-likelihood.

    Raises InsufficientTail when fewer than 10 samples lie at or above
    xmin, DegenerateTail when they are all equal.
    """
    sizes, counts = stats.tail(xmin, sign)
    return fit_discrete_power_law(sizes, counts, xmin)


def fit_discrete_power_law(sizes: np.ndarray, counts: np.ndarray,
                           xmin: int) -> PowerLawFit:
    """MLE power-law fit of a discrete sample given as (value, count) pairs."""
    if xmin < 1:
        raise ValueError("xmin must be >= 1")
    sizes = np.asarray(sizes, dtype=np.float64)
    counts = np.asarray(counts, dtype=np.int64)
    keep = sizes >= xmin
    sizes, counts = sizes[keep], counts[keep]
    n = int(counts.sum())
    if n < 10:
        raise InsufficientTail(f"need >= 10 tail samples at xmin={xmin}, got {n}")
    if len(sizes) == 1:
        raise DegenerateTail(f"all {n} tail samples equal {int(sizes[0])}")
    mean_log = float((counts * np.log(sizes)).sum()) / n

    def neg_loglik(gamma: float) -> float:
        return gamma * mean_log + np.log(zeta(gamma, xmin))

    res = minimize_scalar(neg_loglik, bounds=(1.000001, 25.0),
                          method="bounded", options={"xatol": 1e-6})
    gamma = float(res.x)
    # observed information: n * d^2/dgamma^2 log zeta(gamma, xmin)
    h = 1e-5
    if gamma - h > 1.0:
        d2 = (np.log(zeta(gamma + h, xmin)) - 2.0 * np.log(zeta(gamma, xmin))
              + np.log(zeta(gamma - h, xmin))) / (h * h)
    else:
        d2 = 0.0
    stderr = float(1.0 / np.sqrt(n * d2)) if d2 > 0 else float("inf")
    return PowerLawFit(exponent=gamma, xmin=int(xmin), n_tail=n, stderr=stderr)
