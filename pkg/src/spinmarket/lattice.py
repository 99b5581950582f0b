"""Spin lattice state and Glauber heat-bath dynamics with minority coupling.

The model lives on an N x N torus of +-1 spins. Each update attempt picks
a site uniformly at random and redraws its spin from the heat-bath
probability of the local field

    h_i = J * (sum of the 4 torus neighbours) - alpha * s_i * |M|

where M is the instantaneous magnetization (mean spin). One time step is
a sweep of P = N^2 attempts, with replacement, applied serially.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import _kernels
from .rng import SplitMix64

INIT_MODES = ("random", "all_up", "all_down", "checkerboard")
FIELD_REFRESH_MODES = ("attempt", "sweep")

#: ordering temperature of the square-lattice Ising model, 2 / ln(1 + sqrt 2)
T_CRITICAL = 2.0 / math.log(1.0 + math.sqrt(2.0))


@dataclass
class ModelParams:
    """Full configuration of a single simulation.

    Attributes:
        side: linear lattice size N; the lattice has P = N^2 sites.
        temperature: T = 1/beta, must be positive.
        minority_coupling: alpha >= 0, strength of the -alpha*s*|M| term.
        coupling: nearest-neighbour coupling J.
        seed: 64-bit seed of the replica's RNG stream.
        field_refresh: when "attempt" (default), |M| in the local field is
            updated after every accepted flip; "sweep" freezes it at the
            previous sweep boundary (sensitivity-check mode).
    """

    side: int
    temperature: float
    minority_coupling: float = 0.0
    coupling: float = 1.0
    seed: int = 0
    field_refresh: str = "attempt"

    def __post_init__(self):
        if not isinstance(self.side, (int, np.integer)) or self.side < 2:
            raise ValueError(f"side must be an integer >= 2, got {self.side!r}")
        self.side = int(self.side)
        self.temperature = float(self.temperature)
        self.coupling = float(self.coupling)
        self.minority_coupling = float(self.minority_coupling)
        self.seed = int(self.seed)
        if not (math.isfinite(self.temperature) and self.temperature > 0):
            raise ValueError(f"temperature must be finite and > 0, got {self.temperature!r}")
        if not math.isfinite(self.coupling):
            raise ValueError("coupling must be finite")
        if not math.isfinite(self.minority_coupling) or self.minority_coupling < 0:
            raise ValueError("minority_coupling must be finite and >= 0")
        if not (0 <= int(self.seed) < 2**64):
            raise ValueError("seed must fit in 64 unsigned bits")
        if self.field_refresh not in FIELD_REFRESH_MODES:
            raise ValueError(f"field_refresh must be one of {FIELD_REFRESH_MODES}")

    @property
    def n_sites(self) -> int:
        return self.side * self.side

    @property
    def beta(self) -> float:
        return 1.0 / self.temperature


@dataclass
class SpinLattice:
    """N x N torus of +-1 spins with a cached magnetization sum.

    Serial dynamics: a lattice must not be swept from two threads, but
    distinct instances are independent and read-only access between
    sweeps is safe.
    """

    side: int
    spins: np.ndarray  # flat (P,) int8 array of +-1, row-major
    magnetization_sum: int
    step_count: int = 0
    _nbr: np.ndarray | None = field(default=None, repr=False, compare=False)

    @property
    def n_sites(self) -> int:
        return self.side * self.side

    def magnetization(self) -> float:
        return self.magnetization_sum / self.n_sites

    def grid(self) -> np.ndarray:
        """(N, N) view of the flat spin array."""
        return self.spins.reshape(self.side, self.side)

    def neighbor_table(self) -> np.ndarray:
        if self._nbr is None:
            self._nbr = neighbor_table(self.side)
        return self._nbr

    def copy(self) -> "SpinLattice":
        return SpinLattice(self.side, self.spins.copy(), self.magnetization_sum,
                           self.step_count, self._nbr)

    def check_consistent(self) -> None:
        """Assert the bookkeeping invariants (used by tests and debugging)."""
        if not np.isin(self.spins, (-1, 1)).all():
            raise AssertionError("spin domain violated: entries outside {-1,+1}")
        true_sum = int(self.spins.astype(np.int64).sum())
        if true_sum != self.magnetization_sum:
            raise AssertionError(
                f"cached magnetization_sum {self.magnetization_sum} != true {true_sum}")


def neighbor_table(side: int) -> np.ndarray:
    """(P, 4) torus neighbour indices (right, left, down, up) per site."""
    idx = np.arange(side * side)
    x = idx % side
    y = idx // side
    right = y * side + (x + 1) % side
    left = y * side + (x - 1) % side
    down = ((y + 1) % side) * side + x
    up = ((y - 1) % side) * side + x
    return np.stack([right, left, down, up], axis=1).astype(np.int32)


def new_lattice(params: ModelParams, init: str = "random",
                rng: SplitMix64 | None = None) -> SpinLattice:
    """Create a lattice in one of the standard initial states.

    "random" draws each spin independently +1/-1 with probability 1/2 from
    the stream (one draw per site); pass the replica's ``rng`` so that
    initialisation and dynamics share a single stream, or leave it None to
    consume the head of a fresh stream seeded from ``params.seed``.
    """
    if init not in INIT_MODES:
        raise ValueError(f"init must be one of {INIT_MODES}, got {init!r}")
    n = params.n_sites
    if init == "random":
        if rng is None:
            rng = SplitMix64(params.seed)
        spins = (rng.bits_array(n) >> np.uint64(63)).astype(np.int8)
        spins = (2 * spins - 1).astype(np.int8)
    elif init == "all_up":
        spins = np.ones(n, dtype=np.int8)
    elif init == "all_down":
        spins = -np.ones(n, dtype=np.int8)
    else:  # checkerboard
        idx = np.arange(n)
        spins = np.where(((idx % params.side) + (idx // params.side)) % 2 == 0,
                         1, -1).astype(np.int8)
    return SpinLattice(params.side, spins, int(spins.astype(np.int64).sum()))


def magnetization(lattice: SpinLattice) -> float:
    """Mean spin M = (1/P) * sum_i s_i, exactly from the cached sum."""
    return lattice.magnetization_sum / lattice.n_sites


def local_field(lattice: SpinLattice, site: int, current_m: float,
                params: ModelParams) -> float:
    """Local field at ``site``: J * neighbour_sum - alpha * s_site * |M|."""
    nbr = lattice.neighbor_table()[site]
    nbsum = int(lattice.spins[nbr].astype(np.int64).sum())
    return (params.coupling * nbsum
            - params.minority_coupling * float(lattice.spins[site]) * abs(current_m))


def flip_probability(h: float, beta: float) -> float:
    """Probability the updated spin is +1 under the heat bath at field h.

    Equals 1 / (1 + exp(-2 beta h)); the probability of -1 is the
    complement. Saturates to exact 0/1 beyond the double exponent range.
    """
    if not (beta > 0):
        raise ValueError("beta must be > 0")
    if not math.isfinite(h):
        raise ValueError("h must be finite")
    return float(_kernels.heat_bath_probability(h, beta))


def sweep(lattice: SpinLattice, params: ModelParams, rng: SplitMix64) -> SpinLattice:
    """Advance the lattice by one sweep (P update attempts) in place."""
    run_sweeps(lattice, params, rng, 1)
    return lattice


def run_sweeps(lattice: SpinLattice, params: ModelParams, rng: SplitMix64,
               n_sweeps: int) -> SpinLattice:
    """Advance by ``n_sweeps`` sweeps at constant temperature, in place."""
    if n_sweeps < 0:
        raise ValueError("n_sweeps must be >= 0")
    if n_sweeps == 0:
        return lattice
    betas = np.full(n_sweeps, params.beta, dtype=np.float64)
    empty_i64 = np.empty(0, dtype=np.int64)
    mag, state = _kernels.run_window(
        lattice.spins, lattice.neighbor_table(),
        float(params.coupling), float(params.minority_coupling),
        betas, np.int64(lattice.magnetization_sum), rng.state_u64(),
        params.field_refresh == "sweep", np.int64(0), np.int64(0),
        lattice.spins[:0], empty_i64, empty_i64)
    lattice.magnetization_sum = int(mag)
    lattice.step_count += n_sweeps
    rng.set_state(int(state))
    return lattice


def thermalize(lattice: SpinLattice, params: ModelParams, rng: SplitMix64,
               n_sweeps: int = 25_000) -> SpinLattice:
    """Run ``n_sweeps`` sweeps discarding observables (equilibration)."""
    return run_sweeps(lattice, params, rng, n_sweeps)


# ---------------------------------------------------------------------------
# Snapshot files: header line then N rows of N '+'/'-' characters.

SNAPSHOT_MAGIC = "ising-snapshot v1"


def write_snapshot(path: str | Path, lattice: SpinLattice, params: ModelParams,
                   step: int | None = None) -> None:
    """Write the exact configuration; round-trips bit-for-bit."""
    step = lattice.step_count if step is None else step
    header = (f"{SNAPSHOT_MAGIC} N={lattice.side} step={step} "
              f"T={float(params.temperature)!r} alpha={float(params.minority_coupling)!r} "
              f"seed={params.seed}")
    grid = lattice.grid()
    lut = np.array(["-", "+"])
    rows = ["".join(lut[(row + 1) // 2]) for row in grid]
    Path(path).write_text(header + "\n" + "\n".join(rows) + "\n")


def read_snapshot(path: str | Path) -> tuple[SpinLattice, dict]:
    """Read a snapshot file; returns the lattice and the header fields."""
    text = Path(path).read_text()
    lines = text.splitlines()
    if not lines or not lines[0].startswith(SNAPSHOT_MAGIC):
        raise ValueError(f"{path}: not an ising-snapshot v1 file")
    fields = {}
    for token in lines[0][len(SNAPSHOT_MAGIC):].split():
        key, _, value = token.partition("=")
        fields[key] = value
    side = int(fields["N"])
    meta = {
        "step": int(fields["step"]),
        "temperature": float(fields["T"]),
        "alpha": float(fields["alpha"]),
        "seed": int(fields["seed"]),
    }
    body = lines[1:]
    if len(body) != side or any(len(row) != side for row in body):
        raise ValueError(f"{path}: body does not match N={side}")
    flat = np.frombuffer("".join(body).encode("ascii"), dtype=np.uint8)
    spins = np.where(flat == ord("+"), 1, -1).astype(np.int8)
    if not np.isin(flat, (ord("+"), ord("-"))).all():
        raise ValueError(f"{path}: body contains characters other than '+'/'-'")
    lattice = SpinLattice(side, spins, int(spins.astype(np.int64).sum()),
                          step_count=meta["step"])
    return lattice, meta
