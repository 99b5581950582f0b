"""Experiment protocols: fixed-temperature regime runs, cooling ramps,
ensembles of replicas, and run-directory production.

A run directory contains ``run.meta`` (flat key=value), ``series.csv``,
``snapshots/step_<k>.txt`` (when snapshots are enabled), analysis CSVs
and ``checkpoint/state.npz``. Steps count sweeps since the end of
thermalization. Whenever snapshots are taken at spacing > 1, each
snapshot step k is followed by a companion at k+1 so that short-time
persistence at delta_t = 1 can be recomputed offline from files alone.

Runs checkpoint periodically (lattice, RNG state, partial series) and
resume transparently: re-invoking a run whose directory already holds a
compatible checkpoint continues it, and a finished run just rewrites its
outputs, byte-identically.
"""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace
from pathlib import Path
from time import perf_counter

import numpy as np

from . import _kernels
from .analysis import analyze_run, write_plots, write_series_stats
from .lattice import (ModelParams, SpinLattice, new_lattice, run_sweeps,
                      thermalize, write_snapshot)
from .observables import RunSeries, returns_from_magnetization
from .rng import SplitMix64, derive_seed
from .runio import (POOLED_STEP, fmt, read_clusters_csv, read_series_csv,
                    read_meta, read_stp_csv, run_dir_lock, snapshot_path,
                    write_csv, write_meta, write_series_csv)

RAMP_MODES = ("t", "beta")
DEFAULT_CHECKPOINT_EVERY = 100_000


@dataclass
class AnnealSchedule:
    """Cooling protocol: thermalize at t_start, then ramp to t_end.

    The ramp covers the ``total_sweeps - therm_sweeps`` post-thermalization
    sweeps; sweep k of the ramp (1-based) runs at temperature

        T(k) = t_start + (t_end - t_start) * (k - 1) / (n_ramp - 1)

    for ramp mode "t", or at the temperature whose inverse interpolates
    linearly for mode "beta". ``plateaus > 0`` turns the continuous ramp
    into that many constant-temperature steps (staircase cooling).
    """

    t_start: float = 10.0
    t_end: float = 0.1
    total_sweeps: int = 2_000_000
    therm_sweeps: int = 25_000
    ramp: str = "t"
    record_every: int = 1
    plateaus: int = 0

    def __post_init__(self):
        if not (self.t_start > 0 and self.t_end > 0):
            raise ValueError("t_start and t_end must be > 0")
        if not (self.total_sweeps > self.therm_sweeps >= 0):
            raise ValueError("need total_sweeps > therm_sweeps >= 0")
        if self.record_every < 1:
            raise ValueError("record_every must be >= 1")
        if self.ramp not in RAMP_MODES:
            raise ValueError(f"ramp must be one of {RAMP_MODES}")
        if self.plateaus < 0:
            raise ValueError("plateaus must be >= 0")

    @property
    def ramp_sweeps(self) -> int:
        return self.total_sweeps - self.therm_sweeps

    def temperatures(self, first_sweep: int, n: int) -> np.ndarray:
        """Temperatures of ramp sweeps first_sweep+1 .. first_sweep+n."""
        k = np.arange(first_sweep + 1, first_sweep + n + 1, dtype=np.float64)
        n_ramp = self.ramp_sweeps
        if self.plateaus > 0:
            j = np.minimum((k - 1) * self.plateaus // n_ramp, self.plateaus - 1)
            frac = j / (self.plateaus - 1) if self.plateaus > 1 else np.zeros_like(k)
        else:
            frac = (k - 1) / (n_ramp - 1) if n_ramp > 1 else np.zeros_like(k)
        if self.ramp == "t":
            return self.t_start + (self.t_end - self.t_start) * frac
        beta = 1.0 / self.t_start + (1.0 / self.t_end - 1.0 / self.t_start) * frac
        return 1.0 / beta


@dataclass
class RegimePreset:
    """One fixed-temperature experiment configuration."""

    name: str
    temperature: float
    alpha: float
    side: int = 100
    run_sweeps: int = 10_000
    snapshot_every: int = 1000
    therm_sweeps: int = 25_000
    coupling: float = 1.0
    record_every: int = 1
    init: str = "random"

    def __post_init__(self):
        if self.run_sweeps < 1:
            raise ValueError("run_sweeps must be >= 1")
        if self.snapshot_every < 0:
            raise ValueError("snapshot_every must be >= 0")
        if self.therm_sweeps < 0:
            raise ValueError("therm_sweeps must be >= 0")
        if self.record_every < 1:
            raise ValueError("record_every must be >= 1")

    def params(self, seed: int) -> ModelParams:
        return ModelParams(side=self.side, temperature=self.temperature,
                           minority_coupling=self.alpha, coupling=self.coupling,
                           seed=seed)


#: the documented morphology-regime presets: cold / near-critical / hot,
#: each with and without the global minority coupling
PRESETS = {
    "low_t_alpha4": RegimePreset("low_t_alpha4", temperature=0.5, alpha=4.0),
    "critical_alpha4": RegimePreset("critical_alpha4", temperature=2.2, alpha=4.0),
    "hot_alpha4": RegimePreset("hot_alpha4", temperature=10.0, alpha=4.0),
    "low_t_alpha0": RegimePreset("low_t_alpha0", temperature=0.5, alpha=0.0),
    "critical_alpha0": RegimePreset("critical_alpha0", temperature=2.2, alpha=0.0),
    "hot_alpha0": RegimePreset("hot_alpha0", temperature=10.0, alpha=0.0),
}


def _snapshot_plan(run_sweeps: int, snapshot_every: int) -> list[int]:
    """Measurement steps at which to write snapshots (with +1 companions)."""
    if snapshot_every <= 0:
        return []
    if snapshot_every == 1:
        return list(range(0, run_sweeps + 1))
    steps = set()
    for k in range(0, run_sweeps + 1, snapshot_every):
        steps.add(k)
        if k + 1 <= run_sweeps:
            steps.add(k + 1)
    return sorted(steps)


class _Engine:
    """Chunked simulation driver shared by regime and anneal runs."""

    def __init__(self, out_dir: Path, meta: dict, params: ModelParams,
                 run_sweeps: int, record_every: int, snapshot_every: int,
                 checkpoint_every: int, temperatures, init: str):
        self.out_dir = Path(out_dir)
        self.meta = meta
        self.params = params
        self.run_sweeps = run_sweeps
        self.record_every = record_every
        self.checkpoint_every = checkpoint_every
        self.temperatures = temperatures  # (first_sweep, n) -> array
        self.init = init
        self.snap_steps = _snapshot_plan(run_sweeps, snapshot_every)
        self.snap_dues = set(self.snap_steps)
        self.n_records = run_sweeps // record_every
        self.ckpt_path = self.out_dir / "checkpoint" / "state.npz"
        # mutable run state
        self.lattice: SpinLattice | None = None
        self.rng = SplitMix64(params.seed)
        self.sweeps_done = 0
        self.n_rec = 0
        self.rec_mag = np.zeros(self.n_records, dtype=np.int64)
        self.rec_same = np.zeros(self.n_records, dtype=np.int64)
        self.ref_spins: np.ndarray | None = None
        self.baseline_mag = 0

    # -- checkpointing ------------------------------------------------

    def _save_checkpoint(self):
        self.ckpt_path.parent.mkdir(parents=True, exist_ok=True)
        tmp = self.ckpt_path.with_suffix(".tmp.npz")
        np.savez(tmp,
                 spins=self.lattice.spins,
                 ref_spins=self.ref_spins,
                 rng_state=np.uint64(self.rng.state),
                 mag_sum=np.int64(self.lattice.magnetization_sum),
                 step_count=np.int64(self.lattice.step_count),
                 sweeps_done=np.int64(self.sweeps_done),
                 n_rec=np.int64(self.n_rec),
                 rec_mag=self.rec_mag[:self.n_rec],
                 rec_same=self.rec_same[:self.n_rec],
                 baseline_mag=np.int64(self.baseline_mag))
        os.replace(tmp, self.ckpt_path)

    def _load_checkpoint(self) -> bool:
        if not self.ckpt_path.is_file():
            return False
        with np.load(self.ckpt_path) as ck:
            spins = ck["spins"].copy()
            self.ref_spins = ck["ref_spins"].copy()
            self.rng.set_state(int(ck["rng_state"]))
            self.lattice = SpinLattice(self.params.side, spins,
                                       int(ck["mag_sum"]), int(ck["step_count"]))
            self.sweeps_done = int(ck["sweeps_done"])
            self.n_rec = int(ck["n_rec"])
            self.rec_mag[:self.n_rec] = ck["rec_mag"]
            self.rec_same[:self.n_rec] = ck["rec_same"]
            self.baseline_mag = int(ck["baseline_mag"])
        return True

    # -- phases ---------------------------------------------------------

    def _start_fresh(self):
        self.lattice = new_lattice(self.params, self.init, self.rng)
        therm = int(self.meta["therm_sweeps"])
        t_therm = float(self.meta.get("therm_temperature",
                                      self.meta.get("temperature")))
        therm_params = replace(self.params, temperature=t_therm)
        thermalize(self.lattice, therm_params, self.rng, therm)
        self.lattice.step_count = 0  # measurement steps start at 0
        self.baseline_mag = self.lattice.magnetization_sum
        self.ref_spins = self.lattice.spins.copy()
        self._snapshot_if_due(0)
        self._save_checkpoint()

    def _snapshot_if_due(self, step: int):
        if step in self.snap_dues:
            path = snapshot_path(self.out_dir, step)
            path.parent.mkdir(parents=True, exist_ok=True)
            t_here = float(self.temperatures(max(step - 1, 0), 1)[0]) \
                if step > 0 else float(self.temperatures(0, 1)[0])
            snap_params = replace(self.params, temperature=t_here)
            write_snapshot(path, self.lattice, snap_params, step=step)

    def run(self, stop_after: int | None = None) -> bool:
        """Advance to run_sweeps (or stop_after); True when complete."""
        if not self._load_checkpoint():
            self._start_fresh()
        target_end = self.run_sweeps if stop_after is None \
            else min(self.run_sweeps, stop_after)
        refresh_sweep = self.params.field_refresh == "sweep"
        next_snaps = [s for s in self.snap_steps if s > self.sweeps_done]
        snap_i = 0
        while self.sweeps_done < target_end:
            k = self.sweeps_done
            bounds = [target_end,
                      (k // self.checkpoint_every + 1) * self.checkpoint_every]
            while snap_i < len(next_snaps) and next_snaps[snap_i] <= k:
                snap_i += 1
            if snap_i < len(next_snaps):
                bounds.append(next_snaps[snap_i])
            target = min(bounds)
            n = target - k
            temps = self.temperatures(k, n)
            betas = 1.0 / temps
            n_win = (k + n) // self.record_every - k // self.record_every
            out_mag = self.rec_mag[self.n_rec:self.n_rec + n_win]
            out_same = self.rec_same[self.n_rec:self.n_rec + n_win]
            mag, state = _kernels.run_window(
                self.lattice.spins, self.lattice.neighbor_table(),
                self.params.coupling, self.params.minority_coupling,
                betas, np.int64(self.lattice.magnetization_sum),
                self.rng.state_u64(), refresh_sweep,
                np.int64(self.record_every), np.int64(k),
                self.ref_spins, out_mag, out_same)
            self.lattice.magnetization_sum = int(mag)
            self.lattice.step_count += n
            self.rng.set_state(int(state))
            self.n_rec += n_win
            self.sweeps_done = target
            self._snapshot_if_due(target)
            if target % self.checkpoint_every == 0 or target == target_end:
                self._save_checkpoint()
        return self.sweeps_done >= self.run_sweeps

    def series(self, floor: float) -> RunSeries:
        steps = np.arange(1, self.n_records + 1, dtype=np.int64) * self.record_every
        p = self.params.n_sites
        m = self.rec_mag.astype(np.float64) / p
        msf_vals = self.rec_same.astype(np.float64) / p
        if self.n_records:
            temps = self.temperatures(0, self.run_sweeps)[steps - 1]
        else:
            temps = np.zeros(0)
        r = returns_from_magnetization(m, floor, self.baseline_mag / p)
        return RunSeries(steps=steps, temperature=np.asarray(temps),
                         m=m, r=r, msf_series=msf_vals, floor=floor)


def _prepare_run_dir(out_dir: Path, meta: dict) -> None:
    out_dir.mkdir(parents=True, exist_ok=True)
    meta_path = out_dir / "run.meta"
    if meta_path.is_file():
        existing = read_meta(meta_path)
        wanted = {key: fmt(value) for key, value in meta.items()}
        if existing != wanted:
            raise ValueError(
                f"{out_dir} already holds a run with different parameters; "
                "use a fresh directory")
    else:
        write_meta(meta_path, meta)


def run_regime(preset: RegimePreset | str, seed: int, out_dir: str | Path,
               checkpoint_every: int = DEFAULT_CHECKPOINT_EVERY,
               stop_after: int | None = None, replica: int = 0,
               xmin: int = 5, field_refresh: str = "attempt",
               plots: bool = False) -> RunSeries | None:
    """Run one fixed-temperature experiment into ``out_dir``.

    Thermalizes, then records the series every sweep and snapshots every
    ``preset.snapshot_every`` sweeps, and finally (re)derives the cluster,
    persistence, power-law and stats CSVs from the outputs. Deterministic
    per (preset, seed). Returns the recorded series, or None when stopped
    early via ``stop_after`` (the checkpoint then allows resuming by
    calling again with the same arguments).
    """
    if isinstance(preset, str):
        preset = PRESETS[preset]
    out_dir = Path(out_dir)
    params = replace(preset.params(seed), field_refresh=field_refresh)
    floor = 1.0 / params.n_sites
    meta = {
        "format": "spinmarket-run v1", "kind": "regime", "preset": preset.name,
        "side": preset.side, "temperature": float(preset.temperature),
        "alpha": float(preset.alpha), "coupling": float(preset.coupling),
        "seed": seed, "replica": replica, "rng": "splitmix64",
        "init": preset.init, "field_refresh": field_refresh,
        "therm_sweeps": preset.therm_sweeps, "run_sweeps": preset.run_sweeps,
        "record_every": preset.record_every,
        "snapshot_every": preset.snapshot_every,
        "checkpoint_every": checkpoint_every, "return_floor": float(floor),
    }
    _prepare_run_dir(out_dir, meta)
    with run_dir_lock(out_dir):
        engine = _Engine(out_dir, meta, params, preset.run_sweeps,
                         preset.record_every, preset.snapshot_every,
                         checkpoint_every,
                         lambda k, n: np.full(n, float(preset.temperature)),
                         preset.init)
        if not engine.run(stop_after):
            return None
        series = engine.series(floor)
        write_series_csv(out_dir / "series.csv", series, replica=replica)
        if preset.snapshot_every > 0:
            analyze_run(out_dir, xmin=xmin, plots=plots)
        else:
            write_series_stats(out_dir / "stats.csv", series)
            if plots:
                write_plots(out_dir, series, None, None)
    return series


def run_anneal(side: int, alpha: float, schedule: AnnealSchedule, seed: int,
               out_dir: str | Path, coupling: float = 1.0,
               snapshot_every: int = 0,
               checkpoint_every: int = DEFAULT_CHECKPOINT_EVERY,
               stop_after: int | None = None, replica: int = 0,
               field_refresh: str = "attempt",
               plots: bool = False) -> RunSeries | None:
    """Cooling experiment: thermalize at t_start, ramp to t_end.

    Records M, R, MSF and the exact ramp temperature every
    ``schedule.record_every`` sweeps; emits series.csv and stats.csv
    (plus snapshots and their analysis CSVs when ``snapshot_every`` > 0).
    Returns the series, or None when stopped early.
    """
    out_dir = Path(out_dir)
    params = ModelParams(side=side, temperature=schedule.t_start,
                         minority_coupling=alpha, coupling=coupling,
                         seed=seed, field_refresh=field_refresh)
    floor = 1.0 / params.n_sites
    meta = {
        "format": "spinmarket-run v1", "kind": "anneal",
        "side": side, "t_start": float(schedule.t_start),
        "t_end": float(schedule.t_end), "ramp": schedule.ramp,
        "plateaus": schedule.plateaus,
        "alpha": float(alpha), "coupling": float(coupling),
        "seed": seed, "replica": replica, "rng": "splitmix64",
        "init": "random", "field_refresh": field_refresh,
        "therm_sweeps": schedule.therm_sweeps,
        "therm_temperature": float(schedule.t_start),
        "run_sweeps": schedule.ramp_sweeps,
        "record_every": schedule.record_every,
        "snapshot_every": snapshot_every,
        "checkpoint_every": checkpoint_every, "return_floor": float(floor),
    }
    _prepare_run_dir(out_dir, meta)
    with run_dir_lock(out_dir):
        engine = _Engine(out_dir, meta, params, schedule.ramp_sweeps,
                         schedule.record_every, snapshot_every,
                         checkpoint_every, schedule.temperatures, "random")
        if not engine.run(stop_after):
            return None
        series = engine.series(floor)
        write_series_csv(out_dir / "series.csv", series, replica=replica)
        if snapshot_every > 0:
            analyze_run(out_dir, plots=plots)
        else:
            write_series_stats(out_dir / "stats.csv", series)
            if plots:
                write_plots(out_dir, series, None, None)
    return series


def rerun_from_meta(run_dir: str | Path, out_dir: str | Path,
                    **kwargs) -> RunSeries | None:
    """Reproduce a run from its run.meta alone.

    run.meta carries every parameter and seed, so replaying it into a
    fresh directory regenerates byte-identical outputs.
    """
    meta = read_meta(Path(run_dir) / "run.meta")
    common = dict(replica=int(meta.get("replica", 0)),
                  checkpoint_every=int(meta["checkpoint_every"]),
                  field_refresh=meta["field_refresh"])
    if meta["kind"] == "regime":
        preset = RegimePreset(
            name=meta["preset"], temperature=float(meta["temperature"]),
            alpha=float(meta["alpha"]), side=int(meta["side"]),
            run_sweeps=int(meta["run_sweeps"]),
            snapshot_every=int(meta["snapshot_every"]),
            therm_sweeps=int(meta["therm_sweeps"]),
            coupling=float(meta["coupling"]),
            record_every=int(meta["record_every"]), init=meta["init"])
        return run_regime(preset, int(meta["seed"]), out_dir,
                          **common, **kwargs)
    if meta["kind"] == "anneal":
        schedule = AnnealSchedule(
            t_start=float(meta["t_start"]), t_end=float(meta["t_end"]),
            total_sweeps=int(meta["run_sweeps"]) + int(meta["therm_sweeps"]),
            therm_sweeps=int(meta["therm_sweeps"]), ramp=meta["ramp"],
            record_every=int(meta["record_every"]),
            plateaus=int(meta["plateaus"]))
        return run_anneal(int(meta["side"]), float(meta["alpha"]), schedule,
                          int(meta["seed"]), out_dir,
                          coupling=float(meta["coupling"]),
                          snapshot_every=int(meta["snapshot_every"]),
                          **common, **kwargs)
    raise ValueError(f"unknown run kind {meta.get('kind')!r} in {run_dir}")


def benchmark(side: int = 100, temperature: float = 2.2, alpha: float = 4.0,
              seconds: float = 2.0, seed: int = 1) -> dict:
    """Measure sustained single-site update attempts per second.

    Warms the compiled kernel first, then times whole sweeps for at least
    ``seconds``. Returns attempts/s, sweeps/s and the attempt count.
    """
    params = ModelParams(side=side, temperature=temperature,
                         minority_coupling=alpha, seed=seed)
    rng = SplitMix64(seed)
    lattice = new_lattice(params, "random", rng)
    run_sweeps(lattice, params, rng, 20)  # compile + warm caches
    chunk = max(1, 2_000_000 // params.n_sites)
    attempts = 0
    t0 = perf_counter()
    while True:
        run_sweeps(lattice, params, rng, chunk)
        attempts += chunk * params.n_sites
        elapsed = perf_counter() - t0
        if elapsed >= seconds:
            break
    return {
        "attempts_per_second": attempts / elapsed,
        "sweeps_per_second": attempts / params.n_sites / elapsed,
        "attempts": attempts,
        "elapsed": elapsed,
    }


def _replica_worker(preset, base_seed, r, out_dir, kwargs):
    seed = derive_seed(base_seed, r)
    return run_regime(preset, seed, Path(out_dir) / f"replica_{r:02d}",
                      replica=r, **kwargs)


def max_workers() -> int:
    """Replica parallelism cap: SPINMARKET_THREADS env var or CPU count."""
    env = os.environ.get("SPINMARKET_THREADS")
    if env:
        return max(1, int(env))
    return os.cpu_count() or 1


def ensemble_run(preset: RegimePreset | str, n_replicas: int, base_seed: int,
                 out_dir: str | Path, **kwargs) -> dict:
    """Run independent replicas and aggregate their outputs.

    Replica r runs in ``out_dir/replica_<r>`` with seed
    ``derive_seed(base_seed, r)``. Aggregates written at the top level:
    ``stp_summary.csv`` (mean and stderr over per-replica mean STP, per
    mode and sign), ``msf_summary.csv`` and ``clusters_pooled.csv``
    (histogram summed over replicas and frames). The reduction is by
    replica index, independent of completion order.
    """
    if n_replicas < 1:
        raise ValueError("n_replicas must be >= 1")
    if isinstance(preset, str):
        preset = PRESETS[preset]
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    workers = min(n_replicas, max_workers())
    failures: list[tuple[int, Exception]] = []
    if workers == 1:
        for r in range(n_replicas):
            try:
                _replica_worker(preset, base_seed, r, out_dir, kwargs)
            except Exception as exc:  # noqa: BLE001 - reported with replica id
                failures.append((r, exc))
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            futures = {r: pool.submit(_replica_worker, preset, base_seed, r,
                                      out_dir, kwargs)
                       for r in range(n_replicas)}
            for r in range(n_replicas):
                try:
                    futures[r].result()
                except Exception as exc:  # noqa: BLE001
                    failures.append((r, exc))
    if failures:
        ids = ", ".join(str(r) for r, _ in failures)
        raise RuntimeError(f"replica(s) {ids} failed: {failures[0][1]}") \
            from failures[0][1]

    replica_dirs = [out_dir / f"replica_{r:02d}" for r in range(n_replicas)]
    summary = _aggregate(out_dir, replica_dirs)
    summary["replica_dirs"] = [str(d) for d in replica_dirs]
    return summary


def _aggregate(out_dir: Path, replica_dirs: list[Path]) -> dict:
    # STP: mean over replicas of the per-replica mean combined value
    per_key: dict[tuple[str, int], list[float]] = {}
    for rd in replica_dirs:
        rows = read_stp_csv(rd / "stp.csv")
        acc: dict[tuple[str, int], list[float]] = {}
        for row in rows:
            acc.setdefault((row["mode"], row["sign"]), []).append(row["combined"])
        for key, vals in acc.items():
            per_key.setdefault(key, []).append(float(np.mean(vals)))
    stp_rows = []
    for (mode, sign) in sorted(per_key):
        means = per_key[(mode, sign)]
        n = len(means)
        stderr = float(np.std(means, ddof=1) / np.sqrt(n)) if n > 1 else 0.0
        stp_rows.append([mode, sign, float(np.mean(means)), stderr, n])
    write_csv(out_dir / "stp_summary.csv",
              ["mode", "sign", "mean_combined", "stderr", "n_replicas"], stp_rows)

    # MSF: per-replica mean over recorded frames
    msf_means = []
    for rd in replica_dirs:
        series = read_series_csv(rd / "series.csv")
        msf_means.append(float(np.mean(series.msf_values())))
    n = len(msf_means)
    msf_stderr = float(np.std(msf_means, ddof=1) / np.sqrt(n)) if n > 1 else 0.0
    write_csv(out_dir / "msf_summary.csv", ["mean_msf", "stderr", "n_replicas"],
              [[float(np.mean(msf_means)), msf_stderr, n]])

    # cluster histograms: pooled counts over replicas and frames
    pooled: dict[tuple[int, int], int] = {}
    for rd in replica_dirs:
        for row in read_clusters_csv(rd / "clusters.csv"):
            if row["step"] != POOLED_STEP:
                continue
            key = (row["sign"], row["size"])
            pooled[key] = pooled.get(key, 0) + row["count"]
    cluster_rows = [[sign, size, count]
                    for (sign, size), count in sorted(pooled.items())]
    write_csv(out_dir / "clusters_pooled.csv", ["sign", "size", "count"],
              cluster_rows)
    return {
        "stp_summary": {(m, s): (mu, se) for m, s, mu, se, _ in stp_rows},
        "msf_mean": float(np.mean(msf_means)),
        "msf_stderr": msf_stderr,
        "pooled_clusters": pooled,
    }
