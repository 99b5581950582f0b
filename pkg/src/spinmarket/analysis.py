"""Run-directory analysis: cluster, persistence and series statistics.

Works purely from the files of a run directory (run.meta, series.csv,
snapshots/), so analyses can be recomputed offline and are idempotent.
"""

from __future__ import annotations

from pathlib import Path

import numpy as np

from .clusters import ClusterStats, fit_power_law, label_clusters
from .errors import DegenerateTail, InsufficientTail, MissingSnapshots
from .lattice import read_snapshot
from .observables import (RunSeries, autocorrelation, excess_kurtosis,
                          volatility_clustering)
from .persistence import stp_series
from .runio import (CLUSTERS_COLUMNS, POOLED_STEP, POWERLAW_COLUMNS,
                    STATS_COLUMNS, STP_COLUMNS, read_meta, read_series_csv,
                    snapshot_steps, snapshot_path, write_csv)
from . import svgplot

#: named temperature segments used in stats.csv: the hot plateau, the
#: sub-critical regime (boundary at the rounded critical value 2.26) and
#: the deeply ordered regime
SEGMENTS = {
    "all": (-np.inf, np.inf),
    "hot": (4.0, 10.0),
    "cold": (-np.inf, 2.26),
    "deep_cold": (-np.inf, 1.0),
}
DEFAULT_MAX_LAG = 20


def segment_rows(series: RunSeries, name: str, lo: float, hi: float,
                 max_lag: int = DEFAULT_MAX_LAG) -> list[list]:
    """stats.csv rows for one temperature segment (skips undefined stats)."""
    mask = (series.temperature >= lo) & (series.temperature <= hi)
    rows: list[list] = [[name, "n_frames", "", int(mask.sum())]]
    msf_vals = series.msf_values(mask)
    if len(msf_vals):
        rows.append([name, "mean_msf", "", float(msf_vals.mean())])
    r = series.returns(mask)
    if len(r):
        rows.append([name, "variance_r", "", float(r.var())])
    if len(r) >= 4 and r.var() > 0:
        rows.append([name, "excess_kurtosis_r", "", excess_kurtosis(r)])
    if len(r) >= max_lag + 2 and r.var() > 0:
        for lag, value in enumerate(autocorrelation(r, max_lag)):
            rows.append([name, "acf_r", lag, float(value)])
        if np.abs(r).var() > 0:
            for lag, value in enumerate(volatility_clustering(r, max_lag)):
                rows.append([name, "acf_abs_r", lag, float(value)])
    return rows


def write_series_stats(path: str | Path, series: RunSeries,
                       max_lag: int = DEFAULT_MAX_LAG) -> None:
    rows: list[list] = []
    for name, (lo, hi) in SEGMENTS.items():
        rows.extend(segment_rows(series, name, lo, hi, max_lag))
    write_csv(path, STATS_COLUMNS, rows)


def load_labelings(run_dir: str | Path) -> list:
    """Cluster labelings of every snapshot in the run directory."""
    run_dir = Path(run_dir)
    labelings = []
    for step in snapshot_steps(run_dir):
        lattice, _ = read_snapshot(snapshot_path(run_dir, step))
        labelings.append(label_clusters(lattice))
    return labelings


def analyze_run(run_dir: str | Path, xmin: int = 5,
                max_lag: int = DEFAULT_MAX_LAG, plots: bool = True) -> dict:
    """(Re)derive all analysis outputs of a run directory.

    Reads run.meta, series.csv and snapshots/, writes clusters.csv,
    powerlaw.csv, stp.csv and stats.csv (and quick-look SVGs when
    ``plots``). Raises FileNotFoundError / MissingSnapshots naming the
    missing input. Idempotent: repeated calls produce identical bytes.
    """
    run_dir = Path(run_dir)
    meta_path = run_dir / "run.meta"
    if not meta_path.is_file():
        raise FileNotFoundError(f"missing {meta_path}")
    meta = read_meta(meta_path)
    series_path = run_dir / "series.csv"
    if not series_path.is_file():
        raise FileNotFoundError(f"missing {series_path}")
    series = read_series_csv(series_path)
    replica = int(meta.get("replica", 0))

    steps = snapshot_steps(run_dir)
    if not steps:
        raise MissingSnapshots(f"missing {run_dir / 'snapshots'} (no snapshots)")
    labelings = load_labelings(run_dir)
    by_step = {lab.source_step: lab for lab in labelings}

    # cluster histograms: per primary frame plus pooled over primary frames
    snapshot_every = int(meta.get("snapshot_every", 1)) or 1
    primary = [s for s in steps if s % snapshot_every == 0]
    pooled = ClusterStats()
    cluster_rows: list[list] = []
    for step in primary:
        stats = ClusterStats().add(by_step[step])
        for sign in (1, -1):
            for size in sorted(stats.hist[sign]):
                cluster_rows.append([step, sign, size, stats.hist[sign][size]])
        pooled.merge(stats)
    for sign in (1, -1):
        for size in sorted(pooled.hist[sign]):
            cluster_rows.append([POOLED_STEP, sign, size, pooled.hist[sign][size]])
    write_csv(run_dir / "clusters.csv", CLUSTERS_COLUMNS, cluster_rows)

    # power-law fits of the pooled histograms
    fit_rows: list[list] = []
    for sign, sign_code in ((1, 1), (-1, -1), (None, 0)):
        try:
            fit = fit_power_law(pooled, xmin=xmin, sign=sign)
        except (InsufficientTail, DegenerateTail):
            continue
        fit_rows.append([sign_code, fit.xmin, fit.exponent, fit.stderr,
                         fit.n_tail])
    write_csv(run_dir / "powerlaw.csv", POWERLAW_COLUMNS, fit_rows)

    # short-time persistence at the finest spacing the snapshots support
    stp_rows: list[list] = []
    if len(steps) >= 2:
        delta = min(b - a for a, b in zip(steps, steps[1:]))
        for mode in ("all", "largest"):
            try:
                points = stp_series(labelings, delta_t=delta, mode=mode)
            except MissingSnapshots:
                continue
            for pt in points:
                stp_rows.append([replica, pt.step, pt.delta_t, pt.mode,
                                 pt.sign, pt.stp_d, pt.stp_i, pt.combined])
    write_csv(run_dir / "stp.csv", STP_COLUMNS, stp_rows)

    write_series_stats(run_dir / "stats.csv", series, max_lag=max_lag)

    outputs = {name: run_dir / f"{name}.csv"
               for name in ("clusters", "powerlaw", "stp", "stats")}
    if plots:
        outputs.update(write_plots(run_dir, series, pooled, stp_rows))
    return outputs


def write_plots(run_dir: str | Path, series: RunSeries,
                pooled: ClusterStats | None,
                stp_rows: list[list] | None) -> dict:
    """Quick-look SVGs for a run; returns the files written."""
    run_dir = Path(run_dir)
    out = {}
    steps = series.steps.astype(np.float64)
    svgplot.line_plot(run_dir / "msf.svg", steps, [("MSF", series.msf_series)],
                      "Microscopic stability factor", "step (sweeps)", "MSF")
    out["msf_svg"] = run_dir / "msf.svg"
    svgplot.line_plot(run_dir / "returns.svg", steps, [("R", series.r)],
                      "Log returns", "step (sweeps)", "R")
    out["returns_svg"] = run_dir / "returns.svg"
    svgplot.line_plot(run_dir / "magnetization.svg", steps, [("M", series.m)],
                      "Magnetization", "step (sweeps)", "M")
    out["magnetization_svg"] = run_dir / "magnetization.svg"
    if pooled is not None:
        groups = []
        for sign, name in ((1, "+1 clusters"), (-1, "-1 clusters")):
            sizes = sorted(pooled.hist[sign])
            counts = [pooled.hist[sign][s] for s in sizes]
            groups.append((name, np.array(sizes, dtype=float),
                           np.array(counts, dtype=float)))
        svgplot.loglog_scatter(run_dir / "clusters.svg", groups,
                               "Cluster size distribution (pooled)",
                               "cluster size", "count")
        out["clusters_svg"] = run_dir / "clusters.svg"
    if stp_rows:
        largest = [(r[1], r[4], r[7]) for r in stp_rows
                   if r[3] == "largest" and r[4] in (1, -1)]
        if largest:
            xs = sorted({step for step, _, _ in largest})
            series_by_sign = {}
            for sign in (1, -1):
                vals = {step: c for step, s, c in largest if s == sign}
                series_by_sign[sign] = [vals.get(x, np.nan) for x in xs]
            svgplot.line_plot(run_dir / "stp.svg", np.array(xs, dtype=float),
                              [("largest +1", series_by_sign[1]),
                               ("largest -1", series_by_sign[-1])],
                              "Short-time persistence of the largest clusters",
                              "step (sweeps)", "STP")
            out["stp_svg"] = run_dir / "stp.svg"
    return out
