"""Run-directory formats: run.meta, CSV writers/readers, lock file.

Every CSV has a fixed, documented column order and a header row; floats
are serialized with 9 significant digits so identical runs produce
byte-identical files. run.meta is flat ``key=value`` lines.
"""

from __future__ import annotations

import csv
import os
from contextlib import contextmanager
from pathlib import Path
from typing import Iterable, Mapping

import numpy as np

from .errors import RunDirLocked
from .observables import RunSeries

SERIES_COLUMNS = ["replica", "step", "temperature", "M", "R", "msf"]
CLUSTERS_COLUMNS = ["step", "sign", "size", "count"]
POWERLAW_COLUMNS = ["sign", "xmin", "exponent", "stderr", "n_tail"]
STP_COLUMNS = ["replica", "step", "delta_t", "mode", "sign",
               "stp_d", "stp_i", "combined"]
STATS_COLUMNS = ["segment", "quantity", "lag", "value"]

POOLED_STEP = -1  # step value marking pooled (all-frame) histogram rows


def fmt(x) -> str:
    """Serialize one CSV cell; floats get 9 significant digits."""
    if x is None:
        return ""
    if isinstance(x, (float, np.floating)):
        if np.isnan(x):
            return ""
        return f"{x:.9g}"
    return str(x)


def write_csv(path: str | Path, header: list[str], rows: Iterable[Iterable]) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        for row in rows:
            writer.writerow([fmt(v) for v in row])


def write_series_csv(path: str | Path, series: RunSeries, replica: int = 0) -> None:
    rows = zip([replica] * len(series), series.steps, series.temperature,
               series.m, series.r, series.msf_series)
    write_csv(path, SERIES_COLUMNS, rows)


def read_series_csv(path: str | Path) -> RunSeries:
    steps, temps, ms, rs, msfs = [], [], [], [], []
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        for row in reader:
            steps.append(int(row["step"]))
            temps.append(float(row["temperature"]))
            ms.append(float(row["M"]))
            rs.append(float(row["R"]) if row["R"] else np.nan)
            msfs.append(float(row["msf"]) if row["msf"] else np.nan)
    return RunSeries(np.array(steps, dtype=np.int64),
                     np.array(temps), np.array(ms), np.array(rs),
                     np.array(msfs))


def write_meta(path: str | Path, entries: Mapping[str, object]) -> None:
    lines = [f"{key}={fmt(value)}" for key, value in entries.items()]
    Path(path).write_text("\n".join(lines) + "\n")


def read_meta(path: str | Path) -> dict[str, str]:
    out: dict[str, str] = {}
    for line in Path(path).read_text().splitlines():
        if not line.strip():
            continue
        key, _, value = line.partition("=")
        out[key] = value
    return out


@contextmanager
def run_dir_lock(run_dir: str | Path):
    """Exclusive lock on a run directory (a .lock file with our pid)."""
    lock_path = Path(run_dir) / ".lock"
    try:
        fd = os.open(lock_path, os.O_CREAT | os.O_EXCL | os.O_WRONLY)
    except FileExistsError:
        raise RunDirLocked(
            f"{run_dir} is locked by another process (remove {lock_path} "
            "if that process is gone)") from None
    try:
        os.write(fd, str(os.getpid()).encode())
        os.close(fd)
        yield
    finally:
        lock_path.unlink(missing_ok=True)


def read_clusters_csv(path: str | Path) -> list[dict]:
    rows = []
    with open(path, newline="") as fh:
        for row in csv.DictReader(fh):
            rows.append({"step": int(row["step"]), "sign": int(row["sign"]),
                         "size": int(row["size"]), "count": int(row["count"])})
    return rows


def read_stp_csv(path: str | Path) -> list[dict]:
    rows = []
    with open(path, newline="") as fh:
        for row in csv.DictReader(fh):
            rows.append({"replica": int(row["replica"]), "step": int(row["step"]),
                         "delta_t": int(row["delta_t"]), "mode": row["mode"],
                         "sign": int(row["sign"]), "stp_d": float(row["stp_d"]),
                         "stp_i": float(row["stp_i"]),
                         "combined": float(row["combined"])})
    return rows


def snapshot_path(run_dir: str | Path, step: int) -> Path:
    return Path(run_dir) / "snapshots" / f"step_{step}.txt"


def snapshot_steps(run_dir: str | Path) -> list[int]:
    """Sorted steps of all snapshots present in a run directory."""
    snap_dir = Path(run_dir) / "snapshots"
    if not snap_dir.is_dir():
        return []
    steps = []
    for p in snap_dir.glob("step_*.txt"):
        try:
            steps.append(int(p.stem.removeprefix("step_")))
        except ValueError:
            continue
    return sorted(steps)
