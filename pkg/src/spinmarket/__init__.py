"""Monte Carlo simulator and analysis toolkit for a globally coupled
2D Ising market model: Glauber heat-bath dynamics with a minority field,
cluster morphology, short-time persistence, stability and return
statistics."""

from .clusters import (ClusterLabeling, ClusterStats, PowerLawFit,
                       fit_discrete_power_law, fit_power_law, label_clusters,
                       largest_cluster, size_distribution)
from .errors import (DegenerateSeries, DegenerateTail, InsufficientTail,
                     MissingSnapshots, RunDirLocked, SizeMismatch,
                     SpinMarketError)
from .experiments import (PRESETS, AnnealSchedule, RegimePreset, benchmark,
                          ensemble_run, rerun_from_meta, run_anneal,
                          run_regime)
from .lattice import (ModelParams, SpinLattice, T_CRITICAL, flip_probability,
                      local_field, magnetization, new_lattice, read_snapshot,
                      run_sweeps, sweep, thermalize, write_snapshot)
from .observables import (RunSeries, autocorrelation, excess_kurtosis,
                          log_return, msf, returns_from_magnetization,
                          volatility_clustering)
from .persistence import (MatchResult, StpPoint, StpReport, ensemble_mean_stp,
                          match_clusters, stp_pair, stp_series)
from .rng import SplitMix64, derive_seed

__version__ = "0.1.0"

__all__ = [
    "AnnealSchedule", "ClusterLabeling", "ClusterStats", "DegenerateSeries",
    "DegenerateTail", "InsufficientTail", "MatchResult", "MissingSnapshots",
    "ModelParams", "PRESETS", "PowerLawFit", "RegimePreset", "RunDirLocked",
    "RunSeries", "SizeMismatch", "SpinLattice", "SpinMarketError",
    "SplitMix64", "StpPoint", "StpReport", "T_CRITICAL", "autocorrelation",
    "benchmark", "derive_seed", "ensemble_mean_stp", "ensemble_run",
    "excess_kurtosis", "fit_discrete_power_law", "fit_power_law",
    "flip_probability", "label_clusters", "largest_cluster", "local_field",
    "log_return", "magnetization", "match_clusters", "msf", "new_lattice",
    "read_snapshot", "rerun_from_meta", "returns_from_magnetization",
    "run_anneal", "run_regime", "run_sweeps", "size_distribution", "stp_pair",
    "stp_series", "sweep", "thermalize", "volatility_clustering",
    "write_snapshot",
]
