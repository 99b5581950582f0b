"""Run protocols: schedules, determinism, resumability, ensembles."""

import os

import numpy as np
import pytest

from spinmarket.errors import RunDirLocked
from spinmarket.experiments import (PRESETS, AnnealSchedule, RegimePreset,
                                    benchmark, ensemble_run, max_workers,
                                    rerun_from_meta, run_anneal, run_regime)
from spinmarket.rng import derive_seed
from spinmarket.runio import (POOLED_STEP, read_clusters_csv,
                              read_meta, read_series_csv, read_stp_csv)

SMALL = dict(side=12, run_sweeps=120, snapshot_every=30, therm_sweeps=50)


def small_preset(name="small", temperature=2.2, alpha=4.0, **kw):
    merged = {**SMALL, **kw}
    return RegimePreset(name, temperature=temperature, alpha=alpha, **merged)


class TestAnnealSchedule:
    def test_defaults_match_protocol(self):
        s = AnnealSchedule()
        assert (s.t_start, s.t_end) == (10.0, 0.1)
        assert s.total_sweeps == 2_000_000
        assert s.therm_sweeps == 25_000
        assert s.ramp_sweeps == 1_975_000

    @pytest.mark.parametrize("kw", [
        {"t_start": 0.0}, {"t_end": -1.0}, {"total_sweeps": 100,
                                            "therm_sweeps": 100},
        {"record_every": 0}, {"ramp": "exp"}, {"plateaus": -2},
    ])
    def test_rejects(self, kw):
        with pytest.raises(ValueError):
            AnnealSchedule(**kw)

    def test_linear_in_t_exact(self):
        s = AnnealSchedule(t_start=10, t_end=0.1, total_sweeps=3000,
                           therm_sweeps=500)
        k = np.arange(1, 2501, dtype=np.float64)
        frac = (k - 1) / (2500 - 1)
        assert np.array_equal(s.temperatures(0, 2500), 10.0 + (0.1 - 10.0) * frac)
        # windows agree with the full ramp
        full = s.temperatures(0, 2500)
        assert np.array_equal(s.temperatures(1000, 300), full[1000:1300])

    def test_linear_in_beta_exact(self):
        s = AnnealSchedule(t_start=10, t_end=0.1, total_sweeps=600,
                           therm_sweeps=100, ramp="beta")
        k = np.arange(1, 501, dtype=np.float64)
        frac = (k - 1) / (500 - 1)
        beta = 1.0 / 10.0 + (1.0 / 0.1 - 1.0 / 10.0) * frac
        assert np.array_equal(s.temperatures(0, 500), 1.0 / beta)

    def test_staircase_between_endpoints(self):
        s = AnnealSchedule(t_start=8, t_end=2, total_sweeps=120,
                           therm_sweeps=20, plateaus=4)
        temps = s.temperatures(0, 100)
        assert sorted(set(temps.tolist()), reverse=True) == [8.0, 6.0, 4.0, 2.0]
        assert temps[0] == 8.0 and temps[-1] == 2.0


class TestPresets:
    def test_documented_presets(self):
        assert set(PRESETS) == {
            "low_t_alpha4", "critical_alpha4", "hot_alpha4",
            "low_t_alpha0", "critical_alpha0", "hot_alpha0"}
        for preset in PRESETS.values():
            assert preset.side == 100
            assert preset.snapshot_every == 1000
            assert preset.temperature in (0.5, 2.2, 10.0)
            assert preset.alpha in (0.0, 4.0)

    def test_params_derivation(self):
        p = PRESETS["critical_alpha4"].params(seed=9)
        assert p.minority_coupling == 4.0 and p.seed == 9


class TestRunRegime:
    def test_series_rows_and_meta(self, tmp_path):
        series = run_regime(small_preset(), 5, tmp_path / "run")
        assert len(series) == 120
        series.validate()
        meta = read_meta(tmp_path / "run" / "run.meta")
        assert meta["seed"] == "5" and meta["side"] == "12"
        on_disk = read_series_csv(tmp_path / "run" / "series.csv")
        assert np.array_equal(on_disk.steps, series.steps)

    def test_deterministic_across_directories(self, tmp_path):
        run_regime(small_preset(), 7, tmp_path / "a")
        run_regime(small_preset(), 7, tmp_path / "b")
        for name in ("series.csv", "clusters.csv", "stp.csv", "powerlaw.csv",
                     "stats.csv"):
            assert (tmp_path / "a" / name).read_bytes() == \
                (tmp_path / "b" / name).read_bytes(), name

    def test_seed_changes_output(self, tmp_path):
        run_regime(small_preset(), 1, tmp_path / "a")
        run_regime(small_preset(), 2, tmp_path / "b")
        assert (tmp_path / "a" / "series.csv").read_bytes() != \
            (tmp_path / "b" / "series.csv").read_bytes()

    def test_resume_equals_uninterrupted(self, tmp_path):
        preset = small_preset(run_sweeps=200, snapshot_every=50)
        run_regime(preset, 11, tmp_path / "full", checkpoint_every=70)
        assert run_regime(preset, 11, tmp_path / "part", checkpoint_every=70,
                          stop_after=90) is None
        resumed = run_regime(preset, 11, tmp_path / "part", checkpoint_every=70)
        assert resumed is not None
        for name in ("series.csv", "clusters.csv", "stp.csv", "stats.csv"):
            assert (tmp_path / "full" / name).read_bytes() == \
                (tmp_path / "part" / name).read_bytes(), name
        snaps_full = sorted((tmp_path / "full" / "snapshots").iterdir())
        snaps_part = sorted((tmp_path / "part" / "snapshots").iterdir())
        assert [p.name for p in snaps_full] == [p.name for p in snaps_part]
        for a, b in zip(snaps_full, snaps_part):
            assert a.read_bytes() == b.read_bytes()

    def test_resume_with_thinned_recording(self, tmp_path):
        # record_every > 1 plus snapshot companions puts chunk boundaries
        # off the record grid; the phase-aware recorder must not drift
        preset = small_preset(run_sweeps=210, snapshot_every=70,
                              record_every=3)
        run_regime(preset, 13, tmp_path / "full", checkpoint_every=80)
        assert run_regime(preset, 13, tmp_path / "part", checkpoint_every=80,
                          stop_after=100) is None
        resumed = run_regime(preset, 13, tmp_path / "part",
                             checkpoint_every=80)
        assert list(resumed.steps) == list(range(3, 211, 3))
        assert (tmp_path / "full" / "series.csv").read_bytes() == \
            (tmp_path / "part" / "series.csv").read_bytes()

    def test_rerun_from_meta_reproduces_run(self, tmp_path):
        run_regime(small_preset(), 21, tmp_path / "orig")
        rerun_from_meta(tmp_path / "orig", tmp_path / "replay")
        for name in ("run.meta", "series.csv", "clusters.csv", "stp.csv",
                     "powerlaw.csv", "stats.csv"):
            assert (tmp_path / "orig" / name).read_bytes() == \
                (tmp_path / "replay" / name).read_bytes(), name

    def test_rerun_finished_directory_is_stable(self, tmp_path):
        preset = small_preset()
        run_regime(preset, 3, tmp_path / "run")
        first = (tmp_path / "run" / "series.csv").read_bytes()
        run_regime(preset, 3, tmp_path / "run")  # resumes the final checkpoint
        assert (tmp_path / "run" / "series.csv").read_bytes() == first

    def test_incompatible_directory_rejected(self, tmp_path):
        run_regime(small_preset(), 3, tmp_path / "run")
        with pytest.raises(ValueError, match="different parameters"):
            run_regime(small_preset(temperature=0.5), 3, tmp_path / "run")

    def test_locked_directory_rejected(self, tmp_path):
        out = tmp_path / "run"
        out.mkdir()
        (out / ".lock").write_text("12345")
        with pytest.raises(RunDirLocked):
            run_regime(small_preset(), 3, out)

    def test_snapshot_plan_contains_companions(self, tmp_path):
        run_regime(small_preset(), 5, tmp_path / "run")
        names = sorted(int(p.stem.removeprefix("step_"))
                       for p in (tmp_path / "run" / "snapshots").iterdir())
        assert names == [0, 1, 30, 31, 60, 61, 90, 91, 120]

    def test_stp_rows_at_delta_one(self, tmp_path):
        run_regime(small_preset(), 5, tmp_path / "run")
        rows = read_stp_csv(tmp_path / "run" / "stp.csv")
        assert rows, "stp.csv empty"
        assert {r["delta_t"] for r in rows} == {1}
        assert {r["mode"] for r in rows} == {"all", "largest"}
        assert all(0.0 <= r["combined"] <= 1.0 for r in rows)


class TestRunAnneal:
    def test_series_and_schedule(self, tmp_path):
        sched = AnnealSchedule(t_start=6.0, t_end=0.5, total_sweeps=400,
                               therm_sweeps=100)
        series = run_anneal(10, 4.0, sched, 3, tmp_path / "ann")
        assert len(series) == 300
        k = np.arange(1, 301, dtype=np.float64)
        frac = (k - 1) / (300 - 1)
        assert np.array_equal(series.temperature, 6.0 + (0.5 - 6.0) * frac)
        assert (tmp_path / "ann" / "stats.csv").is_file()
        assert not (tmp_path / "ann" / "snapshots").exists()

    def test_snapshots_enable_cluster_analysis(self, tmp_path):
        sched = AnnealSchedule(t_start=4.0, t_end=1.0, total_sweeps=300,
                               therm_sweeps=100)
        run_anneal(8, 0.0, sched, 3, tmp_path / "ann", snapshot_every=50)
        assert (tmp_path / "ann" / "clusters.csv").is_file()
        assert (tmp_path / "ann" / "stp.csv").is_file()

    def test_deterministic(self, tmp_path):
        sched = AnnealSchedule(t_start=3.0, t_end=0.5, total_sweeps=300,
                               therm_sweeps=50)
        run_anneal(8, 4.0, sched, 9, tmp_path / "a")
        run_anneal(8, 4.0, sched, 9, tmp_path / "b")
        assert (tmp_path / "a" / "series.csv").read_bytes() == \
            (tmp_path / "b" / "series.csv").read_bytes()

    def test_resume(self, tmp_path):
        sched = AnnealSchedule(t_start=3.0, t_end=0.5, total_sweeps=500,
                               therm_sweeps=100)
        run_anneal(8, 4.0, sched, 9, tmp_path / "full", checkpoint_every=150)
        assert run_anneal(8, 4.0, sched, 9, tmp_path / "part",
                          checkpoint_every=150, stop_after=200) is None
        run_anneal(8, 4.0, sched, 9, tmp_path / "part", checkpoint_every=150)
        assert (tmp_path / "full" / "series.csv").read_bytes() == \
            (tmp_path / "part" / "series.csv").read_bytes()

    def test_rerun_from_meta_reproduces_anneal(self, tmp_path):
        sched = AnnealSchedule(t_start=4.0, t_end=0.5, total_sweeps=400,
                               therm_sweeps=100, ramp="beta", record_every=2)
        run_anneal(10, 4.0, sched, 17, tmp_path / "orig", snapshot_every=100)
        rerun_from_meta(tmp_path / "orig", tmp_path / "replay")
        for name in ("run.meta", "series.csv", "clusters.csv", "stats.csv"):
            assert (tmp_path / "orig" / name).read_bytes() == \
                (tmp_path / "replay" / name).read_bytes(), name


class TestEnsemble:
    def test_single_replica_matches_aggregate(self, tmp_path):
        summary = ensemble_run(small_preset(), 1, 42, tmp_path / "ens")
        rows = read_stp_csv(tmp_path / "ens" / "replica_00" / "stp.csv")
        largest = [r["combined"] for r in rows
                   if r["mode"] == "largest" and r["sign"] == 0]
        mean, stderr = summary["stp_summary"][("largest", 0)]
        assert mean == pytest.approx(float(np.mean(largest)))
        assert stderr == 0.0

    def test_deterministic_aggregates(self, tmp_path):
        ensemble_run(small_preset(), 2, 7, tmp_path / "e1")
        ensemble_run(small_preset(), 2, 7, tmp_path / "e2")
        for name in ("stp_summary.csv", "msf_summary.csv",
                     "clusters_pooled.csv"):
            assert (tmp_path / "e1" / name).read_bytes() == \
                (tmp_path / "e2" / name).read_bytes(), name

    def test_replica_seeds_documented_derivation(self, tmp_path):
        ensemble_run(small_preset(), 2, 7, tmp_path / "ens")
        for r in range(2):
            meta = read_meta(tmp_path / "ens" / f"replica_{r:02d}" / "run.meta")
            assert meta["seed"] == str(derive_seed(7, r))
            assert meta["replica"] == str(r)

    def test_pooled_clusters_sum(self, tmp_path):
        summary = ensemble_run(small_preset(), 2, 9, tmp_path / "ens")
        pooled = summary["pooled_clusters"]
        total = sum(size * count for (_, size), count in pooled.items())
        # 2 replicas x 5 primary frames x 144 sites
        assert total == 2 * 5 * 144

    def test_max_workers_env_override(self, monkeypatch):
        monkeypatch.setenv("SPINMARKET_THREADS", "3")
        assert max_workers() == 3
        monkeypatch.delenv("SPINMARKET_THREADS")
        assert max_workers() == (os.cpu_count() or 1)

    def test_worker_count_does_not_change_results(self, tmp_path, monkeypatch):
        monkeypatch.setenv("SPINMARKET_THREADS", "1")
        ensemble_run(small_preset(), 3, 5, tmp_path / "serial")
        monkeypatch.setenv("SPINMARKET_THREADS", "3")
        ensemble_run(small_preset(), 3, 5, tmp_path / "threaded")
        for name in ("stp_summary.csv", "msf_summary.csv",
                     "clusters_pooled.csv"):
            assert (tmp_path / "serial" / name).read_bytes() == \
                (tmp_path / "threaded" / name).read_bytes(), name

    def test_rejects_bad_count(self, tmp_path):
        with pytest.raises(ValueError):
            ensemble_run(small_preset(), 0, 1, tmp_path / "ens")


@pytest.mark.slow
class TestEnsembleScaleFree:
    def test_pooled_histogram_spans_decades(self, tmp_path):
        # near-critical coexistence: pooled sizes span >= 2.5 decades
        preset = RegimePreset("span", temperature=2.2, alpha=0.0, side=100,
                              run_sweeps=2000, snapshot_every=100,
                              therm_sweeps=3000)
        summary = ensemble_run(preset, 8, 4, tmp_path / "ens")
        sizes = [size for (_, size) in summary["pooled_clusters"]]
        assert max(sizes) / min(sizes) >= 10**2.5


@pytest.mark.slow
class TestRegimePhenomenology:
    def test_cold_alpha4_domains_of_both_signs_coexist(self, tmp_path):
        # the contrarian coupling pins |M| well below 1, so both signs
        # keep a macroscopic largest domain in every snapshot
        preset = RegimePreset("cold4", temperature=0.5, alpha=4.0, side=100,
                              run_sweeps=4000, snapshot_every=1000,
                              therm_sweeps=25_000)
        run_regime(preset, 1, tmp_path / "run")
        rows = read_clusters_csv(tmp_path / "run" / "clusters.csv")
        largest = {}
        for r in rows:
            if r["step"] == POOLED_STEP:
                continue
            if r["step"] % 1000 == 0:
                key = (r["step"], r["sign"])
                largest[key] = max(largest.get(key, 0), r["size"])
        steps = {s for s, _ in largest}
        assert len(steps) >= 5
        for step in steps:
            assert largest[(step, 1)] >= 0.10 * preset.side**2
            assert largest[(step, -1)] >= 0.10 * preset.side**2

    def test_cold_alpha0_ordered_start_is_frozen(self, tmp_path):
        # without the global coupling the ordered phase at T=0.5 is
        # frozen: MSF exactly 1 at every recorded frame (single-spin
        # excursions occur at ~1e-7 per attempt and never land here)
        preset = RegimePreset("frozen", temperature=0.5, alpha=0.0, side=100,
                              run_sweeps=300, snapshot_every=0,
                              therm_sweeps=100, init="all_up")
        series = run_regime(preset, 1, tmp_path / "run")
        assert (series.msf_series == 1.0).all()
        assert (series.m == 1.0).all()


class TestBenchmark:
    def test_reports_rate(self):
        result = benchmark(side=32, seconds=0.2, seed=1)
        assert result["attempts_per_second"] > 0
        assert result["attempts"] >= 32 * 32
