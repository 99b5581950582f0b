"""MSF, returns, autocorrelation and kurtosis against direct references."""

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import stats as scipy_stats

from spinmarket.errors import DegenerateSeries, SizeMismatch
from spinmarket.lattice import ModelParams, SpinLattice, new_lattice
from spinmarket.observables import (RunSeries, autocorrelation,
                                    excess_kurtosis, log_return, msf,
                                    returns_from_magnetization,
                                    volatility_clustering)

from oracles import direct_autocorrelation


def lattice_from(spins, side):
    spins = np.asarray(spins, dtype=np.int8).reshape(-1)
    return SpinLattice(side, spins, int(spins.astype(np.int64).sum()))


def random_pair(side, seed):
    rng = np.random.default_rng(seed)
    a = np.where(rng.random(side * side) < 0.5, 1, -1)
    b = np.where(rng.random(side * side) < 0.5, 1, -1)
    return lattice_from(a, side), lattice_from(b, side)


class TestMsf:
    def test_identical(self):
        a, _ = random_pair(6, 0)
        assert msf(a, a) == 1.0

    def test_fully_negated(self):
        a, _ = random_pair(6, 1)
        b = lattice_from(-a.spins, 6)
        assert msf(a, b) == 0.0

    def test_one_of_four(self):
        a = new_lattice(ModelParams(2, 1.0), "all_up")
        b = a.copy()
        b.spins = b.spins.copy()
        b.spins[3] = -1
        b.magnetization_sum -= 2
        assert msf(a, b) == 0.75

    def test_size_mismatch(self):
        a = new_lattice(ModelParams(4, 1.0), "all_up")
        b = new_lattice(ModelParams(6, 1.0), "all_up")
        with pytest.raises(SizeMismatch):
            msf(a, b)

    def test_hamming_identity_random_pairs(self):
        for seed in range(50):
            a, b = random_pair(8, seed)
            hamming = int(np.count_nonzero(a.spins != b.spins))
            assert msf(a, b) == 1.0 - hamming / 64

    def test_symmetry_and_negation(self):
        a, b = random_pair(7, 99)
        assert msf(a, b) == msf(b, a)
        na = lattice_from(-a.spins, 7)
        nb = lattice_from(-b.spins, 7)
        assert msf(a, b) == msf(na, nb)


class TestLogReturn:
    def test_identity(self):
        assert log_return(0.4, 0.4, 1e-4) == 0.0

    def test_doubling(self):
        assert log_return(0.8, 0.4, 1e-4) == pytest.approx(math.log(2.0))

    def test_floor_rule(self):
        value = log_return(0.0, 0.5, 1e-4)
        assert value == pytest.approx(math.log(1e-4) - math.log(0.5))
        assert value == pytest.approx(-8.517, abs=0.001)

    def test_negative_magnetization_uses_magnitude(self):
        assert log_return(-0.8, 0.4, 1e-4) == pytest.approx(math.log(2.0))

    def test_rejects_bad_floor(self):
        with pytest.raises(ValueError):
            log_return(0.5, 0.5, 0.0)

    @given(st.floats(-1, 1), st.floats(-1, 1))
    @settings(max_examples=200, deadline=None)
    def test_antisymmetry(self, x, y):
        floor = 1e-4
        assert log_return(x, y, floor) == -log_return(y, x, floor)


class TestAutocorrelation:
    def test_lag_zero_is_one(self):
        rng = np.random.default_rng(0)
        assert autocorrelation(rng.random(100), 5)[0] == 1.0

    def test_white_noise_band(self):
        rng = np.random.default_rng(42)
        acf = autocorrelation(rng.standard_normal(100_000), 20)
        assert np.abs(acf[1:]).max() < 0.02

    def test_constant_series_degenerate(self):
        with pytest.raises(DegenerateSeries):
            autocorrelation(np.ones(50), 5)

    def test_too_short(self):
        with pytest.raises(ValueError):
            autocorrelation(np.arange(5), 5)

    def test_bounds(self):
        rng = np.random.default_rng(3)
        for _ in range(10):
            x = rng.standard_normal(200).cumsum()  # strongly correlated
            acf = autocorrelation(x, 30)
            assert np.abs(acf).max() <= 1.0 + 1e-9

    def test_matches_direct_reference(self):
        rng = np.random.default_rng(11)
        x = rng.standard_normal(10_000).cumsum()
        mine = autocorrelation(x, 25)
        ref = direct_autocorrelation(x, 25)
        assert np.abs(mine - ref).max() < 1e-10


class TestExcessKurtosis:
    def test_normal_baseline(self):
        rng = np.random.default_rng(21)
        assert abs(excess_kurtosis(rng.standard_normal(100_000))) < 0.1

    def test_two_point_series(self):
        series = np.tile([-1.0, 1.0], 50)
        assert excess_kurtosis(series) == -2.0

    def test_constant_degenerate(self):
        with pytest.raises(DegenerateSeries):
            excess_kurtosis(np.full(10, 3.3))

    def test_too_short(self):
        with pytest.raises(ValueError):
            excess_kurtosis([1.0, 2.0, 3.0])

    def test_matches_scipy(self):
        rng = np.random.default_rng(22)
        x = rng.standard_t(df=5, size=10_000)
        ref = scipy_stats.kurtosis(x, fisher=True, bias=True)
        assert excess_kurtosis(x) == pytest.approx(ref, abs=1e-10)


class TestVolatilityClustering:
    def test_white_noise_no_clustering(self):
        rng = np.random.default_rng(31)
        acf = volatility_clustering(rng.standard_normal(100_000), 20)
        assert np.abs(acf[1:]).max() < 0.02

    def test_constant_magnitude_degenerate(self):
        returns = np.tile([0.5, -0.5], 30)  # |R| constant
        with pytest.raises(DegenerateSeries):
            volatility_clustering(returns, 5)

    def test_garch_like_series_clusters(self):
        rng = np.random.default_rng(32)
        vol = np.repeat(rng.choice([0.1, 2.0], size=500), 100)
        returns = vol * rng.standard_normal(50_000)
        acf = volatility_clustering(returns, 5)
        assert acf[1] > 0.3
        assert np.abs(autocorrelation(returns, 5)[1]) < 0.02


class TestReturnsFromMagnetization:
    def test_matches_scalar_op(self):
        m = np.array([0.5, 0.25, -0.5, 0.0, 0.125])
        floor = 1e-3
        out = returns_from_magnetization(m, floor)
        assert np.isnan(out[0])
        for k in range(1, len(m)):
            assert out[k] == pytest.approx(log_return(m[k], m[k - 1], floor))

    def test_baseline_value(self):
        m = np.array([0.5, 0.25])
        out = returns_from_magnetization(m, 1e-3, m_before_first=1.0)
        assert out[0] == pytest.approx(math.log(0.5))


class TestRunSeries:
    def make_series(self, n=10):
        steps = np.arange(1, n + 1, dtype=np.int64)
        temps = np.full(n, 2.0)
        m = np.linspace(-0.5, 0.5, n)
        r = returns_from_magnetization(m, 0.01)
        msf_vals = np.full(n, 0.9)
        return RunSeries(steps, temps, m, r, msf_vals, floor=0.01)

    def test_validates(self):
        self.make_series().validate()

    def test_rejects_nonmonotonic_steps(self):
        s = self.make_series()
        s.steps[3] = s.steps[2]
        with pytest.raises(ValueError):
            s.validate()

    def test_rejects_bad_m(self):
        s = self.make_series()
        s.m[0] = 1.5
        with pytest.raises(ValueError):
            s.validate()

    def test_rejects_bad_msf(self):
        s = self.make_series()
        s.msf_series[0] = -0.25
        with pytest.raises(ValueError):
            s.validate()

    def test_segment_and_getters(self):
        s = self.make_series()
        s.temperature[:5] = 8.0
        mask = s.segment(4.0, 10.0)
        assert mask.sum() == 5
        assert len(s.returns(mask)) == 4  # first frame R is NaN
        assert len(s.msf_values()) == 10
