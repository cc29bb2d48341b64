"""Circular click-offset model: wrapping, updates, floor, serialization."""

import numpy as np
import pytest
from hypothesis import given, strategies as st

from singleswitch.clickmodel import (ClickTimeDistribution, gaussian_distribution,
                                     init_from_calibration, load_distribution,
                                     save_distribution, uniform_distribution,
                                     wrap_offset)


@given(st.floats(-1e7, 1e7), st.floats(-1e7, 1e7),
       st.floats(1.0, 1e5))
def test_wrap_offset_range(t_click, t_noon, period):
    off = wrap_offset(t_click, t_noon, period)
    assert -period / 2 <= off < period / 2


def test_wrap_offset_exact_noon_and_errors():
    assert wrap_offset(1234.0, 1234.0, 2000.0) == 0.0
    assert wrap_offset(1234.0 + 2000.0, 1234.0, 2000.0) == 0.0
    with pytest.raises(ValueError):
        wrap_offset(0.0, 0.0, 0.0)


def test_uniform_distribution_normalized():
    d = uniform_distribution(2000.0)
    assert d.weights.sum() == pytest.approx(1.0, abs=1e-12)
    assert np.all(d.weights == d.weights[0])
    assert d.binwidth == pytest.approx(2000.0 / d.bins)


def test_gaussian_distribution_mode_near_mean():
    d = gaussian_distribution(4000.0, mean=120.0, sigma=50.0)
    assert d.weights.sum() == pytest.approx(1.0, abs=1e-9)
    assert abs(d.mode_offset() - 120.0) <= d.binwidth
    assert d.weights.min() >= d.floor - 1e-15


def test_density_matches_weights():
    d = gaussian_distribution(2000.0, 0.0, 100.0)
    off = 37.0
    assert d.density(off) == pytest.approx(d.weights[d.bin_of(off)] / d.binwidth)
    # piecewise-constant density integrates to one
    assert d.weights.sum() * 1.0 == pytest.approx(1.0, abs=1e-9)


def test_update_moves_mass_and_keeps_invariants():
    d = uniform_distribution(2000.0)
    for _ in range(30):
        d = d.update(250.0)
    assert abs(d.mode_offset() - 250.0) <= d.binwidth
    assert d.weights.sum() == pytest.approx(1.0, abs=1e-9)
    assert d.weights.min() >= d.floor - 1e-15


@given(st.integers(0, 2**16))
def test_update_invariants_random(seed):
    rng = np.random.default_rng(seed)
    d = gaussian_distribution(1000.0, 0.0, 80.0)
    for off in rng.uniform(-500.0, 500.0, 50):
        d = d.update(float(off))
        assert abs(d.weights.sum() - 1.0) < 1e-9
        assert d.weights.min() >= d.floor - 1e-15


def test_forgetting_decays_old_evidence():
    d = uniform_distribution(2000.0)
    for _ in range(200):
        d = d.update(-400.0)
    for _ in range(200):
        d = d.update(300.0)
    assert abs(d.mode_offset() - 300.0) <= d.binwidth


def test_sample_range_and_determinism():
    d = gaussian_distribution(2000.0, 100.0, 60.0)
    rng = np.random.default_rng(7)
    xs = d.sample_many(rng, 500)
    assert np.all(xs >= -1000.0) and np.all(xs < 1000.0)
    rng2 = np.random.default_rng(7)
    assert np.array_equal(xs, d.sample_many(rng2, 500))
    # samples follow the weights: mean close to distribution mean
    mean = float((d.weights * d.bin_centers()).sum())
    assert abs(xs.mean() - mean) < 4 * 60.0 / np.sqrt(500)


def test_rescaled_keeps_shape():
    d = gaussian_distribution(2000.0, 100.0, 60.0)
    r = d.rescaled(4000.0)
    assert r.period == 4000.0
    assert np.array_equal(r.weights, d.weights)
    assert r.kernel_sigma == pytest.approx(d.kernel_sigma * 2.0)


def test_init_from_calibration():
    samples = [100.0, 120.0, 110.0, 95.0, 130.0]
    d = init_from_calibration(samples, period=2000.0)
    assert abs(d.mode_offset() - 110.0) <= 2 * d.binwidth
    assert d.weights.sum() == pytest.approx(1.0, abs=1e-9)
    with pytest.raises(ValueError):
        init_from_calibration([], period=2000.0)


def test_serialization_roundtrip(tmp_path):
    d = gaussian_distribution(3456.0, 77.0, 42.0)
    path = tmp_path / "user.dist"
    save_distribution(d, path)
    loaded = load_distribution(path)
    assert loaded.period == d.period
    assert loaded.bins == d.bins
    assert np.allclose(loaded.weights, d.weights, atol=1e-12)
    assert loaded.kernel_sigma == pytest.approx(d.kernel_sigma)


def test_log_density_finite_everywhere():
    d = gaussian_distribution(2000.0, 0.0, 10.0)
    ld = d.log_density_at_bins()
    assert np.all(np.isfinite(ld))
