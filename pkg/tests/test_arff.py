import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy import stats

from arffsde.arff import (ArffConfig, acceptance_ratio, metropolis_step, resample_frequencies,
                          resample_indices, train)
from arffsde.errors import DegeneratePMFError, InvalidArgumentError, TrainingDivergedError
from arffsde.fourier import FourierFeatureModel


def test_uniform_pmf_when_norms_equal():
    rng = np.random.default_rng(0)
    b = np.exp(1j * np.linspace(0, 3, 4))[:, None]
    idx = np.concatenate([resample_indices(b, rng) for _ in range(5000)])
    counts = np.bincount(idx, minlength=4)
    assert stats.chisquare(counts).pvalue > 0.01


def test_point_mass_pmf():
    w = np.arange(5.0)[:, None]
    b = np.zeros((5, 1), dtype=complex)
    b[3] = 2.0 - 1j
    out = resample_frequencies(w, b, np.random.default_rng(1))
    assert np.all(out == 3.0)


def test_resampling_chi_square():
    rng = np.random.default_rng(2)
    b = np.array([[0.5], [0.3], [0.2]], dtype=complex)
    draws = np.concatenate([resample_indices(b, rng) for _ in range(100000 // 3 + 1)])[:100000]
    counts = np.bincount(draws, minlength=3)
    assert stats.chisquare(counts, 1e5 * np.array([0.5, 0.3, 0.2])).pvalue > 0.01


def test_resampled_rows_come_from_input():
    rng = np.random.default_rng(3)
    w = rng.normal(size=(8, 2))
    out = resample_frequencies(w, rng.normal(size=(8, 1)) + 0j, rng)
    assert all(any(np.array_equal(r, q) for q in w) for r in out)


def test_all_zero_amplitudes_raise():
    with pytest.raises(DegeneratePMFError):
        resample_indices(np.zeros((4, 2)), np.random.default_rng(0))


def test_larger_proposal_always_accepted():
    rng = np.random.default_rng(4)
    w, ws = np.zeros((50, 1)), np.ones((50, 1))
    b = rng.uniform(0.1, 1, size=(50, 1)) + 0j
    out, acc = metropolis_step(w, b, ws, 1.5 * b, 1.0, rng)
    assert acc.all() and np.all(out == 1.0)


def test_zero_proposal_always_rejected():
    rng = np.random.default_rng(5)
    w, ws = np.zeros((50, 1)), np.ones((50, 1))
    out, acc = metropolis_step(w, np.ones((50, 1)), ws, np.zeros((50, 1)), 1.0, rng)
    assert not acc.any() and np.all(out == 0.0)


def test_acceptance_frequency_matches_ratio():
    rng = np.random.default_rng(6)
    n = 100000
    b = np.ones((n, 1))
    _, acc = metropolis_step(np.zeros((n, 1)), b, np.ones((n, 1)), 0.4 * b, 1.0, rng)
    assert abs(acc.mean() - 0.4) <= 0.005


def test_exponent_applies_to_the_ratio():
    r = acceptance_ratio(np.array([[2.0]]), np.array([[1.0]]), 3.0)
    assert np.isclose(r[0], 0.125)


def test_metropolis_shape_mismatch():
    with pytest.raises(InvalidArgumentError):
        metropolis_step(np.zeros((3, 1)), np.ones((3, 1)), np.zeros((4, 1)), np.ones((3, 1)),
                        1.0, np.random.default_rng(0))


@settings(max_examples=50, deadline=None)
@given(st.integers(1, 20), st.integers(0, 10 ** 6))
def test_metropolis_rows_are_current_or_proposed(k, seed):
    rng = np.random.default_rng(seed)
    w, ws = rng.normal(size=(k, 2)), rng.normal(size=(k, 2))
    out, acc = metropolis_step(w, rng.normal(size=(k, 1)), ws, rng.normal(size=(k, 1)),
                               1.0, rng)
    assert np.array_equal(out[acc], ws[acc])
    assert np.array_equal(out[~acc], w[~acc])


def _split(x, y):
    return (x[:1800], y[:1800]), (x[1800:], y[1800:])


def test_zero_target_fits_immediately():
    x = np.random.default_rng(7).uniform(-1, 1, size=(200, 1))
    y = np.zeros((200, 1))
    model, trace = train((x, y), (x, y), ArffConfig(max_iterations=5, feature_count=4))
    assert trace.records[0].val_mse <= 1e-10
    assert np.allclose(model.amplitudes, 0.0)


def test_band_limited_target_is_learned():
    rng = np.random.default_rng(8)
    x = rng.uniform(-np.pi, np.pi, size=(2000, 1))
    y = np.cos(3 * x)
    # The default stagnation rule stops this target early on a plateau, so
    # give it room; the frequencies need ~150 random-walk steps to reach 3.
    cfg = ArffConfig(max_iterations=400, feature_count=32, tikhonov=0.002, step_length=0.1,
                     metropolis_exponent=1.0, stagnation_patience=100, rng_seed=1)
    model, trace = train(*_split(x, y), cfg)
    assert trace.best_val_mse <= 1e-3


def test_best_snapshot_is_returned():
    rng = np.random.default_rng(9)
    x = rng.uniform(-2, 2, size=(2000, 1))
    y = np.sin(2 * x) + 0.1 * rng.normal(size=x.shape)
    (xt, yt), (xv, yv) = _split(x, y)
    model, trace = train((xt, yt), (xv, yv), ArffConfig(max_iterations=60, rng_seed=2))
    mse = float(np.mean((model(xv) - yv) ** 2))
    assert np.isclose(mse, trace.best_val_mse)
    assert trace.best_val_mse == min(trace.val_errors)
    assert trace.stop_reason in ("stagnation", "max_iterations")


def test_training_is_deterministic():
    rng = np.random.default_rng(10)
    x = rng.uniform(-1, 1, size=(500, 2))
    y = np.sin(x[:, :1]) * x[:, 1:]
    cfg = ArffConfig(max_iterations=20, feature_count=8, rng_seed=42)
    m1, t1 = train((x, y), (x, y), cfg)
    m2, t2 = train((x, y), (x, y), cfg)
    assert np.array_equal(m1.frequencies, m2.frequencies)
    assert np.array_equal(t1.val_errors, t2.val_errors)


def test_max_iterations_stop_reason():
    rng = np.random.default_rng(11)
    x = rng.uniform(-1, 1, size=(300, 1))
    _, trace = train((x, np.sin(5 * x)), (x, np.sin(5 * x)),
                     ArffConfig(max_iterations=3, stagnation_patience=50))
    assert trace.stop_reason == "max_iterations"
    assert len(trace.records) == 4


def test_stagnation_stops_early():
    rng = np.random.default_rng(12)
    x = rng.uniform(-1, 1, size=(300, 1))
    y = rng.normal(size=(300, 1))
    _, trace = train((x[:200], y[:200]), (x[200:], y[200:]),
                     ArffConfig(max_iterations=500, feature_count=4))
    assert trace.stop_reason == "stagnation"
    assert len(trace.records) < 500


def test_trace_csv_layout(tmp_path):
    x = np.linspace(-1, 1, 50)[:, None]
    _, trace = train((x, x), (x, x), ArffConfig(max_iterations=2, feature_count=2))
    path = tmp_path / "trace.csv"
    trace.write_csv(path)
    lines = path.read_text().splitlines()
    assert lines[0] == "iter,val_mse,accept_frac,seconds"
    assert len(lines) == len(trace.records) + 1
    assert lines[1].endswith(",")


def test_non_finite_validation_raises():
    x = np.linspace(-1, 1, 20)[:, None]
    with pytest.raises((TrainingDivergedError, InvalidArgumentError)):
        train((x, x), (x, np.full_like(x, np.inf)), ArffConfig(max_iterations=2))


@pytest.mark.parametrize("field,value", [("tikhonov", 0.0), ("step_length", -1.0),
                                         ("feature_count", 0), ("max_iterations", 0)])
def test_config_validation(field, value):
    with pytest.raises(InvalidArgumentError):
        ArffConfig(**{field: value})
