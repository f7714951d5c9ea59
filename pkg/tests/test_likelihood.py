import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy import stats

from arffsde.data import SnapshotDataset
from arffsde.errors import NonPositiveDefiniteError
from arffsde.likelihood import LOG_2PI, nll_batch, nll_single, total_loss


def test_standardized_zero_residual():
    assert np.isclose(nll_single([0.0], [0.0], 1.0, [0.0], [[1.0]]), 0.5 * LOG_2PI)
    assert np.isclose(0.5 * LOG_2PI, 0.9189385332, atol=1e-10)


@settings(max_examples=100, deadline=None)
@given(r=st.floats(-5, 5), s=st.floats(1e-3, 10), h=st.floats(1e-3, 1.0))
def test_scalar_matches_gaussian_logpdf(r, s, h):
    x0, f = 0.3, 1.7
    x1 = x0 + h * f + r
    loss = nll_single([x0], [x1], h, [f], [[s / h]])
    ref = -stats.norm.logpdf(x1, loc=x0 + h * f, scale=np.sqrt(s))
    expected = r ** 2 / (2 * s) + 0.5 * np.log(s) + 0.5 * LOG_2PI
    assert abs(loss - ref) <= 1e-12 * max(1.0, abs(ref))
    assert abs(loss - expected) <= 1e-12 * max(1.0, abs(expected))


def test_three_dims_identity():
    loss = nll_single(np.zeros(3), np.zeros(3), 1.0, np.zeros(3), np.eye(3))
    assert np.isclose(loss, 1.5 * LOG_2PI)


def test_matches_multivariate_logpdf():
    rng = np.random.default_rng(0)
    a = rng.normal(size=(3, 3))
    cov = a @ a.T + 0.1 * np.eye(3)
    x0, x1, f = rng.normal(size=3), rng.normal(size=3), rng.normal(size=3)
    h = 0.05
    ref = -stats.multivariate_normal.logpdf(x1, mean=x0 + h * f, cov=h * cov)
    assert np.isclose(nll_single(x0, x1, h, f, cov), ref, rtol=1e-12)


def test_non_pd_reports_index():
    covs = np.stack([np.eye(2), np.eye(2), -np.eye(2)])
    z = np.zeros((3, 2))
    with pytest.raises(NonPositiveDefiniteError) as info:
        nll_batch(z, z, np.ones(3), z, covs)
    assert info.value.index == 2


def test_tolerant_mode_counts_rejections():
    x0 = np.zeros((4, 1))
    ds = SnapshotDataset(x0, x0 + 0.1, 0.1)
    cov = lambda z: np.where(np.arange(len(z))[:, None, None] % 2 == 0, 1.0, -1.0)
    rep = total_loss(ds, lambda z: np.zeros_like(z), cov, strict=False)
    assert rep.n_rejected == 2 and rep.n_samples == 4 and rep.tolerant
    with pytest.raises(NonPositiveDefiniteError):
        total_loss(ds, lambda z: np.zeros_like(z), cov, strict=True)


def test_singleton_dataset_equals_single_loss():
    ds = SnapshotDataset([[0.2]], [[0.35]], 0.1)
    rep = total_loss(ds, lambda z: 0.5 * z, lambda z: np.full((len(z), 1, 1), 0.01))
    assert np.isclose(rep.total_loss, nll_single([0.2], [0.35], 0.1, [0.1], [[0.01]]))


def test_total_loss_is_mean_of_singles():
    rng = np.random.default_rng(1)
    x0 = rng.normal(size=(20, 2))
    x1 = x0 + 0.1 * rng.normal(size=(20, 2))
    ds = SnapshotDataset(x0, x1, 0.01)
    drift = lambda z: -z
    cov = lambda z: np.broadcast_to(np.array([[1.0, 0.2], [0.2, 0.5]]), (len(z), 2, 2))
    rep = total_loss(ds, drift, cov)
    singles = [nll_single(x0[i], x1[i], 0.01, -x0[i], cov(x0[:1])[0]) for i in range(20)]
    assert np.isclose(rep.total_loss, np.mean(singles), rtol=1e-12)
