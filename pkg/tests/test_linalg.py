import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from arffsde.errors import InvalidArgumentError, SingularMatrixError
from arffsde.linalg import (assemble_feature_matrix, normal_equations, regularized_objective,
                            solve_normal_equations, solve_regularized_lsq)


def explicit_inverse_solve(S, y, lam):
    n = S.shape[0]
    A = S.conj().T @ S + lam * n * np.eye(S.shape[1])
    return np.linalg.inv(A) @ (S.conj().T @ y)


def test_feature_matrix_zero_exponent():
    S = assemble_feature_matrix([[0.0]], [[0.0]])
    assert S.shape == (1, 1)
    assert S[0, 0] == 1 + 0j


def test_feature_matrix_pi():
    S = assemble_feature_matrix([[np.pi]], [[1.0]])
    assert abs(S[0, 0] - (-1 + 0j)) < 1e-15


def test_feature_matrix_matches_scalar_oracle():
    rng = np.random.default_rng(1)
    x, w = rng.normal(size=(6, 2)), rng.normal(size=(4, 2))
    S = assemble_feature_matrix(x, w)
    for n in range(6):
        for k in range(4):
            phase = w[k, 0] * x[n, 0] + w[k, 1] * x[n, 1]
            assert abs(S[n, k] - complex(np.cos(phase), np.sin(phase))) < 1e-14
    assert np.allclose(np.abs(S), 1.0)


def test_feature_matrix_dimension_mismatch():
    with pytest.raises(InvalidArgumentError):
        assemble_feature_matrix(np.zeros((3, 2)), np.zeros((4, 3)))


def test_constant_feature_fits_mean():
    y = np.array([1.0, 2.0, 4.5, -0.5])
    S = np.ones((4, 1), dtype=complex)
    beta = solve_regularized_lsq(S, y, 0.0)
    assert abs(beta[0] - y.mean()) < 1e-12


def test_heavy_regularization_shrinks_to_zero():
    rng = np.random.default_rng(2)
    S = assemble_feature_matrix(rng.normal(size=(10, 1)), rng.normal(size=(3, 1)))
    y = rng.normal(size=10)
    beta = solve_regularized_lsq(S, y, 1e9)
    assert np.linalg.norm(beta) <= np.linalg.norm(S.conj().T @ y) / (1e9 * 10)
    assert np.linalg.norm(beta) < 1e-8


def test_small_system_matches_explicit_inverse():
    rng = np.random.default_rng(3)
    S = assemble_feature_matrix(rng.normal(size=(8, 2)), rng.normal(size=(3, 2)))
    y = rng.normal(size=(8, 1))
    beta = solve_regularized_lsq(S, y, 0.01)
    ref = explicit_inverse_solve(S, y, 0.01)
    assert np.linalg.norm(beta - ref) <= 1e-10 * np.linalg.norm(ref)


def test_residual_of_normal_equations():
    rng = np.random.default_rng(4)
    x, w = rng.normal(size=(50, 2)), rng.normal(size=(7, 2))
    y = rng.normal(size=(50, 3))
    gram, rhs = normal_equations(x, w, y)
    beta = solve_normal_equations(gram, rhs, 0.002, 50)
    res = (gram + 0.002 * 50 * np.eye(7)) @ beta - rhs
    assert np.all(np.linalg.norm(res, axis=0) <= 1e-8 * np.linalg.norm(rhs, axis=0))


def test_chunked_accumulation_matches_direct():
    rng = np.random.default_rng(5)
    x, w = rng.normal(size=(103, 1)), rng.normal(size=(5, 1))
    y = rng.normal(size=(103, 2))
    g1, r1 = normal_equations(x, w, y, chunk_rows=10)
    S = assemble_feature_matrix(x, w)
    assert np.allclose(g1, S.conj().T @ S, atol=1e-12)
    assert np.allclose(r1, S.conj().T @ y, atol=1e-12)


def test_singular_without_regularization():
    S = np.ones((5, 2), dtype=complex)
    with pytest.raises(SingularMatrixError):
        solve_regularized_lsq(S, np.arange(5.0), 0.0)


@pytest.mark.parametrize("bad", [np.nan, np.inf])
def test_non_finite_inputs_rejected(bad):
    S = np.ones((3, 1), dtype=complex)
    y = np.array([1.0, bad, 2.0])
    with pytest.raises(InvalidArgumentError):
        solve_regularized_lsq(S, y, 0.1)


def test_negative_lambda_rejected():
    with pytest.raises(InvalidArgumentError):
        solve_regularized_lsq(np.ones((3, 1), dtype=complex), np.ones(3), -1.0)


def test_solution_minimizes_objective():
    rng = np.random.default_rng(6)
    S = assemble_feature_matrix(rng.normal(size=(20, 1)), rng.normal(size=(4, 1)))
    y = rng.normal(size=(20, 1))
    beta = solve_regularized_lsq(S, y, 0.05)
    best = regularized_objective(S, y, beta, 0.05)
    for _ in range(20):
        db = 1e-3 * (rng.normal(size=beta.shape) + 1j * rng.normal(size=beta.shape))
        assert regularized_objective(S, y, beta + db, 0.05) >= best


@settings(max_examples=200, deadline=None)
@given(n=st.integers(1, 64), k=st.integers(1, 16), d=st.integers(1, 3),
       lam=st.floats(1e-4, 1.0), seed=st.integers(0, 2 ** 32 - 1))
def test_random_instances_match_oracle(n, k, d, lam, seed):
    rng = np.random.default_rng(seed)
    S = assemble_feature_matrix(rng.normal(size=(n, d)), rng.normal(size=(k, d)))
    y = rng.normal(size=(n, 2))
    beta = solve_regularized_lsq(S, y, lam)
    ref = explicit_inverse_solve(S, y, lam)
    assert np.linalg.norm(beta - ref) <= 1e-10 * max(np.linalg.norm(ref), 1e-300)
