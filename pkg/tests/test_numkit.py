import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from sasred.errors import ConfigError, EvaluationDomainError, RankDeficiencyError
from sasred.numkit import (FIRST, SECOND, Stencil, directional_derivative, gradient, gram_schmidt,
                           mixed_second_derivatives, nullspace, numerical_rank)


def test_stencil_validation():
    with pytest.raises(ConfigError):
        Stencil(step=0.0)
    with pytest.raises(ConfigError):
        Stencil(richardson_levels=5)
    with pytest.raises(ConfigError):
        Stencil(order=3)
    assert FIRST.reach == pytest.approx(4e-3)
    assert FIRST.halved().step == pytest.approx(5e-4)


def test_derivative_of_polynomial_is_exact():
    f = lambda x: x[0] ** 3 + 2 * x[0] * x[1] ** 2
    x = np.array([0.7, -1.3])
    expected = np.array([3 * 0.49 + 2 * 1.69, 4 * 0.7 * -1.3])
    assert np.allclose(gradient(f, x), expected, atol=1e-11)


def test_derivative_of_exponential():
    x = np.array([0.3])
    d = directional_derivative(lambda y: np.exp(y[0]), x, np.array([1.0]))
    assert abs(d - np.exp(0.3)) < 1e-11


def test_mixed_second_derivatives_match_hessian():
    f = lambda x: np.sin(x[0]) * np.cos(x[1]) + x[0] * x[2] ** 2
    x = np.array([0.4, -0.2, 0.9])
    H = mixed_second_derivatives(f, x, SECOND)
    s0, c0, s1, c1 = np.sin(0.4), np.cos(0.4), np.sin(-0.2), np.cos(-0.2)
    expected = np.array([
        [-s0 * c1, -c0 * s1, 2 * 0.9],
        [-c0 * s1, -s0 * c1, 0.0],
        [2 * 0.9, 0.0, 2 * 0.4],
    ])
    assert np.allclose(H, expected, atol=1e-8)


def test_nonfinite_values_raise():
    with pytest.raises(EvaluationDomainError), np.errstate(invalid="ignore"):
        directional_derivative(lambda y: np.log(y[0]), np.array([1e-4]), np.array([1.0]))


def test_gram_schmidt_examples():
    basis, _ = gram_schmidt(np.array([[2.0, 0.0], [0.0, 3.0]]))
    assert np.allclose(basis, np.eye(2))
    basis, coeffs = gram_schmidt(np.array([[1.0, 1.0], [1.0, 0.0]]))
    s = 1 / np.sqrt(2)
    assert np.allclose(np.abs(basis), [[s, s], [s, s]])
    assert np.allclose(basis[0] @ basis[1], 0.0)
    with pytest.raises(RankDeficiencyError) as info:
        gram_schmidt(np.array([[1.0, 2.0], [2.0, 4.0]]))
    assert info.value.index == 1


@settings(max_examples=40, deadline=None)
@given(st.integers(2, 7), st.integers(0, 10**6))
def test_gram_schmidt_with_custom_inner_product(m, seed):
    rng = np.random.default_rng(seed)
    V = rng.standard_normal((m, m))
    B = rng.standard_normal((m, m))
    G = B @ B.T + m * np.eye(m)
    basis, coeffs = gram_schmidt(V, inner=lambda a, b: a @ G @ b)
    assert np.allclose(basis @ G @ basis.T, np.eye(m), atol=1e-9)
    assert np.allclose(coeffs @ V, basis, atol=1e-9)


def test_nullspace_and_rank():
    M = np.array([[1.0, 0.0, 0.0], [0.0, 1.0, 0.0]])
    N = nullspace(M)
    assert N.shape == (1, 3) and abs(abs(N[0, 2]) - 1) < 1e-12
    assert numerical_rank(M) == 2
    assert np.allclose(nullspace(np.zeros((0, 4))), np.eye(4))
