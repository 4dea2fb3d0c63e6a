import numpy as np
import pytest

from sasred import registry
from sasred.action import TorusAction, sample_level_set
from sasred.errors import ConfigError, NotApplicableError


def _points(weights, count=8, seed=3):
    A = TorusAction(np.array([weights]))
    return A, sample_level_set(A, np.random.default_rng(seed), count)


def test_lookup_and_parameter_checks():
    assert registry.lookup("ex41").weights == (-1, -1, 1, 1)
    assert registry.lookup("ex42", k=3).weights == (-3, 1, 1, 1)
    assert registry.lookup("ex43").weights == (1, 1, -2, -2)
    assert registry.lookup("ex43", a=1, b=1, k=2, n=6).einstein_claim == 8.0
    with pytest.raises(ConfigError):
        registry.lookup("ex42", k=0)
    with pytest.raises(ConfigError):
        registry.lookup("ex43", a=2, b=4)
    with pytest.raises(ConfigError):
        registry.lookup("ex99")


@pytest.mark.parametrize("weights,expected", [
    ((-1, -1, 1, 1), (np.sqrt(0.5), np.sqrt(0.5))),
    ((-2, 1, 1, 1), (np.sqrt(1 / 3), np.sqrt(2 / 3))),
    ((-3, 1, 1, 1), (0.5, np.sqrt(3) / 2)),
    ((1, 1, -2, -2), (np.sqrt(2 / 3), np.sqrt(1 / 3))),
])
def test_balance_radii(weights, expected):
    assert np.allclose(registry.balance_radii(weights), expected, atol=1e-15)
    A, pts = _points(weights)
    assert registry.radii_check(A, pts, expected) < 1e-10


def test_product_metric_on_block_weights():
    for w in [(-1, -1, 1, 1), (1, 1, -2, -2)]:
        A, pts = _points(w)
        assert registry.product_metric_block_check(A, pts) < 1e-10


def test_non_block_weights_are_not_applicable():
    with pytest.raises(NotApplicableError):
        registry.sign_blocks((1, -1, 1, -1))
    with pytest.raises(NotApplicableError):
        registry.balance_radii((-1, -2, 1, 1))
