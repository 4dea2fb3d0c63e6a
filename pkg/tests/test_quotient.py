import numpy as np
import pytest

from sasred import quotient
from sasred.action import TorusAction, sample_level_set
from sasred.errors import ChartDomainError


@pytest.fixture(scope="module")
def chart(ex41_points):
    return quotient.SliceChart(ex41_points[0])


@pytest.fixture(scope="module")
def curvature_at_origin(chart):
    return chart.curvature(np.zeros(chart.dim))


def test_round_sphere_has_unit_sectional_curvature():
    A = TorusAction.trivial(3)
    p = sample_level_set(A, np.random.default_rng(1), 1)[0]
    C = quotient.SliceChart(p)
    R, g = C.curvature(np.zeros(C.dim))
    K = quotient.sectional_curvatures(R, g)
    assert np.allclose(K, 1.0, atol=1e-8)


def test_chart_rejects_points_outside_radius(chart):
    with pytest.raises(ChartDomainError):
        chart.embed(np.full(chart.dim, 1.0))


def test_chart_metric_is_identity_at_base(chart):
    assert np.allclose(chart.metric(np.zeros(chart.dim)), np.eye(5), atol=1e-12)


def test_curvature_symmetries(curvature_at_origin):
    assert max(quotient.symmetry_residuals(*curvature_at_origin).values()) < 1e-6


def test_reduced_structure_is_sasakian(chart, curvature_at_origin):
    u = np.zeros(chart.dim)
    zeta = chart.reeb(u)
    assert quotient.sasaki_tensor_residual(*curvature_at_origin, zeta) < 1e-4
    assert quotient.sasaki_tensor_residual(*curvature_at_origin, zeta, metric_scale=2.0) > 0.1
    assert max(quotient.reeb_residuals(chart, u).values()) < 1e-8
    assert quotient.killing_residual_zeta(chart, u) < 1e-4
    assert quotient.contact_nondegeneracy(chart, u) > 1e-6


def test_ricci_is_eta_einstein(chart, curvature_at_origin):
    R, g = curvature_at_origin
    F = quotient.orthonormal_frame(g)
    ric = F.T @ quotient.ricci(R) @ F
    assert np.allclose(np.sort(np.linalg.eigvalsh(ric)), [4, 6, 6, 6, 6], atol=1e-6)


def test_oneill_tensor_kills_xi(rng, ex41_points):
    p = ex41_points[1]
    for Y in p.horizontal[1:]:
        assert np.linalg.norm(quotient.oneill_A(p, Y, p.xi)) < 1e-8


def test_oneill_chain_matches_chart_engine(chart):
    assert quotient.oneill_crosscheck(chart) < 1e-4


def test_cone_commutation(chart):
    us = [np.zeros(chart.dim), np.full(chart.dim, 0.005)]
    res = quotient.cone_commutation(chart, (0.5, 1.0, 2.0), us)
    assert res["relative"] < 1e-6 and res["scale_invariance"] < 1e-6
