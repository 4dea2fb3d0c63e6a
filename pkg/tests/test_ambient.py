import numpy as np
import pytest

from sasred import ambient
from sasred.ambient import ConePoint


@pytest.mark.parametrize("n", [3, 4])
def test_sasakian_axioms_on_round_sphere(rng, n):
    for _ in range(50):
        z = ambient.random_sphere_point(rng, n)
        X, Y, Z = (ambient.random_tangent(rng, z) for _ in range(3))
        res = ambient.sasakian_axiom_residuals(z, X, Y, Z)
        assert max(res.values()) < 1e-12, res


def test_reeb_is_unit_and_dual_to_eta(rng):
    z = ambient.random_sphere_point(rng, 3)
    xi = ambient.reeb(z)
    assert abs(np.linalg.norm(xi) - 1) < 1e-14
    assert abs(ambient.eta(z, xi) - 1) < 1e-14
    assert np.allclose(ambient.phi(z, xi), 0)


def test_deta_calibration_factor():
    assert abs(abs(ambient.calibrate_deta()) - 2.0) < 1e-6


def test_cone_metric_and_complex_structure(rng):
    p = ConePoint(ambient.random_sphere_point(rng, 3), 1.7)
    U = (ambient.random_tangent(rng, p.z), 0.4)
    V = (ambient.random_tangent(rng, p.z), -1.1)
    JU = ambient.cone_J(p, U)
    JJU = ambient.cone_J(p, JU)
    assert np.allclose(JJU[0], -U[0]) and abs(JJU[1] + U[1]) < 1e-13
    assert abs(ambient.cone_metric(p, JU, ambient.cone_J(p, V)) - ambient.cone_metric(p, U, V)) < 1e-12
    # J R0 = xi
    JR = ambient.cone_J(p, ambient.radial(p))
    assert np.allclose(JR[0], ambient.reeb(p.z)) and abs(JR[1]) < 1e-14


def test_cone_is_kahler(rng):
    p = ConePoint(ambient.random_sphere_point(rng, 3), 0.8)
    dw, nj = ambient.cone_kahler_residuals(p)
    assert dw < 1e-6 and nj < 1e-6


def test_perturbed_structure_is_not_integrable(rng):
    p = ConePoint(ambient.random_sphere_point(rng, 3), 1.0)
    assert ambient.cone_kahler_residuals(p, phi_scale=1.1)[1] > 1e-2


def test_omega_is_half_d_of_r2_eta(rng):
    p = ConePoint(ambient.random_sphere_point(rng, 3), 1.3)
    assert abs(ambient.omega_potential_ratio(p) - 0.5) < 1e-8


def test_scaling_exponents():
    e, fit = ambient.radial_scaling_exponent()
    assert abs(e - 2) < 1e-9 and fit < 1e-9
    e1, _ = ambient.one_form_scaling_exponent(ambient.radial_one_form)
    assert abs(e1 - 1) < 1e-9
