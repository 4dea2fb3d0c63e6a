"""Standard Sasakian structure on the unit sphere S^{2n-1} in C^n and its cone.

Points and tangent vectors are plain float arrays of length ``2n`` with
interleaved coordinates ``(x_0, y_0, x_1, y_1, ...)``, ``z_j = x_j + i y_j``.
Reeb convention: ``xi(z) = i z`` so that ``eta(xi) = +1`` for
``eta = sum(x_j dy_j - y_j dx_j)``.

Cone tangent vectors are pairs ``(Y, a)`` with ``Y`` tangent to the sphere and
``a`` the coefficient of ``d/dr``; the radial field ``r d/dr`` is ``(0, r)``.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ConfigError, EvaluationDomainError
from .numkit import FIRST, Stencil, directional_derivative, nullspace


def as_complex(a) -> np.ndarray:
    a = np.ascontiguousarray(a, dtype=float)
    return a.view(np.complex128)


def as_real(c) -> np.ndarray:
    return np.ascontiguousarray(c, dtype=np.complex128).view(float)


def mul_i(a) -> np.ndarray:
    """Multiply by the imaginary unit: ``(x, y) -> (-y, x)`` per pair."""
    a = np.asarray(a, dtype=float)
    out = np.empty_like(a)
    out[..., 0::2] = -a[..., 1::2]
    out[..., 1::2] = a[..., 0::2]
    return out


def tangent_project(z, v) -> np.ndarray:
    z = np.asarray(z, dtype=float)
    return v - np.dot(z, v) * z


def random_sphere_point(rng, n) -> np.ndarray:
    y = rng.standard_normal(2 * n)
    return y / np.linalg.norm(y)


def random_tangent(rng, z) -> np.ndarray:
    return tangent_project(z, rng.standard_normal(z.size))


def check_on_sphere(z, tol=1e-12):
    if abs(np.linalg.norm(z) - 1) > tol:
        raise ConfigError(f"point is not on the unit sphere (|z| = {np.linalg.norm(z)!r})")


# --- contact metric structure -------------------------------------------------

def reeb(z) -> np.ndarray:
    return mul_i(z)


def eta(z, Y) -> float:
    return float(np.dot(mul_i(z), Y))


def phi(z, Y) -> np.ndarray:
    """``phi Y = i Y + eta(Y) z``, the tangential part of the derivative of ``xi = i z``."""
    return mul_i(Y) + eta(z, Y) * np.asarray(z, dtype=float)


def sphere_curvature(X, Y, Z) -> np.ndarray:
    """Round unit-sphere curvature ``R(X, Y)Z = <Y, Z> X - <X, Z> Y``."""
    return np.dot(Y, Z) * np.asarray(X, dtype=float) - np.dot(X, Z) * np.asarray(Y, dtype=float)


def sasakian_axiom_residuals(z, X, Y, Z) -> dict:
    """Closed-form residuals of the Sasakian curvature identity and the
    almost-contact metric identities at one point, for tangent X, Y, Z."""
    xi = reeb(z)
    lhs = sphere_curvature(X, xi, Y)
    rhs = eta(z, Y) * X - np.dot(X, Y) * xi
    return {
        "curvature": float(np.linalg.norm(lhs - rhs)),
        "phi_xi": float(np.linalg.norm(phi(z, xi))),
        "eta_xi": abs(eta(z, xi) - 1.0),
        "phi_metric": abs(np.dot(phi(z, Y), phi(z, Z)) - (np.dot(Y, Z) - eta(z, Y) * eta(z, Z))),
        "phi_squared": float(np.linalg.norm(phi(z, phi(z, Y)) + Y - eta(z, Y) * xi)),
    }


def calibrate_deta(rng=None, n=3, samples=8, s: Stencil = FIRST) -> float:
    """Measure ``c`` in ``d eta(X, Y) = c g(X, phi Y)`` by finite differences.

    ``eta`` is extended to R^{2n} by ``w -> <i w, .>`` and ``d eta`` is taken
    on constant (hence commuting) vector fields.
    """
    rng = np.random.default_rng(0) if rng is None else rng
    num, den = [], []
    for _ in range(samples):
        z = random_sphere_point(rng, n)
        X, Y = random_tangent(rng, z), random_tangent(rng, z)
        dX = directional_derivative(lambda w: np.dot(mul_i(w), Y), z, X, s)
        dY = directional_derivative(lambda w: np.dot(mul_i(w), X), z, Y, s)
        num.append(float(dX - dY))
        den.append(float(np.dot(X, phi(z, Y))))
    num, den = np.array(num), np.array(den)
    return float(np.dot(num, den) / np.dot(den, den))


# --- cone ---------------------------------------------------------------------

@dataclass(frozen=True)
class ConePoint:
    z: np.ndarray
    r: float

    def __post_init__(self):
        if not self.r > 0:
            raise EvaluationDomainError(f"cone radius must be positive, got {self.r}")

    def scaled(self, t: float) -> "ConePoint":
        return ConePoint(self.z, t * self.r)


def cone_metric(p: ConePoint, U, V) -> float:
    (Y, a), (Z, b) = U, V
    return p.r**2 * float(np.dot(Y, Z)) + a * b


def cone_J(p: ConePoint, U, phi_scale: float = 1.0):
    """``J(Y, a) = (phi Y + (a / r) xi, -r eta(Y))``.

    ``phi_scale`` multiplies ``phi`` and exists only for negative controls.
    """
    Y, a = U
    return (phi_scale * phi(p.z, Y) + (a / p.r) * reeb(p.z), -p.r * eta(p.z, Y))


def kahler_form(p: ConePoint, U, V, phi_scale: float = 1.0) -> float:
    """``omega(U, V) = C(g)(J U, V)``."""
    return cone_metric(p, cone_J(p, U, phi_scale), V)


def radial(p: ConePoint):
    """The radial field ``R_0 = r d/dr``."""
    return (np.zeros_like(p.z), p.r)


def pushforward_scaling(U, t):
    """Differential of ``rho_t: (x, r) -> (x, t r)``."""
    Y, a = U
    return (Y, t * a)


class ConeChart:
    """Coordinates ``(u, r)`` on the cone near a base point ``z0``.

    The sphere part is ``z(u) = (z0 + E u) / |z0 + E u|`` with ``E`` an
    orthonormal basis of the tangent space at ``z0``.  Coordinate vector
    fields are ``B_a = (dz e_a, 0)`` for ``a < 2n - 1`` and ``B_last = (0, 1)``.
    """

    def __init__(self, z0, basis=None):
        self.z0 = np.asarray(z0, dtype=float)
        if basis is None:
            basis = nullspace(self.z0)
        self.E = np.asarray(basis, dtype=float)  # rows
        self.dim = self.E.shape[0] + 1

    def embed(self, u):
        w = self.z0 + u @ self.E
        nw = np.linalg.norm(w)
        z = w / nw
        dz = (self.E - np.outer(self.E @ z, z)) / nw  # rows: dz(e_a)
        return z, dz

    def split(self, q):
        q = np.asarray(q, dtype=float)
        u, r = q[:-1], q[-1]
        if not r > 0:
            raise EvaluationDomainError(f"stencil left the cone (r = {r})")
        return u, r

    def frame(self, q):
        """Point and coordinate basis as cone tangent pairs."""
        u, r = self.split(q)
        z, dz = self.embed(u)
        p = ConePoint(z, r)
        vecs = [(dz[a], 0.0) for a in range(dz.shape[0])] + [(np.zeros_like(z), 1.0)]
        return p, vecs, dz

    def metric_matrix(self, q) -> np.ndarray:
        p, vecs, _ = self.frame(q)
        return np.array([[cone_metric(p, U, V) for V in vecs] for U in vecs])

    def J_matrix(self, q, phi_scale: float = 1.0) -> np.ndarray:
        """Column ``b`` holds the coordinate components of ``J B_b``."""
        p, vecs, dz = self.frame(q)
        out = np.empty((self.dim, self.dim))
        for b, U in enumerate(vecs):
            Y, a = cone_J(p, U, phi_scale)
            coeff, *_ = np.linalg.lstsq(dz.T, Y, rcond=None)
            out[:-1, b] = coeff
            out[-1, b] = a
        return out

    def omega_matrix(self, q, phi_scale: float = 1.0) -> np.ndarray:
        p, vecs, _ = self.frame(q)
        return np.array([[kahler_form(p, U, V, phi_scale) for V in vecs] for U in vecs])

    def potential_one_form(self, q) -> np.ndarray:
        """Components of ``r^2 eta`` in the coordinate basis."""
        p, vecs, _ = self.frame(q)
        return np.array([p.r**2 * eta(p.z, Y) for Y, _ in vecs])

    def coords_of(self, p: ConePoint):
        """Chart coordinates of the base point lifted at radius ``p.r`` (u = 0)."""
        return np.concatenate([np.zeros(self.dim - 1), [p.r]])


def exterior_derivative_2form(omega_fn, q, s: Stencil = FIRST) -> np.ndarray:
    """``(d omega)_{ijk} = d_i w_jk + d_j w_ki + d_k w_ij`` for a 2-form given
    by its coordinate matrix function."""
    q = np.asarray(q, dtype=float)
    dim = q.size
    eye = np.eye(dim)
    dw = np.stack([directional_derivative(omega_fn, q, eye[i], s) for i in range(dim)])
    return dw + dw.transpose(1, 2, 0) + dw.transpose(2, 0, 1)


def exterior_derivative_1form(alpha_fn, q, s: Stencil = FIRST) -> np.ndarray:
    q = np.asarray(q, dtype=float)
    eye = np.eye(q.size)
    da = np.stack([directional_derivative(alpha_fn, q, eye[i], s) for i in range(q.size)])
    return da - da.T


def nijenhuis(J_fn, q, s: Stencil = FIRST) -> np.ndarray:
    """Coordinate Nijenhuis tensor ``N^k_{ij}``, returned with shape ``(i, j, k)``.

    ``N^k_ij = J^l_i d_l J^k_j - J^l_j d_l J^k_i - J^k_l (d_i J^l_j - d_j J^l_i)``.
    """
    q = np.asarray(q, dtype=float)
    eye = np.eye(q.size)
    J = J_fn(q)
    dJ = np.stack([directional_derivative(J_fn, q, eye[l], s) for l in range(q.size)])  # [l, k, j]
    t1 = np.einsum("li,lkj->ijk", J, dJ)
    t2 = np.einsum("lj,lki->ijk", J, dJ)
    t3 = np.einsum("kl,ilj->ijk", J, dJ) - np.einsum("kl,jli->ijk", J, dJ)
    return t1 - t2 - t3


def cone_kahler_residuals(p: ConePoint, s: Stencil = FIRST, phi_scale: float = 1.0, chart=None):
    """Max |d omega| and max |N_J| at a cone point, by finite differences in a
    cone chart centred at ``p``.

    Returns ``(d_omega_residual, nijenhuis_residual)``.
    """
    if p.r - s.reach <= 0:
        raise EvaluationDomainError("stencil leaves the cone r > 0")
    chart = ConeChart(p.z) if chart is None else chart
    q = chart.coords_of(p)
    d_omega = exterior_derivative_2form(lambda x: chart.omega_matrix(x, phi_scale), q, s)
    N = nijenhuis(lambda x: chart.J_matrix(x, phi_scale), q, s)
    return float(np.max(np.abs(d_omega))), float(np.max(np.abs(N)))


def omega_potential_ratio(p: ConePoint, s: Stencil = FIRST) -> float:
    """Measured constant ``k`` with ``omega = k d(r^2 eta)`` (expected 1/2)."""
    chart = ConeChart(p.z)
    q = chart.coords_of(p)
    d_alpha = exterior_derivative_1form(chart.potential_one_form, q, s)
    om = chart.omega_matrix(q)
    return float(np.sum(om * d_alpha) / np.sum(d_alpha * d_alpha))


# --- radial homogeneity -------------------------------------------------------

SCALING_TS = (0.5, 1 / np.sqrt(2), np.sqrt(2), 2.0)

STATED_OMEGA_EXPONENT = 1.0


def radial_scaling_exponent(form=None, t_values=SCALING_TS, rng=None, n=3, pairs=6):
    """Fit ``s`` in ``rho_t^* form = t^s form`` over random cone points and
    argument pairs.

    ``form(p, U, V)`` defaults to the Kahler form.  One-forms are accepted
    via ``form(p, U)`` when ``pairs`` arguments are single vectors; see
    :func:`one_form_scaling_exponent`.

    Returns ``(exponent, fit_residual)``.
    """
    form = kahler_form if form is None else form
    ts = np.asarray(t_values, dtype=float)
    if np.unique(ts).size < 2:
        raise ConfigError("need at least two distinct scaling factors")
    rng = np.random.default_rng(1) if rng is None else rng
    xs, ys = [], []
    for _ in range(pairs):
        z = random_sphere_point(rng, n)
        p = ConePoint(z, rng.uniform(0.5, 2.0))
        U = (random_tangent(rng, z), rng.standard_normal())
        V = (random_tangent(rng, z), rng.standard_normal())
        base = form(p, U, V)
        if abs(base) < 1e-8:
            continue
        for t in ts:
            pulled = form(p.scaled(t), pushforward_scaling(U, t), pushforward_scaling(V, t))
            xs.append(np.log(t))
            ys.append(np.log(pulled / base))
    xs, ys = np.array(xs), np.array(ys)
    exponent = float(np.dot(xs, ys) / np.dot(xs, xs))
    residual = float(np.max(np.abs(ys - exponent * xs)))
    return exponent, residual


def one_form_scaling_exponent(form, t_values=SCALING_TS, rng=None, n=3, samples=6):
    """Same fit as :func:`radial_scaling_exponent` for a one-form ``form(p, U)``."""
    return radial_scaling_exponent(lambda p, U, V: form(p, U), t_values, rng, n, samples)


def radial_one_form(p: ConePoint, U) -> float:
    """``r * eta`` pulled back to the cone; homogeneous of degree one."""
    Y, _ = U
    return p.r * eta(p.z, Y)
