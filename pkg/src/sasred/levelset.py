"""Geometry of the zero level of the moment map inside the sphere.

Conventions: ``R(X, Y)Z = nabla_X nabla_Y Z - nabla_Y nabla_X Z - nabla_[X,Y] Z``
and ``R(X, Y, Z, W) = g(R(X, Y)Z, W)``; the round unit sphere then has
``R(X, Y)Z = <Y, Z>X - <X, Z>Y``.  Second fundamental forms are
``h_nu(Y, Z) = -g(nabla_Y nu, Z) = g(II(Y, Z), nu)``.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import ambient
from .action import TorusAction, fundamental_fields, moment, _definite_row
from .ambient import mul_i, phi, reeb, tangent_project
from .errors import (ConfigError, DegenerateOrbitError, InfeasibleLevelSetError,
                     RegularityError, RetractionError)
from .numkit import FIRST, Stencil, directional_derivative, gram_schmidt, nullspace

ORBIT_TOL = 1e-10


def solve_level(y, A: TorusAction, directions, tol=1e-14, max_iter=50):
    """Solve ``mu(y + c @ directions) = 0`` for ``c`` by damped Newton.

    ``mu`` is homogeneous, so the normalized solution lies on the zero level of
    the sphere.  Returns ``(w, c)``.
    """
    y = np.asarray(y, dtype=float)
    N = np.atleast_2d(directions)
    Lam = A.real_weights
    c = np.zeros(A.d)
    w = y.copy()

    def resid(w):
        return moment(A, w) / np.dot(w, w)

    res = resid(w)
    for _ in range(max_iter):
        if np.max(np.abs(res)) <= tol:
            return w, c
        J = 2.0 * (Lam * w) @ N.T
        try:
            cond = np.linalg.cond(J)
        except np.linalg.LinAlgError:
            cond = np.inf
        if not np.isfinite(cond) or cond > 1e12:
            raise RegularityError(f"Newton system is singular (condition {cond:.3e})")
        delta = -np.linalg.solve(J, moment(A, w))
        step = 1.0
        for _ in range(30):
            c_new = c + step * delta
            w_new = y + c_new @ N
            res_new = resid(w_new)
            if np.max(np.abs(res_new)) < np.max(np.abs(res)):
                break
            step /= 2
        else:
            raise RetractionError(float(np.max(np.abs(res))))
        c, w, res = c_new, w_new, res_new
    if np.max(np.abs(res)) <= 1e-12:
        return w, c
    raise RetractionError(float(np.max(np.abs(res))))


def normal_directions(A: TorusAction, z) -> np.ndarray:
    """Sphere-tangential parts of ``Lambda_i * z`` (half the tangential gradients of ``mu``)."""
    z = np.asarray(z, dtype=float)
    G = A.real_weights * z
    return G - np.outer(G @ z, z)


def retract(y, A: TorusAction, directions=None, tol=1e-14, max_iter=50) -> "LevelPoint":
    """Project ``y`` onto the sphere and then onto ``mu^{-1}(0)``.

    Corrections move along fixed directions (by default the tangential moment
    gradients at the normalized start point), so the result is a smooth
    function of ``y``.
    """
    y = np.asarray(y, dtype=float)
    ny = np.linalg.norm(y)
    if ny == 0:
        raise ConfigError("cannot retract the zero vector")
    z0 = y / ny
    if A.d == 0:
        return LevelPoint.build(z0, A)
    if _definite_row(A):
        raise InfeasibleLevelSetError(f"{A!r} has a definite weight row; the zero set is empty")
    N = normal_directions(A, z0) if directions is None else directions
    w, _ = solve_level(z0, A, N, tol, max_iter)
    return LevelPoint.build(w / np.linalg.norm(w), A)


@dataclass(frozen=True, eq=False)
class LevelPoint:
    """A point of ``mu^{-1}(0)`` with cached frames (all stored as rows).

    ``vertical``: the fundamental fields; ``normal``: orthonormalized
    ``phi X_i / |X_i|`` with ``normal = normal_coeffs @ (phi X / |X|)``;
    ``horizontal``: orthonormal basis of the level tangent space orthogonal to
    the orbit, with ``xi`` first; ``tangent``: orthonormal basis of the level
    tangent space.
    """

    z: np.ndarray
    action: TorusAction
    vertical: np.ndarray
    normal: np.ndarray
    normal_coeffs: np.ndarray
    horizontal: np.ndarray
    tangent: np.ndarray

    @classmethod
    def build(cls, z, A: TorusAction, check=True) -> "LevelPoint":
        z = np.asarray(z, dtype=float)
        if check:
            if abs(np.linalg.norm(z) - 1) > 1e-12:
                raise ConfigError("level point must have unit norm")
            if A.d and np.max(np.abs(moment(A, z))) > 1e-10:
                raise ConfigError(f"point is off the zero level (|mu| = {np.max(np.abs(moment(A, z))):.3e})")
        X = fundamental_fields(A, z)
        norms = np.linalg.norm(X, axis=1)
        if A.d and np.min(norms) < ORBIT_TOL:
            raise DegenerateOrbitError(f"fundamental field vanishes at z (|X| = {np.min(norms):.3e})")
        raw_normals = np.array([phi(z, Xi) / nx for Xi, nx in zip(X, norms)]).reshape(A.d, z.size)
        try:
            normal, coeffs = gram_schmidt(raw_normals)
        except Exception as exc:
            raise RegularityError("normal frame is rank deficient") from exc
        normal = normal.reshape(A.d, z.size)
        xi = reeb(z)
        tangent = nullspace(np.vstack([z, A.real_weights * z]))
        rest = nullspace(np.vstack([z, A.real_weights * z, X, xi]))
        horizontal = np.vstack([xi, rest])
        m = A.reduced_dimension
        if tangent.shape[0] != 2 * A.n - 1 - A.d or horizontal.shape[0] != m:
            raise RegularityError("level tangent space has the wrong dimension")
        return cls(z, A, X, normal, coeffs.reshape(A.d, A.d), horizontal, tangent)

    @property
    def xi(self) -> np.ndarray:
        return reeb(self.z)

    def project_tangent(self, v) -> np.ndarray:
        T = self.tangent
        return T.T @ (T @ v)

    def vertical_part(self, v) -> np.ndarray:
        """Orthogonal projection onto the span of the fundamental fields."""
        if self.action.d == 0:
            return np.zeros_like(self.z)
        X = self.vertical
        coef = np.linalg.solve(X @ X.T, X @ v)
        return coef @ X

    def horizontal_part(self, v) -> np.ndarray:
        H = self.horizontal
        return H.T @ (H @ v)

    def frame_residuals(self) -> dict:
        """Orthogonality and dimension checks of the cached frames."""
        A = self.action
        out = {
            "unit_norm": abs(np.linalg.norm(self.z) - 1),
            "moment": float(np.max(np.abs(moment(A, self.z)))) if A.d else 0.0,
            "vertical_horizontal": float(np.max(np.abs(self.vertical @ self.horizontal.T))) if A.d else 0.0,
            "normal_tangent": float(np.max(np.abs(self.normal @ self.tangent.T))) if A.d else 0.0,
            "xi_in_horizontal": float(np.linalg.norm(self.xi - self.horizontal_part(self.xi))),
            "xi_vertical_pairing": float(np.max(np.abs(self.vertical @ self.xi))) if A.d else 0.0,
        }
        dims = (self.vertical.shape[0], self.normal.shape[0], self.horizontal.shape[0])
        out["dimension"] = float(sum(dims) != 2 * A.n - 1)
        return out


def _tangent_args(p: LevelPoint, *vs):
    return [p.project_tangent(np.asarray(v, dtype=float)) for v in vs]


def shape_form_closed(p: LevelPoint, i: int, Y, Z) -> float:
    """``g(A_i Y, Z)`` for ``nu_i = phi X_i / |X_i|``, in closed form:
    ``|X_i|^{-1} (g(X_i, Y) eta(Z) - g(phi nabla_Y X_i, Z))``."""
    Y, Z = _tangent_args(p, Y, Z)
    X = p.vertical[i]
    nx = np.linalg.norm(X)
    if nx < ORBIT_TOL:
        raise DegenerateOrbitError("degenerate orbit")
    lam = p.action.real_weights[i]
    DX = tangent_project(p.z, mul_i(lam * Y))
    return float((np.dot(X, Y) * ambient.eta(p.z, Z) - np.dot(phi(p.z, DX), Z)) / nx)


def unit_normal_field(A: TorusAction, i: int, z) -> np.ndarray:
    X = fundamental_fields(A, z)[i]
    return phi(z, X) / np.linalg.norm(X)


def level_curve(p: LevelPoint, Y):
    """``s -> point of mu^{-1}(0)`` with velocity ``Y`` at ``s = 0``."""
    A = p.action
    N = A.real_weights * p.z

    def gamma(s):
        y = p.z + s * Y
        if A.d == 0:
            return y / np.linalg.norm(y)
        w, _ = solve_level(y, A, N)
        return w / np.linalg.norm(w)

    return gamma


def shape_form_direct(p: LevelPoint, i: int, Y, Z, s: Stencil = FIRST) -> float:
    """``-g(nabla_Y nu_i, Z)`` by differentiating ``nu_i`` along a level curve."""
    Y, Z = _tangent_args(p, Y, Z)
    gamma = level_curve(p, Y)
    dnu = directional_derivative(lambda t: unit_normal_field(p.action, i, gamma(t[0])),
                                 np.zeros(1), np.ones(1), s)
    return float(-np.dot(tangent_project(p.z, dnu), Z))


def shape_forms(p: LevelPoint, Y, Z) -> np.ndarray:
    """Second fundamental form components along the orthonormal normal frame."""
    raw = np.array([shape_form_closed(p, i, Y, Z) for i in range(p.action.d)])
    return p.normal_coeffs @ raw if p.action.d else raw


def level_curvature(p: LevelPoint, X, Y, Z, W) -> float:
    """``R(X, Y, Z, W)`` of the level set via the Gauss equation."""
    X, Y, Z, W = _tangent_args(p, X, Y, Z, W)
    amb = float(np.dot(ambient.sphere_curvature(X, Y, Z), W))
    if p.action.d == 0:
        return amb
    return amb + float(np.dot(shape_forms(p, Y, Z), shape_forms(p, X, W))
                       - np.dot(shape_forms(p, X, Z), shape_forms(p, Y, W)))


def mixed_curvature_rhs(p: LevelPoint, X, Y, Z) -> float:
    """Mixed curvature difference ``R^level(X, xi, Y, Z) - R^sphere(X, xi, Y, Z)``
    written through the fundamental fields, for ``X, Y, Z`` orthogonal to xi
    and an orthonormal normal frame (automatic for circle actions):

    ``-sum_i |X_i|^{-2} (g(X_i, Z) g(D_X X_i, phi Y) - g(X_i, Y) g(D_X X_i, phi Z))``.
    """
    X, Y, Z = _tangent_args(p, X, Y, Z)
    total = 0.0
    for i in range(p.action.d):
        Xi = p.vertical[i]
        DX = tangent_project(p.z, mul_i(p.action.real_weights[i] * X))
        total -= (np.dot(Xi, Z) * np.dot(DX, phi(p.z, Y))
                  - np.dot(Xi, Y) * np.dot(DX, phi(p.z, Z))) / np.dot(Xi, Xi)
    return float(total)


def killing_residual(p: LevelPoint, field=None, s: Stencil = FIRST) -> float:
    """``max |g(nabla_Y V, Z) + g(nabla_Z V, Y)|`` over a level tangent frame.

    ``field`` is an ambient vector field ``w -> V(w)``; ``None`` means ``xi``,
    whose derivative ``D_Y xi = i Y`` is used exactly.
    """
    T = p.tangent
    if field is None:
        D = np.array([mul_i(Y) for Y in T])
    else:
        D = np.array([directional_derivative(field, p.z, Y, s) for Y in T])
    M = D @ T.T  # M[a, b] = <D_{T_a} V, T_b>
    return float(np.max(np.abs(M + M.T)))


def xi_killing_residual(p: LevelPoint, s: Stencil = FIRST) -> float:
    return killing_residual(p, None, s)


def tangent_projector_field(A: TorusAction, c):
    """Ambient field ``w -> P_w c`` with ``P_w`` the projector onto the level
    tangent directions at ``w / |w|``; a non-Killing tangent field."""
    c = np.asarray(c, dtype=float)

    def V(w):
        z = w / np.linalg.norm(w)
        Q = np.linalg.qr(np.vstack([z, A.real_weights * z]).T)[0]
        return c - Q @ (Q.T @ c)

    return V
