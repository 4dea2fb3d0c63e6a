"""Weighted torus actions on S^{2n-1}, moment maps and invariance diagnostics."""
from __future__ import annotations

from dataclasses import dataclass, field
from math import gcd
from functools import reduce

import numpy as np

from . import ambient
from .ambient import ConePoint, mul_i, reeb
from .errors import ConfigError, InfeasibleLevelSetError, RetractionError, RegularityError
from .numkit import FIRST, Stencil, directional_derivative


@dataclass(frozen=True)
class TorusAction:
    """Action ``z_j -> exp(i <Lambda[:, j], t>) z_j`` of a d-torus on C^n.

    ``weights`` has shape ``(d, n)``; ``d = 0`` is allowed and means the
    trivial action.
    """

    weights: np.ndarray = field(repr=False)

    def __post_init__(self):
        W = np.asarray(self.weights)
        if W.ndim == 1:
            W = W[None, :]
        if W.ndim != 2:
            raise ConfigError("weights must be a d x n integer matrix")
        if W.size and not np.all(np.equal(np.mod(W, 1), 0)):
            raise ConfigError("weights must be integers")
        W = W.astype(int)
        if W.shape[0] and np.any(np.all(W == 0, axis=1)):
            raise ConfigError("weight matrix has an all-zero row")
        object.__setattr__(self, "weights", W)

    @classmethod
    def trivial(cls, n: int) -> "TorusAction":
        return cls(np.zeros((0, n), dtype=int))

    @property
    def d(self) -> int:
        return self.weights.shape[0]

    @property
    def n(self) -> int:
        return self.weights.shape[1]

    @property
    def real_weights(self) -> np.ndarray:
        """Weights repeated per real coordinate, shape ``(d, 2n)``."""
        return np.repeat(self.weights, 2, axis=1).astype(float)

    @property
    def reduced_dimension(self) -> int:
        return 2 * self.n - 1 - 2 * self.d

    def __repr__(self):
        return f"TorusAction({self.weights.tolist()})"


def fundamental_fields(A: TorusAction, z) -> np.ndarray:
    """All fundamental fields at ``z`` as rows, ``X_i = i (Lambda_i * z)``."""
    return mul_i(A.real_weights * np.asarray(z, dtype=float))


def fundamental_field(A: TorusAction, i: int, z) -> np.ndarray:
    return fundamental_fields(A, z)[i]


def moment(A: TorusAction, z) -> np.ndarray:
    """Contact moment map ``mu_i(z) = sum_j lambda_ij |z_j|^2`` (equals ``eta(X_i)``).

    Homogeneous of degree two, so it also serves as the cone moment map in the
    ambient C^n picture.
    """
    z = np.asarray(z, dtype=float)
    return A.real_weights @ (z * z)


def moment_gradients(A: TorusAction, w) -> np.ndarray:
    """Euclidean gradients of ``mu`` in R^{2n}: rows ``2 Lambda_i * w``."""
    return 2.0 * A.real_weights * np.asarray(w, dtype=float)


def moment_via_eta(A: TorusAction, z) -> np.ndarray:
    return np.array([ambient.eta(z, X) for X in fundamental_fields(A, z)])


def cone_moment(A: TorusAction, p: ConePoint) -> np.ndarray:
    """``Phi_i(z, r) = r^2 mu_i(z)``; restricts to ``mu`` on ``r = 1``."""
    return p.r**2 * moment(A, p.z)


def cone_moment_pairing(A: TorusAction, p: ConePoint, U, s: Stencil = FIRST) -> np.ndarray:
    """Measured ratio ``d Phi_i(U) / omega(X_i, U)`` for a cone tangent ``U``.

    ``d Phi`` is taken by finite differences along the curve
    ``t -> (normalize(z + t Y), r + t a)``.
    """
    Y, a = U

    def phi_along(t):
        w = p.z + t * Y
        return cone_moment(A, ConePoint(w / np.linalg.norm(w), p.r + t * a))

    dPhi = directional_derivative(lambda tt: phi_along(tt[0]), np.zeros(1), np.ones(1), s)
    iota = np.array([ambient.kahler_form(p, (X, 0.0), U) for X in fundamental_fields(A, p.z)])
    return dPhi / iota


def cone_moment_exponent(A: TorusAction, rng=None, t_values=ambient.SCALING_TS, samples=6):
    """Fit ``s`` in ``Phi(rho_t p) = t^s Phi(p)``; returns ``(exponent, residual)``."""
    rng = np.random.default_rng(2) if rng is None else rng
    xs, ys = [], []
    for _ in range(samples):
        p = ConePoint(ambient.random_sphere_point(rng, A.n), rng.uniform(0.5, 2.0))
        base = cone_moment(A, p)
        for t in t_values:
            scaled = cone_moment(A, p.scaled(t))
            for b, v in zip(base, scaled):
                if abs(b) > 1e-8:
                    xs.append(np.log(t))
                    ys.append(np.log(v / b))
    xs, ys = np.array(xs), np.array(ys)
    exponent = float(np.dot(xs, ys) / np.dot(xs, xs))
    return exponent, float(np.max(np.abs(ys - exponent * xs)))


STATED_PHI_EXPONENT = 1.0


# --- flows and invariance -----------------------------------------------------

class TorusFlow:
    """Exact flow of the i-th fundamental field: ``z -> exp(i Lambda_i t) * z``."""

    def __init__(self, A: TorusAction, i: int):
        self.lam = A.weights[i].astype(float)

    def _rotate(self, t, v):
        c = ambient.as_complex(v) * np.exp(1j * self.lam * t)
        return ambient.as_real(c)

    def apply(self, t, z):
        return self._rotate(t, z)

    def push(self, t, z, Y):
        return self._rotate(t, Y)


class ProjectedTranslationFlow:
    """``z -> normalize(z + t c)``; not isometric, used as a negative control."""

    def __init__(self, c):
        self.c = np.asarray(c, dtype=float)

    def apply(self, t, z):
        w = z + t * self.c
        return w / np.linalg.norm(w)

    def push(self, t, z, Y):
        w = z + t * self.c
        nw = np.linalg.norm(w)
        u = w / nw
        return (Y - np.dot(u, Y) * u) / nw


def flow_invariance_residuals(flow, z, frame, s: Stencil = FIRST):
    """Residuals of ``L g``, ``L eta`` and ``[X, xi]`` for a flow at ``z``.

    All derivatives are taken in the flow parameter only; the spatial parts
    use the flow's exact differential.
    """
    frame = np.asarray(frame, dtype=float)
    t0 = np.zeros(1)
    one = np.ones(1)

    def gram(tt):
        t = tt[0]
        moved = np.array([flow.push(t, z, Y) for Y in frame])
        return moved @ moved.T

    def eta_pull(tt):
        t = tt[0]
        zt = flow.apply(t, z)
        return np.array([ambient.eta(zt, flow.push(t, z, Y)) for Y in frame])

    def xi_pull(tt):
        # d/dt of (phi_t)^{-1}_* xi(phi_t z) in the basis paired with the frame
        t = tt[0]
        zt = flow.apply(t, z)
        moved = np.array([flow.push(t, z, Y) for Y in frame])
        # coefficients of xi(zt) in the moved frame (exact when the frame spans the tangent space)
        coeff, *_ = np.linalg.lstsq(moved.T, reeb(zt), rcond=None)
        return coeff

    Lg = directional_derivative(gram, t0, one, s)
    Leta = directional_derivative(eta_pull, t0, one, s)
    Lxi = directional_derivative(xi_pull, t0, one, s)
    return float(np.max(np.abs(Lg))), float(np.max(np.abs(Leta))), float(np.max(np.abs(Lxi)))


def tangent_frame(z) -> np.ndarray:
    """Orthonormal basis of the sphere tangent space at ``z`` (rows)."""
    from .numkit import nullspace

    return nullspace(np.asarray(z, dtype=float))


def invariance_residuals(A: TorusAction, z, s: Stencil = FIRST):
    """Max over fundamental fields of the (L_X g, L_X eta, [X, xi]) residuals."""
    frame = tangent_frame(z)
    out = np.zeros(3)
    for i in range(A.d):
        out = np.maximum(out, flow_invariance_residuals(TorusFlow(A, i), z, frame, s))
    return tuple(float(v) for v in out)


def bracket_residual(A: TorusAction, z, s: Stencil = FIRST) -> float:
    """Max ``|[X_i, X_j]|`` with the fields extended linearly to R^{2n}."""
    z = np.asarray(z, dtype=float)
    worst = 0.0
    for i in range(A.d):
        for j in range(i + 1, A.d):
            Xi = lambda w: fundamental_field(A, i, w)
            Xj = lambda w: fundamental_field(A, j, w)
            br = (directional_derivative(Xj, z, Xi(z), s)
                  - directional_derivative(Xi, z, Xj(z), s))
            worst = max(worst, float(np.linalg.norm(br)))
    return worst


# --- regularity ---------------------------------------------------------------

@dataclass
class RegularityVerdict:
    regular: bool
    closed_form: bool | None
    min_singular_value: float
    reasons: list


def closed_form_regularity(weights) -> tuple[bool, list]:
    """The circle-action criterion: nonzero weights, gcd one, both signs present."""
    lam = np.asarray(weights, dtype=int).ravel()
    reasons = []
    if np.any(lam == 0):
        reasons.append("zero weight")
    if reduce(gcd, (abs(int(v)) for v in lam), 0) != 1:
        reasons.append("weights not coprime")
    if not (np.any(lam > 0) and np.any(lam < 0)):
        reasons.append("weights do not take both signs")
    return not reasons, reasons


def restricted_moment_differential(A: TorusAction, z) -> np.ndarray:
    """``d mu`` restricted to the sphere tangent space, in an orthonormal frame."""
    return moment_gradients(A, z) @ tangent_frame(z).T


def regularity_check(A: TorusAction, samples, threshold: float = 1e-6) -> RegularityVerdict:
    """Closed-form weight test (d = 1) plus a rank test of ``d mu`` at each sample.

    ``samples`` are level-set points (arrays or objects with a ``z`` attribute).
    An empty sample list is read as an empty zero set.
    """
    closed = None
    reasons = []
    if A.d == 1:
        closed, reasons = closed_form_regularity(A.weights[0])
    pts = [getattr(p, "z", p) for p in samples]
    if A.d and not pts:
        raise InfeasibleLevelSetError("no level-set samples: the zero set appears empty")
    smin = np.inf
    for z in pts:
        if A.d == 0:
            break
        sv = np.linalg.svd(restricted_moment_differential(A, z), compute_uv=False)
        smin = min(smin, float(sv[-1]) if sv.size == A.d else 0.0)
    numeric_ok = A.d == 0 or smin > threshold
    if not numeric_ok:
        reasons.append(f"d mu rank drop (min singular value {smin:.3e})")
    regular = numeric_ok and (closed is None or closed)
    return RegularityVerdict(regular, closed, float(smin), reasons)


def sample_level_set(A: TorusAction, rng, count: int, seeds: int = 64, **kw):
    """Retract ``count`` random Gaussian seeds onto the zero level.

    Raises :class:`InfeasibleLevelSetError` when none of the first ``seeds``
    attempts converges.
    """
    from .levelset import retract

    if A.d and _definite_row(A):
        raise InfeasibleLevelSetError(f"{A!r} has a definite weight row; the zero set is empty")
    out, failures = [], 0
    while len(out) < count:
        try:
            out.append(retract(rng.standard_normal(2 * A.n), A, **kw))
        except (RetractionError, RegularityError):
            failures += 1
            if not out and failures >= seeds:
                raise InfeasibleLevelSetError(f"no retraction converged from {seeds} seeds")
            if failures > 50 * max(count, seeds):
                raise
    return out


def _definite_row(A: TorusAction) -> bool:
    W = A.weights
    return bool(np.any(np.all(W > 0, axis=1) | np.all(W < 0, axis=1)))
