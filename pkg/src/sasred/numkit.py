"""Numerical kernels: Richardson-extrapolated central differences,
Gram-Schmidt with coefficient tracking, and SVD nullspaces.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import ConfigError, EvaluationDomainError, RankDeficiencyError


@dataclass(frozen=True)
class Stencil:
    """Central-difference stencil.

    Differences are taken at steps ``step * 2**j`` for ``j = 0..richardson_levels``
    and combined by Richardson extrapolation in powers of ``h**2``, so a single
    level already gives fourth-order truncation.
    """

    step: float = 1e-3
    richardson_levels: int = 2
    order: int = 1

    def __post_init__(self):
        if not self.step > 0:
            raise ConfigError(f"stencil step must be positive, got {self.step}")
        if not 1 <= self.richardson_levels <= 4:
            raise ConfigError(f"richardson_levels must be in [1, 4], got {self.richardson_levels}")
        if self.order not in (1, 2):
            raise ConfigError(f"derivative order must be 1 or 2, got {self.order}")

    @property
    def reach(self) -> float:
        """Largest displacement (per unit direction) at which f is sampled."""
        return self.step * 2**self.richardson_levels

    def halved(self) -> "Stencil":
        return Stencil(self.step / 2, self.richardson_levels, self.order)


FIRST = Stencil(1e-3, 2, 1)
SECOND = Stencil(5e-3, 2, 2)


def _checked(f, x):
    val = np.asarray(f(x), dtype=float)
    if not np.all(np.isfinite(val)):
        raise EvaluationDomainError(f"non-finite function value at {x!r}")
    return val


def directional_derivative(
    f: Callable[[np.ndarray], np.ndarray],
    x,
    v,
    s: Stencil = FIRST,
) -> np.ndarray:
    """Estimate ``D_v f(x)`` (order 1) or ``D_v^2 f(x)`` (order 2).

    ``f`` may return a scalar or an array of any shape; the result has the
    same shape.
    """
    x = np.asarray(x, dtype=float)
    v = np.asarray(v, dtype=float)
    f0 = _checked(f, x) if s.order == 2 else None

    estimates = []
    for j in range(s.richardson_levels + 1):
        h = s.step * 2**j
        fp = _checked(f, x + h * v)
        fm = _checked(f, x - h * v)
        if s.order == 1:
            estimates.append((fp - fm) / (2 * h))
        else:
            estimates.append((fp - 2 * f0 + fm) / h**2)

    # Neville-style elimination of h^2, h^4, ... error terms; index 0 is the finest step.
    table = estimates
    for level in range(1, s.richardson_levels + 1):
        factor = 4.0**level
        table = [(factor * table[j] - table[j + 1]) / (factor - 1) for j in range(len(table) - 1)]
    return table[0]


def mixed_second_derivatives(f, x, s: Stencil = SECOND) -> np.ndarray:
    """All second partials ``d_a d_b f(x)``; shape ``(m, m) + f(x).shape``.

    Off-diagonal entries use the polarization ``(D_{a+b}^2 - D_{a-b}^2) / 4``.
    """
    if s.order != 2:
        s = Stencil(s.step, s.richardson_levels, 2)
    x = np.asarray(x, dtype=float)
    m = x.size
    eye = np.eye(m)
    diag = [directional_derivative(f, x, eye[a], s) for a in range(m)]
    out = np.empty((m, m) + diag[0].shape)
    for a in range(m):
        out[a, a] = diag[a]
        for b in range(a + 1, m):
            plus = directional_derivative(f, x, eye[a] + eye[b], s)
            minus = directional_derivative(f, x, eye[a] - eye[b], s)
            out[a, b] = out[b, a] = (plus - minus) / 4
    return out


def gradient(f, x, s: Stencil = FIRST) -> np.ndarray:
    """Partials ``d_a f(x)`` stacked along a new leading axis."""
    x = np.asarray(x, dtype=float)
    eye = np.eye(x.size)
    return np.stack([directional_derivative(f, x, eye[a], s) for a in range(x.size)])


def gram_schmidt(vectors, inner=None, tol: float = 1e-10):
    """Orthonormalize ``vectors`` with respect to the bilinear form ``inner``.

    Modified Gram-Schmidt with one reorthogonalization pass, processing the
    input in order (so the result is deterministic).

    Returns
    -------
    basis : ndarray, shape (k, m)
        Orthonormal rows spanning the same space.
    coeffs : ndarray, shape (k, k)
        Lower-triangular change of basis with ``basis = coeffs @ vectors``.
    """
    if inner is None:
        inner = np.dot
    vecs = [np.asarray(v, dtype=float) for v in vectors]
    k = len(vecs)
    if k == 0:
        return np.zeros((0, 0)), np.zeros((0, 0))
    basis = []
    coeffs = np.zeros((k, k))
    for i, v in enumerate(vecs):
        scale = np.sqrt(abs(inner(v, v)))
        u = v.copy()
        c = np.zeros(k)
        c[i] = 1.0
        for _ in range(2):
            for j, b in enumerate(basis):
                proj = inner(b, u)
                u = u - proj * b
                c = c - proj * coeffs[j]
        norm2 = inner(u, u)
        if scale == 0 or norm2 <= (tol * scale) ** 2:
            raise RankDeficiencyError(i)
        norm = np.sqrt(norm2)
        basis.append(u / norm)
        coeffs[i] = c / norm
    return np.array(basis), coeffs


def numerical_rank(M, tol: float = 1e-9) -> int:
    M = np.atleast_2d(np.asarray(M, dtype=float))
    if M.size == 0:
        return 0
    sv = np.linalg.svd(M, compute_uv=False)
    if sv[0] == 0:
        return 0
    return int(np.sum(sv > tol * sv[0]))


def nullspace(M, tol: float = 1e-9) -> np.ndarray:
    """Orthonormal basis of ``ker M`` as rows, via the SVD.

    A ``(0, m)`` matrix yields the standard basis of R^m.
    """
    M = np.asarray(M, dtype=float)
    if M.ndim == 1:
        M = M[None, :]
    m = M.shape[1]
    if M.shape[0] == 0:
        return np.eye(m)
    _, sv, vt = np.linalg.svd(M)
    rank = int(np.sum(sv > tol * sv[0])) if sv.size and sv[0] > 0 else 0
    return vt[rank:].copy()
