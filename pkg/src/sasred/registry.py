"""Worked circle actions on S^7 and S^{2n-1}, and the block checks that go with them."""
from __future__ import annotations

from dataclasses import dataclass, field
from math import gcd, sqrt

import numpy as np

from .action import TorusAction
from .errors import ConfigError, NotApplicableError


@dataclass(frozen=True)
class Example:
    name: str
    weights: tuple
    printed_radii: tuple | None = None  # radii as printed for the two blocks, in block order
    einstein_claim: float | None = None  # Einstein constant implied by the claim, if any
    notes: dict = field(default_factory=dict)

    @property
    def action(self) -> TorusAction:
        return TorusAction(np.array([self.weights]))

    @property
    def n(self) -> int:
        return len(self.weights)


def ex41() -> Example:
    return Example("ex41", (-1, -1, 1, 1), (1 / sqrt(2), 1 / sqrt(2)), einstein_claim=4.0)


def ex42(k: int = 2) -> Example:
    if k < 1:
        raise ConfigError("ex42 needs k >= 1")
    return Example(f"ex42(k={k})", (-k, 1, 1, 1), (sqrt(k / (k + 1)), sqrt(1 / (k + 1))))


def ex43(a: int = 1, b: int = 2, k: int = 1, n: int = 4) -> Example:
    if a < 1 or b < 1 or gcd(a, b) != 1:
        raise ConfigError("ex43 needs coprime positive a, b")
    if not 1 <= k <= n - 2:
        raise ConfigError("ex43 needs 1 <= k <= n - 2")
    weights = (a,) * (k + 1) + (-b,) * (n - k - 1)
    claim = None
    if a == b == 1 and 2 * (k + 1) == n:
        # Sasaki-Einstein in dimension m forces Ric = (m - 1) g
        claim = float(2 * n - 4)
    return Example(f"ex43(a={a},b={b},k={k},n={n})", weights,
                   (sqrt(a / (a + b)), sqrt(b / (a + b))), einstein_claim=claim)


REGISTRY = {"ex41": ex41, "ex42": ex42, "ex43": ex43}


def lookup(name: str, **params) -> Example:
    try:
        factory = REGISTRY[name]
    except KeyError:
        raise ConfigError(f"unknown example {name!r}; choose from {sorted(REGISTRY)}") from None
    params = {k: v for k, v in params.items() if v is not None}
    try:
        return factory(**params)
    except TypeError as exc:
        raise ConfigError(str(exc)) from None


# --- two-block weights ----------------------------------------------------------

def sign_blocks(weights):
    """Split coordinate indices into a leading same-sign run and the rest.

    Raises :class:`NotApplicableError` unless the weights are ``(+..+ -..-)``
    or ``(-..- +..+)`` up to magnitudes.
    """
    lam = np.asarray(weights).ravel()
    if lam.ndim != 1 or np.asarray(weights).ndim > 1 and np.asarray(weights).shape[0] != 1:
        raise NotApplicableError("block checks need a single weight row")
    if np.any(lam == 0):
        raise NotApplicableError("zero weight")
    s0 = np.sign(lam[0])
    split = int(np.argmax(np.sign(lam) != s0)) if np.any(np.sign(lam) != s0) else lam.size
    if split == lam.size or np.any(np.sign(lam[split:]) == s0):
        raise NotApplicableError(f"weights {lam.tolist()} do not have a two-block sign pattern")
    return np.arange(split), np.arange(split, lam.size)


def balance_radii(weights):
    """Block radii forced by ``mu = 0`` on the unit sphere for block-constant weights."""
    lam = np.asarray(weights).ravel()
    b1, b2 = sign_blocks(lam)
    if np.unique(lam[b1]).size != 1 or np.unique(lam[b2]).size != 1:
        raise NotApplicableError("weights are not constant on the sign blocks")
    alpha, beta = abs(lam[b1[0]]), abs(lam[b2[0]])
    return sqrt(beta / (alpha + beta)), sqrt(alpha / (alpha + beta))


def _block_norms(z, blocks):
    zc = np.asarray(z, dtype=float).reshape(-1, 2)
    return [float(np.linalg.norm(zc[b])) for b in blocks]


def block_norms(A: TorusAction, samples) -> np.ndarray:
    blocks = sign_blocks(A.weights)
    return np.array([_block_norms(getattr(p, "z", p), blocks) for p in samples])


def radii_check(A: TorusAction, samples, expected) -> float:
    """Max deviation of the block norms of level points from ``expected``."""
    norms = block_norms(A, samples)
    return float(np.max(np.abs(norms - np.asarray(expected, dtype=float))))


def product_metric_block_check(A: TorusAction, samples) -> float:
    """Defect of the product structure of the level tangent space.

    The level tangent space is split by block supports; the residual is the
    max of (a) how far the block components leave the level tangent space and
    (b) the off-block entries of the induced metric in the block-adapted frame.
    """
    b1, b2 = sign_blocks(A.weights)
    worst = 0.0
    for p in samples:
        T = p.tangent
        masks = []
        for b in (b1, b2):
            mask = np.zeros(T.shape[1])
            mask[np.concatenate([2 * b, 2 * b + 1])] = 1.0
            masks.append(mask)
        frames = []
        for mask in masks:
            comp = T * mask
            U, sv, _ = np.linalg.svd(comp.T, full_matrices=False)
            frames.append(U[:, sv > 1e-8].T)
        F = np.vstack(frames)
        leak = float(np.max(np.linalg.norm(F - (F @ T.T) @ T, axis=1)))
        gram = frames[0] @ frames[1].T
        off = float(np.max(np.abs(gram))) if gram.size else 0.0
        dim_defect = float(F.shape[0] != T.shape[0])
        worst = max(worst, leak, off, dim_defect)
    return worst
