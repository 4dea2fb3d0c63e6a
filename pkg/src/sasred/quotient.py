"""The reduced space ``mu^{-1}(0) / G`` in local slice charts.

A chart ``psi(u) = retract(z0 + E u)`` maps a small ball of R^m onto a slice
through ``z0`` transverse to the orbits, with ``E`` an orthonormal horizontal
frame at ``z0`` (first vector ``xi``).  The reduced metric in these coordinates
is ``gbar_ab = g(hor dpsi e_a, hor dpsi e_b)``; ``psi`` and ``dpsi`` are exact
(implicit differentiation of the retraction), so only the curvature engine
uses finite differences.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import ambient
from .action import TorusAction, fundamental_fields, moment
from .ambient import ConePoint, reeb
from .errors import ChartDomainError, DegenerateOrbitError
from .levelset import (LevelPoint, level_curvature, level_curve, solve_level)
from .numkit import (FIRST, SECOND, Stencil, directional_derivative, gradient,
                     mixed_second_derivatives)


@dataclass(frozen=True, eq=False)
class SliceChart:
    base: LevelPoint
    frame: np.ndarray = None
    chart_radius: float = 5e-2
    first: Stencil = FIRST
    second: Stencil = SECOND
    normals: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        frame = self.base.horizontal if self.frame is None else np.asarray(self.frame, dtype=float)
        object.__setattr__(self, "frame", frame)
        object.__setattr__(self, "normals", self.action.real_weights * self.base.z)

    @property
    def action(self) -> TorusAction:
        return self.base.action

    @property
    def dim(self) -> int:
        return self.frame.shape[0]

    def _check(self, u, slack=0.0):
        if np.linalg.norm(u) > self.chart_radius - slack + 1e-15:
            raise ChartDomainError(f"|u| = {np.linalg.norm(u):.3e} exceeds the chart radius")

    def embed(self, u):
        """``(psi(u), dpsi)`` with ``dpsi`` rows the images of the coordinate vectors."""
        u = np.asarray(u, dtype=float)
        self._check(u)
        A, E, N = self.action, self.frame, self.normals
        y = self.base.z + u @ E
        if A.d == 0:
            w, dw = y, E
        else:
            w, _ = solve_level(y, A, N)
            G = A.real_weights * w
            Jc = 2.0 * G @ N.T
            Jy = 2.0 * G @ E.T
            dc = -np.linalg.solve(Jc, Jy)  # dc[i, a]
            dw = E + dc.T @ N
        nw = np.linalg.norm(w)
        z = w / nw
        dz = (dw - np.outer(dw @ z, z)) / nw
        return z, dz

    def chart_map(self, u) -> LevelPoint:
        z, _ = self.embed(u)
        return LevelPoint.build(z, self.action)

    def _vertical(self, z):
        X = fundamental_fields(self.action, z)
        if self.action.d == 0:
            return X, None
        G = X @ X.T
        if np.linalg.cond(G) > 1e10:
            raise DegenerateOrbitError("orbit Gram system is singular")
        return X, G

    def horizontal_lifts(self, u):
        z, dz = self.embed(u)
        X, G = self._vertical(z)
        if G is None:
            return z, dz
        return z, dz - (dz @ X.T) @ np.linalg.solve(G, X)

    def metric(self, u) -> np.ndarray:
        _, H = self.horizontal_lifts(u)
        return H @ H.T

    def reeb(self, u) -> np.ndarray:
        """Coordinates of the projected Reeb field ``zeta``."""
        z, dz = self.embed(u)
        X, _ = self._vertical(z)
        B = np.vstack([dz, X])
        coef, *_ = np.linalg.lstsq(B.T, reeb(z), rcond=None)
        return coef[: self.dim]

    def contact_form(self, u) -> np.ndarray:
        """Pullback of the reduced contact form: ``eta(dpsi e_a)``."""
        z, dz = self.embed(u)
        return dz @ reeb(z)

    # --- curvature engine -----------------------------------------------------

    def _check_stencil(self, u):
        self._check(np.asarray(u, dtype=float), slack=self.second.reach * np.sqrt(2))

    def metric_derivatives(self, u):
        self._check_stencil(u)
        g = self.metric(u)
        dg = gradient(self.metric, u, self.first)
        ddg = mixed_second_derivatives(self.metric, u, self.second)
        return g, dg, ddg

    def curvature(self, u):
        """Riemann tensor ``R[a, b, c, d] = R^a_{bcd}`` with ``R(d_c, d_d) d_b = R^a_{bcd} d_a``,
        together with the metric at ``u``."""
        g, dg, ddg = self.metric_derivatives(u)
        return riemann_from_metric(g, dg, ddg), g


def riemann_from_metric(g, dg, ddg):
    """Coordinate Riemann tensor from the metric and its first/second partials.

    ``dg[c, a, b] = d_c g_ab`` and ``ddg[c, d, a, b] = d_c d_d g_ab``.
    """
    ginv = np.linalg.inv(g)
    # Gamma_{e,bc} = (d_b g_ec + d_c g_eb - d_e g_bc) / 2
    low = 0.5 * (dg.transpose(1, 0, 2) + dg.transpose(1, 2, 0) - dg)
    gam = np.einsum("ae,ebc->abc", ginv, low)
    dlow = 0.5 * (ddg.transpose(0, 2, 1, 3) + ddg.transpose(0, 2, 3, 1) - ddg)  # [d, e, b, c]
    dginv = -np.einsum("ae,def,fb->dab", ginv, dg, ginv)
    dgam = np.einsum("dae,ebc->dabc", dginv, low) + np.einsum("ae,debc->dabc", ginv, dlow)
    R = (dgam.transpose(1, 3, 0, 2) - dgam.transpose(1, 3, 2, 0)
         + np.einsum("ace,edb->abcd", gam, gam) - np.einsum("ade,ecb->abcd", gam, gam))
    return R


def ricci(R) -> np.ndarray:
    return np.einsum("abad->bd", R)


def orthonormal_frame(g) -> np.ndarray:
    """Columns ``F`` with ``F.T @ g @ F = I``."""
    L = np.linalg.cholesky(g)
    return np.linalg.inv(L).T


def curvature_in_chart(C: SliceChart, u):
    R, _ = C.curvature(u)
    return R


def sectional_curvatures(R, g) -> np.ndarray:
    """Sectional curvatures on all pairs of a g-orthonormal frame."""
    F = orthonormal_frame(g)
    Rl = np.einsum("ea,ebcd->abcd", g, R)  # lower first index: Rl[a,b,c,d] = g(R(d_c,d_d)d_b, d_a)
    Rf = np.einsum("abcd,ai,bj,ck,dl->ijkl", Rl, F, F, F, F)
    m = g.shape[0]
    return np.array([Rf[i, j, i, j] for i in range(m) for j in range(m) if i != j])


def symmetry_residuals(R, g) -> dict:
    Rl = np.einsum("ea,ebcd->abcd", g, R)
    return {
        "antisym_cd": float(np.max(np.abs(Rl + Rl.transpose(0, 1, 3, 2)))),
        "antisym_ab": float(np.max(np.abs(Rl + Rl.transpose(1, 0, 2, 3)))),
        "bianchi": float(np.max(np.abs(R + R.transpose(0, 2, 3, 1) + R.transpose(0, 3, 1, 2)))),
    }


def sasaki_tensor_residual(R, g, zeta, metric_scale: float = 1.0) -> float:
    """Frobenius norm (g-orthonormal frame) of
    ``R(X, zeta)Y - (g(zeta, Y) X - g(X, Y) zeta)``.

    ``metric_scale`` replaces ``g`` by ``s g`` and ``zeta`` by its s-unit
    rescaling; the curvature tensor ``R^a_{bcd}`` is scale invariant.
    """
    g = metric_scale * g
    zeta = zeta / np.sqrt(metric_scale)
    m = g.shape[0]
    Rz = np.einsum("abcd,d->abc", R, zeta)  # [a, Y=b, X=c]
    gz = g @ zeta
    target = np.einsum("b,ac->abc", gz, np.eye(m)) - np.einsum("cb,a->abc", g, zeta)
    T = Rz - target
    F = orthonormal_frame(g)
    Finv = np.linalg.inv(F)
    Tf = np.einsum("ia,abc,bj,ck->ijk", Finv, T, F, F)
    return float(np.linalg.norm(Tf))


def sasaki_residual(C: SliceChart, u, metric_scale: float = 1.0) -> float:
    R, g = C.curvature(u)
    return sasaki_tensor_residual(R, g, C.reeb(u), metric_scale)


def killing_operator(C: SliceChart, u, field_fn=None) -> np.ndarray:
    """``(L_V g)_ab = V^c d_c g_ab + g_cb d_a V^c + g_ac d_b V^c`` for ``V`` given in
    coordinates (``None``: the reduced Reeb field)."""
    field_fn = C.reeb if field_fn is None else field_fn
    C._check(np.asarray(u, dtype=float), slack=C.first.reach * 1.01)
    g = C.metric(u)
    V = field_fn(u)
    dg = gradient(C.metric, u, C.first)
    dV = gradient(field_fn, u, C.first)  # dV[a, c] = d_a V^c
    return np.einsum("c,cab->ab", V, dg) + np.einsum("cb,ac->ab", g, dV) + np.einsum("ac,bc->ab", g, dV)


def killing_residual_zeta(C: SliceChart, u, field_fn=None) -> float:
    K = killing_operator(C, u, field_fn)
    F = orthonormal_frame(C.metric(u))
    return float(np.linalg.norm(F.T @ K @ F))


def reeb_residuals(C: SliceChart, u) -> dict:
    g = C.metric(u)
    zeta = C.reeb(u)
    return {
        "unit": abs(float(zeta @ g @ zeta) - 1.0),
        "dual_form": float(np.max(np.abs(g @ zeta - C.contact_form(u)))),
    }


def contact_nondegeneracy(C: SliceChart, u) -> float:
    """Minimal singular value of ``d eta'`` on ``ker eta'`` (g-orthonormalized)."""
    C._check(np.asarray(u, dtype=float), slack=C.first.reach * 1.01)
    da = gradient(C.contact_form, u, C.first)  # da[i, j] = d_i alpha_j
    d_alpha = da - da.T
    alpha = C.contact_form(u)
    g = C.metric(u)
    F = orthonormal_frame(g)
    af = alpha @ F
    K = np.linalg.svd(af[None, :])[2][1:].T  # columns: orthonormal basis of ker in frame coords
    M = K.T @ (F.T @ d_alpha @ F) @ K
    return float(np.linalg.svd(M, compute_uv=False)[-1])


@dataclass
class EinsteinFit:
    constant: float
    residual: float
    reeb_ricci: float
    transverse_ricci: float


def einstein_fit(C: SliceChart, points) -> EinsteinFit:
    """Least-squares ``c`` with ``Ric ~ c g`` over chart points (g-orthonormal frames).

    Also reports the mean Ricci curvature along ``zeta`` and the mean of the
    remaining eigen-directions, which separate when the fit fails.
    """
    pts = list(points)
    if len(pts) < 5:
        from .errors import ConfigError
        raise ConfigError("einstein_fit needs at least five chart points")
    rics, zetas = [], []
    for u in pts:
        R, g = C.curvature(u)
        F = orthonormal_frame(g)
        rics.append(F.T @ ricci(R) @ F)
        zf = np.linalg.solve(F, C.reeb(u))
        zetas.append(zf / np.linalg.norm(zf))
    m = rics[0].shape[0]
    c = float(sum(np.trace(r) for r in rics) / (m * len(rics)))
    resid = max(float(np.linalg.norm(r - c * np.eye(m))) for r in rics)
    rz = np.array([z @ r @ z for r, z in zip(rics, zetas)])
    rt = np.array([(np.trace(r) - v) / (m - 1) for r, v in zip(rics, rz)])
    return EinsteinFit(c, resid, float(rz.mean()), float(rt.mean()))


# --- O'Neill tensor -----------------------------------------------------------

def horizontal_projector(A: TorusAction, w) -> np.ndarray:
    """Projector onto the orbit-orthogonal level tangent directions at ``w / |w|``."""
    z = w / np.linalg.norm(w)
    rows = [z[None, :], A.real_weights * z, fundamental_fields(A, z)]
    Q = np.linalg.qr(np.vstack(rows).T)[0]
    return np.eye(z.size) - Q @ Q.T


def oneill_A(p: LevelPoint, Y, Z, s: Stencil = FIRST) -> np.ndarray:
    """Vertical part of ``nabla_Y Z`` for horizontal ``Y, Z`` (``Z`` extended by
    horizontal projection of a constant ambient vector)."""
    A = p.action
    if A.d == 0:
        return np.zeros_like(p.z)
    Y = p.horizontal_part(np.asarray(Y, dtype=float))
    Z = p.horizontal_part(np.asarray(Z, dtype=float))
    gamma = level_curve(p, Y)
    dZ = directional_derivative(lambda t: horizontal_projector(A, gamma(t[0])) @ Z,
                                np.zeros(1), np.ones(1), s)
    return p.vertical_part(dZ)


def oneill_table(p: LevelPoint, frame, s: Stencil = FIRST) -> np.ndarray:
    """``T[a, b] = A(frame_a, frame_b)`` as ambient vectors."""
    k = frame.shape[0]
    return np.array([[oneill_A(p, frame[a], frame[b], s) for b in range(k)] for a in range(k)])


def oneill_curvature(p: LevelPoint, Atab, frame, a, b, c, e) -> float:
    """``g^M(R^M(X, Y)Z, H)`` on horizontal frame vectors via O'Neill's formula:
    ``R^level(X,Y,Z,H) - 2 <A_X Y, A_Z H> + <A_Y Z, A_X H> - <A_X Z, A_Y H>``."""
    X, Y, Z, H = frame[a], frame[b], frame[c], frame[e]
    return (level_curvature(p, X, Y, Z, H)
            - 2 * np.dot(Atab[a, b], Atab[c, e])
            + np.dot(Atab[b, c], Atab[a, e])
            - np.dot(Atab[a, c], Atab[b, e]))


def oneill_crosscheck(C: SliceChart, mixed_only: bool = True) -> float:
    """Max disagreement between the chart curvature engine and the
    Gauss/O'Neill chain on components ``g(R(X, zeta)Y, Z)`` at the chart base
    (all components when ``mixed_only`` is false)."""
    u0 = np.zeros(C.dim)
    R, g = C.curvature(u0)
    Rl = np.einsum("ea,ebcd->abcd", g, R)  # Rl[H, Z, X, Y] = g(R(X,Y)Z, H)
    p, E = C.base, C.frame
    Atab = oneill_table(p, E, C.first)
    # express the chart's zeta in the frame; at u = 0 it is e_0 when E[0] = xi
    zeta = C.reeb(u0)
    m = C.dim
    worst = 0.0
    second_slots = [None] if mixed_only else range(m)
    for X in range(m):
        for Y in range(m):
            for Z in range(m):
                for b in second_slots:
                    if b is None:
                        lhs = float(np.einsum("d,d->", Rl[Z, Y, X, :], zeta))
                        rhs = sum(zeta[k] * oneill_curvature(p, Atab, E, X, k, Y, Z)
                                  for k in range(m) if abs(zeta[k]) > 1e-14)
                    else:
                        lhs = float(Rl[Z, Y, X, b])
                        rhs = oneill_curvature(p, Atab, E, X, b, Y, Z)
                    worst = max(worst, abs(lhs - rhs))
    return worst


# --- cone commutation ---------------------------------------------------------

def reduced_cone_metric(C: SliceChart, u, r) -> np.ndarray:
    """Kahler-reduced cone metric on the lifts ``(dpsi e_a, 0)`` and ``(0, 1)``.

    Verticals on the cone are ``(X_i, 0)``; horizontal projection uses the
    cone metric itself.
    """
    z, dz = C.embed(u)
    p = ConePoint(z, r)
    vecs = [(dz[a], 0.0) for a in range(C.dim)] + [(np.zeros_like(z), 1.0)]
    verts = [(X, 0.0) for X in fundamental_fields(C.action, z)]

    def cg(U, V):
        return ambient.cone_metric(p, U, V)

    if verts:
        Gv = np.array([[cg(U, V) for V in verts] for U in verts])
        lifts = []
        for U in vecs:
            coef = np.linalg.solve(Gv, [cg(V, U) for V in verts])
            Y = U[0] - sum(c * V[0] for c, V in zip(coef, verts))
            a = U[1] - sum(c * V[1] for c, V in zip(coef, verts))
            lifts.append((Y, a))
    else:
        lifts = vecs
    return np.array([[cg(U, V) for V in lifts] for U in lifts])


def cone_commutation(C: SliceChart, r_values, u_samples) -> dict:
    """Compare the reduced cone metric with ``r^2 gbar + dr^2``.

    Returns block-wise maxima (tangent, radial, mixed), the overall max
    relative deviation and the scale-invariance defect of ``Phi^{-1}(0)``.
    """
    out = {"tangent": 0.0, "radial": 0.0, "mixed": 0.0, "relative": 0.0, "scale_invariance": 0.0}
    m = C.dim
    A = C.action
    for u in u_samples:
        gbar = C.metric(u)
        z, _ = C.embed(u)
        for r in r_values:
            g0 = reduced_cone_metric(C, u, r)
            target = np.zeros((m + 1, m + 1))
            target[:m, :m] = r**2 * gbar
            target[m, m] = 1.0
            diff = np.abs(g0 - target)
            out["tangent"] = max(out["tangent"], float(np.max(diff[:m, :m])) / r**2)
            out["radial"] = max(out["radial"], float(diff[m, m]))
            out["mixed"] = max(out["mixed"], float(np.max(diff[:m, m])))
            out["relative"] = max(out["relative"], float(np.max(diff) / np.max(np.abs(target))))
        if A.d:
            out["scale_invariance"] = max(out["scale_invariance"], _cone_level_defect(C, z, r_values))
    return out


def _cone_level_defect(C: SliceChart, z, r_values) -> float:
    """Retract perturbed cone points at each radius onto ``Phi^{-1}(0)`` (in C^n)
    and measure how far their radial projections are from one common point of
    ``mu^{-1}(0)``."""
    A = C.action
    y = z + 1e-2 * C.normals.sum(axis=0)
    projections = []
    for r in r_values:
        w, _ = solve_level(r * y, A, C.normals)
        projections.append(w / np.linalg.norm(w))
    P = np.array(projections)
    spread = float(np.max(np.abs(P - P[0])))
    level = float(np.max(np.abs([moment(A, q) for q in P])))
    return max(spread, level)
