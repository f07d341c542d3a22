"""Geodesics through the identity in exponential coordinates.

A geodesic with initial velocity z0 + x0 is written gamma(t) = exp(z(t) + x(t)).
For 2-step groups, d/dt exp(W) = exp(W)(W' - [W, W']/2), so with body
velocity (u_z, u_x) the geodesic equation nabla_{u} u = 0 becomes

    u_z' = 0,  u_x' = j(u_z) u_x,    X' = u_x,  Z' = u_z + [X, u_x]/2,

using nabla_z e = -j(z)e/2 and [e, e] = 0.  Hence u_z = z0 and u_x = e^{tJ}x0
with J = j(z0).  :func:`geodesic_integrate` integrates exactly this system with
RK4 and serves as the oracle for both closed forms.
"""

from __future__ import annotations

import csv
import io
import math
import warnings
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from . import linalg as la
from .algebra import (
    BlockMetric,
    StepTwoAlgebra,
    Vector,
    bracket_v,
    j_map,
)
from .mht import PhiForm, phi_eval
from .scalars import Q, is_rational

__all__ = [
    "GeodesicCurve",
    "GeodesicParams",
    "HullResult",
    "NotApplicableError",
    "SpectralSplit",
    "SpectralSplitError",
    "TGResult",
    "classify_geodesic_hull",
    "convergence_order",
    "curve_to_csv",
    "geodesic_closed_form",
    "geodesic_general",
    "geodesic_integrate",
    "geodesic_params",
    "integrate_batch",
    "j_exp",
    "j_inverse",
    "series_expm",
    "spectral_split",
    "sup_distance",
    "totally_geodesic_test",
]


class NotApplicableError(ValueError):
    """The requested closed form does not apply to this input."""


class SpectralSplitError(NotApplicableError):
    pass


def _f(v) -> np.ndarray:
    return np.array([float(c) for c in v], dtype=float)


def _fm(A, n: int | None = None) -> np.ndarray:
    if n is None:
        n = len(A)
    return np.array([[float(c) for c in r] for r in A], dtype=float).reshape(n, -1) if n else np.zeros((0, 0))


def _bracket_f(C: np.ndarray, x: np.ndarray, y: np.ndarray) -> np.ndarray:
    """Float bracket for x, y of shape (..., m)."""
    return np.einsum("...a,...b,abk->...k", x, y, C)


# ---------------------------------------------------------------------------
# parameters and J-calculus


@dataclass(frozen=True)
class GeodesicParams:
    z0: tuple
    x0: tuple
    phi0: object  # None when no phi is available
    J: tuple

    @property
    def J_float(self) -> np.ndarray:
        return _fm(self.J, len(self.x0))


def geodesic_params(alg: StepTwoAlgebra, metric: BlockMetric, phi: PhiForm | None, z0, x0) -> GeodesicParams:
    z0, x0 = tuple(z0), tuple(x0)
    if len(z0) != alg.p or len(x0) != alg.m:
        raise ValueError(f"expected z0 in R^{alg.p} and x0 in R^{alg.m}")
    phi0 = phi_eval(phi, z0) if phi is not None else None
    return GeodesicParams(z0, x0, phi0, j_map(alg, metric, z0))


def _trig(phi0: float, t):
    """(cos-like, sin-like / root, root) for e^{tJ} with J^2 = -phi0."""
    t = np.asarray(t, dtype=float)
    if phi0 > 0:
        r = math.sqrt(phi0)
        return np.cos(r * t), np.sin(r * t) / r, r
    r = math.sqrt(-phi0)
    return np.cosh(r * t), np.sinh(r * t) / r, r


def j_exp(params: GeodesicParams, t: float) -> np.ndarray:
    """e^{tJ}: trigonometric for phi0 > 0, hyperbolic for phi0 < 0, I + tJ when J^2 = 0."""
    J = params.J_float
    m = J.shape[0]
    phi0 = params.phi0
    if phi0 is None:
        raise NotApplicableError("j_exp needs phi(z0); use series_expm for general J")
    if phi0 == 0:
        if not la.is_zero(la.matmul(params.J, params.J)):
            raise NotApplicableError("phi0 = 0 but J^2 != 0")
        return np.eye(m) + t * J
    c, s, _ = _trig(float(phi0), t)
    return float(c) * np.eye(m) + float(s) * J


def j_inverse(params: GeodesicParams) -> tuple:
    """J^{-1} = -J / phi0, exact."""
    if params.phi0 is None or params.phi0 == 0:
        raise NotApplicableError("J is not invertible when phi(z0) = 0")
    return la.scale(-1 / params.phi0, params.J)


def series_expm(A: np.ndarray, t: float = 1.0, terms: int = 30) -> np.ndarray:
    """Truncated power series sum_k (tA)^k / k!."""
    A = np.asarray(A, dtype=float) * t
    out = np.eye(A.shape[0])
    term = np.eye(A.shape[0])
    for k in range(1, terms):
        term = term @ A / k
        out = out + term
    return out


# ---------------------------------------------------------------------------
# curves


@dataclass
class GeodesicCurve:
    """A curve t -> (z(t), x(t)).

    ``kind`` is ``"closed"`` or ``"general"`` for formula curves, which can be
    evaluated anywhere, and ``"sampled"`` for integrated curves, which only
    know their grid.
    """

    kind: str
    p: int
    m: int
    fn: Callable | None = None  # vectorized: t array -> (Z (n,p), X (n,m))
    ts: np.ndarray | None = None
    zs: np.ndarray | None = None
    xs: np.ndarray | None = None
    z_linear: bool = False  # z(t) = t z0 exactly
    info: dict = field(default_factory=dict)

    def __call__(self, t: float) -> tuple[np.ndarray, np.ndarray]:
        if self.fn is not None:
            Z, X = self.fn(np.array([t], dtype=float))
            return Z[0], X[0]
        idx = np.flatnonzero(np.isclose(self.ts, t, rtol=0, atol=1e-12))
        if not idx.size:
            raise ValueError(f"t = {t} is not on the sample grid")
        return self.zs[idx[0]], self.xs[idx[0]]

    def sample(self, ts=None) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        if self.fn is None:
            if ts is not None:
                raise ValueError("a sampled curve can only be read on its own grid")
            return self.ts, self.zs, self.xs
        ts = np.asarray(ts, dtype=float)
        Z, X = self.fn(ts)
        return ts, Z, X

    def initial_velocity(self, h: float = 1e-3) -> tuple[np.ndarray, np.ndarray]:
        """Five-point central difference at t = 0 (formula curves are analytic in t)."""
        w = np.array([1.0, -8.0, 8.0, -1.0]) / (12 * h)
        _, Z, X = self.sample(np.array([-2 * h, -h, h, 2 * h]))
        return w @ Z, w @ X


def sup_distance(a: GeodesicCurve, b: GeodesicCurve, ts=None) -> float:
    """max_t |(z_a, x_a) - (z_b, x_b)| in exponential coordinates."""
    if ts is None:
        grid = a if a.fn is None else b
        if grid.fn is not None:
            raise ValueError("need a grid when neither curve is sampled")
        ts = grid.ts
    _, Za, Xa = a.sample(None if a.fn is None else ts)
    _, Zb, Xb = b.sample(None if b.fn is None else ts)
    d = np.sqrt(np.sum((Za - Zb) ** 2, axis=1) + np.sum((Xa - Xb) ** 2, axis=1))
    return float(d.max()) if d.size else 0.0


def pointwise_distance(a: GeodesicCurve, b: GeodesicCurve) -> np.ndarray:
    grid = a if a.fn is None else b
    ts = grid.ts
    _, Za, Xa = a.sample(None if a.fn is None else ts)
    _, Zb, Xb = b.sample(None if b.fn is None else ts)
    return np.sqrt(np.sum((Za - Zb) ** 2, axis=1) + np.sum((Xa - Xb) ** 2, axis=1))


def _line(p, m, z0f, x0f, kind):
    def fn(ts):
        return np.outer(ts, z0f).reshape(-1, p), np.outer(ts, x0f).reshape(-1, m)

    return GeodesicCurve(kind, p, m, fn, z_linear=True)


# ---------------------------------------------------------------------------
# closed form for modified H-type input


def geodesic_closed_form(
    alg: StepTwoAlgebra,
    metric: BlockMetric,
    phi: PhiForm,
    z0,
    x0,
    paper_literal: bool = False,
    t_max: float = 3.0,
    steps: int = 10_000,
) -> GeodesicCurve:
    """Closed-form geodesic z(t) = t z0 + c(t)[x0, J x0] for MHT input.

    The default coefficient is c(t) = t/(2 phi0) - sin(t r)/(2 r^3) (r = sqrt(phi0)), or
    t/(2 phi0) + sinh(t r)/(2 r^3) (r = sqrt|phi0|), which is the single-eigenvalue
    reduction of :func:`geodesic_general`.  ``paper_literal`` swaps in the
    alternative coefficient (4 sin(t r) - 2 t r)/(m phi0^{3/2}) multiplying
    |x0|^2 Rc(z0) (resp. (4 sinh - 2tr)/(m phi0 r)), kept for comparison runs.

    phi0 = 0 with J != 0 lies outside the closed form; it warns and returns an
    integrated curve on [0, t_max].
    """
    P = geodesic_params(alg, metric, phi, z0, x0)
    p, m = alg.p, alg.m
    z0f, x0f = _f(P.z0), _f(P.x0)
    if P.phi0 == 0:
        if not la.is_zero(P.J):
            warnings.warn(
                "phi(z0) = 0 but j(z0) != 0; falling back to numerical integration",
                RuntimeWarning,
                stacklevel=2,
            )
            return geodesic_integrate(alg, metric, P.z0, P.x0, t_max, steps)
        return _line(p, m, z0f, x0f, "closed")

    Jx0 = la.matvec(P.J, P.x0)
    w = bracket_v(alg, P.x0, Jx0)
    norm_x0 = metric.inner_v(P.x0, P.x0)
    rc_z0 = la.vscale(Q(m, 4), la.matvec(metric.G_z_inv, la.matvec(phi.Phi, P.z0)))
    # [x0, J x0] = (4/m)|x0|^2 Rc(z0) holds on any MHT algebra
    if w != la.vscale(Q(4, m) * norm_x0, rc_z0):
        raise AssertionError("bracket identity [x0, j(z0)x0] = (4/m)|x0|^2 Rc(z0) failed")
    z_linear = la.is_zero_vec(w)
    phi0 = float(P.phi0)
    wf, Jx0f = _f(w), _f(Jx0)
    literal_dir = _f(la.vscale(norm_x0, rc_z0))

    def fn(ts):
        ts = np.asarray(ts, dtype=float)
        c, s, r = _trig(phi0, ts)
        # x(t) = (1 - c)/phi0 J x0 + s x0 ; s = sin(rt)/r or sinh(rt)/r
        X = np.outer((1 - c) / phi0, Jx0f) + np.outer(s, x0f)
        if paper_literal:
            if phi0 > 0:
                coef = (4 * np.sin(r * ts) - 2 * ts * r) / (m * phi0 * r)
            else:
                coef = (4 * np.sinh(r * ts) - 2 * ts * r) / (m * phi0 * r)
            Z = np.outer(ts, z0f) + np.outer(coef, literal_dir)
        else:
            coef = ts / (2 * phi0) - s / (2 * phi0)
            Z = np.outer(ts, z0f) + np.outer(coef, wf)
        return Z.reshape(-1, p), X.reshape(-1, m)

    return GeodesicCurve(
        "closed", p, m, fn, z_linear=z_linear, info={"phi0": P.phi0, "paper_literal": paper_literal}
    )


# ---------------------------------------------------------------------------
# spectral split and the general formula


@dataclass(frozen=True)
class SpectralSplit:
    """v = ker J + sum_j w_j with J^2 = theta_j on w_j; bases are columns in float form."""

    v1: np.ndarray  # (m, k0)
    blocks: tuple  # ((theta_j, basis (m, k_j)), ...)
    x1: np.ndarray
    x2: np.ndarray
    w: tuple  # components w_j of x0
    exact: bool


def _exact_split(J, m):
    from .curvature import eigendata  # sympy-backed; only loaded when needed

    J2 = la.matmul(J, J)
    ed = eigendata(J2)
    if ed.other_factors or not all(is_rational(ev.value) for ev in ed.eigenvalues):
        return None
    if sum(len(ev.eigenvectors) for ev in ed.eigenvalues) != m:
        raise SpectralSplitError("J^2 is not diagonalizable; use geodesic_integrate")
    kerJ = la.nullspace(J, m)
    blocks = []
    for ev in ed.eigenvalues:
        if ev.value == 0:
            if len(kerJ) != len(ev.eigenvectors):
                raise SpectralSplitError("ker J != ker J^2; the split formula needs J invertible off ker J")
            continue
        blocks.append((ev.value, ev.eigenvectors))
    return kerJ, blocks


def _float_split(Jf, m, tol=1e-10):
    J2 = Jf @ Jf
    vals, vecs = np.linalg.eig(J2)
    if np.any(np.abs(vals.imag) > tol):
        raise SpectralSplitError("J^2 has complex eigenvalues; use geodesic_integrate")
    vals, vecs = vals.real, vecs.real
    if m and np.linalg.matrix_rank(vecs, tol=1e-8) < m:
        raise SpectralSplitError("J^2 is not diagonalizable; use geodesic_integrate")
    order = np.argsort(vals)
    groups: list[list[int]] = []
    for i in order:
        if groups and abs(vals[i] - vals[groups[-1][0]]) <= tol * max(1.0, abs(vals[i])):
            groups[-1].append(i)
        else:
            groups.append([i])
    v1 = np.zeros((m, 0))
    blocks = []
    for g in groups:
        theta = float(np.mean(vals[g]))
        basis = vecs[:, g]
        if abs(theta) <= tol:
            if np.linalg.norm(Jf @ basis) > 1e-8:
                raise SpectralSplitError("ker J != ker J^2; the split formula needs J invertible off ker J")
            v1 = basis
            continue
        if np.linalg.norm(J2 @ basis - theta * basis) > 1e-8:
            raise SpectralSplitError("eigenspace check failed")
        blocks.append((theta, basis))
    return v1, blocks


def spectral_split(alg: StepTwoAlgebra, metric: BlockMetric, z0, x0) -> SpectralSplit:
    m = alg.m
    J = j_map(alg, metric, tuple(z0))
    exact = _exact_split(J, m)
    if exact is not None:
        kerJ, blocks = exact
        v1 = np.array([_f(v) for v in kerJ]).T.reshape(m, len(kerJ))
        fblocks = [(float(th), np.array([_f(v) for v in vs]).T.reshape(m, len(vs))) for th, vs in blocks]
        # split x0 exactly
        cols = list(kerJ) + [v for _, vs in blocks for v in vs]
        coeffs = la.solve(la.transpose(tuple(cols)), tuple(x0)) if cols else ()
        k0 = len(kerJ)
        x1 = _f(la.matvec(la.transpose(tuple(kerJ)), coeffs[:k0])) if k0 else np.zeros(m)
        ws, off = [], k0
        for _, vs in blocks:
            part = coeffs[off : off + len(vs)]
            ws.append(_f(la.matvec(la.transpose(tuple(vs)), part)))
            off += len(vs)
        blocks_out = tuple(fblocks)
        is_exact = True
    else:
        v1, blocks_out = _float_split(_fm(J, m), m)
        blocks_out = tuple(blocks_out)
        basis = np.hstack([v1] + [b for _, b in blocks_out]) if m else np.zeros((0, 0))
        coeffs = np.linalg.solve(basis, _f(x0))
        k0 = v1.shape[1]
        x1 = v1 @ coeffs[:k0]
        ws, off = [], k0
        for _, b in blocks_out:
            ws.append(b @ coeffs[off : off + b.shape[1]])
            off += b.shape[1]
        is_exact = False
    x2 = sum(ws, np.zeros(m))
    return SpectralSplit(v1, blocks_out, x1, x2, tuple(ws), is_exact)


MAX_PREDICTED_ERROR = 1e-10


def split_condition(thetas) -> float:
    """Amplification of roundoff by the 1/theta and 1/(theta_j - theta_i) factors."""
    inv = max([1.0] + [1.0 / abs(th) for th in thetas])
    gaps = [abs(a - b) for i, a in enumerate(thetas) for b in thetas[i + 1 :]]
    return inv * max([1.0] + [1.0 / g for g in gaps])


def geodesic_general(
    alg: StepTwoAlgebra, metric: BlockMetric, z0, x0, paper_literal: bool = False
) -> GeodesicCurve:
    """Geodesic of a general 2-step group when J^2 = j(z0)^2 diagonalizes over R.

    z(t) = t z1(t) + z2(t), x(t) = t x1 + (e^{tJ} - I) J^{-1} x2 with

        z1 = z0 + [x1, (e^{tJ} + I) J^{-1} x2]/2 + sum_j [J^{-1} w_j, w_j]/2
        z2 = [x1, (I - e^{tJ}) J^{-2} x2] + [e^{tJ} J^{-1} x2, J^{-1} x2]/2
             + sum_{i != j} (G_ij(t) - G_ij(0)) / (2 (theta_j - theta_i)),
        G_ij(t) = [e^{tJ} J w_i, e^{tJ} J^{-1} w_j] - [e^{tJ} w_i, e^{tJ} w_j].

    ``paper_literal`` flips the sign of the cross-term sum.
    """
    p, m = alg.p, alg.m
    z0, x0 = tuple(z0), tuple(x0)
    split = spectral_split(alg, metric, z0, x0)
    Jf = _fm(j_map(alg, metric, z0), m)
    C = alg.C_float
    z0f = _f(z0)
    thetas = [th for th, _ in split.blocks]
    kappa = split_condition(thetas)
    if kappa * np.finfo(float).eps > MAX_PREDICTED_ERROR:
        raise SpectralSplitError(
            f"split is ill-conditioned in floating point (condition {kappa:.1e}); use geodesic_integrate"
        )
    ws = split.w
    Jw = [Jf @ w for w in ws]
    Jinv_w = [jw / th for jw, th in zip(Jw, thetas)]  # J^{-1} = J / theta on w_j
    Jinv2_w = [w / th for w, th in zip(ws, thetas)]
    x1 = split.x1
    sigma = -1.0 if paper_literal else 1.0
    const = sum((_bracket_f(C, jw, w) for jw, w in zip(Jinv_w, ws)), np.zeros(p)) / 2

    def E(ts, j, v):
        """e^{tJ} v for v in w_j, shape (n, m)."""
        th = thetas[j]
        c, s, _ = _trig(-th, ts)
        return np.outer(c, v) + np.outer(s, Jf @ v)

    def G(ts, i, j):
        Ei_J = E(ts, i, Jw[i])
        Ej_Jinv = E(ts, j, Jinv_w[j])
        return _bracket_f(C, Ei_J, Ej_Jinv) - _bracket_f(C, E(ts, i, ws[i]), E(ts, j, ws[j]))

    def fn(ts):
        ts = np.asarray(ts, dtype=float)
        n = ts.shape[0]
        EJinv_x2 = sum((E(ts, j, Jinv_w[j]) for j in range(len(ws))), np.zeros((n, m)))
        Jinv_x2 = sum(Jinv_w, np.zeros(m))
        EJinv2_x2 = sum((E(ts, j, Jinv2_w[j]) for j in range(len(ws))), np.zeros((n, m)))
        Jinv2_x2 = sum(Jinv2_w, np.zeros(m))
        X = np.outer(ts, x1) + EJinv_x2 - Jinv_x2
        x1b = np.broadcast_to(x1, (n, m))
        z1 = z0f + 0.5 * _bracket_f(C, x1b, EJinv_x2 + Jinv_x2) + const
        z2 = _bracket_f(C, x1b, Jinv2_x2 - EJinv2_x2)
        z2 = z2 + 0.5 * _bracket_f(C, EJinv_x2, np.broadcast_to(Jinv_x2, (n, m)))
        zero = np.zeros(1)
        for i in range(len(ws)):
            for j in range(len(ws)):
                if i != j:
                    z2 = z2 + sigma * 0.5 * (G(ts, i, j) - G(zero, i, j)) / (thetas[j] - thetas[i])
        Z = ts[:, None] * z1 + z2
        return Z.reshape(n, p), X.reshape(n, m)

    return GeodesicCurve(
        "general", p, m, fn, info={"thetas": thetas, "exact_split": split.exact, "paper_literal": paper_literal}
    )


# ---------------------------------------------------------------------------
# RK4 oracle


def integrate_batch(Js, Cs, z0s, x0s, t_max: float, steps: int):
    """RK4 for many instances at once.

    Js: (n, m, m), Cs: (n, m, m, p), z0s: (n, p), x0s: (n, m); instances of
    different size are zero-padded.  Returns ts (steps+1,), Z (n, steps+1, p),
    X (n, steps+1, m), U (n, steps+1, m) where U is the body velocity on v.
    """
    if steps < 1:
        raise ValueError("steps must be >= 1")
    Js, Cs = np.asarray(Js, float), np.asarray(Cs, float)
    z0s, x0s = np.asarray(z0s, float), np.asarray(x0s, float)
    n, m = x0s.shape
    p = z0s.shape[1]
    h = t_max / steps
    ts = np.linspace(0.0, t_max, steps + 1)

    def rhs(X, U):
        dU = np.einsum("nab,nb->na", Js, U)
        dZ = z0s + 0.5 * np.einsum("na,nb,nabk->nk", X, U, Cs)
        return dZ, U, dU

    Z = np.zeros((n, steps + 1, p))
    Xs = np.zeros((n, steps + 1, m))
    Us = np.zeros((n, steps + 1, m))
    z, x, u = np.zeros((n, p)), np.zeros((n, m)), x0s.copy()
    Us[:, 0] = u
    for k in range(steps):
        a1, b1, c1 = rhs(x, u)
        a2, b2, c2 = rhs(x + 0.5 * h * b1, u + 0.5 * h * c1)
        a3, b3, c3 = rhs(x + 0.5 * h * b2, u + 0.5 * h * c2)
        a4, b4, c4 = rhs(x + h * b3, u + h * c3)
        z = z + h / 6 * (a1 + 2 * a2 + 2 * a3 + a4)
        x = x + h / 6 * (b1 + 2 * b2 + 2 * b3 + b4)
        u = u + h / 6 * (c1 + 2 * c2 + 2 * c3 + c4)
        Z[:, k + 1], Xs[:, k + 1], Us[:, k + 1] = z, x, u
    return ts, Z, Xs, Us


def geodesic_integrate(
    alg: StepTwoAlgebra, metric: BlockMetric, z0, x0, t_max: float = 3.0, steps: int = 10_000
) -> GeodesicCurve:
    """Sampled geodesic by fixed-step RK4 on [0, t_max]."""
    p, m = alg.p, alg.m
    z0, x0 = tuple(z0), tuple(x0)
    Jf = _fm(j_map(alg, metric, z0), m)
    ts, Z, X, U = integrate_batch(Jf[None], alg.C_float[None], _f(z0)[None], _f(x0)[None], t_max, steps)
    Gv = metric.G_v_float
    energy = float(metric.inner_z(z0, z0)) + np.einsum("ta,ab,tb->t", U[0], Gv, U[0])
    return GeodesicCurve(
        "sampled", p, m, ts=ts, zs=Z[0], xs=X[0], info={"steps": steps, "energy": energy, "velocity": U[0]}
    )


def convergence_order(alg, metric, z0, x0, t_max: float = 3.0, base_steps: int = 20) -> float:
    """log2 of the ratio of successive self-differences at N, 2N, 4N steps."""
    curves = [geodesic_integrate(alg, metric, z0, x0, t_max, base_steps * 2**k) for k in range(3)]

    def diff(a, b, stride):
        za, xa = a.zs, a.xs
        zb, xb = b.zs[::stride], b.xs[::stride]
        return float(np.max(np.sqrt(np.sum((za - zb) ** 2, 1) + np.sum((xa - xb) ** 2, 1))))

    d1 = diff(curves[0], curves[1], 2)
    d2 = diff(curves[1], curves[2], 2)
    return math.log2(d1 / d2)


def curve_to_csv(curve: GeodesicCurve, ts=None, extra: dict | None = None) -> str:
    """CSV with header ``t,z_1..z_p,x_1..x_m`` (plus extra columns), floats at 17 digits."""
    ts, Z, X = curve.sample(ts)
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    extra = extra or {}
    w.writerow(
        ["t"] + [f"z_{k + 1}" for k in range(curve.p)] + [f"x_{a + 1}" for a in range(curve.m)] + list(extra)
    )
    cols = list(extra.values())
    for i, t in enumerate(ts):
        row = [t, *Z[i], *X[i], *(c[i] for c in cols)]
        w.writerow([format(float(v), ".17g") for v in row])
    return buf.getvalue()


# ---------------------------------------------------------------------------
# totally geodesic submanifolds


@dataclass(frozen=True)
class TGResult:
    kind: str  # "TG-SUBGROUP", "TG-NOT-SUBGROUP" or "NOT-TG"
    basis: tuple  # Vectors spanning span{z, x, j(z)x}
    witness_bracket: tuple  # [x, j(z)x]
    rc_z_z: tuple
    nabla_closed: bool
    subalgebra: bool


def _rc_z(metric: BlockMetric, phi: PhiForm, m: int):
    return la.scale(Q(m, 4), la.matmul(metric.G_z_inv, phi.Phi))


def _parallel(u, v) -> bool:
    """u and v linearly dependent, by 2x2 minors."""
    n = len(u)
    return all(u[i] * v[j] == u[j] * v[i] for i in range(n) for j in range(i + 1, n))


def _span(vectors: list[Vector], p: int) -> tuple:
    rows = [v.coords for v in vectors if not v.is_zero()]
    return tuple(Vector.from_coords(p, r) for r in la.row_space_basis(rows))


def _in_span(basis: tuple, v: Vector) -> bool:
    if v.is_zero():
        return True
    if not basis:
        return False
    rows = [b.coords for b in basis]
    return la.rank(tuple(rows + [v.coords])) == len(rows)


def nabla_closed(alg, metric, basis) -> bool:
    from .curvature import connection

    return all(_in_span(basis, connection(alg, metric, a, b)) for a in basis for b in basis)


def is_subalgebra(alg, basis) -> bool:
    from .algebra import bracket

    return all(_in_span(basis, bracket(alg, a, b)) for a in basis for b in basis)


def totally_geodesic_test(alg: StepTwoAlgebra, metric: BlockMetric, phi: PhiForm, z, x) -> TGResult:
    """Classify span{z, x, j(z)x} for nonzero z in the center and x in v."""
    z, x = tuple(z), tuple(x)
    if la.is_zero_vec(z) or la.is_zero_vec(x):
        raise ValueError("z and x must be nonzero")
    p, m = alg.p, alg.m
    Jx = la.matvec(j_map(alg, metric, z), x)
    rz = la.matvec(_rc_z(metric, phi, m), z)
    norm_x = metric.inner_v(x, x)
    br = bracket_v(alg, x, Jx)
    if br != la.vscale(Q(4, m) * norm_x, rz):
        raise AssertionError("bracket identity [x, j(z)x] = (4/m)|x|^2 Rc(z) failed")
    if norm_x == 0 or la.is_zero_vec(rz):
        kind = "TG-NOT-SUBGROUP"
    elif _parallel(rz, z):
        kind = "TG-SUBGROUP"
    else:
        kind = "NOT-TG"
    basis = _span([Vector.central(z, m), Vector.horizontal(x, p), Vector.horizontal(Jx, p)], p)
    return TGResult(kind, basis, br, rz, nabla_closed(alg, metric, basis), is_subalgebra(alg, basis))


@dataclass(frozen=True)
class HullResult:
    kind: str  # "H3", "R3" or "H3xR"
    basis: tuple
    dim: int
    nabla_closed: bool
    subalgebra: bool


def classify_geodesic_hull(alg: StepTwoAlgebra, metric: BlockMetric, phi: PhiForm, z0, x0) -> HullResult:
    """The submanifold exp(span{z0, x0, j(z0)x0, Rc(z0)}) containing the geodesic."""
    z0, x0 = tuple(z0), tuple(x0)
    if la.is_zero_vec(z0) or la.is_zero_vec(x0):
        raise ValueError("z0 and x0 must be nonzero")
    p, m = alg.p, alg.m
    Jx = la.matvec(j_map(alg, metric, z0), x0)
    rz = la.matvec(_rc_z(metric, phi, m), z0)
    basis = _span(
        [Vector.central(z0, m), Vector.horizontal(x0, p), Vector.horizontal(Jx, p), Vector.central(rz, m)], p
    )
    if metric.inner_v(x0, x0) == 0 or la.is_zero_vec(rz):
        kind = "R3"
    elif _parallel(rz, z0):
        kind = "H3"
    else:
        kind = "H3xR"
    return HullResult(kind, basis, len(basis), nabla_closed(alg, metric, basis), is_subalgebra(alg, basis))
