"""Levi-Civita connection, curvature tensors and the Ricci operator.

Everything here acts on left-invariant fields, i.e. on the Lie algebra.  The
closed forms hold for any 2-step algebra with nondegenerate center; the Ricci
closed forms and the report additionally need the quadratic form phi.  Frame
based oracles (Koszul formula, ``R = [nabla, nabla] - nabla_[,]``, trace of
the curvature endomorphism) are provided next to each closed form.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from operator import mul

import sympy

from . import linalg as la
from .algebra import (
    AlgebraError,
    BlockMetric,
    StepTwoAlgebra,
    Vector,
    bracket,
    bracket_v,
    j_basis,
    pseudo_orthonormalize,
)
from .mht import PhiForm, phi_inner
from .scalars import Q, QuadraticSurd, is_rational, sqrt_exact

__all__ = [
    "CurvatureReport",
    "DegeneratePlaneError",
    "EigenData",
    "compute_xi",
    "connection",
    "connection_koszul",
    "eigendata",
    "isometry_coincidence",
    "ricci",
    "ricci_coordinate_trace",
    "ricci_operator",
    "ricci_trace",
    "riemann",
    "riemann_oracle",
    "scalar_curvature",
    "sectional",
]


class DegeneratePlaneError(ValueError):
    def __init__(self, Q_value):
        super().__init__("plane is degenerate: <U,U><V,V> - <U,V>^2 = 0")
        self.Q = Q_value


def _check(alg: StepTwoAlgebra, *vectors: Vector):
    for v in vectors:
        if len(v.z) != alg.p or len(v.x) != alg.m:
            raise AlgebraError("vector dimensions do not match the algebra")


def _j(alg, metric, z, e):
    """j(z)e as sum_k z_k J_k e, without forming j(z)."""
    out = [Q(0)] * alg.m
    if not any(e):
        return tuple(out)
    for zk, Jk in zip(z, j_basis(alg, metric)):
        if zk:
            out = [o + zk * t for o, t in zip(out, la.matvec(Jk, e))]
    return tuple(out)


class _JStack:
    """Lazy cache of J_k e for one fixed e; apply(z) gives j(z)e."""

    __slots__ = ("Js", "e", "m", "cache", "zero")

    def __init__(self, alg, metric, e):
        self.Js = j_basis(alg, metric)
        self.e, self.m, self.cache = e, alg.m, {}
        self.zero = not any(e)

    def apply(self, z):
        out = [Q(0)] * self.m
        if self.zero:
            return tuple(out)
        for k, zk in enumerate(z):
            if not zk:
                continue
            t = self.cache.get(k)
            if t is None:
                t = self.cache[k] = la.matvec(self.Js[k], self.e)
            for i, ti in enumerate(t):
                if ti:
                    out[i] = out[i] + zk * ti
        return tuple(out)


# ---------------------------------------------------------------------------
# connection


def connection(alg: StepTwoAlgebra, metric: BlockMetric, U: Vector, V: Vector) -> Vector:
    """nabla_U V: nabla_z z' = 0, nabla_z e = nabla_e z = -j(z)e/2, nabla_e e' = [e, e']/2."""
    _check(alg, U, V)
    half = Q(1, 2)
    z_part = la.vscale(half, bracket_v(alg, U.x, V.x))
    x_part = la.vscale(-half, la.vadd(_j(alg, metric, U.z, V.x), _j(alg, metric, V.z, U.x)))
    return Vector(z_part, x_part)


def connection_koszul(alg: StepTwoAlgebra, metric: BlockMetric, U: Vector, V: Vector) -> Vector:
    """nabla_U V from 2<nabla_U V, W> = <[U,V],W> - <[V,W],U> + <[W,U],V>."""
    _check(alg, U, V)
    n = alg.dim
    uv = bracket(alg, U, V)
    rhs = []
    for i in range(n):
        W = Vector.basis(alg.p, alg.m, i)
        val = (
            metric.inner(uv, W)
            - metric.inner(bracket(alg, V, W), U)
            + metric.inner(bracket(alg, W, U), V)
        )
        rhs.append(val / 2)
    coords = la.matvec(la.inverse(metric.full), tuple(rhs))
    return Vector.from_coords(alg.p, coords)


# ---------------------------------------------------------------------------
# Riemann tensor


def riemann(alg: StepTwoAlgebra, metric: BlockMetric, X: Vector, Y: Vector, Z: Vector) -> Vector:
    """R(X,Y)Z by trilinear expansion over the z + v splitting.

    The purely central-central term on v uses the operator commutator
    (j(z)j(z') - j(z')j(z))e / 4, which is what the connection forces.
    Rational data goes through an integer kernel; the result is identical.
    """
    _check(alg, X, Y, Z)
    K = _int_kernel(alg, metric)
    if K is not None:
        coords = X.coords + Y.coords + Z.coords
        if all(map(is_rational, coords)):
            return _riemann_int(K, alg.p, X, Y, Z)
    return _riemann_field(alg, metric, X, Y, Z)


def _riemann_field(alg, metric, X, Y, Z):
    a, e = X.z, X.x
    b, f = Y.z, Y.x
    c, g = Z.z, Z.x
    J = lambda z, v: _j(alg, metric, z, v)  # noqa: E731
    br = lambda u, v: bracket_v(alg, u, v)  # noqa: E731
    q, h = Q(1, 4), Q(1, 2)
    # each of e, f, g meets several central vectors: stack (J_k v)_k once
    Te, Tf, Tg = (_JStack(alg, metric, v) for v in (e, f, g))
    Jbg, Jcf, Jag, Jce = Tg.apply(b), Tf.apply(c), Tg.apply(a), Te.apply(c)
    # x-part: R(z,z')e'' + R(z,e)z'' + R(e,z)z'' + R(e,e')e''
    #   = j(a)(j(b)g + j(c)f)/4 - j(b)(j(a)g + j(c)e)/4
    #     + (j([e,g])f - j([f,g])e)/4 + j([e,f])g/2
    x_out = la.vadd(
        la.vscale(q, la.vsub(J(a, la.vadd(Jbg, Jcf)), J(b, la.vadd(Jag, Jce)))),
        la.vadd(
            la.vscale(q, la.vsub(Tf.apply(br(e, g)), Te.apply(br(f, g)))),
            la.vscale(h, Tg.apply(br(e, f))),
        ),
    )
    # z-part: R(z,e)e' + R(e,z)e' + R(e,e')z
    #   = [f, j(a)g + j(c)e]/4 - [e, j(b)g + j(c)f]/4
    z_out = la.vscale(q, la.vsub(br(f, la.vadd(Jag, Jce)), br(e, la.vadd(Jbg, Jcf))))
    return Vector(z_out, x_out)


@dataclass(frozen=True)
class _IntKernel:
    """Rational j-maps and brackets with denominators cleared.

    J_k = J[k] / dJ and C_ab^k = c / dC for (a, b, ((k, c), ...)) in C.
    """

    dJ: int
    J: tuple
    dC: int
    C: tuple


def _clear(values):
    """(integers, d) with values = integers / d."""
    d = math.lcm(*(int(x.denominator) for x in values)) if values else 1
    return [int(x.numerator) * (d // int(x.denominator)) for x in values], d


@lru_cache(maxsize=512)
def _int_kernel(alg, metric):
    Js = j_basis(alg, metric)
    flat = [x for Jk in Js for row in Jk for x in row]
    consts = [c for _, _, nz in alg.sparse_upper for _, c in nz]
    if not all(map(is_rational, flat + consts)):
        return None
    ints, dJ = _clear(flat)
    m = alg.m
    J = tuple(
        tuple(tuple(ints[(k * m + i) * m:(k * m + i + 1) * m]) for i in range(m)) for k in range(len(Js))
    )
    cints, dC = _clear(consts)
    it = iter(cints)
    C = tuple((a, b, tuple((k, next(it)) for k, _ in nz)) for a, b, nz in alg.sparse_upper)
    return _IntKernel(dJ, J, dC, C)


def _riemann_int(K, p, X, Y, Z):
    (a, e), dX = _split(X)
    (b, f), dY = _split(Y)
    (c, g), dZ = _split(Z)
    m = len(e)

    Jk_rows = K.J

    def stack(v):
        # lazy cache of J_k v (integer), filled only for the k that are used
        return {} if any(v) else None

    def apply(z, v, T):
        out = [0] * m
        if T is None:
            return out
        for k, zk in enumerate(z):
            if zk:
                t = T.get(k)
                if t is None:
                    t = T[k] = [sum(map(mul, row, v)) for row in Jk_rows[k]]
                out = [o + zk * ti for o, ti in zip(out, t)]
        return out

    def br(x, y):
        out = [0] * p
        for i, j, nz in K.C:
            w = x[i] * y[j] - x[j] * y[i]
            if w:
                for k, cc in nz:
                    out[k] += w * cc
        return out

    def add(u, v):
        return [s + t for s, t in zip(u, v)]

    # same grouping as _riemann_field; j carries 1/dJ, brackets 1/dC
    Te, Tf, Tg = stack(e), stack(f), stack(g)
    u1 = add(apply(b, g, Tg), apply(c, f, Tf))  # (j(b)g + j(c)f) * dJ
    u2 = add(apply(a, g, Tg), apply(c, e, Te))  # (j(a)g + j(c)e) * dJ
    t1 = [s - t for s, t in zip(apply(a, u1, stack(u1)), apply(b, u2, stack(u2)))]  # * dJ^2
    t2 = [
        s - t + 2 * w
        for s, t, w in zip(apply(br(e, g), f, Tf), apply(br(f, g), e, Te), apply(br(e, f), g, Tg))
    ]  # * dJ dC
    zz = [s - t for s, t in zip(br(f, u2), br(e, u1))]  # * dC dJ
    D = 4 * dX * dY * dZ * K.dJ
    x_out = tuple(Q(s * K.dC + t * K.dJ, D * K.dJ * K.dC) for s, t in zip(t1, t2))
    z_out = tuple(Q(s, D * K.dC) for s in zz)
    return Vector(z_out, x_out)


def _split(V):
    ints, d = _clear(V.coords)
    k = len(V.z)
    return (ints[:k], ints[k:]), d


def riemann_oracle(alg: StepTwoAlgebra, metric: BlockMetric, X: Vector, Y: Vector, Z: Vector) -> Vector:
    """R(X,Y)Z = nabla_X nabla_Y Z - nabla_Y nabla_X Z - nabla_[X,Y] Z on left-invariant fields."""
    nab = lambda u, v: connection(alg, metric, u, v)  # noqa: E731
    return nab(X, nab(Y, Z)) - nab(Y, nab(X, Z)) - nab(bracket(alg, X, Y), Z)


def sectional(alg: StepTwoAlgebra, metric: BlockMetric, U: Vector, V: Vector):
    """K(U, V) = <R(U,V)V, U> / (<U,U><V,V> - <U,V>^2)."""
    q = metric.norm_sq(U) * metric.norm_sq(V) - metric.inner(U, V) ** 2
    if q == 0:
        raise DegeneratePlaneError(q)
    return metric.inner(riemann(alg, metric, U, V, V), U) / q


# ---------------------------------------------------------------------------
# Ricci


def compute_xi(metric: BlockMetric, phi: PhiForm):
    """xi = trace(G_z^{-1} Phi); the signed sum of phi over a pseudo-orthonormal basis."""
    return la.trace(la.matmul(metric.G_z_inv, phi.Phi))


def ricci(alg: StepTwoAlgebra, metric: BlockMetric, phi: PhiForm | None, X: Vector, Y: Vector):
    """Ric(X, Y); closed form when phi is given, frame trace otherwise."""
    _check(alg, X, Y)
    if phi is None:
        return ricci_trace(alg, metric, X, Y)
    xi = compute_xi(metric, phi)
    return -xi / 2 * metric.inner_v(X.x, Y.x) + Q(alg.m, 4) * phi_inner(phi, X.z, Y.z)


@lru_cache(maxsize=256)
def _frame(metric: BlockMetric, p: int, m: int):
    """Rational directions w_a of a pseudo-orthonormal frame with their self-products."""
    out = []
    if p:
        bz = pseudo_orthonormalize(metric.G_z)
        out += [(Vector(w, tuple(Q(0) for _ in range(m))), r) for w, r in zip(bz.directions, bz.norms)]
    if m:
        bv = pseudo_orthonormalize(metric.G_v)
        out += [(Vector(tuple(Q(0) for _ in range(p)), w), r) for w, r in zip(bv.directions, bv.norms)]
    return out


def ricci_trace(alg: StepTwoAlgebra, metric: BlockMetric, X: Vector, Y: Vector):
    """Ric(X,Y) = sum_a eps_a <R(E_a, X)Y, E_a> over a pseudo-orthonormal frame.

    With E_a = w_a / sqrt|r_a| this is sum_a <R(w_a, X)Y, w_a> / r_a, exact.
    """
    if not all(is_rational(c) for G in (metric.G_z, metric.G_v) for r in G for c in r):
        return ricci_coordinate_trace(alg, metric, X, Y)
    total = Q(0)
    for w, r in _frame(metric, alg.p, alg.m):
        total = total + metric.inner(riemann(alg, metric, w, X, Y), w) / r
    return total


def ricci_coordinate_trace(alg: StepTwoAlgebra, metric: BlockMetric, X: Vector, Y: Vector):
    """Ric(X,Y) = trace(W -> R(W, X)Y) in the coordinate basis."""
    total = Q(0)
    for i in range(alg.dim):
        E = Vector.basis(alg.p, alg.m, i)
        total = total + riemann(alg, metric, E, X, Y).coords[i]
    return total


# ---------------------------------------------------------------------------
# eigenstructure


@dataclass(frozen=True)
class EigenValue:
    value: object
    multiplicity: int
    eigenvectors: tuple


@dataclass(frozen=True)
class EigenData:
    charpoly: tuple  # highest degree first
    eigenvalues: tuple  # EigenValue entries for exact roots
    other_factors: tuple  # (coefficients highest first as strings, multiplicity)

    def values(self) -> list:
        """Exact eigenvalues repeated by algebraic multiplicity."""
        return [ev.value for ev in self.eigenvalues for _ in range(ev.multiplicity)]


def _to_sympy(x):
    if isinstance(x, QuadraticSurd):
        return sympy.Rational(x.a.numerator, x.a.denominator) + sympy.Rational(
            x.b.numerator, x.b.denominator
        ) * sympy.sqrt(x.d)
    x = Q(x)
    return sympy.Rational(x.numerator, x.denominator)


def _from_sympy(e, radicands):
    e = sympy.nsimplify(sympy.expand(e))
    if e.is_Rational:
        return Q(int(e.p), int(e.q))
    for d in radicands:
        b = sympy.expand(e).coeff(sympy.sqrt(d))
        a = sympy.expand(e - b * sympy.sqrt(d))
        if a.is_Rational and b.is_Rational:
            return QuadraticSurd.make(Q(int(a.p), int(a.q)), Q(int(b.p), int(b.q)), d)
    return None


def _real_quadratic_roots(fp):
    """Roots (-b +- sqrt(disc)) / 2a of an irreducible rational quadratic, if real."""
    a, b, c = (Q(int(x.p), int(x.q)) for x in fp.all_coeffs())
    disc = b * b - 4 * a * c
    if disc < 0:
        return None
    r = sqrt_exact(disc)
    return [(-b - r) / (2 * a), (-b + r) / (2 * a)]


def eigendata(A) -> EigenData:
    """Exact spectrum of A with eigenvectors.

    Roots in the coefficient field, and real quadratic surd roots of rational
    matrices, come with eigenvectors; remaining factors are kept symbolically.
    """
    n = len(A)
    coeffs = la.charpoly(A)
    radicands = sorted({x.d for r in A for x in r if isinstance(x, QuadraticSurd)})
    t = sympy.Symbol("t")
    poly = sum(_to_sympy(c) * t ** (n - i) for i, c in enumerate(coeffs))
    if radicands:
        _, factors = sympy.factor_list(poly, t, extension=[sympy.sqrt(d) for d in radicands])
    else:
        _, factors = sympy.factor_list(poly, t)
    values, others = [], []
    for fac, mult in factors:
        fp = sympy.Poly(fac, t)
        roots = None
        if fp.degree() == 1:
            lead, const = fp.all_coeffs()
            root = _from_sympy(-const / lead, radicands)
            roots = None if root is None else [root]
        elif fp.degree() == 2 and not radicands:
            roots = _real_quadratic_roots(fp)
        if roots is None:
            others.append((tuple(str(c) for c in fp.all_coeffs()), int(mult)))
            continue
        for root in roots:
            M = la.sub(A, la.scale(root, la.identity(n)))
            values.append(EigenValue(root, int(mult), la.nullspace(M, n)))
    values.sort(key=lambda ev: float(ev.value))
    return EigenData(coeffs, tuple(values), tuple(others))


# ---------------------------------------------------------------------------
# report


@dataclass(frozen=True)
class CurvatureReport:
    m: int
    xi: object
    scalar_curvature: object
    rc_z: tuple
    rc_v_eigenvalue: object
    rc_z_eigendata: EigenData


def ricci_operator(alg: StepTwoAlgebra, metric: BlockMetric, phi: PhiForm) -> CurvatureReport:
    """Rc|_z = (m/4) G_z^{-1} Phi in the input basis and Rc|_v = -(xi/2) Id."""
    m = alg.m
    xi = compute_xi(metric, phi)
    rc_z = la.scale(Q(m, 4), la.matmul(metric.G_z_inv, phi.Phi))
    return CurvatureReport(
        m=m,
        xi=xi,
        scalar_curvature=-Q(m, 4) * xi,
        rc_z=rc_z,
        rc_v_eigenvalue=-xi / 2,
        rc_z_eigendata=eigendata(rc_z),
    )


def scalar_curvature(report: CurvatureReport):
    """S = -m xi / 4, cross-checked against the trace of the full Ricci operator."""
    s = -Q(report.m, 4) * report.xi
    traced = la.trace(report.rc_z) + report.m * report.rc_v_eigenvalue
    if traced != s:
        raise AssertionError(f"scalar curvature mismatch: {s} vs trace {traced}")
    return s


def isometry_coincidence(report: CurvatureReport) -> tuple[bool, tuple | None]:
    """True iff -xi/2 is not an eigenvalue of Rc|_z; otherwise a kernel vector of Rc|_z + xi/2."""
    p = len(report.rc_z)
    M = la.add(report.rc_z, la.scale(report.xi / 2, la.identity(p)))
    if p == 0 or la.det(M) != 0:
        return True, None
    return False, la.nullspace(M, p)[0]
