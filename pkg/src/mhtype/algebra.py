"""2-step nilpotent metric Lie algebras n = z + v with nondegenerate center.

The bracket is stored only on v x v (structure constants ``C[a][b][k]`` with
``[v_a, v_b] = sum_k C[a][b][k] z_k``), so every algebra is 2-step by
construction.  Metrics are block diagonal across the splitting.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass, field
from functools import cached_property, lru_cache
from typing import Sequence

import numpy as np

from . import linalg as la
from .scalars import Q, QuadraticSurd, is_rational, sign, sqrt_exact

__all__ = [
    "AlgebraError",
    "BlockMetric",
    "Issue",
    "PseudoOrthonormalBasis",
    "StepTwoAlgebra",
    "ValidationReport",
    "Vector",
    "bracket",
    "bracket_v",
    "central_extension",
    "change_basis",
    "inertia",
    "j_basis",
    "j_map",
    "pseudo_orthonormalize",
    "validate",
]


class AlgebraError(ValueError):
    """Inconsistent dimensions or an input outside the supported class."""


class DegenerateFormError(AlgebraError):
    def __init__(self, message, det=Q(0)):
        super().__init__(message)
        self.det = det


# ---------------------------------------------------------------------------
# vectors


@dataclass(frozen=True)
class Vector:
    """Element of n = z + v in coordinates of the given bases."""

    z: tuple
    x: tuple

    @classmethod
    def central(cls, z, m: int) -> Vector:
        return cls(tuple(z), tuple(Q(0) for _ in range(m)))

    @classmethod
    def horizontal(cls, x, p: int) -> Vector:
        return cls(tuple(Q(0) for _ in range(p)), tuple(x))

    @classmethod
    def zero(cls, p: int, m: int) -> Vector:
        return cls(tuple(Q(0) for _ in range(p)), tuple(Q(0) for _ in range(m)))

    @classmethod
    def basis(cls, p: int, m: int, i: int) -> Vector:
        """i-th vector of the ordered basis (z_1..z_p, v_1..v_m)."""
        c = [Q(0)] * (p + m)
        c[i] = Q(1)
        return cls(tuple(c[:p]), tuple(c[p:]))

    @classmethod
    def from_coords(cls, p: int, coords) -> Vector:
        coords = tuple(coords)
        return cls(coords[:p], coords[p:])

    @property
    def coords(self) -> tuple:
        return self.z + self.x

    def __add__(self, other: Vector) -> Vector:
        return Vector(la.vadd(self.z, other.z), la.vadd(self.x, other.x))

    def __sub__(self, other: Vector) -> Vector:
        return Vector(la.vsub(self.z, other.z), la.vsub(self.x, other.x))

    def __neg__(self) -> Vector:
        return Vector(tuple(-c for c in self.z), tuple(-c for c in self.x))

    def __rmul__(self, c) -> Vector:
        return Vector(la.vscale(c, self.z), la.vscale(c, self.x))

    def is_zero(self) -> bool:
        return la.is_zero_vec(self.z) and la.is_zero_vec(self.x)


# ---------------------------------------------------------------------------
# algebra and metric


def _hash_fields(obj, names) -> int:
    return hash(tuple(getattr(obj, n) for n in names))


@dataclass(frozen=True)
class StepTwoAlgebra:
    p: int
    m: int
    C: tuple  # C[a][b] is a length-p tuple
    name: str = ""
    center_labels: tuple = ()
    v_labels: tuple = ()

    def __post_init__(self):
        if self.p < 0 or self.m < 0:
            raise AlgebraError("dimensions must be nonnegative")
        if len(self.C) != self.m or any(len(row) != self.m for row in self.C):
            raise AlgebraError(f"structure constants must be {self.m}x{self.m}x{self.p}")
        if any(len(c) != self.p for row in self.C for c in row):
            raise AlgebraError(f"structure constants must be {self.m}x{self.m}x{self.p}")
        if not self.center_labels:
            object.__setattr__(self, "center_labels", tuple(f"z{k + 1}" for k in range(self.p)))
        if not self.v_labels:
            object.__setattr__(self, "v_labels", tuple(f"v{a + 1}" for a in range(self.m)))

    def __hash__(self):
        return self._hash

    @cached_property
    def _hash(self):
        return _hash_fields(self, ("p", "m", "C"))

    @classmethod
    def from_brackets(
        cls,
        p: int,
        m: int,
        brackets: dict,
        name: str = "",
        center_labels: Sequence[str] = (),
        v_labels: Sequence[str] = (),
    ) -> StepTwoAlgebra:
        """Build from ``{(a, b): z_coords}`` with 0-based a < b; antisymmetry is filled in."""
        C = [[[Q(0)] * p for _ in range(m)] for _ in range(m)]
        for (a, b), z in brackets.items():
            if not (0 <= a < m and 0 <= b < m):
                raise AlgebraError(f"bracket index ({a}, {b}) out of range")
            if a == b:
                raise AlgebraError("[v_a, v_a] is zero by antisymmetry")
            if len(z) != p:
                raise AlgebraError(f"bracket [v{a + 1}, v{b + 1}] needs {p} coordinates")
            if a > b:
                a, b, z = b, a, [-c for c in z]
            C[a][b] = list(z)
            C[b][a] = [-c for c in z]
        return cls(
            p,
            m,
            tuple(tuple(tuple(c) for c in row) for row in C),
            name,
            tuple(center_labels),
            tuple(v_labels),
        )

    def brackets(self) -> dict:
        """Nonzero brackets ``{(a, b): z}`` for a < b."""
        return {
            (a, b): self.C[a][b]
            for a in range(self.m)
            for b in range(a + 1, self.m)
            if not la.is_zero_vec(self.C[a][b])
        }

    @property
    def dim(self) -> int:
        return self.p + self.m

    @cached_property
    def sparse_upper(self) -> tuple:
        """((a, b, ((k, C_ab^k), ...)), ...) over a < b with nonzero bracket."""
        out = []
        for a in range(self.m):
            for b in range(a + 1, self.m):
                nz = tuple((k, c) for k, c in enumerate(self.C[a][b]) if c)
                if nz:
                    out.append((a, b, nz))
        return tuple(out)

    @cached_property
    def C_float(self) -> np.ndarray:
        arr = np.zeros((self.m, self.m, self.p))
        for a in range(self.m):
            for b in range(self.m):
                for k in range(self.p):
                    arr[a, b, k] = float(self.C[a][b][k])
        return arr

    def payload_equal(self, other: StepTwoAlgebra) -> bool:
        return (self.p, self.m, self.C) == (other.p, other.m, other.C)


@dataclass(frozen=True)
class BlockMetric:
    G_z: tuple
    G_v: tuple

    def __post_init__(self):
        object.__setattr__(self, "G_z", la.as_matrix(self.G_z))
        object.__setattr__(self, "G_v", la.as_matrix(self.G_v))

    def __hash__(self):
        return self._hash

    @cached_property
    def _hash(self):
        return _hash_fields(self, ("G_z", "G_v"))

    @property
    def p(self) -> int:
        return len(self.G_z)

    @property
    def m(self) -> int:
        return len(self.G_v)

    @cached_property
    def G_z_inv(self):
        return la.inverse(self.G_z)

    @cached_property
    def G_v_inv(self):
        return la.inverse(self.G_v)

    @cached_property
    def full(self):
        return la.block_diag(self.G_z, self.G_v)

    def inner_z(self, z, w):
        return la.bilinear(self.G_z, z, w)

    def inner_v(self, x, y):
        return la.bilinear(self.G_v, x, y)

    def inner(self, u: Vector, w: Vector):
        return self.inner_z(u.z, w.z) + self.inner_v(u.x, w.x)

    def norm_sq(self, u: Vector):
        return self.inner(u, u)

    @cached_property
    def G_z_float(self) -> np.ndarray:
        return np.array([[float(c) for c in r] for r in self.G_z]).reshape(self.p, self.p)

    @cached_property
    def G_v_float(self) -> np.ndarray:
        return np.array([[float(c) for c in r] for r in self.G_v]).reshape(self.m, self.m)


# ---------------------------------------------------------------------------
# validation


@dataclass(frozen=True)
class Issue:
    check: str
    message: str
    witness: object = None


@dataclass(frozen=True)
class ValidationReport:
    checks: dict
    issues: tuple
    strict: bool = False

    @property
    def ok(self) -> bool:
        required = [k for k in self.checks if self.strict or k != "center_exact"]
        return all(self.checks[k] for k in required)

    @property
    def warnings(self) -> tuple:
        if self.strict:
            return ()
        return tuple(i for i in self.issues if i.check == "center_exact")

    @property
    def errors(self) -> tuple:
        return tuple(i for i in self.issues if self.strict or i.check != "center_exact")


def _central_v_vectors(alg: StepTwoAlgebra) -> tuple:
    # rows indexed by (b, k): sum_a x_a C[a][b][k] = 0
    rows = [
        tuple(alg.C[a][b][k] for a in range(alg.m))
        for b in range(alg.m)
        for k in range(alg.p)
    ]
    if not rows:
        return la.identity(alg.m)
    return la.nullspace(tuple(rows), alg.m)


def validate(alg: StepTwoAlgebra, metric: BlockMetric, strict: bool = False) -> ValidationReport:
    """Check every structural invariant; never raises on bad data."""
    checks: dict = {}
    issues: list = []

    dims_ok = metric.p == alg.p and metric.m == alg.m and all(
        len(r) == alg.p for r in metric.G_z
    ) and all(len(r) == alg.m for r in metric.G_v)
    checks["dimensions"] = dims_ok
    if not dims_ok:
        issues.append(
            Issue("dimensions", f"metric blocks {metric.p}/{metric.m} vs algebra {alg.p}/{alg.m}")
        )
        return ValidationReport(checks, tuple(issues), strict)

    anti = None
    for a in range(alg.m):
        for b in range(a, alg.m):
            for k in range(alg.p):
                if alg.C[a][b][k] != -alg.C[b][a][k]:
                    anti = (a, b, k)
                    break
            if anti:
                break
        if anti:
            break
    checks["antisymmetry"] = anti is None
    if anti:
        a, b, k = anti
        issues.append(Issue("antisymmetry", f"C[{a + 1}][{b + 1}][{k + 1}] != -C[{b + 1}][{a + 1}][{k + 1}]", anti))

    for label, g in (("G_z", metric.G_z), ("G_v", metric.G_v)):
        sym = la.is_symmetric(g)
        checks[f"{label}_symmetric"] = sym
        if not sym:
            issues.append(Issue(f"{label}_symmetric", f"{label} is not symmetric"))
        d = la.det(g) if g else Q(1)
        checks[f"{label}_nondegenerate"] = d != 0
        if d == 0:
            issues.append(Issue(f"{label}_nondegenerate", f"det {label} = 0", d))

    central = _central_v_vectors(alg)
    checks["center_exact"] = not central
    if central:
        issues.append(
            Issue("center_exact", "a nonzero element of v brackets trivially with v", central[0])
        )
    return ValidationReport(checks, tuple(issues), strict)


def require_valid(alg: StepTwoAlgebra, metric: BlockMetric, strict: bool = False) -> ValidationReport:
    report = validate(alg, metric, strict)
    if not report.ok:
        raise AlgebraError("; ".join(i.message for i in report.errors))
    return report


# ---------------------------------------------------------------------------
# bracket and j-maps


def bracket_v(alg: StepTwoAlgebra, x, y) -> tuple:
    """[x, y] in z-coordinates for x, y in v."""
    out = [Q(0)] * alg.p
    for a, b, nz in alg.sparse_upper:
        w = x[a] * y[b] - x[b] * y[a]
        if w:
            for k, c in nz:
                out[k] = out[k] + w * c
    return tuple(out)


def bracket(alg: StepTwoAlgebra, u: Vector, v: Vector) -> Vector:
    if len(u.z) != alg.p or len(u.x) != alg.m or len(v.z) != alg.p or len(v.x) != alg.m:
        raise AlgebraError("vector dimensions do not match the algebra")
    return Vector(bracket_v(alg, u.x, v.x), tuple(Q(0) for _ in range(alg.m)))


@lru_cache(maxsize=512)
def j_basis(alg: StepTwoAlgebra, metric: BlockMetric) -> tuple:
    """(J(z_1), ..., J(z_p)) with J(z) = G_v^{-1} B_z^T, (B_z)_ab = <[v_a, v_b], z>."""
    if metric.p != alg.p or metric.m != alg.m:
        raise AlgebraError("metric and algebra dimensions differ")
    try:
        gv_inv = metric.G_v_inv
    except la.SingularMatrixError:
        raise DegenerateFormError("G_v is degenerate") from None
    mats = []
    for k in range(alg.p):
        gz_col = tuple(metric.G_z[l][k] for l in range(alg.p))
        B = tuple(
            tuple(la.dot(alg.C[a][b], gz_col) for b in range(alg.m)) for a in range(alg.m)
        )
        mats.append(la.matmul(gv_inv, la.transpose(B)))
    return tuple(mats)


def j_map(alg: StepTwoAlgebra, metric: BlockMetric, z) -> tuple:
    basis = j_basis(alg, metric)
    if len(z) != alg.p:
        raise AlgebraError(f"center vector needs {alg.p} coordinates")
    out = la.zeros(alg.m)
    for zk, Jk in zip(z, basis):
        if zk:
            out = la.add(out, la.scale(zk, Jk))
    return out


@lru_cache(maxsize=512)
def j_basis_float(alg: StepTwoAlgebra, metric: BlockMetric) -> np.ndarray:
    mats = j_basis(alg, metric)
    arr = np.zeros((alg.p, alg.m, alg.m))
    for k, J in enumerate(mats):
        for a in range(alg.m):
            for b in range(alg.m):
                arr[k, a, b] = float(J[a][b])
    return arr


# ---------------------------------------------------------------------------
# pseudo-orthonormal bases


def _congruence_pivots(G, order):
    """Symmetric Gram-Schmidt with the null-diagonal swap rule.

    Returns (directions, norms, radical): mutually orthogonal rational
    directions with nonzero self-products, and a basis of the radical.
    """
    n = len(G)
    remaining = [la.identity(n)[i] for i in order]
    directions, norms = [], []

    def ip(u, w):
        return la.bilinear(G, u, w)

    while remaining:
        idx = next((i for i, u in enumerate(remaining) if ip(u, u) != 0), None)
        if idx is None:
            pair = None
            for i, u in enumerate(remaining):
                j = next((j for j, w in enumerate(remaining) if j != i and ip(u, w) != 0), None)
                if j is not None:
                    pair = (i, j)
                    break
            if pair is None:
                return directions, norms, remaining
            i, j = pair
            u, w = remaining[i], remaining[j]
            remaining[i], remaining[j] = la.vadd(u, w), la.vsub(u, w)
            idx = i
        u = remaining.pop(idx)
        nu = ip(u, u)
        directions.append(u)
        norms.append(nu)
        remaining = [la.vsub(r, la.vscale(ip(r, u) / nu, u)) for r in remaining]
    return directions, norms, []


def inertia(G) -> tuple[int, int, int]:
    """(n_plus, n_minus, n_zero) of a symmetric exact matrix."""
    G = la.as_matrix(G)
    _, norms, radical = _congruence_pivots(G, range(len(G)))
    plus = sum(1 for q in norms if sign(q) > 0)
    return plus, len(norms) - plus, len(radical)


@dataclass(frozen=True)
class PseudoOrthonormalBasis:
    """Basis b_i with <b_i, b_j> = 0 (i != j) and <b_i, b_i> = signs[i].

    ``directions[i]`` is a rational vector and ``norms[i]`` its self-product,
    so that ``b_i = directions[i] / sqrt(|norms[i]|)``.  In exact mode the
    coordinates of ``vectors`` are rationals or pure surds.
    """

    vectors: tuple
    signs: tuple
    directions: tuple = ()
    norms: tuple = ()
    exact: bool = True

    def gram(self, G):
        if self.exact:
            return tuple(
                tuple(la.bilinear(G, u, w) for w in self.vectors) for u in self.vectors
            )
        B = np.array(self.vectors, dtype=float).T
        Gf = np.array([[float(c) for c in r] for r in G])
        return B.T @ Gf @ B

    def verify(self, G, tol: float = 1e-12) -> bool:
        gram = self.gram(G)
        n = len(self.signs)
        if self.exact:
            return all(
                gram[i][j] == (self.signs[i] if i == j else 0) for i in range(n) for j in range(n)
            )
        return bool(np.allclose(gram, np.diag(self.signs), atol=tol, rtol=0))


def pseudo_orthonormalize(G, seed: int | None = None) -> PseudoOrthonormalBasis:
    """Pseudo-orthonormal basis for a nondegenerate symmetric form.

    ``seed`` permutes the order in which coordinate vectors are offered as
    pivots; the sign multiset is independent of it.
    """
    G = la.as_matrix(G)
    n = len(G)
    if not la.is_symmetric(G):
        raise AlgebraError("form is not symmetric")
    order = list(range(n))
    if seed is not None:
        random.Random(seed).shuffle(order)
    if not all(is_rational(c) for r in G for c in r):
        return _pseudo_orthonormalize_float(G, order)
    d = la.det(G) if n else Q(1)
    if d == 0:
        raise DegenerateFormError("cannot pseudo-orthonormalize a degenerate form", d)
    directions, norms, _ = _congruence_pivots(G, order)
    vectors = []
    for u, q in zip(directions, norms):
        inv_root = 1 / sqrt_exact(abs(q))
        vectors.append(tuple(inv_root * c if c else Q(0) for c in u))
    signs = tuple(sign(q) for q in norms)
    return PseudoOrthonormalBasis(tuple(vectors), signs, tuple(directions), tuple(norms), True)


def _pseudo_orthonormalize_float(G, order, tol=1e-12):
    Gf = np.array([[float(c) for c in r] for r in G])
    n = len(G)
    if n and abs(np.linalg.det(Gf)) < tol:
        raise DegenerateFormError("cannot pseudo-orthonormalize a degenerate form")
    remaining = [np.eye(n)[i] for i in order]
    out, signs = [], []
    while remaining:
        self_ip = [r @ Gf @ r for r in remaining]
        idx = next((i for i, q in enumerate(self_ip) if abs(q) > tol), None)
        if idx is None:
            u, w = remaining[0], next(r for r in remaining[1:] if abs(remaining[0] @ Gf @ r) > tol)
            j = next(i for i, r in enumerate(remaining) if r is w)
            remaining[0], remaining[j] = u + w, u - w
            idx = 0
        u = remaining.pop(idx)
        q = u @ Gf @ u
        remaining = [r - (r @ Gf @ u) / q * u for r in remaining]
        out.append(tuple(u / math.sqrt(abs(q))))
        signs.append(1 if q > 0 else -1)
    return PseudoOrthonormalBasis(tuple(out), tuple(signs), exact=False)


# ---------------------------------------------------------------------------
# constructions


def central_extension(
    alg: StepTwoAlgebra,
    metric: BlockMetric,
    k: int,
    extra_metric=(),
    prepend: bool = False,
    name: str | None = None,
) -> tuple[StepTwoAlgebra, BlockMetric]:
    """Trivial central extension n + R^k with metric G_z + extra_metric.

    New central directions bracket trivially.  They are appended after the old
    center basis unless ``prepend`` is set.
    """
    extra = la.as_matrix(extra_metric)
    if k < 0 or len(extra) != k or any(len(r) != k for r in extra):
        raise AlgebraError(f"extra metric must be {k}x{k}")
    if k == 0:
        return alg, metric
    if not la.is_symmetric(extra) or la.det(extra) == 0:
        raise DegenerateFormError("extra metric must be symmetric and nondegenerate", la.det(extra))
    zeros_k = tuple(Q(0) for _ in range(k))
    if prepend:
        C = tuple(tuple(zeros_k + c for c in row) for row in alg.C)
        G_z = la.block_diag(extra, metric.G_z)
    else:
        C = tuple(tuple(c + zeros_k for c in row) for row in alg.C)
        G_z = la.block_diag(metric.G_z, extra)
    new_labels = tuple(f"w{i + 1}" for i in range(k))
    labels = new_labels + alg.center_labels if prepend else alg.center_labels + new_labels
    ext = StepTwoAlgebra(
        alg.p + k,
        alg.m,
        C,
        name if name is not None else (f"{alg.name}+R{k}" if alg.name else ""),
        labels,
        alg.v_labels,
    )
    return ext, BlockMetric(G_z, metric.G_v)


def change_basis(
    alg: StepTwoAlgebra,
    metric: BlockMetric,
    P_z=None,
    P_v=None,
    name: str | None = None,
) -> tuple[StepTwoAlgebra, BlockMetric]:
    """Re-express in the bases z'_k = sum_l P_z[l][k] z_l and v'_a = sum_b P_v[b][a] v_b."""
    P_z = la.identity(alg.p) if P_z is None else la.as_matrix(P_z)
    P_v = la.identity(alg.m) if P_v is None else la.as_matrix(P_v)
    if la.det(P_z) == 0 or la.det(P_v) == 0:
        raise AlgebraError("change-of-basis matrices must be invertible")
    Pz_inv = la.inverse(P_z)
    m = alg.m
    cols = [tuple(P_v[b][a] for b in range(m)) for a in range(m)]
    C = []
    for a in range(m):
        row = []
        for b in range(m):
            z_old = bracket_v(alg, cols[a], cols[b])
            row.append(la.matvec(Pz_inv, z_old))
        C.append(tuple(row))
    G_z = la.matmul(la.matmul(la.transpose(P_z), metric.G_z), P_z)
    G_v = la.matmul(la.matmul(la.transpose(P_v), metric.G_v), P_v)
    new = StepTwoAlgebra(alg.p, m, tuple(C), alg.name if name is None else name)
    return new, BlockMetric(G_z, G_v)
