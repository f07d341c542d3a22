"""Detection and classification of the modified H-type condition.

A metric 2-step algebra is of modified H-type with quadratic form phi when
``J(z)^2 = -phi(z) Id`` on v for every central z.  By polarization this is
equivalent to the anticommutators ``J(z_i)J(z_j) + J(z_j)J(z_i)`` all being
scalar, which is what :func:`detect_mht` checks on the given center basis.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field

from . import linalg as la
from .algebra import (
    BlockMetric,
    StepTwoAlgebra,
    Vector,
    inertia,
    j_basis,
    j_map,
    require_valid,
)
from .scalars import Q, sign

__all__ = [
    "MhtCertificate",
    "PhiClassification",
    "PhiForm",
    "ResidualReport",
    "classify_phi",
    "constant_semicentral_curvature",
    "detect_mht",
    "phi_eval",
    "phi_inner",
    "random_rational",
    "random_rational_vector",
    "verify_mht",
]


@dataclass(frozen=True)
class PhiForm:
    """Matrix of the polarized form <z, z'>_phi in the algebra's center basis."""

    Phi: tuple
    basis: tuple = ()

    @property
    def p(self) -> int:
        return len(self.Phi)

    def __hash__(self):
        return hash(self.Phi)


@dataclass(frozen=True)
class MhtCertificate:
    verdict: bool
    phi: PhiForm | None = None
    counterexample: tuple | None = None  # (i, j) center indices
    anticommutator: tuple | None = None
    witness: tuple | None = None  # ((row, col), (row, col)) unequal diagonal or ((r, c), None)

    def __bool__(self):
        return self.verdict


def detect_mht(alg: StepTwoAlgebra, metric: BlockMetric, strict: bool = False) -> MhtCertificate:
    require_valid(alg, metric, strict)
    J = j_basis(alg, metric)
    p = alg.p
    Phi = [[Q(0)] * p for _ in range(p)]
    for i in range(p):
        for j in range(i, p):
            A = la.add(la.matmul(J[i], J[j]), la.matmul(J[j], J[i]))
            c = la.scalar_multiple_of_identity(A)
            if c is None:
                return MhtCertificate(
                    False, counterexample=(i, j), anticommutator=A, witness=_non_scalar_witness(A)
                )
            Phi[i][j] = Phi[j][i] = -c / 2
    return MhtCertificate(True, PhiForm(la.as_matrix(Phi), alg.center_labels))


def _non_scalar_witness(A):
    n = len(A)
    for r in range(n):
        for c in range(n):
            if r != c and A[r][c] != 0:
                return ((r, c), None)
    for r in range(1, n):
        if A[r][r] != A[0][0]:
            return ((0, 0), (r, r))
    return None


def phi_eval(phi: PhiForm, z):
    if len(z) != phi.p:
        raise ValueError(f"expected {phi.p} center coordinates, got {len(z)}")
    return la.bilinear(phi.Phi, z, z)


def phi_inner(phi: PhiForm, z, w):
    if len(z) != phi.p or len(w) != phi.p:
        raise ValueError(f"expected {phi.p} center coordinates")
    return la.bilinear(phi.Phi, z, w)


# ---------------------------------------------------------------------------
# randomized exact verification


def random_rational(rng: random.Random, height: int = 5):
    num = rng.randint(-height, height)
    den = rng.randint(1, height)
    return Q(num, den)


def random_rational_vector(rng: random.Random, n: int, height: int = 5) -> tuple:
    return tuple(random_rational(rng, height) for _ in range(n))


@dataclass(frozen=True)
class ResidualReport:
    trials: int
    max_residual: object
    failures: tuple = field(default_factory=tuple)

    @property
    def ok(self) -> bool:
        return self.max_residual == 0


def verify_mht(
    alg: StepTwoAlgebra, metric: BlockMetric, phi: PhiForm, trials: int = 100, seed: int = 0
) -> ResidualReport:
    """Spot-check j(z)^2 = -phi(z) Id and the two polarized identities on random data.

    In exact arithmetic the residuals are zero for a correct phi.
    """
    rng = random.Random(seed)
    p, m = alg.p, alg.m
    Gv = metric.G_v
    worst = Q(0)
    failures = []
    for t in range(trials):
        z = random_rational_vector(rng, p)
        z2 = random_rational_vector(rng, p)
        e = random_rational_vector(rng, m)
        e2 = random_rational_vector(rng, m)
        Jz, Jz2 = j_map(alg, metric, z), j_map(alg, metric, z2)
        fz = phi_eval(phi, z)
        Je, Je2 = la.matvec(Jz, e), la.matvec(Jz, e2)
        res = {
            "norm": abs(la.bilinear(Gv, Je, Je2) - fz * la.bilinear(Gv, e, e2)),
            "square": max(
                (abs(v) for row in la.add(la.matmul(Jz, Jz), la.scale(fz, la.identity(m))) for v in row),
                default=Q(0),
            ),
            "polar": abs(
                la.bilinear(Gv, Je, la.matvec(Jz2, e)) - phi_inner(phi, z, z2) * la.bilinear(Gv, e, e)
            ),
        }
        for name, r in res.items():
            if r != 0:
                failures.append((t, name, r))
            if r > worst:
                worst = r
    return ResidualReport(trials, worst, tuple(failures))


# ---------------------------------------------------------------------------
# classification


@dataclass(frozen=True)
class PhiClassification:
    rank: int
    signature: tuple  # (n_plus, n_minus, n_zero)
    degenerate: bool
    pseudo_h_type: bool
    h_type: bool
    generalized_heisenberg: bool
    c: object = None  # Phi = 4c G_z


def _ratio_to(A, B):
    """s with A == s*B (B nonzero), else None."""
    flat_a = [x for r in A for x in r]
    flat_b = [x for r in B for x in r]
    return la.proportionality(tuple(flat_a), tuple(flat_b))


def _positive_definite(G) -> bool:
    plus, minus, zero = inertia(G)
    return minus == 0 and zero == 0


def classify_phi(metric: BlockMetric, phi: PhiForm) -> PhiClassification:
    plus, minus, zero = inertia(phi.Phi)
    rank = plus + minus
    degenerate = (la.det(phi.Phi) == 0) if phi.p else False
    s = _ratio_to(phi.Phi, metric.G_z) if metric.p else None
    gen = s is not None and s != 0
    c = s / 4 if gen else None
    pseudo = phi.Phi == metric.G_z
    riemannian = _positive_definite(metric.G_z) and _positive_definite(metric.G_v)
    h_type = gen and riemannian and c == Q(1, 4)
    return PhiClassification(rank, (plus, minus, zero), degenerate, pseudo, h_type, gen, c)


def constant_semicentral_curvature(
    alg: StepTwoAlgebra, metric: BlockMetric, samples: int = 0, seed: int = 0
):
    """The constant c with K = c on every nondegenerate semi-central plane, or None.

    This holds exactly when the algebra is of modified H-type with
    Phi = 4c G_z.  With ``samples > 0`` the value is cross-checked against
    sectional curvatures of random semi-central planes.
    """
    from .curvature import sectional  # cycle: curvature imports mht

    cert = detect_mht(alg, metric)
    if not cert:
        return None
    if alg.p == 0:
        return None
    s = _ratio_to(cert.phi.Phi, metric.G_z)
    if s is None:
        return None
    c = s / 4
    rng = random.Random(seed)
    done = 0
    while done < samples:
        z = random_rational_vector(rng, alg.p)
        x = random_rational_vector(rng, alg.m)
        U, V = Vector.central(z, alg.m), Vector.horizontal(x, alg.p)
        if metric.inner_z(z, z) == 0 or metric.inner_v(x, x) == 0:
            continue
        K = sectional(alg, metric, U, V)
        if K != c:
            raise AssertionError(f"semi-central plane with K = {K} != {c}")
        done += 1
    return c
