"""Nilsoliton detection.

A metric is a nilsoliton when D = Rc + c Id is a derivation for some constant
c.  On a 2-step algebra with Rc|_v = -(xi/2) Id this reduces to: the derived
algebra [v, v] lies in a single eigenspace of Rc|_z, with eigenvalue
lambda = c - xi.
"""

from __future__ import annotations

from dataclasses import dataclass

from . import linalg as la
from .algebra import BlockMetric, StepTwoAlgebra, bracket_v, central_extension
from .curvature import compute_xi
from .mht import PhiForm
from .scalars import Q

__all__ = [
    "SolitonVerdict",
    "derivation_residual",
    "derived_algebra",
    "extension_soliton_check",
    "nilsoliton_check",
]


@dataclass(frozen=True)
class SolitonVerdict:
    is_soliton: bool
    c: object = None
    lam: object = None
    witness: tuple | None = None
    derived_basis: tuple = ()
    non_unique: bool = False
    derivation_verified: bool = False


def derived_algebra(alg: StepTwoAlgebra) -> tuple:
    """Reduced basis of span{[v_a, v_b]} in center coordinates."""
    return la.row_space_basis(list(alg.brackets().values()))


def _rc_z(alg, metric, phi):
    return la.scale(Q(alg.m, 4), la.matmul(metric.G_z_inv, phi.Phi))


def derivation_residual(alg: StepTwoAlgebra, D_z, D_v) -> tuple | None:
    """First basis pair (a, b) with D[v_a, v_b] != [D v_a, v_b] + [v_a, D v_b], or None.

    D is block diagonal with blocks D_z on z and D_v on v.
    """
    m = alg.m
    cols = [tuple(D_v[i][a] for i in range(m)) for a in range(m)]
    for a in range(m):
        for b in range(a + 1, m):
            lhs = la.matvec(D_z, alg.C[a][b])
            rhs = la.vadd(bracket_v(alg, cols[a], la.identity(m)[b]), bracket_v(alg, la.identity(m)[a], cols[b]))
            if lhs != rhs:
                return (a, b)
    return None


def nilsoliton_check(alg: StepTwoAlgebra, metric: BlockMetric, phi: PhiForm) -> SolitonVerdict:
    rc = _rc_z(alg, metric, phi)
    xi = compute_xi(metric, phi)
    basis = derived_algebra(alg)
    if not basis:
        # every c works; report c = xi
        return SolitonVerdict(True, xi, Q(0), None, (), non_unique=True, derivation_verified=True)
    lam = None
    for w in basis:
        rw = la.matvec(rc, w)
        mu = la.proportionality(rw, w)
        if mu is None or (lam is not None and mu != lam):
            return SolitonVerdict(False, None, lam, w, basis)
        lam = mu
    c = lam + xi
    D_z = la.add(rc, la.scale(c, la.identity(alg.p)))
    bad = derivation_residual(alg, D_z, la.scale(c - xi / 2, la.identity(alg.m)))
    if bad is not None:
        raise AssertionError(f"derivation identity fails on basis pair {bad}")
    return SolitonVerdict(True, c, lam, None, basis, derivation_verified=True)


def extension_soliton_check(
    alg: StepTwoAlgebra, metric: BlockMetric, phi: PhiForm, k: int, extra_metric=()
) -> SolitonVerdict:
    """Verdict on n + R^k with phi extended by zero; must agree with the base."""
    base = nilsoliton_check(alg, metric, phi)
    ext_alg, ext_metric = central_extension(alg, metric, k, extra_metric)
    Phi = la.block_diag(phi.Phi, la.zeros(k)) if k else phi.Phi
    ext_phi = PhiForm(Phi, ext_alg.center_labels)
    verdict = nilsoliton_check(ext_alg, ext_metric, ext_phi)
    if base.is_soliton and not (verdict.is_soliton and verdict.c == base.c and verdict.lam == base.lam):
        raise AssertionError("central extension changed the nilsoliton verdict")
    return verdict
