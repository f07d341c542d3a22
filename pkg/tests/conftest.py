import os

import pytest
from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

from mhtype import linalg as la
from mhtype.algebra import Vector, bracket
from mhtype.curvature import ricci_trace
from mhtype.scalars import Q

settings.register_profile("default", deadline=None, suppress_health_check=[HealthCheck.too_slow])
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))


def rationals(height=6):
    return st.builds(lambda n, d: Q(n, d), st.integers(-height, height), st.integers(1, height))


def rational_vectors(n, height=6):
    return st.tuples(*[rationals(height) for _ in range(n)])


def rational_matrices(n, k=None, height=6):
    k = n if k is None else k
    return st.tuples(*[rational_vectors(k, height) for _ in range(n)])


def basis(alg):
    return [Vector.basis(alg.p, alg.m, i) for i in range(alg.dim)]


def qm(rows):
    return la.as_matrix([[Q(c) for c in r] for r in rows])


def qv(*xs):
    return tuple(Q(x) for x in xs)


@pytest.fixture
def tmpdir_path(tmp_path):
    return str(tmp_path)


# -- brute-force oracles shared by several test modules ---------------------------------


def trace_ricci_operator(alg, met):
    """Rc = G^{-1} Ric with Ric from traces of the oracle curvature."""
    B = basis(alg)
    ric = tuple(tuple(ricci_trace(alg, met, X, Y) for Y in B) for X in B)
    return la.matmul(la.inverse(la.block_diag(met.G_z, met.G_v)), ric)


def derivation_residuals(alg, D):
    """D[U, V] - [DU, V] - [U, DV] over all basis pairs of the full algebra, concatenated."""
    B = basis(alg)
    out = []
    for U in B:
        for V in B:
            lhs = la.matvec(D, bracket(alg, U, V).coords)
            DU = Vector.from_coords(alg.p, la.matvec(D, U.coords))
            DV = Vector.from_coords(alg.p, la.matvec(D, V.coords))
            out += la.vsub(lhs, la.vadd(bracket(alg, DU, V).coords, bracket(alg, U, DV).coords))
    return out


def is_derivation(alg, D):
    return not any(derivation_residuals(alg, D))


# -- acceptance summary -------------------------------------------------------------------

ACCEPTANCE: dict = {}


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for n in sorted(ACCEPTANCE):
            terminalreporter.write_line(ACCEPTANCE[n])
