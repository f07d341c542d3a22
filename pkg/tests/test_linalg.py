import pytest
import sympy
from hypothesis import given

from mhtype import linalg as la
from mhtype.scalars import Q, QuadraticSurd

from conftest import qm, rational_matrices, rational_vectors


def to_sym(A):
    return sympy.Matrix([[sympy.Rational(int(x.numerator), int(x.denominator)) for x in r] for r in A])


@given(rational_matrices(3))
def test_det_matches_sympy(A):
    assert la.det(A) == Q(str(to_sym(A).det()))


@given(rational_matrices(3))
def test_inverse(A):
    if la.det(A) == 0:
        with pytest.raises(la.SingularMatrixError):
            la.inverse(A)
        return
    assert la.matmul(A, la.inverse(A)) == la.identity(3)
    assert to_sym(la.inverse(A)) == to_sym(A).inv()


@given(rational_matrices(3))
def test_charpoly_matches_sympy(A):
    expected = [Q(str(c)) for c in to_sym(A).charpoly().all_coeffs()]
    assert list(la.charpoly(A)) == expected


@given(rational_matrices(2, 4))
def test_nullspace(A):
    ns = la.nullspace(A, 4)
    assert len(ns) == 4 - la.rank(A) == 4 - to_sym(A).rank()
    for v in ns:
        assert la.is_zero_vec(la.matvec(A, v))


@given(rational_matrices(3, 4))
def test_rref_matches_sympy(A):
    R, piv = la.rref(A)
    SR, spiv = to_sym(A).rref()
    assert tuple(piv) == tuple(spiv)
    assert to_sym(R) == SR


@given(rational_vectors(3), rational_vectors(3))
def test_proportionality(u, v):
    if la.is_zero_vec(v):
        with pytest.raises(ValueError):
            la.proportionality(u, v)
        return
    mu = la.proportionality(u, v)
    if mu is not None:
        assert la.vscale(mu, v) == u


def test_proportionality_cases():
    assert la.proportionality((Q(2), Q(4)), (Q(1), Q(2))) == 2
    assert la.proportionality((Q(1), Q(0)), (Q(1), Q(1))) is None
    assert la.proportionality((Q(0), Q(0)), (Q(1), Q(1))) == 0
    # 2x2 minor test agrees with the ratio
    u, v = (Q(1), Q(2), Q(3)), (Q(2), Q(4), Q(7))
    assert la.proportionality(u, v) is None and u[0] * v[2] - u[2] * v[0] != 0


def test_surd_entries():
    r = QuadraticSurd(0, Q(1, 2), 2)
    B = la.as_matrix([[r, r], [r, -r]])
    assert la.matmul(la.transpose(B), la.matmul(qm([[0, 1], [1, 0]]), B)) == qm([[1, 0], [0, -1]])
    assert la.det(B) == -1


def test_row_space_basis():
    vs = [(Q(1), Q(2)), (Q(2), Q(4)), (Q(0), Q(0))]
    assert len(la.row_space_basis(vs)) == 1
    assert la.row_space_basis([]) == ()
