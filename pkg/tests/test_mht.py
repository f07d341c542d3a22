import random

import pytest
import sympy
from hypothesis import given
from hypothesis import strategies as st

from mhtype import linalg as la
from mhtype.algebra import BlockMetric, StepTwoAlgebra, j_map
from mhtype.corpus import builtin, fuzz_general, fuzz_mht, two_block
from mhtype.mht import (
    PhiForm,
    classify_phi,
    constant_semicentral_curvature,
    detect_mht,
    phi_eval,
    verify_mht,
)
from mhtype.scalars import Q

from conftest import qm, qv, rational_vectors


def sym(A):
    return sympy.Matrix([[sympy.Rational(str(x)) for x in r] for r in A])


def test_teh1_phi():
    cert = detect_mht(*builtin("teh1"))
    assert cert and cert.phi.Phi == qm([[Q(1, 2), Q(1, 2)], [Q(1, 2), Q(1, 2)]])


def test_h3sig_phi():
    alg, met = builtin("h3sig")
    cert = detect_mht(alg, met)
    assert cert and cert.phi.Phi == qm([[-1]]) == la.scale(-1, met.G_z)


def test_teh0_stretched_v_metric_is_still_mht():
    # a G_v-skew 2x2 map has scalar square, so any G_v keeps the condition
    alg, _ = builtin("teh0")
    met = BlockMetric(qm([[1, 0], [0, 1]]), qm([[1, 0], [0, 2]]))
    J = j_map(alg, met, qv(0, 1))
    J2 = sym(J) * sym(J)  # independent multiplication
    assert J2 == -sympy.Rational(1, 2) * sympy.eye(2)
    cert = detect_mht(alg, met)
    assert cert and cert.phi.Phi == qm([[0, 0], [0, Q(1, 2)]])


def test_non_mht_counterexample():
    alg, met = two_block()
    cert = detect_mht(alg, met)
    assert not cert and cert.counterexample == (0, 0)
    J = sym(j_map(alg, met, qv(1)))
    assert sym(cert.anticommutator) == 2 * J * J
    assert not (J * J).is_diagonal() or len(set((J * J).diagonal())) > 1


def test_phi_eval_examples():
    alg, met = builtin("teh0")
    phi = detect_mht(alg, met).phi
    assert phi_eval(phi, qv(1, 0)) == 0 and phi_eval(phi, qv(0, 1)) == 1
    assert phi_eval(phi, qv(0, 0)) == 0
    phi2 = detect_mht(*builtin("teh2")).phi
    assert phi_eval(phi2, qv(1, 1)) == -2


def test_verify_mht():
    alg, met = builtin("teh3")
    phi = detect_mht(alg, met).phi
    assert phi.Phi == qm([[0, 0], [0, -1]])
    rep = verify_mht(alg, met, phi, trials=100, seed=3)
    assert rep.ok and rep.max_residual == 0 and rep.trials == 100
    bad = PhiForm(la.add(phi.Phi, qm([[1, 0], [0, 0]])), phi.basis)
    assert not verify_mht(alg, met, bad, trials=5, seed=3).ok
    empty = verify_mht(alg, met, phi, trials=0)
    assert empty.trials == 0 and empty.ok and not empty.failures


@given(st.integers(0, 10_000), st.data())
def test_polarized_identity_on_fuzz(seed, data):
    inst = fuzz_mht(seed)
    alg, met = inst
    cert = detect_mht(alg, met)
    assert cert and cert.phi.Phi == inst.phi_expected
    z, w = data.draw(rational_vectors(alg.p)), data.draw(rational_vectors(alg.p))
    Jz, Jw = j_map(alg, met, z), j_map(alg, met, w)
    anti = la.add(la.matmul(Jz, Jw), la.matmul(Jw, Jz))
    # J(z)J(w) + J(w)J(z) = -2 <z,w>_phi Id
    zw = sum((z[i] * inst.phi_expected[i][j] * w[j] for i in range(alg.p) for j in range(alg.p)), Q(0))
    assert anti == la.scale(-2 * zw, la.identity(alg.m))


def test_classify_examples():
    h3, hm = builtin("h3")
    c = classify_phi(hm, detect_mht(h3, hm).phi)
    assert c.h_type and c.pseudo_h_type and c.c == Q(1, 4)
    s, sm = builtin("h3sig")
    c = classify_phi(sm, detect_mht(s, sm).phi)
    assert not c.pseudo_h_type and c.generalized_heisenberg and c.c == Q(-1, 4)
    t, tm = builtin("teh1")
    c = classify_phi(tm, detect_mht(t, tm).phi)
    assert c.degenerate and c.rank == 1


def test_constant_semicentral_curvature():
    assert constant_semicentral_curvature(*builtin("h3"), samples=20) == Q(1, 4)
    assert constant_semicentral_curvature(*builtin("teh0")) is None
    abel = StepTwoAlgebra.from_brackets(1, 2, {}), BlockMetric(qm([[1]]), qm([[1, 0], [0, 1]]))
    assert constant_semicentral_curvature(*abel, samples=10) == 0


def test_general_fuzz_mostly_not_mht():
    verdicts = [bool(detect_mht(*fuzz_general(s))) for s in range(20)]
    assert not all(verdicts)


def test_detect_on_random_basis_change_is_stable():
    rng = random.Random(5)
    for s in range(10):
        inst = fuzz_mht(rng.randrange(10**6))
        assert detect_mht(*inst)
