import random

import pytest

from mhtype import linalg as la
from mhtype.algebra import BlockMetric, StepTwoAlgebra, central_extension
from mhtype.corpus import builtin, fuzz_mht
from mhtype.mht import PhiForm, detect_mht
from mhtype.scalars import Q
from mhtype.soliton import derivation_residual, derived_algebra, extension_soliton_check, nilsoliton_check

from conftest import derivation_residuals, is_derivation, qm, qv, trace_ricci_operator


def verdict(name):
    alg, met = builtin(name)
    return nilsoliton_check(alg, met, detect_mht(alg, met).phi)


def soliton_constants(alg, Rc):
    """All c with Rc + c Id a derivation: the residual is affine in c, so solve r0 + c r1 = 0.

    Returns "all", a single rational, or None.
    """
    I = la.identity(alg.dim)
    r0 = derivation_residuals(alg, Rc)
    r1 = la.vsub(derivation_residuals(alg, la.add(Rc, I)), r0)
    if not any(r1):
        return "all" if not any(r0) else None
    k = next(i for i, x in enumerate(r1) if x)
    c = -r0[k] / r1[k]
    return c if all(a + c * b == 0 for a, b in zip(r0, r1)) else None


def test_derived_algebra_examples():
    assert derived_algebra(builtin("teh0")[0]) == (qv(0, 1),)
    assert derived_algebra(builtin("teh2")[0]) == (qv(1, -1),)
    alg = StepTwoAlgebra.from_brackets(1, 2, {})
    assert derived_algebra(alg) == ()


def test_teh0_verdict():
    v = verdict("teh0")
    assert v.is_soliton and v.c == Q(3, 2) and v.lam == Q(1, 2) and v.derivation_verified


def test_h3_verdict_matches_trace_oracle():
    alg, met = builtin("h3")
    v = verdict("h3")
    assert v.is_soliton
    D = la.add(trace_ricci_operator(alg, met), la.scale(v.c, la.identity(alg.dim)))
    assert is_derivation(alg, D)


def test_teh2_null_derived_algebra():
    v = verdict("teh2")
    assert v.is_soliton and v.c == 0


def test_abelian_non_unique():
    alg = StepTwoAlgebra.from_brackets(1, 2, {})
    met = BlockMetric(la.identity(1), la.identity(2))
    v = nilsoliton_check(alg, met, PhiForm(qm([[0]]), alg.center_labels))
    assert v.is_soliton and v.non_unique


@pytest.mark.parametrize("seed", range(16))
def test_verdict_agrees_with_brute_force(seed):
    alg, met = fuzz_mht(seed)
    phi = detect_mht(alg, met).phi
    v = nilsoliton_check(alg, met, phi)
    expected = soliton_constants(alg, trace_ricci_operator(alg, met))
    if expected is None:
        assert not v.is_soliton and v.witness is not None
    elif expected == "all":
        assert v.is_soliton and v.non_unique
    else:
        assert v.is_soliton and v.c == expected


def test_non_soliton_example():
    # [v1, v2] = z1, [v3, v4] = 2 z2: Rc|_z = diag(1/2, 2) separates the derived algebra
    alg = StepTwoAlgebra.from_brackets(2, 4, {(0, 1): qv(1, 0), (2, 3): qv(0, 2)})
    met = BlockMetric(la.identity(2), la.identity(4))
    cert = detect_mht(alg, met)
    assert not cert
    Rc = trace_ricci_operator(alg, met)
    assert soliton_constants(alg, Rc) is None
    # and the trace oracle agrees with the closed-form centre block
    assert tuple(r[:2] for r in Rc[:2]) == qm([[Q(1, 2), 0], [0, 2]])


def test_derivation_residual():
    alg, _ = builtin("teh0")
    assert derivation_residual(alg, la.scale(Q(2), la.identity(2)), la.identity(2)) is None
    assert derivation_residual(alg, la.identity(2), la.identity(2)) == (0, 1)


def test_extension_keeps_verdict():
    alg, met = builtin("teh0")
    phi = detect_mht(alg, met).phi
    v = extension_soliton_check(alg, met, phi, 2, la.diag([1, -1]))
    assert v.is_soliton and v.c == Q(3, 2)
    assert extension_soliton_check(alg, met, phi, 0) == nilsoliton_check(alg, met, phi)


def test_h3_extension_equals_teh0():
    h3, m3 = builtin("h3")
    ext, mext = central_extension(h3, m3, 1, la.identity(1), prepend=True)
    t0, mt0 = builtin("teh0")
    assert ext.C == t0.C and mext == mt0
    a = nilsoliton_check(ext, mext, detect_mht(ext, mext).phi)
    b = verdict("teh0")
    assert (a.is_soliton, a.c, a.lam) == (b.is_soliton, b.c, b.lam)


def test_random_extensions_agree():
    rng = random.Random(5)
    for seed in range(10):
        alg, met = fuzz_mht(seed)
        phi = detect_mht(alg, met).phi
        k = rng.randint(1, 3)
        extra = la.diag([rng.choice([1, -1]) * rng.randint(1, 3) for _ in range(k)])
        base = nilsoliton_check(alg, met, phi)
        ext = extension_soliton_check(alg, met, phi, k, extra)
        assert ext.is_soliton == base.is_soliton
