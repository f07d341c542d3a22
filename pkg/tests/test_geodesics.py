import csv
import io
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from mhtype import linalg as la
from mhtype.algebra import BlockMetric, StepTwoAlgebra, Vector, bracket, j_map
from mhtype.corpus import builtin, fuzz_mht, two_block
from mhtype.curvature import connection
from mhtype.geodesics import (
    NotApplicableError,
    SpectralSplitError,
    classify_geodesic_hull,
    convergence_order,
    curve_to_csv,
    geodesic_closed_form,
    geodesic_general,
    geodesic_integrate,
    geodesic_params,
    integrate_batch,
    j_exp,
    j_inverse,
    series_expm,
    split_condition,
    sup_distance,
    totally_geodesic_test,
)
from mhtype.mht import detect_mht
from mhtype.scalars import Q

from conftest import qm, qv

TS = np.linspace(0.0, 3.0, 301)


def mht(name):
    alg, met = builtin(name)
    return alg, met, detect_mht(alg, met).phi


def teh0_reference(ts):
    """Closed-form solution for teh0, z0 = e3, x0 = e1 (obtained from the body-velocity ODE)."""
    Z = np.stack([0 * ts, 1.5 * ts - 0.5 * np.sin(ts)], 1)
    X = np.stack([np.sin(ts), 1 - np.cos(ts)], 1)
    return Z, X


def two_sided_p2():
    """p = 2, m = 4: j(z1)^2 has two distinct eigenvalues and nonzero cross terms."""
    br = {(0, 1): qv(1, 0), (2, 3): qv(2, 0), (0, 2): qv(0, 1), (1, 3): qv(0, 1)}
    return StepTwoAlgebra.from_brackets(2, 4, br, "p2"), BlockMetric(la.identity(2), la.identity(4))


# -- the j-exponential ------------------------------------------------------------


def test_j_exp_examples():
    alg, met, phi = mht("teh0")
    P = geodesic_params(alg, met, phi, qv(0, 1), qv(1, 0))
    assert np.allclose(j_exp(P, math.pi), -np.eye(2), atol=1e-15)
    assert np.array_equal(j_exp(P, 0.0), np.eye(2))
    alg, met, phi = mht("teh2")
    P = geodesic_params(alg, met, phi, qv(1, 0), qv(1, 0))
    assert P.phi0 == Q(-1, 2)
    for t in (0.3, 1.0, 2.5):
        expected = math.cosh(t / math.sqrt(2)) * np.eye(2) + math.sqrt(2) * math.sinh(t / math.sqrt(2)) * P.J_float
        assert np.allclose(j_exp(P, t), expected, atol=1e-12)
        assert np.allclose(j_exp(P, t), series_expm(P.J_float, t), atol=1e-12)


@settings(max_examples=25)
@given(st.integers(0, 10**6), st.floats(-2, 2))
def test_j_exp_matches_series(seed, t):
    inst = fuzz_mht(seed)
    alg, met = inst
    phi = detect_mht(alg, met).phi
    z0 = tuple(Q(1) for _ in range(alg.p))
    P = geodesic_params(alg, met, phi, z0, tuple(Q(0) for _ in range(alg.m)))
    if P.phi0 == 0:
        return
    scale = max(1.0, float(np.abs(P.J_float).max()))
    assert np.allclose(j_exp(P, t), series_expm(P.J_float, t, terms=80), atol=1e-10 * scale**2)


def test_j_inverse_exact():
    alg, met, phi = mht("teh3")
    P = geodesic_params(alg, met, phi, qv(0, 1), qv(1, 0))
    assert la.matmul(P.J, j_inverse(P)) == la.identity(2)
    P0 = geodesic_params(alg, met, phi, qv(1, 0), qv(1, 0))
    with pytest.raises(NotApplicableError):
        j_inverse(P0)


# -- closed form ---------------------------------------------------------------------


def test_closed_form_linear_case_exact():
    alg, met, phi = mht("teh0")
    c = geodesic_closed_form(alg, met, phi, qv(1, 0), qv(1, 0))
    _, Z, X = c.sample(TS)
    assert c.z_linear
    assert np.array_equal(Z, np.outer(TS, [1.0, 0.0])) and np.array_equal(X, np.outer(TS, [1.0, 0.0]))


def test_closed_form_teh0_reference():
    alg, met, phi = mht("teh0")
    c = geodesic_closed_form(alg, met, phi, qv(0, 1), qv(1, 0))
    _, Z, X = c.sample(TS)
    Zr, Xr = teh0_reference(TS)
    assert np.abs(Z - Zr).max() < 1e-12 and np.abs(X - Xr).max() < 1e-12
    rk = geodesic_integrate(alg, met, qv(0, 1), qv(1, 0))
    assert sup_distance(c, rk) < 1e-8
    Zr, Xr = teh0_reference(rk.ts)
    assert np.abs(rk.zs - Zr).max() < 1e-8 and np.abs(rk.xs - Xr).max() < 1e-8


def test_closed_form_central_line():
    alg, met, phi = mht("teh0")
    c = geodesic_closed_form(alg, met, phi, qv(0, 1), qv(0, 0))
    _, Z, X = c.sample(TS)
    assert np.array_equal(Z, np.outer(TS, [0.0, 1.0])) and not X.any()


def test_literal_coefficient_fails_initial_condition():
    alg, met, phi = mht("teh0")
    lit = geodesic_closed_form(alg, met, phi, qv(0, 1), qv(1, 0), paper_literal=True)
    vz, _ = lit.initial_velocity()
    assert abs(vz[1] - 1.0) > 0.1
    rk = geodesic_integrate(alg, met, qv(0, 1), qv(1, 0), t_max=1.0, steps=2000)
    assert sup_distance(lit, rk) > 0.1


@pytest.mark.parametrize("name", ["teh1", "teh2", "teh3", "h3sig", "quat", "rgheis"])
def test_closed_form_vs_rk4_corpus(name):
    alg, met, phi = mht(name)
    z0 = tuple(Q(1) for _ in range(alg.p))
    x0 = tuple(Q(k + 1) for k in range(alg.m))
    c = geodesic_closed_form(alg, met, phi, z0, x0)
    if c.kind != "closed":
        pytest.skip("phi(z0) = 0 with j(z0) != 0")
    rk = geodesic_integrate(alg, met, z0, x0)
    assert sup_distance(c, rk) < 1e-8
    vz, vx = c.initial_velocity()
    assert np.allclose(vz, [float(v) for v in z0], atol=1e-8)
    assert np.allclose(vx, [float(v) for v in x0], atol=1e-8)


def test_closed_form_nilpotent_fallback_warns():
    # null metric on v: j(z) != 0 but j(z)^2 = 0, so phi = 0
    alg = StepTwoAlgebra.from_brackets(1, 4, {(2, 3): qv(1)})
    G = qm([[0, 0, 1, 0], [0, 0, 0, 1], [1, 0, 0, 0], [0, 1, 0, 0]])
    met = BlockMetric(la.identity(1), G)
    phi = detect_mht(alg, met).phi
    assert phi.Phi == ((Q(0),),)
    with pytest.warns(RuntimeWarning):
        c = geodesic_closed_form(alg, met, phi, qv(1), qv(0, 0, 1, 1), steps=500)
    assert c.kind == "sampled"


# -- general route ----------------------------------------------------------------


@pytest.mark.parametrize("name", ["teh0", "teh2", "teh3", "quat"])
def test_general_equals_closed_on_mht(name):
    alg, met, phi = mht(name)
    z0 = tuple(Q(1) for _ in range(alg.p))
    x0 = tuple(Q(k + 1) for k in range(alg.m))
    c = geodesic_closed_form(alg, met, phi, z0, x0)
    g = geodesic_general(alg, met, z0, x0)
    assert sup_distance(c, g, TS) < 1e-10


def test_general_kernel_branch():
    alg, met, _ = mht("teh0")
    g = geodesic_general(alg, met, qv(1, 1), qv(0, 0))
    _, Z, X = g.sample(TS)
    assert np.allclose(Z, np.outer(TS, [1, 1]), atol=1e-14) and not X.any()
    alg, met = two_block()
    # j(z) with z = 0 has all of v as kernel
    g = geodesic_general(alg, met, qv(0), qv(1, 0, 0, 1))
    _, Z, X = g.sample(TS)
    assert np.allclose(X, np.outer(TS, [1, 0, 0, 1])) and np.allclose(Z, 0)


def test_general_two_block_vs_rk4():
    alg, met = two_block()
    z0, x0 = qv(1), qv(1, 2, -1, Q(1, 2))
    g = geodesic_general(alg, met, z0, x0)
    assert sorted(g.info["thetas"]) == [-4.0, -1.0]
    rk = geodesic_integrate(alg, met, z0, x0)
    assert sup_distance(g, rk) < 1e-8


def test_general_cross_term_sign():
    alg, met = two_sided_p2()
    z0, x0 = qv(1, 0), qv(1, 1, 1, 1)
    assert not detect_mht(alg, met)
    rk = geodesic_integrate(alg, met, z0, x0)
    assert sup_distance(geodesic_general(alg, met, z0, x0), rk) < 1e-8
    assert sup_distance(geodesic_general(alg, met, z0, x0, paper_literal=True), rk) > 1.0


def test_general_rejects_rotation_blocks():
    # J^2 with complex spectrum: j(z) = [[A, 0], [0, A]]-type rotation mixing
    br = {(0, 1): qv(1, 0), (2, 3): qv(1, 0), (0, 2): qv(0, 1)}
    alg = StepTwoAlgebra.from_brackets(2, 4, br)
    met = BlockMetric(la.identity(2), la.diag([1, -1, 1, 1]))
    J = np.array([[float(x) for x in r] for r in j_map(alg, met, qv(1, 1))])
    if np.iscomplex(np.linalg.eigvals(J @ J)).any():
        with pytest.raises(SpectralSplitError):
            geodesic_general(alg, met, qv(1, 1), qv(1, 0, 0, 0))


def test_split_condition():
    assert split_condition([-1.0, -4.0]) == 1.0
    assert split_condition([-1e-7, -3e-5]) > 1e10


# -- RK4 oracle ----------------------------------------------------------------------


def test_rk4_zero_velocity():
    alg, met, _ = mht("teh0")
    rk = geodesic_integrate(alg, met, qv(0, 0), qv(0, 0), steps=50)
    assert not rk.zs.any() and not rk.xs.any()


def test_rk4_convergence_order_teh2():
    alg, met, _ = mht("teh2")
    assert convergence_order(alg, met, qv(1, 0), qv(1, 1)) >= 3.9


def test_rk4_energy():
    alg, met, _ = mht("teh3")
    rk = geodesic_integrate(alg, met, qv(1, 1), qv(1, 2), steps=2000)
    e = rk.info["energy"]
    assert np.ptp(e) < 1e-9 * max(1.0, np.abs(e).max())


def test_integrate_batch_padding():
    alg, met, _ = mht("teh0")
    a2, m2 = two_block()
    J1 = np.array([[0.0, -1.0], [1.0, 0.0]])
    Js = np.zeros((2, 4, 4))
    Cs = np.zeros((2, 4, 4, 2))
    Js[0, :2, :2] = J1
    Cs[0, :2, :2, :] = alg.C_float
    Js[1] = np.array([[float(x) for x in r] for r in j_map(a2, m2, qv(1))])
    Cs[1, :, :, :1] = a2.C_float
    z0s = np.array([[0.0, 1.0], [1.0, 0.0]])
    x0s = np.array([[1.0, 0, 0, 0], [1.0, 2.0, -1.0, 0.5]])
    ts, Z, X, _ = integrate_batch(Js, Cs, z0s, x0s, 3.0, 10_000)
    Zr, Xr = teh0_reference(ts)
    assert np.abs(Z[0] - Zr).max() < 1e-8 and np.abs(X[0, :, :2] - Xr).max() < 1e-8
    single = geodesic_integrate(a2, m2, qv(1), qv(1, 2, -1, Q(1, 2)))
    assert np.abs(Z[1, :, :1] - single.zs).max() < 1e-12


def test_csv_format():
    alg, met, phi = mht("teh0")
    c = geodesic_closed_form(alg, met, phi, qv(0, 1), qv(1, 0))
    text = curve_to_csv(c, np.linspace(0, 1, 5))
    rows = list(csv.reader(io.StringIO(text)))
    assert rows[0] == ["t", "z_1", "z_2", "x_1", "x_2"]
    _, Z, X = c.sample(np.linspace(0, 1, 5))
    for i, row in enumerate(rows[1:]):
        assert [float(v) for v in row[1:]] == [*Z[i], *X[i]]  # 17 digits round-trip


# -- totally geodesic subalgebras ----------------------------------------------------------


def test_tg_trichotomy():
    alg, met, phi = mht("teh0")
    r = totally_geodesic_test(alg, met, phi, qv(0, 1), qv(1, 0))
    assert r.kind == "TG-SUBGROUP" and r.nabla_closed and r.subalgebra
    r = totally_geodesic_test(alg, met, phi, qv(1, 0), qv(1, 0))
    assert r.kind == "TG-NOT-SUBGROUP"
    alg1, met1, phi1 = mht("teh1")
    r = totally_geodesic_test(alg1, met1, phi1, qv(1, 0), qv(1, 0))
    assert r.kind == "NOT-TG"
    assert r.rc_z_z == (Q(1, 4), Q(-1, 4))  # neither 0 nor parallel to u1


def test_tg_nabla_closure_independent():
    alg, met, phi = mht("teh0")
    r = totally_geodesic_test(alg, met, phi, qv(0, 1), qv(1, 0))
    span = la.as_matrix([v.coords for v in r.basis])
    k = la.rank(span)
    for U in r.basis:
        for V in r.basis:
            w = connection(alg, met, U, V).coords
            assert la.rank(span + (w,)) == k
            assert la.rank(span + (bracket(alg, U, V).coords,)) == k


def test_hull_classification():
    alg, met, phi = mht("teh0")
    h = classify_geodesic_hull(alg, met, phi, qv(0, 1), qv(1, 0))
    assert h.kind == "H3" and h.dim == 3
    h = classify_geodesic_hull(alg, met, phi, qv(1, 0), qv(1, 0))
    assert h.kind == "R3" and h.nabla_closed
    alg1, met1, phi1 = mht("teh1")
    h = classify_geodesic_hull(alg1, met1, phi1, qv(1, 0), qv(1, 0))
    assert h.kind == "H3xR" and h.dim == 4
