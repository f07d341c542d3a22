"""The invariant suite run by ``mhtype check``.

Exact checks (connection, curvature identities, oracle equivalences, MHT
polarization, Ricci forms, basis invariance, nilsoliton derivation) run per
instance.  Geodesic checks compare formula curves against RK4; all
integrations of a suite are batched through :func:`integrate_batch`.
"""

from __future__ import annotations

import json
import math
import random
import warnings
from dataclasses import dataclass, field

import numpy as np

from . import linalg as la
from .algebra import BlockMetric, StepTwoAlgebra, Vector, bracket, change_basis, j_basis_float, validate
from .curvature import (
    connection,
    connection_koszul,
    ricci,
    ricci_coordinate_trace,
    ricci_operator,
    ricci_trace,
    riemann,
    riemann_oracle,
    scalar_curvature,
    sectional,
)
from .geodesics import (
    GeodesicCurve,
    NotApplicableError,
    geodesic_closed_form,
    geodesic_general,
    integrate_batch,
)
from .mht import detect_mht, phi_eval, random_rational_vector, verify_mht
from .scalars import Q
from .soliton import nilsoliton_check

__all__ = [
    "CheckResult",
    "InstanceResult",
    "SuiteReport",
    "corpus_instances",
    "exact_checks",
    "failing_names",
    "fuzz_instances",
    "minimize_failure",
    "run_suite",
]


@dataclass(frozen=True)
class CheckResult:
    name: str
    status: str  # "pass", "fail" or "skip"
    detail: str = ""


@dataclass
class InstanceResult:
    label: str
    alg: StepTwoAlgebra
    metric: BlockMetric
    mht: bool
    results: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return all(r.status != "fail" for r in self.results)


@dataclass
class SuiteReport:
    instances: list

    @property
    def ok(self) -> bool:
        return all(i.ok for i in self.instances)

    def counts(self) -> dict:
        out = {"pass": 0, "fail": 0, "skip": 0}
        for inst in self.instances:
            for r in inst.results:
                out[r.status] += 1
        return out

    def to_text(self) -> str:
        lines = []
        for inst in self.instances:
            lines.append(f"{inst.label} ({'mht' if inst.mht else 'general'}): {'ok' if inst.ok else 'FAIL'}")
            for r in inst.results:
                lines.append(f"  {r.status:4s} {r.name}" + (f"  {r.detail}" if r.detail else ""))
        c = self.counts()
        lines.append(f"summary: {c['pass']} passed, {c['fail']} failed, {c['skip']} skipped")
        return "\n".join(lines) + "\n"

    def to_json(self) -> str:
        data = {
            "ok": self.ok,
            "counts": self.counts(),
            "instances": [
                {
                    "label": i.label,
                    "mht": i.mht,
                    "ok": i.ok,
                    "results": [{"name": r.name, "status": r.status, "detail": r.detail} for r in i.results],
                }
                for i in self.instances
            ],
        }
        return json.dumps(data, indent=2) + "\n"


def _res(name, ok, detail=""):
    return CheckResult(name, "pass" if ok else "fail", detail)


def _basis(alg):
    return [Vector.basis(alg.p, alg.m, i) for i in range(alg.dim)]


def _rand_vec(rng, alg, height=3):
    return Vector.from_coords(alg.p, random_rational_vector(rng, alg.dim, height))


# ---------------------------------------------------------------------------
# exact checks


def _symmetry_suite(alg, metric, rng, tuples):
    names = [
        "antisymmetry R(X,Y) = -R(Y,X)",
        "skew <R(X,Y)Z,W> = -<R(X,Y)W,Z>",
        "pair symmetry",
        "first Bianchi",
        "metric compatibility",
        "torsion-free",
    ]
    bad = {n: 0 for n in names}
    ip = metric.inner
    for _ in range(tuples):
        X, Y, Z, W = (_rand_vec(rng, alg) for _ in range(4))
        R = riemann(alg, metric, X, Y, Z)
        if R != -riemann(alg, metric, Y, X, Z):
            bad[names[0]] += 1
        if ip(R, W) != -ip(riemann(alg, metric, X, Y, W), Z):
            bad[names[1]] += 1
        if ip(R, W) != ip(riemann(alg, metric, Z, W, X), Y):
            bad[names[2]] += 1
        if not (R + riemann(alg, metric, Y, Z, X) + riemann(alg, metric, Z, X, Y)).is_zero():
            bad[names[3]] += 1
        nXY = connection(alg, metric, X, Y)
        if ip(nXY, Z) + ip(Y, connection(alg, metric, X, Z)) != 0:
            bad[names[4]] += 1
        if nXY - connection(alg, metric, Y, X) != bracket(alg, X, Y):
            bad[names[5]] += 1
    return [_res(f"symmetry: {n}", bad[n] == 0, f"{bad[n]}/{tuples} violations" if bad[n] else "") for n in names]


def exact_checks(
    alg: StepTwoAlgebra, metric: BlockMetric, phi_expected=None, seed: int = 0, tuples: int = 100
) -> tuple[list, object]:
    """All exact invariants for one instance; returns (results, MHT certificate)."""
    rng = random.Random(seed)
    out = []
    rep = validate(alg, metric)
    out.append(_res("validation", rep.ok, "; ".join(i.message for i in rep.errors)))
    if not rep.ok:
        return out, None
    B = _basis(alg)
    out.append(
        _res(
            "connection = Koszul formula",
            all(connection(alg, metric, X, Y) == connection_koszul(alg, metric, X, Y) for X in B for Y in B),
        )
    )
    mism = sum(
        riemann(alg, metric, X, Y, Z) != riemann_oracle(alg, metric, X, Y, Z) for X in B for Y in B for Z in B
    )
    out.append(_res("riemann = oracle on basis triples", mism == 0, f"{mism} mismatches" if mism else ""))
    out += _symmetry_suite(alg, metric, rng, tuples)
    ric = [[ricci_trace(alg, metric, X, Y) for Y in B] for X in B]
    out.append(
        _res(
            "ricci frame trace = coordinate trace",
            all(ric[i][j] == ricci_coordinate_trace(alg, metric, B[i], B[j]) for i in range(len(B)) for j in range(len(B))),
        )
    )

    cert = detect_mht(alg, metric)
    if not cert:
        for name in ("mht polarization", "ricci closed = trace", "sectional semi-central", "basis invariance", "nilsoliton"):
            out.append(CheckResult(name, "skip", "not modified H-type"))
        if phi_expected is not None:
            out.append(_res("phi matches construction", False, "expected MHT"))
        return out, cert

    phi = cert.phi
    if phi_expected is not None:
        out.append(_res("phi matches construction", tuple(phi.Phi) == tuple(phi_expected)))
    res = verify_mht(alg, metric, phi, trials=30, seed=seed)
    out.append(_res("mht polarization", res.ok, f"max residual {res.max_residual}" if not res.ok else ""))
    out.append(
        _res(
            "ricci closed = trace",
            all(ricci(alg, metric, phi, B[i], B[j]) == ric[i][j] for i in range(len(B)) for j in range(len(B))),
        )
    )
    bad = 0
    done = 0
    for _ in range(4 * tuples):
        if done >= 20:
            break
        z = random_rational_vector(rng, alg.p, 3)
        e = random_rational_vector(rng, alg.m, 3)
        nz, ne = metric.inner_z(z, z), metric.inner_v(e, e)
        if nz == 0 or ne == 0:
            continue
        done += 1
        K = sectional(alg, metric, Vector.central(z, alg.m), Vector.horizontal(e, alg.p))
        if K != phi_eval(phi, z) / (4 * nz):
            bad += 1
    out.append(_res("sectional semi-central = phi(z)/(4<z,z>)", bad == 0, f"{bad}/{done} violations" if bad else ""))

    cr = ricci_operator(alg, metric, phi)
    try:
        S = scalar_curvature(cr)
        out.append(_res("scalar curvature = trace of Ricci operator", True))
    except AssertionError as exc:
        S = None
        out.append(_res("scalar curvature = trace of Ricci operator", False, str(exc)))

    sol = nilsoliton_check(alg, metric, phi)
    out.append(_res("nilsoliton derivation identity", (not sol.is_soliton) or sol.derivation_verified,
                    f"soliton={sol.is_soliton}"))

    # random rational change of basis
    P_z = _invertible(rng, alg.p)
    P_v = _invertible(rng, alg.m)
    alg2, met2 = change_basis(alg, metric, P_z, P_v)
    cert2 = detect_mht(alg2, met2)
    ok = bool(cert2)
    if ok:
        cr2 = ricci_operator(alg2, met2, cert2.phi)
        sol2 = nilsoliton_check(alg2, met2, cert2.phi)
        ok = (
            cr2.xi == cr.xi
            and cr2.scalar_curvature == S
            and cr2.rc_z_eigendata.charpoly == cr.rc_z_eigendata.charpoly
            and sol2.is_soliton == sol.is_soliton
            and sol2.c == sol.c
        )
    out.append(_res("basis invariance (xi, S, spectrum, soliton)", ok))
    return out, cert


def _invertible(rng, n):
    while True:
        P = la.as_matrix([[Q(rng.randint(-2, 2)) for _ in range(n)] for _ in range(n)])
        if la.det(P) != 0:
            return P


# ---------------------------------------------------------------------------
# geodesic checks


@dataclass
class _Case:
    owner: InstanceResult
    label: str
    z0: tuple
    x0: tuple
    curve: GeodesicCurve
    method: str
    tol_scale: float = 1.0
    general: GeodesicCurve | None = None


def _scale_to_unit(z0, size):
    """Rational s with s^2 * size <= 1."""
    if size <= 1:
        return z0
    k = math.isqrt(math.ceil(size)) + 1
    return tuple(c / k for c in z0)


def _geodesic_cases(inst: InstanceResult, cert, rng, n_cases=2) -> tuple[list, list]:
    alg, metric = inst.alg, inst.metric
    results, cases = [], []
    for c in range(n_cases):
        z0 = random_rational_vector(rng, alg.p, 3)
        x0 = random_rational_vector(rng, alg.m, 3)
        if not any(x0):
            x0 = (Q(1),) + x0[1:]
        label = f"geodesic[{c}]"
        if cert:
            phi0 = phi_eval(cert.phi, z0)
            z0 = _scale_to_unit(z0, abs(float(phi0)))
            with warnings.catch_warnings():
                warnings.simplefilter("ignore", RuntimeWarning)
                curve = geodesic_closed_form(alg, metric, cert.phi, z0, x0)
            if curve.kind != "closed":
                results.append(CheckResult(f"{label} closed form", "skip", "phi(z0) = 0 with j(z0) != 0"))
                continue
            case = _Case(inst, label, z0, x0, curve, "closed")
            try:
                case.general = geodesic_general(alg, metric, z0, x0)
            except NotApplicableError as exc:
                results.append(CheckResult(f"{label} general = closed", "skip", str(exc)))
            cases.append(case)
        else:
            J = sum(float(c) * Jk for c, Jk in zip(z0, j_basis_float(alg, metric)))
            rho = float(np.max(np.abs(np.linalg.eigvals(J @ J)))) if alg.m else 0.0
            z0 = _scale_to_unit(z0, rho)
            try:
                curve = geodesic_general(alg, metric, z0, x0)
            except NotApplicableError as exc:
                results.append(CheckResult(f"{label} general formula", "skip", str(exc)))
                continue
            cases.append(_Case(inst, label, z0, x0, curve, "general"))
    return results, cases


def _run_geodesic_batch(cases: list, t_max: float, steps: int, tol: float, chunk: int = 24):
    for start in range(0, len(cases), chunk):
        group = cases[start : start + chunk]
        P = max(c.owner.alg.p for c in group)
        M = max(c.owner.alg.m for c in group)
        n = len(group)
        Js, Cs = np.zeros((n, M, M)), np.zeros((n, M, M, P))
        z0s, x0s = np.zeros((n, P)), np.zeros((n, M))
        for i, c in enumerate(group):
            alg, metric = c.owner.alg, c.owner.metric
            p, m = alg.p, alg.m
            Jb = j_basis_float(alg, metric)
            Js[i, :m, :m] = sum(float(v) * Jb[k] for k, v in enumerate(c.z0))
            Cs[i, :m, :m, :p] = alg.C_float
            z0s[i, :p] = [float(v) for v in c.z0]
            x0s[i, :m] = [float(v) for v in c.x0]
        ts, Z, X, U = integrate_batch(Js, Cs, z0s, x0s, t_max, steps)
        for i, c in enumerate(group):
            p, m = c.owner.alg.p, c.owner.alg.m
            _, Zc, Xc = c.curve.sample(ts)
            d = np.sqrt(np.sum((Zc - Z[i, :, :p]) ** 2, 1) + np.sum((Xc - X[i, :, :m]) ** 2, 1))
            scale = 1.0 if c.method == "closed" else max(1.0, float(np.max(np.abs(np.hstack([Zc, Xc])))))
            sup = float(d.max())
            out = c.owner.results
            out.append(_res(f"{c.label} {c.method} vs RK4", sup <= tol * scale, f"sup {sup:.3e}"))
            vz, vx = c.curve.initial_velocity()
            err = float(np.max(np.abs(np.concatenate([vz - z0s[i, :p], vx - x0s[i, :m]]))))
            out.append(_res(f"{c.label} initial velocity", err <= 1e-8 * scale, f"err {err:.3e}"))
            Gv = c.owner.metric.G_v_float
            energy = np.einsum("ta,ab,tb->t", U[i, :, :m], Gv, U[i, :, :m])
            drift = float(np.ptp(energy)) if energy.size else 0.0
            out.append(_res(f"{c.label} energy conservation", drift <= 1e-9 * max(1.0, float(np.max(np.abs(energy)))),
                            f"drift {drift:.3e}"))
            if c.method == "closed":
                if c.curve.z_linear:
                    exact_line = np.array_equal(Zc, np.outer(ts, z0s[i, :p]))
                    out.append(_res(f"{c.label} z(t) = t z0 (linear case)", exact_line))
                if c.general is not None:
                    grid = np.linspace(0.0, t_max, 301)
                    _, Zg, Xg = c.general.sample(grid)
                    _, Zk, Xk = c.curve.sample(grid)
                    dg = float(np.max(np.abs(np.hstack([Zg - Zk, Xg - Xk]))))
                    out.append(_res(f"{c.label} general = closed", dg <= 1e-10, f"sup {dg:.3e}"))


def run_suite(
    instances,
    seed: int = 0,
    tol: float = 1e-8,
    steps: int = 10_000,
    t_max: float = 3.0,
    tuples: int = 100,
    geodesics: bool = True,
) -> SuiteReport:
    """Run all checks on ``[(label, alg, metric, phi_expected), ...]``; deterministic for fixed seed."""
    results, cases = [], []
    for n, (label, alg, metric, phi_expected) in enumerate(instances):
        inst_seed = seed * 1_000_003 + n
        checks, cert = exact_checks(alg, metric, phi_expected, inst_seed, tuples)
        inst = InstanceResult(label, alg, metric, bool(cert), checks)
        results.append(inst)
        if geodesics and cert is not None:
            skips, new = _geodesic_cases(inst, cert, random.Random(inst_seed + 7))
            inst.results += skips
            cases += new
    if cases:
        _run_geodesic_batch(cases, t_max, steps, tol)
    return SuiteReport(results)


def corpus_instances():
    from .corpus import BUILTINS, builtin, two_block

    out = [(name, *builtin(name), None) for name in BUILTINS]
    out.append(("two_block", *two_block(), None))
    return out


def fuzz_instances(n: int, seed: int):
    """n instances; every fourth is a general (usually non-MHT) algebra."""
    from .corpus import fuzz_general, fuzz_mht

    rng = random.Random(seed)
    out = []
    for i in range(n):
        s = rng.randrange(2**31)
        if i % 4 == 3:
            inst = fuzz_general(s)
            out.append((inst.alg.name, inst.alg, inst.metric, None))
        else:
            inst = fuzz_mht(s)
            out.append((inst.alg.name, inst.alg, inst.metric, inst.phi_expected))
    return out



def minimize_failure(alg: StepTwoAlgebra, metric: BlockMetric, still_fails) -> StepTwoAlgebra:
    """Greedily zero brackets while ``still_fails(alg, metric)`` stays true.

    The metric is kept; the result is a smaller reproduction of the same failure.
    """
    current = alg
    for key in sorted(alg.brackets()):
        br = dict(current.brackets())
        if key not in br:
            continue
        del br[key]
        trial = StepTwoAlgebra.from_brackets(
            current.p, current.m, br, current.name, current.center_labels, current.v_labels
        )
        try:
            if still_fails(trial, metric):
                current = trial
        except Exception:  # a candidate that breaks the pipeline is not a reproduction
            continue
    return current


def failing_names(report: SuiteReport) -> set:
    return {r.name for i in report.instances for r in i.results if r.status == "fail"}
