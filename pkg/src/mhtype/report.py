"""The analysis pipeline and its text / JSON renderings.

Both renderings are produced from the same nested structure, so they carry
identical numbers.  In JSON every computed scalar is tagged with its
provenance, ``{"exact": "1/2"}`` or ``{"float": 0.5}``; counts and
dimensions are plain integers.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

from . import linalg as la
from .algebra import BlockMetric, StepTwoAlgebra, Vector, validate
from .curvature import (
    isometry_coincidence,
    ricci,
    ricci_coordinate_trace,
    ricci_operator,
    ricci_trace,
    riemann,
    riemann_oracle,
    scalar_curvature,
)
from .mht import classify_phi, detect_mht, verify_mht
from .scalars import Q, format_scalar, is_exact
from .soliton import nilsoliton_check

__all__ = ["AnalysisReport", "analyze", "encode", "render_text"]


def _tagged(x):
    if isinstance(x, bool) or x is None or isinstance(x, str):
        return x
    if isinstance(x, int) and type(x) is int:
        return x
    if is_exact(x):
        return {"exact": format_scalar(x)}
    if isinstance(x, float):
        return {"float": x}
    raise TypeError(f"cannot encode {type(x).__name__}")


def encode(obj):
    """Recursively convert to JSON-ready data with provenance tags."""
    if isinstance(obj, dict):
        return {k: encode(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [encode(v) for v in obj]
    return _tagged(obj)


def _plain(x) -> str:
    if isinstance(x, bool) or x is None:
        return str(x).lower() if isinstance(x, bool) else "none"
    if isinstance(x, str):
        return x
    if type(x) is int:
        return str(x)
    if is_exact(x):
        return format_scalar(x)
    return repr(float(x))


def _inline(obj) -> str:
    if isinstance(obj, (list, tuple)):
        return "[" + ", ".join(_inline(v) for v in obj) + "]"
    if isinstance(obj, dict):
        return "{" + ", ".join(f"{k}: {_inline(v)}" for k, v in obj.items()) + "}"
    return _plain(obj)


def render_text(data: dict, indent: int = 0) -> str:
    lines = []
    pad = "  " * indent
    for key, val in data.items():
        if isinstance(val, dict) and val:
            lines.append(f"{pad}{key}:")
            lines.append(render_text(val, indent + 1))
        else:
            lines.append(f"{pad}{key}: {_inline(val)}")
    return "\n".join(lines)


@dataclass(frozen=True)
class AnalysisReport:
    data: dict
    valid: bool

    def to_json(self) -> str:
        return json.dumps(encode(self.data), indent=2) + "\n"

    def to_text(self) -> str:
        return render_text(self.data) + "\n"


def _basis(alg):
    return [Vector.basis(alg.p, alg.m, i) for i in range(alg.dim)]


def _max_abs(values):
    out = 0
    for v in values:
        a = abs(v)
        if a > out:
            out = a
    return out if out != 0 else Q(0)


def analyze(alg: StepTwoAlgebra, metric: BlockMetric, name: str | None = None, strict: bool = False) -> AnalysisReport:
    """validate -> detect_mht -> classify_phi -> curvature -> isometry test -> nilsoliton."""
    data: dict = {
        "input": {
            "name": name if name is not None else alg.name,
            "center_dim": alg.p,
            "v_dim": alg.m,
            "center_basis": list(alg.center_labels),
            "v_basis": list(alg.v_labels),
            "note": "matrices marked (basis-dependent) are in the input basis",
        }
    }
    rep = validate(alg, metric, strict)
    data["validation"] = {
        "ok": rep.ok,
        "checks": dict(rep.checks),
        "issues": [f"{i.check}: {i.message}" for i in rep.errors],
        "warnings": [f"{i.check}: {i.message}" for i in rep.warnings],
    }
    if not rep.ok:
        return AnalysisReport(data, False)

    B = _basis(alg)
    cert = detect_mht(alg, metric, strict)
    cross: dict = {
        "riemann_vs_oracle": _max_abs(
            c
            for X in B
            for Y in B
            for Z in B
            for c in la.vsub(riemann(alg, metric, X, Y, Z).coords, riemann_oracle(alg, metric, X, Y, Z).coords)
        ),
    }
    ric = tuple(tuple(ricci_trace(alg, metric, X, Y) for Y in B) for X in B)
    cross["ricci_frame_vs_coordinate_trace"] = _max_abs(
        ric[i][j] - ricci_coordinate_trace(alg, metric, B[i], B[j]) for i in range(len(B)) for j in range(len(B))
    )

    if not cert:
        i, j = cert.counterexample
        if i == j:
            what = f"J(z{i + 1})^2 is not a multiple of Id"
        else:
            what = f"J(z{i + 1})J(z{j + 1}) + J(z{j + 1})J(z{i + 1}) is not a multiple of Id"
        data["mht"] = {
            "verdict": False,
            "counterexample": what,
            "anticommutator (basis-dependent)": cert.anticommutator,
        }
        data["ricci_form (basis-dependent)"] = ric
        data["cross_checks"] = cross
        return AnalysisReport(data, True)

    phi = cert.phi
    res = verify_mht(alg, metric, phi, trials=20, seed=0)
    data["mht"] = {"verdict": True, "Phi (basis-dependent)": phi.Phi}
    cls = classify_phi(metric, phi)
    data["classification"] = {
        "rank": cls.rank,
        "signature (+, -, 0)": list(cls.signature),
        "degenerate": cls.degenerate,
        "pseudo_h_type": cls.pseudo_h_type,
        "h_type": cls.h_type,
        "generalized_heisenberg": cls.generalized_heisenberg,
        "c (Phi = 4c G_z)": cls.c,
    }
    cr = ricci_operator(alg, metric, phi)
    S = scalar_curvature(cr)
    ed = cr.rc_z_eigendata
    data["curvature"] = {
        "xi": cr.xi,
        "scalar_curvature": S,
        "rc_z (basis-dependent)": cr.rc_z,
        "rc_z_charpoly": list(ed.charpoly),
        "rc_z_eigenvalues": [
            {"value": ev.value, "multiplicity": ev.multiplicity, "eigenvectors": list(ev.eigenvectors)}
            for ev in ed.eigenvalues
        ],
        "rc_z_other_factors": [{"coefficients": list(c), "multiplicity": k} for c, k in ed.other_factors],
        "rc_v_eigenvalue": cr.rc_v_eigenvalue,
    }
    iso, witness = isometry_coincidence(cr)
    data["isometry_coincidence"] = {"value": iso, "witness": witness}
    sol = nilsoliton_check(alg, metric, phi)
    data["nilsoliton"] = {
        "is_soliton": sol.is_soliton,
        "c": sol.c,
        "lambda": sol.lam,
        "non_unique": sol.non_unique,
        "derived_algebra": list(sol.derived_basis),
        "witness": sol.witness,
    }
    data["ricci_form (basis-dependent)"] = ric
    cross["mht_residual"] = res.max_residual
    cross["ricci_closed_vs_trace"] = _max_abs(
        ricci(alg, metric, phi, B[i], B[j]) - ric[i][j] for i in range(len(B)) for j in range(len(B))
    )
    cross["scalar_curvature_vs_trace"] = S - (la.trace(cr.rc_z) + alg.m * cr.rc_v_eigenvalue)
    data["cross_checks"] = cross
    return AnalysisReport(data, True)
