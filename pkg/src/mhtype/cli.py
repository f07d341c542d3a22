"""Command line interface: ``mhtype analyze | geodesic | check | extend | list | export``.

Sources are algebra files (JSON) or ``builtin:NAME``.  Exit codes: 0 ok,
1 check failure, 2 validation failure or inapplicable request, 3 parse error.
All files are written atomically.
"""

from __future__ import annotations

import argparse
import os
import sys
import warnings
from dataclasses import replace

import numpy as np

from . import checks as chk
from .algebra import AlgebraError, DegenerateFormError, central_extension, validate
from .corpus import BUILTINS, builtin
from .fileio import AlgebraFile, FileParseError, dump_algebra, load_algebra, write_atomic
from .geodesics import (
    NotApplicableError,
    curve_to_csv,
    geodesic_closed_form,
    geodesic_general,
    geodesic_integrate,
)
from .linalg import diag
from .mht import detect_mht
from .report import analyze
from .scalars import Q, ScalarParseError, parse_scalar
from .soliton import extension_soliton_check

EXIT_OK, EXIT_CHECK, EXIT_INVALID, EXIT_PARSE = 0, 1, 2, 3


class CliError(Exception):
    def __init__(self, message: str, code: int):
        super().__init__(message)
        self.code = code


# ---------------------------------------------------------------------------
# helpers


def load_source(source: str) -> AlgebraFile:
    if source.startswith("builtin:"):
        name = source.split(":", 1)[1]
        try:
            alg, metric = builtin(name)
        except KeyError as exc:
            raise CliError(str(exc.args[0]), EXIT_PARSE) from None
        return AlgebraFile(name, alg, metric)
    try:
        return load_algebra(source)
    except FileParseError as exc:
        raise CliError(f"{source}: {exc}", EXIT_PARSE) from None
    except AlgebraError as exc:
        raise CliError(f"{source}: {exc}", EXIT_PARSE) from None


def load_valid(source: str, strict: bool = False) -> AlgebraFile:
    af = load_source(source)
    rep = validate(af.alg, af.metric, strict)
    if not rep.ok:
        raise CliError("; ".join(f"{i.check}: {i.message}" for i in rep.errors), EXIT_INVALID)
    return af


def parse_vector(text: str, n: int, labels: tuple, what: str) -> tuple:
    """A basis label (``e3``) or ``n`` comma-separated exact scalars."""
    text = text.strip()
    if text in labels:
        return tuple(Q(int(lbl == text)) for lbl in labels)
    parts = [s for s in text.split(",")] if text else []
    if len(parts) != n:
        raise CliError(f"{what}: expected {n} comma-separated scalars or one of {', '.join(labels)}", EXIT_INVALID)
    try:
        return tuple(parse_scalar(s.strip()) for s in parts)
    except ScalarParseError as exc:
        raise CliError(f"{what}: {exc}", EXIT_INVALID) from None


def parse_signature(text: str, k: int) -> tuple:
    signs = [s.strip() for s in text.split(",")] if text.strip() else []
    if len(signs) != k or any(s not in ("+", "-") for s in signs):
        raise CliError(f"signature must be {k} comma-separated '+' or '-' entries, got {text!r}", EXIT_INVALID)
    return tuple(1 if s == "+" else -1 for s in signs)


def emit(text: str, out: str | None) -> None:
    if out:
        write_atomic(out, text)
    else:
        sys.stdout.write(text)


# ---------------------------------------------------------------------------
# commands


def cmd_analyze(args) -> int:
    try:
        af = load_source(args.source)
    except CliError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.code
    rep = analyze(af.alg, af.metric, af.name, args.strict)
    emit(rep.to_json() if args.format == "json" else rep.to_text(), args.output)
    return EXIT_OK if rep.valid else EXIT_INVALID


def _curve(method, af, z0, x0, args):
    alg, metric = af.alg, af.metric
    if method == "integrate":
        return geodesic_integrate(alg, metric, z0, x0, args.t_max, args.steps)
    cert = detect_mht(alg, metric)
    if cert:
        if method == "general":
            return geodesic_general(alg, metric, z0, x0, args.paper_literal)
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", RuntimeWarning)
            curve = geodesic_closed_form(alg, metric, cert.phi, z0, x0, args.paper_literal, args.t_max, args.steps)
        if curve.kind != "closed":
            raise NotApplicableError("phi(z0) = 0 while j(z0) != 0: no closed form; use --method integrate or general")
        return curve
    if method == "closed":
        raise NotApplicableError("closed form needs a modified H-type metric; use --method general or integrate")
    return geodesic_general(alg, metric, z0, x0, args.paper_literal)


def cmd_geodesic(args) -> int:
    try:
        af = load_valid(args.source)
        z0 = parse_vector(args.z0, af.alg.p, af.alg.center_labels, "--z0")
        x0 = parse_vector(args.x0, af.alg.m, af.alg.v_labels, "--x0")
        if args.steps < 1 or args.t_max <= 0 or args.stride < 1:
            raise CliError("need --steps >= 1, --t-max > 0 and --stride >= 1", EXIT_INVALID)
        ts = np.linspace(0.0, args.t_max, args.steps + 1)[:: args.stride]
        if args.method == "compare":
            formula = _curve("closed" if detect_mht(af.alg, af.metric) else "general", af, z0, x0, args)
            rk4 = geodesic_integrate(af.alg, af.metric, z0, x0, args.t_max, args.steps)
            _, Zf, Xf = formula.sample(rk4.ts)
            Zr, Xr = rk4.zs, rk4.xs
            dist = np.sqrt(np.sum((Zf - Zr) ** 2, 1) + np.sum((Xf - Xr) ** 2, 1))
            extra = {f"rk4_z_{k + 1}": Zr[:, k] for k in range(af.alg.p)}
            extra.update({f"rk4_x_{a + 1}": Xr[:, a] for a in range(af.alg.m)})
            extra["distance"] = dist
            sel = slice(None, None, args.stride)
            extra = {k: v[sel] for k, v in extra.items()}
            text = curve_to_csv(formula, rk4.ts[sel], extra)
            print(f"max distance {float(dist.max()):.3e} ({formula.kind} vs rk4)", file=sys.stderr)
        else:
            curve = _curve(args.method, af, z0, x0, args)
            if curve.fn is None:
                text = curve_to_csv(_thin(curve, args.stride))
            else:
                text = curve_to_csv(curve, ts)
    except CliError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.code
    except NotApplicableError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    emit(text, args.output)
    return EXIT_OK


def _thin(curve, stride):
    return replace(curve, ts=curve.ts[::stride], zs=curve.zs[::stride], xs=curve.xs[::stride])


def cmd_check(args) -> int:
    instances = []
    try:
        if args.source:
            af = load_source(args.source)
            instances.append((af.name, af.alg, af.metric, None))
    except CliError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.code
    if args.corpus:
        instances += chk.corpus_instances()
    if args.fuzz:
        instances += chk.fuzz_instances(args.fuzz, args.seed)
    if not instances:
        print("error: nothing to check; give a source, --corpus or --fuzz N", file=sys.stderr)
        return EXIT_INVALID
    opts = dict(seed=args.seed, tol=args.tol, steps=args.steps, t_max=args.t_max, tuples=args.tuples)
    report = chk.run_suite(instances, **opts)
    emit(report.to_json() if args.format == "json" else report.to_text(), args.output)
    if report.ok:
        return EXIT_OK
    bad = next(i for i in report.instances if not i.ok)
    names = {r.name for r in bad.results if r.status == "fail"}

    def still_fails(alg, metric):
        rep = chk.run_suite([(bad.label, alg, metric, None)], **opts)
        return bool(names & chk.failing_names(rep))

    small = chk.minimize_failure(bad.alg, bad.metric, still_fails)
    os.makedirs(args.out_dir, exist_ok=True)
    path = os.path.join(args.out_dir, f"repro-{bad.label}.json")
    write_atomic(path, dump_algebra(small, bad.metric, bad.label))
    print(f"failure in {bad.label}: {', '.join(sorted(names))}; reproduction written to {path}", file=sys.stderr)
    return EXIT_CHECK


def cmd_extend(args) -> int:
    try:
        if args.dims < 0:
            raise CliError("--dims must be nonnegative", EXIT_INVALID)
        signs = parse_signature(args.signature, args.dims)
        af = load_valid(args.source)
        name = args.name or (af.name if args.dims == 0 else f"{af.name}+R{args.dims}")
        try:
            alg, metric = central_extension(af.alg, af.metric, args.dims, diag(signs), args.prepend, name)
        except (AlgebraError, DegenerateFormError) as exc:
            raise CliError(str(exc), EXIT_INVALID) from None
        if args.verify_soliton:
            cert = detect_mht(af.alg, af.metric)
            if not cert:
                raise CliError("--verify-soliton needs a modified H-type input", EXIT_INVALID)
            v = extension_soliton_check(af.alg, af.metric, cert.phi, args.dims, diag(signs))
            verdict = f"nilsoliton: {'yes' if v.is_soliton else 'no'}"
            if v.is_soliton:
                verdict += f", c = {v.c}, lambda = {v.lam}" + (" (c not unique)" if v.non_unique else "")
            print(verdict + "; verdict preserved", file=sys.stderr)
    except CliError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.code
    emit(dump_algebra(alg, metric, name), args.output)
    return EXIT_OK


def cmd_list(args) -> int:
    for name in BUILTINS:
        alg, _ = builtin(name)
        print(f"{name}\tcenter {alg.p}, v {alg.m}")
    return EXIT_OK


def cmd_export(args) -> int:
    try:
        af = load_source(args.source)
    except CliError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.code
    emit(dump_algebra(af.alg, af.metric, af.name), args.output)
    return EXIT_OK


# ---------------------------------------------------------------------------
# parser


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="mhtype", description="Curvature, geodesics and solitons of 2-step nilpotent metric Lie algebras."
    )
    sub = parser.add_subparsers(dest="command", required=True)
    src_help = "algebra file (JSON) or builtin:NAME"

    p = sub.add_parser("analyze", help="full report for one algebra")
    p.add_argument("source", help=src_help)
    p.add_argument("--format", choices=("text", "json"), default="text")
    p.add_argument("--strict", action="store_true", help="reject surd metric entries and degenerate forms early")
    p.add_argument("-o", "--output", help="write the report here instead of stdout")
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("geodesic", help="geodesic through the identity as CSV")
    p.add_argument("source", help=src_help)
    p.add_argument("--z0", required=True, help="central initial velocity: label or comma-separated scalars")
    p.add_argument("--x0", required=True, help="v initial velocity: label or comma-separated scalars")
    p.add_argument("--t-max", type=float, default=3.0)
    p.add_argument("--steps", type=int, default=10_000, help="sample / RK4 step count on [0, t-max]")
    p.add_argument("--method", choices=("closed", "general", "integrate", "compare"), default="closed")
    p.add_argument("--paper-literal", action="store_true", help="use the alternative literal central coefficient (comparison only)")
    p.add_argument("--stride", type=int, default=1, help="emit every n-th sample")
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_geodesic)

    p = sub.add_parser("check", help="run the invariant suite")
    p.add_argument("source", nargs="?", help=src_help)
    p.add_argument("--corpus", action="store_true", help="include the built-in corpus")
    p.add_argument("--fuzz", type=int, default=0, metavar="N", help="include N fuzzed algebras")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--format", choices=("text", "json"), default="text")
    p.add_argument("--tol", type=float, default=1e-8, help="geodesic sup-distance tolerance")
    p.add_argument("--steps", type=int, default=10_000)
    p.add_argument("--t-max", type=float, default=3.0)
    p.add_argument("--tuples", type=int, default=100, help="random tuples for the symmetry suite")
    p.add_argument("--out-dir", default=".", help="where a reproduction file goes on failure")
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("extend", help="trivial central extension by R^k")
    p.add_argument("source", help=src_help)
    p.add_argument("--dims", type=int, required=True)
    p.add_argument("--signature", default="", help="k comma-separated signs, e.g. '+,-'")
    p.add_argument("--prepend", action="store_true", help="put the new central directions first")
    p.add_argument("--name")
    p.add_argument("--verify-soliton", action="store_true")
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_extend)

    p = sub.add_parser("list", help="list built-in algebras")
    p.set_defaults(func=cmd_list)

    p = sub.add_parser("export", help="write an algebra as JSON")
    p.add_argument("source", help=src_help)
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_export)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
