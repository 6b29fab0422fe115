"""Command line interface.

Exit codes for the decision commands follow the classification verdict:
0 success or special pair, 2 refuted by residues, 3 refuted by the
homological equation, 4 inconclusive (no exact decision at this order).
Unexpected errors exit 1.
"""
from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction

from .boundary import FactoredBoundary, boundary_from_json
from .classify import (
    KIND_HOMOLOGICAL,
    KIND_INCONCLUSIVE,
    KIND_RESIDUES,
    KIND_SPECIAL,
    build_conjugation,
    classify_pair,
    field_cofactor,
    verify_conjugation,
)
from .diffeo import (
    NotNilpotentError,
    diffeo_from_json,
    diffeo_to_json,
    field_from_json,
    field_to_json,
    flow,
    log_updiffeo,
)
from .homeq import (
    HomEquation,
    NoSolution,
    ResidueObstruction,
    SpecialSolution,
    special_solve,
)
from .rational import GaussianRational
from .residue import free_of_residues, residue_1d, residue_at
from .series import (
    SeriesError,
    series_from_json,
    series_to_json,
    sub,
    unit_inverse,
)

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_RESIDUES = 2
EXIT_HOMOLOGICAL = 3
EXIT_INCONCLUSIVE = 4

_KIND_EXIT = {
    KIND_SPECIAL: EXIT_OK,
    KIND_RESIDUES: EXIT_RESIDUES,
    KIND_HOMOLOGICAL: EXIT_HOMOLOGICAL,
    KIND_INCONCLUSIVE: EXIT_INCONCLUSIVE,
}


def _load(path: str) -> dict:
    with open(path) as fh:
        return json.load(fh)


def _emit(data: dict, args) -> None:
    if args.output:
        with open(args.output, "w") as fh:
            json.dump(data, fh, indent=1)
            fh.write("\n")
    elif getattr(args, "format", "human") == "json":
        json.dump(data, sys.stdout, indent=1)
        sys.stdout.write("\n")


def _parse_point(text: str) -> GaussianRational:
    parts = text.split(",")
    re = Fraction(parts[0])
    im = Fraction(parts[1]) if len(parts) > 1 else Fraction(0)
    return GaussianRational(re, im)


def _ladder(boundary: FactoredBoundary):
    return [Fraction(1, 64 ** (j + 1)) for j in range(boundary.nvars - 1)]


def _load_pair(data: dict):
    phi1 = diffeo_from_json(data["phi1"])
    phi2 = diffeo_from_json(data["phi2"])
    boundary = boundary_from_json(data["boundary"])
    return phi1, phi2, boundary


def _screen_input(data: dict):
    """Numerator and boundary for a residue screen, from any of the
    accepted file shapes."""
    boundary = boundary_from_json(data["boundary"])
    if "numerator" in data:
        return series_from_json(data["numerator"]), boundary
    if "u1" in data:
        u1 = series_from_json(data["u1"])
        u2 = series_from_json(data["u2"])
    else:
        phi1, phi2, boundary = _load_pair(data)
        u1 = field_cofactor(phi1, boundary)
        u2 = field_cofactor(phi2, boundary)
    return sub(unit_inverse(u1), unit_inverse(u2)), boundary


# ---------------------------------------------------------------------------
# subcommands
# ---------------------------------------------------------------------------


def _cmd_exp(args) -> int:
    field = field_from_json(_load(args.file))
    t = Fraction(args.time)
    phi = flow(field, t)
    print(f"unipotent family of order {phi.valid_order} in "
          f"{phi.nvars} variables")
    _emit(diffeo_to_json(phi), args)
    return EXIT_OK


def _cmd_log(args) -> int:
    phi = diffeo_from_json(_load(args.file))
    field = log_updiffeo(phi)
    print(f"nilpotent vertical field of order {field.fhat.valid_order}")
    _emit(field_to_json(field), args)
    return EXIT_OK


def _cmd_residue(args) -> int:
    data = _load(args.file)
    if "series" in data:
        s = series_from_json(data["series"])
        if args.at is not None:
            value = residue_at(s, _parse_point(args.at))
        else:
            value = residue_1d(s)
        print(f"residue: {value}")
        _emit({"residue": value.to_strings()}, args)
        return EXIT_OK
    numerator, boundary = _screen_input(data)
    scale = Fraction(args.scale) if args.scale else _ladder(boundary)
    result = free_of_residues(numerator, boundary, nsamples=args.samples,
                              seed=args.seed, tol=args.tol, scale=scale)
    print(f"residue-free: {result.status}  max |residue| = "
          f"{result.max_abs:.3e}  checked {result.checked} fibers "
          f"(skipped {result.skipped})")
    if result.witness is not None:
        sample, root, value = result.witness
        print(f"witness: sample {tuple(str(c) for c in sample)} "
              f"root {root:.6g} residue {value:.6g}")
    if args.report:
        from .report import write_residue_report
        paths = write_residue_report(args.report, numerator, boundary,
                                     nsamples=args.samples, seed=args.seed,
                                     scale=scale, tol=args.tol)
        print("report: " + ", ".join(paths))
    _emit({"status": result.status, "max_abs": result.max_abs,
           "checked": result.checked, "skipped": result.skipped}, args)
    if result.status is False:
        return EXIT_RESIDUES
    if result.status is None:
        return EXIT_INCONCLUSIVE
    return EXIT_OK


def _cmd_homeq(args) -> int:
    numerator, boundary = _screen_input(_load(args.file))
    try:
        eq = HomEquation(boundary, numerator)
    except ResidueObstruction as exc:
        print(f"residue obstruction: {exc}")
        print(f"witness exponent: {exc.witness}")
        return EXIT_RESIDUES
    lam = eq.lambda_invariant()
    print(f"equation in {eq.nvars} variables, margin {eq.margin}, "
          f"lambda = {lam}")
    if args.mode == "check":
        return EXIT_OK
    result = special_solve(eq, args.order)
    if isinstance(result, SpecialSolution):
        print(f"special: solution certified to order "
              f"{result.certified_order} with {len(dict(result.beta.terms()))} "
              f"terms")
        _emit({"beta": series_to_json(result.beta),
               "certified_order": result.certified_order}, args)
        return EXIT_OK
    assert isinstance(result, NoSolution)
    if result.refuted:
        print(f"refuted: {result.reason}")
        if result.witness is not None:
            print(f"witness row: {result.witness}")
        return EXIT_HOMOLOGICAL
    print(f"inconclusive: {result.reason}")
    return EXIT_INCONCLUSIVE


def _cmd_classify(args) -> int:
    data = _load(args.file)
    phi1, phi2, boundary = _load_pair(data)
    verdict = classify_pair(phi1, phi2, boundary, order=args.order,
                            samples=args.samples, tol=args.tol,
                            seed=args.seed)
    lam = "undefined" if verdict.lam is None else verdict.lam
    print(f"verdict: {verdict.kind}-at-order-{verdict.order} "
          f"(lambda = {lam})")
    for key in ("residue_gap", "witness", "reason"):
        if verdict.details.get(key) is not None:
            print(f"{key}: {verdict.details[key]}")
    out: dict = {"kind": verdict.kind, "order": verdict.order,
                 "lambda": None if verdict.lam is None
                 else verdict.lam.to_strings()}
    if verdict.certificate is not None:
        ok = verify_conjugation(phi1, phi2, verdict.certificate.sigma)
        print(f"certificate: conjugation verified exactly = {ok}, "
              f"legs = {verdict.certificate.legs}")
        out["sigma"] = diffeo_to_json(verdict.certificate.sigma)
        out["beta"] = series_to_json(verdict.certificate.beta)
    if args.report:
        from .report import write_classify_report
        try:
            u1 = field_cofactor(phi1, boundary)
            u2 = field_cofactor(phi2, boundary)
            numerator = sub(unit_inverse(u1), unit_inverse(u2))
        except SeriesError:
            numerator = None
        paths = write_classify_report(args.report, verdict, numerator,
                                      boundary, nsamples=args.samples,
                                      seed=args.seed,
                                      scale=_ladder(boundary), tol=args.tol)
        print("report: " + ", ".join(paths))
    _emit(out, args)
    return _KIND_EXIT[verdict.kind]


def _cmd_conjugate(args) -> int:
    data = _load(args.file)
    phi1, phi2, boundary = _load_pair(data)
    try:
        cert = build_conjugation(phi1, phi2, boundary, order=args.order)
    except ValueError as exc:
        if isinstance(exc, NotNilpotentError):
            print(f"no exact certificate: {exc}")
            return EXIT_INCONCLUSIVE
        print(f"refuted: {exc}")
        return EXIT_HOMOLOGICAL
    except SeriesError as exc:
        print(f"refuted: {exc}")
        return EXIT_HOMOLOGICAL
    ok = verify_conjugation(phi1, phi2, cert.sigma)
    print(f"conjugation of order {cert.order}, legs = {cert.legs}, "
          f"verified exactly = {ok}")
    _emit({"sigma": diffeo_to_json(cert.sigma),
           "beta": series_to_json(cert.beta), "legs": cert.legs}, args)
    return EXIT_OK


def _cmd_selftest(args) -> int:
    import importlib.resources as resources

    from .diffeo import VerticalField, exp_vertical
    from .series import MultiSeries, add, mul

    failures = 0

    def check(name, cond):
        nonlocal failures
        print(f"{'PASS' if cond else 'FAIL'}: {name}")
        failures += 0 if cond else 1

    x = MultiSeries.variable(0, 2, 8)
    s = MultiSeries.variable(1, 2, 8)
    one = MultiSeries.constant(1, 2, 8)
    field = VerticalField(mul(mul(x, x), add(one, s)))
    phi = exp_vertical(field)
    back = log_updiffeo(phi)
    check("exp/log roundtrip", back.fhat == field.fhat)

    fixture_dir = resources.files("paramflow") / "fixtures"
    geo = json.loads((fixture_dir / "geometric.json").read_text())
    check("exact residue of the geometric example",
          residue_1d(series_from_json(geo["series"])) == GaussianRational(1))

    demo = json.loads((fixture_dir / "residue_profile_demo.json").read_text())
    numerator, boundary = _screen_input(demo)
    res = free_of_residues(numerator, boundary, nsamples=4,
                           scale=Fraction(1, 4))
    check("profile demo carries residues", res.status is False)

    special = json.loads((fixture_dir / "classify_special.json").read_text())
    p1, p2, bdy = _load_pair(special)
    v = classify_pair(p1, p2, bdy)
    check("special fixture verdict",
          v.kind == KIND_SPECIAL and v.certificate is not None
          and verify_conjugation(p1, p2, v.certificate.sigma))

    refuted = json.loads((fixture_dir / "classify_refuted.json").read_text())
    p1, p2, bdy = _load_pair(refuted)
    v = classify_pair(p1, p2, bdy)
    check("refuted fixture verdict",
          v.kind == KIND_HOMOLOGICAL and v.lam == GaussianRational(1))

    print("selftest:", "ok" if failures == 0 else f"{failures} failures")
    return EXIT_OK if failures == 0 else EXIT_ERROR


# ---------------------------------------------------------------------------
# parser
# ---------------------------------------------------------------------------


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="paramflow",
        description="exact classification toolkit for unipotent "
                    "parameterized diffeomorphisms")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, order=False, numeric=False):
        p.add_argument("-o", "--output", help="write the JSON result here")
        p.add_argument("--format", choices=("human", "json"),
                       default="human",
                       help="print the JSON result to stdout instead of "
                            "the summary lines")
        if order:
            p.add_argument("--order", type=int, default=None,
                           help="truncation order override")
        if numeric:
            p.add_argument("--samples", type=int, default=12,
                           help="number of sampled fibers")
            p.add_argument("--seed", type=int, default=0)
            p.add_argument("--tol", type=float, default=1e-8,
                           help="numeric residue tolerance")

    p = sub.add_parser("exp", help="time-t flow of a nilpotent vertical field")
    p.add_argument("file")
    p.add_argument("-t", "--time", default="1",
                   help="flow time as an exact fraction")
    common(p)
    p.set_defaults(func=_cmd_exp)

    p = sub.add_parser("log", help="logarithm of a unipotent family")
    p.add_argument("file")
    common(p)
    p.set_defaults(func=_cmd_log)

    p = sub.add_parser("residue",
                       help="exact 1-variable residue, or a numeric "
                            "residue screen over sampled fibers")
    p.add_argument("file")
    p.add_argument("--at", default=None,
                   help="exact divisor point, e.g. 1/2 or 1/2,1/3")
    p.add_argument("--scale", default=None,
                   help="sample scale override for the screen")
    p.add_argument("--report", default=None,
                   help="directory for CSV and figure output")
    common(p, numeric=True)
    p.set_defaults(func=_cmd_residue)

    p = sub.add_parser("homeq",
                       help="build and optionally solve the homological "
                            "equation of a pair")
    p.add_argument("file")
    p.add_argument("--mode", choices=("check", "solve"), default="solve")
    common(p, order=True)
    p.set_defaults(func=_cmd_homeq)

    p = sub.add_parser("classify", help="full conjugacy classification")
    p.add_argument("file")
    p.add_argument("--report", default=None,
                   help="directory for CSV and figure output")
    common(p, order=True, numeric=True)
    p.set_defaults(func=_cmd_classify)

    p = sub.add_parser("conjugate",
                       help="construct and verify an exact conjugation")
    p.add_argument("file")
    common(p, order=True)
    p.set_defaults(func=_cmd_conjugate)

    p = sub.add_parser("selftest", help="run the built-in smoke checks")
    common(p)
    p.set_defaults(func=_cmd_selftest)

    return parser


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (OSError, json.JSONDecodeError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR
    except (SeriesError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
