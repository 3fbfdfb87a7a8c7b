"""Command-line interface.

Exit codes: 0 success, 1 mathematical rejection or failed verification,
2 usage error.
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys
from fractions import Fraction

import mpmath
from mpmath import mp

from . import __version__, linalg
from .certificate import (
    PipelineConfig,
    _cm_types,
    build_certificate,
    dumps,
    enclosure_json,
    exact_matrix,
    verify_certificate,
)
from .cmtorus import (
    descent_tolerance,
    make_cm_field,
    multiplication_matrix,
    period_matrix,
    simplicity_check,
    verify_descent,
)
from .dynamics import (
    TorusPoint,
    Translation,
    equidistribution,
    iterate,
    torsion_order,
    write_counts_csv,
)
from .entropy import check_entropy_bound, entropy_from_alpha, symbolic_entropy
from .errors import PolynomialSyntaxError, PrecisionExhausted, Rejection
from .numberfield import DEFAULT_PRECISION, GUARD_BITS, FieldElement, make_field
from .pisot import find_pisot_unit, is_pisot_unit
from .polynomial import parse_polynomial

PRECISION_ENV = "PISOTCM_PRECISION"

log = logging.getLogger("pisotcm")


class UsageError(Exception):
    pass


def _default_precision() -> int:
    raw = os.environ.get(PRECISION_ENV)
    if raw is None:
        return DEFAULT_PRECISION
    try:
        return int(raw)
    except ValueError:
        raise UsageError(f"{PRECISION_ENV}={raw!r} is not an integer") from None


def parse_coords(text: str) -> list:
    text = text.strip().replace("−", "-")
    if not (text.startswith("[") and text.endswith("]")):
        raise UsageError(f"expected a bracketed coordinate list, got {text!r}")
    body = text[1:-1].strip()
    if not body:
        return []
    try:
        return [Fraction(t.strip()) for t in body.split(",")]
    except ValueError:
        raise UsageError(f"bad coordinate list {text!r}") from None


def _emit(args, payload: dict, lines: list):
    if args.json:
        print(json.dumps(payload, indent=2, ensure_ascii=False))
    else:
        print("\n".join(lines))


def _field(args):
    return make_field(parse_polynomial(args.poly), args.precision)


def _alpha(args, K):
    if args.alpha:
        return FieldElement(K, parse_coords(args.alpha)), None
    found = find_pisot_unit(K, args.height, max_results=1, precision_bits=args.precision)
    if not found:
        raise Rejection("no-pisot-unit", f"no Pisot unit of height <= {args.height}")
    return found[0].alpha, found[0]


def _nstr(b, digits=20):
    return mpmath.nstr(b.mid, digits)


# ---- subcommands ------------------------------------------------------------

def cmd_analyze_field(args):
    K = _field(args)
    roots = K.root_enclosures()
    payload = {
        "polynomial": str(K.defining_poly),
        "degree": K.degree,
        "signature": list(K.signature),
        "totally_real": K.is_totally_real,
        "irreducibility": K.irreducibility,
        "irreducibility_evidence": K.irreducibility_evidence,
        "root_enclosures": [enclosure_json(r, args.precision) for r in roots],
    }
    lines = [
        f"field      Q[x]/({K.defining_poly})",
        f"degree     {K.degree}",
        f"signature  {K.signature}  ({'totally real' if K.is_totally_real else 'not totally real'})",
        f"irreducible {K.irreducibility} ({K.irreducibility_evidence})",
    ] + [f"root {i}     {_nstr(r)} ± {mpmath.nstr(r.rad, 3)}" for i, r in enumerate(roots)]
    _emit(args, payload, lines)
    return 0


def cmd_find_pisot(args):
    K = _field(args)
    certs = find_pisot_unit(K, args.height, args.max_results, args.precision)
    payload = {
        "field": str(K.defining_poly),
        "height": args.height,
        "results": [
            {
                "alpha": [str(c) for c in cert.alpha.coords],
                "alpha_text": str(cert.alpha),
                "minimal_polynomial": str(cert.minimal_poly),
                "norm": str(cert.norm),
                "sturm_evidence": cert.sturm_evidence,
                "dominant_root": enclosure_json(cert.dominant_root, args.precision),
                "conjugates": [enclosure_json(c, args.precision) for c in cert.conjugates],
            }
            for cert in certs
        ],
    }
    lines = [f"{len(certs)} Pisot unit(s) of height <= {args.height} in Q[x]/({K.defining_poly})"]
    for cert in certs:
        lines.append(
            f"  α = {str(cert.alpha):<16} minpoly {cert.minimal_poly}  norm {cert.norm:+d}  "
            f"dominant {_nstr(cert.dominant_root, 12)}"
        )
    _emit(args, payload, lines)
    return 0


def cmd_build_cm(args):
    K = _field(args)
    E = make_cm_field(K, FieldElement(K, parse_coords(args.delta)), args.precision)
    alpha, _ = _alpha(args, K)
    L = multiplication_matrix(E, alpha, args.precision)
    tol = descent_tolerance(args.precision)
    tori = []
    lines = [f"E = K(√δ), K = Q[x]/({K.defining_poly}), δ = {E.delta}", f"α = {alpha}", "M ="]
    lines += ["  " + " ".join(f"{x:>3}" for x in row) for row in L.matrix]
    lines.append(f"det M = {linalg.det(L.matrix)}")
    for I in _cm_types(E, args.cm_type):
        T = period_matrix(E, I, args.precision)
        residual = verify_descent(T, L)
        verdict = simplicity_check(E, I, args.height, args.precision)
        tori.append({
            "cm_type": I.to_dict(),
            "period_matrix": [[enclosure_json(x, args.precision) for x in row] for row in T.period_matrix],
            "descent_residual": mpmath.nstr(residual, 5),
            "descent_ok": bool(residual <= tol),
            "simplicity": verdict.to_dict(),
        })
        lines.append(
            f"CM type {I.to_dict()}: descent residual {mpmath.nstr(residual, 3)}, "
            f"simplicity {verdict.status} ({verdict.reason})"
        )
    payload = {
        "alpha": [str(c) for c in alpha.coords],
        "multiplication_matrix": exact_matrix(L.matrix),
        "det": str(linalg.det(L.matrix)),
        "cm_types": tori,
    }
    _emit(args, payload, lines)
    return 0 if all(t["descent_ok"] for t in tori) else 1


def cmd_entropy(args):
    K = _field(args)
    E = make_cm_field(K, FieldElement(K, parse_coords(args.delta)), args.precision)
    alpha, cert = _alpha(args, K)
    if cert is None:
        try:
            cert = is_pisot_unit(alpha, args.precision)
        except Rejection as exc:
            log.warning("alpha is not a certified Pisot unit (%s); bound check skipped", exc.reason)
    I = _cm_types(E, args.cm_type)[0]
    report = entropy_from_alpha(E, I, alpha, args.precision, certificate=cert)
    payload = {
        "alpha": [str(c) for c in alpha.coords],
        "lambdas": [enclosure_json(x, args.precision) for x in report.lambdas],
        "spectral_radii": [enclosure_json(x, args.precision) for x in report.r],
        "h_top": enclosure_json(report.h_top, args.precision),
    }
    lines = [f"α = {alpha}"]
    lines += [f"λ_{j + 1} = {_nstr(x)}" for j, x in enumerate(report.lambdas)]
    lines += [f"r_{p} = {_nstr(x)}" for p, x in enumerate(report.r)]
    lines.append(f"h_top = {_nstr(report.h_top, 25)} ± {mpmath.nstr(report.h_top.rad, 3)}")
    if cert is not None:
        bound = check_entropy_bound(report, cert)
        payload["symbolic"] = symbolic_entropy(cert)
        payload["bound_holds"] = bound.holds
        payload["equality_holds"] = bound.equality
        lines.append(f"h_top = {symbolic_entropy(cert)}: bound {bound.holds}, equality {bound.equality}")
    _emit(args, payload, lines)
    return 0


def cmd_simulate(args):
    K = _field(args)
    E = make_cm_field(K, FieldElement(K, parse_coords(args.delta)), args.precision)
    alpha, _ = _alpha(args, K)
    L = multiplication_matrix(E, alpha, args.precision)
    dim = L.dimension
    payload = {"alpha": [str(c) for c in alpha.coords]}
    lines = [f"f_α with α = {alpha} on R^{dim}/Z^{dim}"]
    if args.denominator:
        q = args.denominator
        start = TorusPoint(tuple([Fraction(1, q)] + [Fraction(0)] * (dim - 1)))
        orbit = iterate(L, start, q ** dim)
        payload["exact"] = {"start": [str(c) for c in start.coords], "period": orbit.period,
                            "order_mod_q": linalg.order_mod(L.matrix, q)}
        lines.append(f"exact orbit of {tuple(map(str, start.coords))}: period {orbit.period}, "
                     f"order of M mod {q}: {payload['exact']['order_mod_q']}")
    if args.torsion:
        point = TorusPoint(tuple(parse_coords(args.torsion)))
        order = torsion_order(point)
        payload["torsion_order"] = order
        lines.append(f"torsion order of {args.torsion}: {order}")
    target = L
    if args.translate:
        shift = [float(c) for c in parse_coords(args.translate)]
        target = Translation(TorusPoint(tuple(shift), "float"))
    try:
        stats = equidistribution(target, None, args.N, args.k, seed=args.seed)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    payload["equidistribution"] = stats.to_dict()
    lines.append(f"N = {stats.iterations}, {args.k}^{dim} cells: hit fraction {stats.hit_fraction} "
                 f"= {float(stats.hit_fraction):.4f}, discrepancy {float(stats.discrepancy):.3g}")
    if args.csv:
        write_counts_csv(stats, args.csv, dim)
    _emit(args, payload, lines)
    return 0


def cmd_certify(args):
    dynamics = None
    if args.N is not None:
        dynamics = {"N": args.N, "k": args.k, "seed": args.seed}
    try:
        config = PipelineConfig(
            field_poly=args.poly,
            delta=parse_coords(args.delta),
            height=args.height,
            precision_bits=args.precision,
            cm_type=args.cm_type,
            dynamics=dynamics,
        )
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    cert = build_certificate(config, timestamp=not args.no_timestamp)
    text = dumps(cert)
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
        if not args.json:
            print(f"certificate written to {args.out}: h_top = {cert['entropy']['h_top']['center']}, "
                  f"det M = {cert['torus']['det']}, "
                  f"simplicity = {cert['torus']['cm_types'][0]['simplicity']['status']}")
    else:
        sys.stdout.write(text)
    return 0


def cmd_verify(args):
    try:
        with open(args.certificate, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise UsageError(str(exc)) from None
    try:
        cert = json.loads(text)
    except json.JSONDecodeError as exc:
        result_failures = [f"malformed: {exc}"]
    else:
        result_failures = verify_certificate(cert).failures
    if args.json:
        print(json.dumps({"ok": not result_failures, "failures": result_failures}, indent=2))
    elif result_failures:
        for f in result_failures:
            print(f"FAIL {f}")
    else:
        print("certificate verified")
    return 1 if result_failures else 0


# ---- argument parsing -------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="pisotcm", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--json", action="store_true", help="machine-readable output")
    common.add_argument("--precision", type=int, default=None, help="working precision in bits (default 128)")
    common.add_argument("-v", "--verbose", action="store_true")

    poly = argparse.ArgumentParser(add_help=False)
    poly.add_argument("--poly", required=True, help='defining polynomial, e.g. "x^2-x-1" or "[-1,-1,1]"')

    cm = argparse.ArgumentParser(add_help=False)
    cm.add_argument("--delta", required=True, help="delta in K as ascending power-basis coordinates")
    cm.add_argument("--alpha", help="unit alpha as coordinates (default: first Pisot unit found)")
    cm.add_argument("--cm-type", default="canonical", help="canonical | all | index")

    height = argparse.ArgumentParser(add_help=False)
    height.add_argument("--height", type=int, default=10)

    sub.add_parser("analyze-field", parents=[common, poly], help="degree, signature, roots").set_defaults(
        func=cmd_analyze_field)
    p = sub.add_parser("find-pisot", parents=[common, poly, height], help="search Pisot units")
    p.add_argument("--max-results", type=int, default=None)
    p.set_defaults(func=cmd_find_pisot)
    sub.add_parser("build-cm", parents=[common, poly, cm, height], help="period matrix, M, descent, simplicity"
                   ).set_defaults(func=cmd_build_cm)
    sub.add_parser("entropy", parents=[common, poly, cm, height], help="spectral radii and entropy"
                   ).set_defaults(func=cmd_entropy)

    p = sub.add_parser("simulate", parents=[common, poly, cm, height], help="orbit statistics")
    p.add_argument("--N", type=int, default=200_000)
    p.add_argument("--k", type=int, default=5)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--denominator", type=int, help="also run an exact orbit of (1/q, 0, ...)")
    p.add_argument("--torsion", help="report the torsion order of a rational point")
    p.add_argument("--translate", help="iterate a translation by these coordinates instead of f_alpha")
    p.add_argument("--csv", help="write binned counts to this CSV file")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("certify", parents=[common, poly, height], help="run the full pipeline")
    p.add_argument("--delta", required=True)
    p.add_argument("--cm-type", default="canonical")
    p.add_argument("--N", type=int, default=None, help="orbit length for the equidistribution summary")
    p.add_argument("--k", type=int, default=5)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", help="certificate path (default stdout)")
    p.add_argument("--no-timestamp", action="store_true")
    p.set_defaults(func=cmd_certify)

    p = sub.add_parser("verify", parents=[common], help="re-check a certificate")
    p.add_argument("certificate")
    p.set_defaults(func=cmd_verify)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    try:
        if args.precision is None:
            args.precision = _default_precision()
        if args.precision < 64:
            raise UsageError("precision must be at least 64 bits")
        return args.func(args)
    except (UsageError, PolynomialSyntaxError) as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 2
    except Rejection as exc:
        print(f"rejected: {exc}", file=sys.stderr)
        return 1
    except PrecisionExhausted as exc:
        print(f"precision exhausted: {exc}", file=sys.stderr)
        return 1
    except ValueError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
