"""End-to-end pipeline producing a JSON certificate, and its verifier.

Exact data (coefficients, matrices, rationals) are decimal strings;
enclosures are ``{"center", "radius"}`` or ``{"re", "im", "radius"}``
decimal strings whose radius already absorbs the decimal conversion error.
"""

from __future__ import annotations

import datetime
import hashlib
import json
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

import mpmath
from mpmath import mp

from . import __version__, linalg
from .balls import Ball, digits_for, to_decimal
from .cmtorus import (
    ORDER_CAVEAT,
    CMType,
    LatticeAutomorphism,
    descent_tolerance,
    enumerate_cm_types,
    make_cm_field,
    multiplication_matrix,
    period_matrix,
    simplicity_check,
    verify_descent,
)
from .dynamics import equidistribution
from .entropy import (
    check_entropy_bound,
    entropy_from_alpha,
    exterior_power_max,
    has_finite_order_below,
    symbolic_entropy,
)
from .errors import Rejection
from .numberfield import GUARD_BITS, FieldElement, make_field, minimal_polynomial
from .pisot import find_pisot_unit
from .polynomial import IntPolynomial, parse_polynomial, sturm_count

SCHEMA = 1
UNVERIFIED_KEYS = ("created_at",)
# bounds re-derived by the independent checks rather than compared textually
RECHECKED_KEYS = ("descent_residual", "period_matrix_digest")


@dataclass
class PipelineConfig:
    field_poly: str
    delta: list
    height: int = 10
    precision_bits: int = 128
    cm_type: str = "canonical"
    dynamics: Optional[dict] = None

    def __post_init__(self):
        if self.height < 1:
            raise ValueError("height must be >= 1")
        if self.precision_bits < 64:
            raise ValueError("precision_bits must be >= 64")
        if self.cm_type not in ("canonical", "all") and not str(self.cm_type).isdigit():
            raise ValueError(f"cm_type must be 'canonical', 'all' or an index, not {self.cm_type!r}")
        self.delta = [str(Fraction(d)) for d in self.delta]
        self.cm_type = str(self.cm_type)
        if self.dynamics is not None:
            self.dynamics = {k: int(self.dynamics[k]) for k in ("N", "k", "seed")}

    def to_dict(self) -> dict:
        out = {
            "field_poly": str(parse_polynomial(self.field_poly)),
            "delta": list(self.delta),
            "height": self.height,
            "precision_bits": self.precision_bits,
            "cm_type": self.cm_type,
        }
        if self.dynamics is not None:
            out["dynamics"] = dict(self.dynamics)
        return out

    @classmethod
    def from_dict(cls, d: dict) -> "PipelineConfig":
        return cls(
            field_poly=d["field_poly"],
            delta=d["delta"],
            height=int(d["height"]),
            precision_bits=int(d["precision_bits"]),
            cm_type=str(d["cm_type"]),
            dynamics=d.get("dynamics"),
        )


# ---- serialization helpers --------------------------------------------------

def enclosure_json(b: Ball, bits: int) -> dict:
    digits = digits_for(bits)
    with mp.workprec(bits + GUARD_BITS):
        if b.is_real:
            c, err = to_decimal(b.mid, digits)
            return {"center": c, "radius": _radius_text(b.rad + err)}
        re, e1 = to_decimal(b.mid.real, digits)
        im, e2 = to_decimal(b.mid.imag, digits)
        return {"re": re, "im": im, "radius": _radius_text(b.rad + e1 + e2)}


def _radius_text(r) -> str:
    # round the radius up to 3 significant digits
    if r == 0:
        return "0"
    e = int(mpmath.floor(mpmath.log10(r))) - 2
    scaled = mpmath.ceil(r / mpmath.mpf(10) ** e)
    return f"{int(scaled)}e{e}"


def enclosure_from_json(d: dict, bits: int) -> Ball:
    with mp.workprec(bits + GUARD_BITS):
        if "center" in d:
            return Ball(mpmath.mpf(d["center"]), mpmath.mpf(d["radius"]))
        return Ball(mpmath.mpc(mpmath.mpf(d["re"]), mpmath.mpf(d["im"])), mpmath.mpf(d["radius"]))


def exact_list(xs) -> list:
    return [str(x) for x in xs]


def exact_matrix(rows) -> list:
    return [[str(x) for x in row] for row in rows]


def matrix_from_json(rows) -> tuple:
    return tuple(tuple(int(x) for x in row) for row in rows)


def _cm_types(E, choice: str) -> list:
    if choice == "canonical":
        return [enumerate_cm_types(E, "canonical")]
    types = enumerate_cm_types(E, "all")
    if choice == "all":
        return types
    idx = int(choice)
    if not 0 <= idx < len(types):
        raise ValueError(f"CM type index {idx} outside [0, {len(types)})")
    return [types[idx]]


def _digest(entries) -> str:
    return hashlib.sha256(json.dumps(entries, sort_keys=True).encode()).hexdigest()


# ---- certify ----------------------------------------------------------------

def build_certificate(config: PipelineConfig, timestamp: bool = True) -> dict:
    bits = config.precision_bits
    poly = parse_polynomial(config.field_poly)
    K = make_field(poly, bits)
    if not K.is_totally_real:
        raise Rejection("not-totally-real", f"{K} has signature {K.signature}")
    delta = FieldElement(K, [Fraction(d) for d in config.delta])
    E = make_cm_field(K, delta, bits)

    found = find_pisot_unit(K, config.height, max_results=1, precision_bits=bits)
    if not found:
        raise Rejection("no-pisot-unit", f"no Pisot unit of height <= {config.height} in {K}")
    cert = found[0]
    alpha = cert.alpha

    L = multiplication_matrix(E, alpha, bits)
    chi = [int(c) for c in linalg.charpoly(L.matrix)]
    mu_sq = (cert.minimal_poly ** 2).coefficients
    if tuple(chi) != tuple(mu_sq):
        raise Rejection("charpoly-mismatch", "char(M) differs from the squared minimal polynomial")
    det = linalg.det(L.matrix)

    tori = []
    reports = []
    tol = descent_tolerance(bits)
    for I in _cm_types(E, config.cm_type):
        T = period_matrix(E, I, bits)
        residual = verify_descent(T, L)
        if not residual <= tol:
            raise Rejection("descent-residual", f"residual {mpmath.nstr(residual, 5)} above {mpmath.nstr(tol, 5)}")
        entries = [[enclosure_json(x, bits) for x in row] for row in T.period_matrix]
        verdict = simplicity_check(E, I, config.height, bits)
        report = entropy_from_alpha(E, I, alpha, bits, certificate=cert)
        reports.append(report)
        tori.append({
            "cm_type": I.to_dict(),
            "period_matrix": entries,
            "period_matrix_digest": _digest(entries),
            "real_determinant": enclosure_json(T.real_determinant, bits),
            "descent_residual": _radius_text(residual),
            "simplicity": verdict.to_dict(),
        })

    report = reports[0]
    with mp.workprec(bits + GUARD_BITS):
        invariant = all(
            all(a.overlaps(b) for a, b in zip(rep.r, report.r)) and rep.h_top.overlaps(report.h_top)
            for rep in reports
        )
    if not invariant:
        raise Rejection("entropy-not-invariant", "entropy reports differ between CM types")
    bound = check_entropy_bound(report, cert)
    if not (bound.holds and bound.equality):
        raise Rejection("entropy-bound", f"h_top {report.h_top} vs 2 log alpha {bound.two_log_alpha}")
    oracle = exterior_power_max(L, bits)
    with mp.workprec(bits + GUARD_BITS):
        top_r = report.r[report.maximizing_p]
        if not oracle.overlaps(top_r):
            raise Rejection("oracle-mismatch", f"exterior powers {oracle} vs subset products {top_r}")
        positive = report.h_top.certainly_positive()
    finite_order = has_finite_order_below(L.matrix, 12)

    out = {
        "schema": SCHEMA,
        "tool_version": __version__,
        "config": config.to_dict(),
        "order_caveat": ORDER_CAVEAT,
        "field": {
            "polynomial": str(K.defining_poly),
            "coefficients": exact_list(K.defining_poly.coefficients),
            "degree": K.degree,
            "signature": list(K.signature),
            "irreducibility": K.irreducibility,
            "irreducibility_evidence": K.irreducibility_evidence,
            "root_enclosures": [enclosure_json(r, bits) for r in K.root_enclosures()],
        },
        "pisot": {
            "alpha": exact_list(alpha.coords),
            "minimal_polynomial": exact_list(cert.minimal_poly.coefficients),
            "norm": str(cert.norm),
            "sturm_evidence": dict(cert.sturm_evidence),
            "dominant_root": {
                "lower_bound": str(cert.dominant_lower_bound),
                "upper_bound": str(cert.dominant_upper_bound),
                "enclosure": enclosure_json(cert.dominant_root, bits),
            },
            "conjugates": [enclosure_json(c, bits) for c in cert.conjugates],
        },
        "torus": {
            "delta": exact_list(delta.coords),
            "order_basis": list(E.order_basis),
            "multiplication_matrix": exact_matrix(L.matrix),
            "det": str(det),
            "charpoly": exact_list(chi),
            "cm_types": tori,
        },
        "entropy": {
            "lambdas": [enclosure_json(x, bits) for x in report.lambdas],
            "spectral_radii": [enclosure_json(x, bits) for x in report.r],
            "maximizing_p": report.maximizing_p,
            "h_top": enclosure_json(report.h_top, bits),
            "symbolic": symbolic_entropy(cert),
            "two_log_alpha": enclosure_json(bound.two_log_alpha, bits),
            "bound_holds": bound.holds,
            "equality_holds": bound.equality,
            "cm_type_invariant": invariant,
            "exterior_power_max": enclosure_json(oracle, bits),
            "infinite_order": {
                "entropy_positive": positive,
                "identity_power_up_to_12": finite_order,
            },
        },
    }
    if config.dynamics is not None:
        d = config.dynamics
        stats = equidistribution(L, None, d["N"], d["k"], seed=d["seed"])
        out["dynamics"] = stats.to_dict()
    if timestamp:
        out["created_at"] = datetime.datetime.now(datetime.timezone.utc).isoformat(timespec="seconds")
    return out


def dumps(cert: dict) -> str:
    return json.dumps(cert, indent=2, ensure_ascii=False) + "\n"


# ---- verify -----------------------------------------------------------------

@dataclass
class VerifyResult:
    failures: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.failures

    def fail(self, kind: str, detail: str):
        self.failures.append(f"{kind}: {detail}")


def _is_enclosure(d) -> bool:
    return isinstance(d, dict) and "radius" in d and ("center" in d or ("re" in d and "im" in d))


def _compare(stored, fresh, path, bits, result: VerifyResult):
    if _is_enclosure(fresh):
        if not _is_enclosure(stored):
            result.fail("mismatch", f"{path}: expected an enclosure")
            return
        try:
            a, b = enclosure_from_json(stored, bits), enclosure_from_json(fresh, bits)
        except (ValueError, TypeError):
            result.fail("mismatch", f"{path}: unreadable enclosure")
            return
        with mp.workprec(bits + GUARD_BITS):
            if not a.overlaps(b):
                result.fail("enclosure", f"{path}: stored {stored} disagrees with recomputed {fresh}")
        return
    if isinstance(fresh, dict):
        if not isinstance(stored, dict):
            result.fail("mismatch", f"{path}: expected an object")
            return
        for key in sorted(set(fresh) | set(stored)):
            if key in UNVERIFIED_KEYS or key in RECHECKED_KEYS:
                continue
            if key not in stored or key not in fresh:
                result.fail("mismatch", f"{path}.{key}: present on one side only")
                continue
            _compare(stored[key], fresh[key], f"{path}.{key}", bits, result)
        return
    if isinstance(fresh, list):
        if not isinstance(stored, list) or len(stored) != len(fresh):
            result.fail("mismatch", f"{path}: list length differs")
            return
        for i, (s, f) in enumerate(zip(stored, fresh)):
            _compare(s, f, f"{path}[{i}]", bits, result)
        return
    if stored != fresh:
        result.fail("mismatch", f"{path}: stored {stored!r}, recomputed {fresh!r}")


def _independent_checks(cert: dict, result: VerifyResult):
    """Checks that read the stored exact data directly, independent of the recomputation."""
    config = PipelineConfig.from_dict(cert["config"])
    bits = config.precision_bits
    K = make_field(parse_polynomial(config.field_poly), bits)
    delta = FieldElement(K, [Fraction(x) for x in cert["torus"]["delta"]])
    E = make_cm_field(K, delta, bits)
    alpha = FieldElement(K, [Fraction(x) for x in cert["pisot"]["alpha"]])

    stored_mu = IntPolynomial(tuple(int(c) for c in cert["pisot"]["minimal_polynomial"]))
    if stored_mu != minimal_polynomial(alpha):
        result.fail("pisot-minimal-polynomial", f"stored {stored_mu} is not the minimal polynomial of alpha")
    evidence = cert["pisot"]["sturm_evidence"]
    if sturm_count(stored_mu, (1, None)) != evidence.get("(1, inf)") or \
            sturm_count(stored_mu, (-1, 1)) != evidence.get("(-1, 1)"):
        result.fail("pisot-sturm", "Sturm counts of the stored minimal polynomial disagree with the evidence")
    lo = Fraction(cert["pisot"]["dominant_root"]["lower_bound"])
    hi = Fraction(cert["pisot"]["dominant_root"]["upper_bound"])
    if not lo > 1 or sturm_count(stored_mu, (lo, hi)) != 1:
        result.fail("pisot-dominant-root", f"({lo}, {hi}] does not isolate a root > 1 of {stored_mu}")

    matrix = matrix_from_json(cert["torus"]["multiplication_matrix"])
    n = 2 * K.degree
    if len(matrix) != n or any(len(r) != n for r in matrix):
        result.fail("descent-residual", "multiplication matrix has the wrong shape")
        return
    L = LatticeAutomorphism(matrix, alpha, tuple(multiplication_matrix(E, alpha, bits).embeddings))
    tol = descent_tolerance(bits)
    for entry in cert["torus"]["cm_types"]:
        if entry.get("period_matrix_digest") != _digest(entry["period_matrix"]):
            result.fail("digest", f"period matrix digest mismatch for CM type {entry['cm_type']}")
        I = CMType(tuple(entry["cm_type"]["ordering"]), tuple(entry["cm_type"]["signs"]))
        residual = verify_descent(period_matrix(E, I, bits), L)
        if not residual <= tol:
            result.fail("descent-residual", f"Pi*M - D*Pi = {mpmath.nstr(residual, 5)} for CM type {I.to_dict()}")
    if abs(linalg.det(matrix)) != 1:
        result.fail("det", f"|det M| = {abs(linalg.det(matrix))} != 1")


def verify_certificate(cert: dict) -> VerifyResult:
    result = VerifyResult()
    if not isinstance(cert, dict) or cert.get("schema") != SCHEMA:
        result.fail("schema", f"unsupported schema {cert.get('schema') if isinstance(cert, dict) else None!r}")
        return result
    try:
        config = PipelineConfig.from_dict(cert["config"])
        _independent_checks(cert, result)
        fresh = build_certificate(config, timestamp=False)
    except Rejection as exc:
        result.fail(exc.reason, exc.detail)
        return result
    except (KeyError, ValueError, TypeError) as exc:
        result.fail("malformed", repr(exc))
        return result
    _compare(cert, fresh, "$", config.precision_bits, result)
    return result
