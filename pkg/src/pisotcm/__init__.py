"""Pisot units, CM tori and the entropy of their lattice automorphisms."""

__version__ = "0.1.0"

from .balls import Ball
from .cmtorus import (
    CMField,
    CMTorus,
    CMType,
    LatticeAutomorphism,
    SimplicityVerdict,
    canonical_cm_type,
    enumerate_cm_types,
    make_cm_field,
    multiplication_matrix,
    period_matrix,
    simplicity_check,
    verify_descent,
)
from .dynamics import (
    NonTorsion,
    OrbitStats,
    TorusPoint,
    Translation,
    equidistribution,
    iterate,
    torsion_order,
)
from .entropy import (
    EntropyReport,
    check_entropy_bound,
    h1_eigenvalues,
    hpp_spectral_radius,
    topological_entropy,
)
from .errors import PrecisionExhausted, Rejection
from .numberfield import (
    FieldElement,
    NumberField,
    element_arith,
    embed,
    make_field,
    minimal_polynomial,
    norm_and_trace,
)
from .pisot import PisotCertificate, find_pisot_unit, generates_field, is_pisot_unit
from .polynomial import IntPolynomial, parse_polynomial, sturm_count
