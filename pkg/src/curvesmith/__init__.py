"""Construct elliptic curves over prime fields with a prescribed divisor of the group order."""

__version__ = "0.1.0"

from .classpoly import ClassPolynomial, QuadForm, class_number, hilbert_class_poly, reduced_forms
from .collision import CollisionReport, build_map, measure
from .construct import (
    ConstructionResult,
    SmoothPair,
    SubgroupSpec,
    TraceCertificate,
    cm_construct,
    cm_construct_average,
    naive_search,
    smooth_pair,
    subgroup_construct,
    validate_certificate,
)
from .curve import (
    Curve,
    CurveOrder,
    GroupStructure,
    Point,
    count_points,
    curve_from_j,
    division_polynomial,
    group_structure,
    j_invariant,
    mul_by_m_x_map,
    twist_orbit,
)
from .errors import *  # noqa: F401,F403
