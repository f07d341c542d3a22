"""Exact curvature, geodesics and nilsolitons of 2-step nilpotent metric Lie algebras.

Modules:
    algebra     structure constants, block metrics, j-maps, validation
    mht         detection and classification of the modified H-type condition
    curvature   connection, Riemann/Ricci tensors, Ricci operator, eigen data
    geodesics   closed-form and spectral geodesics, RK4 oracle, totally geodesic tests
    soliton     nilsoliton detection and central extensions
    cli         the ``mhtype`` command
"""

from .algebra import BlockMetric, StepTwoAlgebra, Vector, central_extension, j_map, validate
from .curvature import isometry_coincidence, ricci, ricci_operator, riemann, scalar_curvature, sectional
from .geodesics import (
    classify_geodesic_hull,
    geodesic_closed_form,
    geodesic_general,
    geodesic_integrate,
    totally_geodesic_test,
)
from .mht import classify_phi, detect_mht
from .soliton import extension_soliton_check, nilsoliton_check

__version__ = "0.1.0"

__all__ = [
    "BlockMetric",
    "StepTwoAlgebra",
    "Vector",
    "central_extension",
    "classify_geodesic_hull",
    "classify_phi",
    "detect_mht",
    "extension_soliton_check",
    "geodesic_closed_form",
    "geodesic_general",
    "geodesic_integrate",
    "isometry_coincidence",
    "j_map",
    "nilsoliton_check",
    "ricci",
    "ricci_operator",
    "riemann",
    "scalar_curvature",
    "sectional",
    "totally_geodesic_test",
    "validate",
]
