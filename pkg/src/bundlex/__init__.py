"""Fill the holes of a C^n bundle over a planar domain and check the result by sampling."""

__version__ = "0.1.0"

from .autgroup import (
    Affine,
    AutomorphismWord,
    OverShear,
    Shear,
    eval_word,
    expand_polynomial,
    henon_word,
    invert_word,
)
from .extension import (
    BundleSpec,
    ExtendedBundle,
    HoleGluing,
    builtin_example,
    extend_bundle,
    extend_case1,
    refine_hole,
)
from .flows import flow_at, matrix_log, recognize_flow
from .geometry import DiskSpec, DomainSpec, collar_chart, cousin_solve, validate_domain
from .polynomial import Polynomial
from .verify import verify_cocycle
