"""Exact statistical-mechanics engine for random-quantum-circuit moments.

Computes Weingarten functions and triangular-lattice plaquette weights
symbolically, evaluates frame potentials of brickwork circuits exactly (two
independent routes) and by Monte Carlo, and evaluates domain-wall counts and
design-depth formulas.
"""

__version__ = "0.1.0"

from .errors import (
    BudgetExceededError,
    PoleError,
    SingularMatrixError,
    VerificationError,
)
from .exact import Polynomial, RationalFunction
from .perms import Perm, cycle_type, transposition_distance
from .characters import character, content_polynomial, irrep_dimension, partitions
from .weingarten import WeingartenTable, weingarten_table, wg_gram, wg_restricted, wg_symbolic
from .plaquette import (
    PlaquetteTable,
    WallSignature,
    asymptotic_check,
    build_table,
    classify,
    plaquette_weight,
    verify_rules,
)
from .lattice import (
    CircuitGeometry,
    FramePotentialResult,
    build_geometry,
    frame_potential_direct,
    frame_potential_special,
    frame_potential_transfer,
)
from .montecarlo import MCEstimate, circuit_trace, estimate_frame_potential, sample_haar_gate
from . import bounds

__all__ = [
    "BudgetExceededError",
    "PoleError",
    "SingularMatrixError",
    "VerificationError",
    "Polynomial",
    "RationalFunction",
    "Perm",
    "cycle_type",
    "transposition_distance",
    "character",
    "content_polynomial",
    "irrep_dimension",
    "partitions",
    "WeingartenTable",
    "weingarten_table",
    "wg_gram",
    "wg_restricted",
    "wg_symbolic",
    "PlaquetteTable",
    "WallSignature",
    "asymptotic_check",
    "build_table",
    "classify",
    "plaquette_weight",
    "verify_rules",
    "CircuitGeometry",
    "FramePotentialResult",
    "build_geometry",
    "frame_potential_direct",
    "frame_potential_special",
    "frame_potential_transfer",
    "MCEstimate",
    "circuit_trace",
    "estimate_frame_potential",
    "sample_haar_gate",
    "bounds",
]
