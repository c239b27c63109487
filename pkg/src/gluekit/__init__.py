"""Gluing affine generic fibres with formal completions, in exact arithmetic."""

from .completion import CompletionModel, complete, split_holds, torsion_bound, torsion_split
from .errors import (
    AlgebraMismatch,
    CapExceeded,
    DegreeBoundInconclusive,
    GluekitError,
    IncompatibleDatum,
    NoExactSource,
    NotAUnit,
    NotIntegral,
    ParseError,
    PrecisionLoss,
    RegimeMismatch,
    SearchExhausted,
    UnsupportedRegime,
    VerificationFailed,
)
from .models import (
    ComponentTriple,
    IntegralPoint,
    gl_model,
    iwahori_membership,
    neron_gm_triple,
    neron_iso_test,
    specialize_point,
    two_disks_triple,
    unit_circle_triple,
)
from .modules import (
    ModuleGluingDatum,
    ModulePresentation,
    check_glueable,
    glue_module,
    is_vector_bundle_glued,
    prune,
    triple_of_module,
)
from .precision import Factor, PrecisionElement, TruncatedAlgebra, prec_add, prec_invert, prec_mul, refine
from .ring.base import BasePair
from .ring.ideal import AffineAlgebra, IdealPresentation, groebner_basis, ideal_membership, normal_form
from .ring.polynomial import OVER_K, OVER_R, MOD, PolyRing, Polynomial
from .triple import (
    AffineGluingTriple,
    canonical_triple,
    classify_triple,
    dense_image_check,
    membership,
    pullback_ring,
    reconstruct_global_sections,
    verify_glued,
)

__version__ = "0.1.0"
