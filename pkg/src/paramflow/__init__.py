"""Exact-arithmetic tools for unipotent parameterized diffeomorphisms."""
from .rational import GaussianRational, gr
from .series import (
    MultiSeries,
    SeriesError,
    NotXRegularError,
    NotDivisibleError,
    InsufficientOrderError,
    WeierstrassQuotRem,
    add,
    sub,
    mul,
    scale,
    unit_inverse,
    derivative,
    integrate_x,
    compose_x,
    eval_numeric,
    shear_to_x,
    weierstrass_divide,
    adic_expansion,
    divide_once,
    series_to_json,
    series_from_json,
)
from .boundary import (
    BoundaryError,
    BoundaryFactor,
    FactoredBoundary,
    boundary_to_json,
    boundary_from_json,
)
from .diffeo import (
    NotNilpotentError,
    NotUnipotentError,
    VerticalField,
    ParamDiffeo,
    flow,
    exp_vertical,
    log_updiffeo,
    compose,
    invert,
    conjugate,
    push_forward,
    unit_cofactor,
    linearize_1d,
    field_to_json,
    field_from_json,
    diffeo_to_json,
    diffeo_from_json,
)
from .residue import (
    sample_grid,
    fiber_restrict,
    fiber_restrict_numeric,
    contact_order,
    residue_1d,
    shift_1d,
    residue_at,
    residue_nonunipotent,
    ResiduePoint,
    FreeOfResidues,
    fiber_residue_profile,
    compare_profiles,
    free_of_residues,
)
from .homeq import (
    ResidueObstruction,
    HomEquation,
    SpecialSolution,
    NoSolution,
    build_homological,
    special_solve,
    verify_special,
    fibered_locus_generators,
    search_clearing_exponent,
)
from .classify import (
    ConjugationCertificate,
    Verdict,
    KIND_SPECIAL,
    KIND_RESIDUES,
    KIND_HOMOLOGICAL,
    KIND_INCONCLUSIVE,
    field_cofactor,
    build_conjugation,
    verify_conjugation,
    classify_pair,
)

__version__ = "0.1.0"
