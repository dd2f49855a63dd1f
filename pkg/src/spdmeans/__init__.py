"""Geometric means of symmetric positive definite matrices.

Mean constructors (two-matrix geodesic mean, the linear and cubic limit
recursions, the circular quasi-mean, and a composed four-matrix mean needing
a single limit process), together with exact permutation-group machinery and
an empirical lab for verifying invariance properties.
"""

from .errors import (
    DegreeMismatchError,
    DegreeTooLargeError,
    DimensionMismatchError,
    ExprParseError,
    InvalidOrderError,
    MalformedCompositionError,
    NotAGroupError,
    NotPositiveDefiniteError,
    NotSymmetricError,
    SpdMeansError,
    TupleFileError,
    UnsupportedDegreeError,
    UnsupportedPropertyError,
)
from .linalg import (
    MatrixTuple,
    OpCounters,
    SpdMatrix,
    diag_spd,
    identity_spd,
    make_spd,
    mat_power,
    mat_proot,
    mat_sqrt,
    sharp,
    sharp_t,
)
from .perm import (
    CosetTransversal,
    PermGroup,
    Permutation,
    alternating_group,
    check_homomorphism,
    compose,
    dihedral_group,
    generate,
    homomorphism_image,
    induced_action,
    is_normal,
    is_subgroup,
    kernel_of,
    match_named_group,
    named_group,
    parse_permutation,
    preimage_of,
    right_transversal,
    symmetric_group,
    transversal_from_reps,
    trivial_group,
)
from .means import (
    DEFAULT_CONFIG,
    IterationConfig,
    IterationReport,
    MeanKind,
    alm_mean,
    alm_step,
    bmp_mean,
    bmp_step,
    limit_iterate,
    mean_by_kind,
    new_mean4,
    new_mean_recursive,
    palfia_mean,
    palfia_step,
)
from .expr import (
    Input,
    Named,
    Permuted,
    Power,
    Sharp,
    SharpT,
    bracket4,
    canonical_key,
    composed_mean4_expr,
    eval_expr,
    exponent_vector,
    expr_arity,
    expr_to_str,
    mean_expr,
    parse_expr,
    permute_expr,
    reductive_stabilizer,
    resolve,
    weighted_sharp3,
)
from .lab import (
    PROPERTY_IDS,
    PROPERTY_TOLERANCES,
    PropertyReport,
    SpdSampler,
    StabilizerEstimate,
    check_property,
    estimate_stabilizer,
    map_preserves_group,
    sample_spd,
    sample_tuples,
)
from .fixtures import FIXTURE_NAMES, get_fixture
from .tuplefile import read_matrices, read_tuple, tuple_digest, write_matrices
from . import backends

__version__ = "0.1.0"
