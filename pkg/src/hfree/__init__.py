"""Construction and numerical certification of partial immersions and
partially free maps along distribution frames."""

from .expr import (
    EvalError,
    Expr,
    ParseError,
    diff,
    evaluate,
    free_vars,
    parse,
    simplify,
    substitute,
    to_str,
)
from .fields import (
    Chart,
    ChartMismatch,
    Frame,
    OutsideDomain,
    SmoothMap,
    VectorField,
    anticommutator,
    flat_norm_sq,
    frame_rank_check,
    lie_derivative,
)
from .jets import (
    BelowCriticalDimension,
    JetMatrix,
    RankReport,
    d1_exprs,
    d1_matrix,
    d2_exprs,
    d2_matrix,
    is_free_at,
    is_immersion_at,
    rank_check,
    s,
)
from .constructions import (
    BlockDecomposition,
    IdentityResidual,
    block_decomposition,
    compose,
    monomial_free_map,
    standard_frame,
    sym_square,
    verify_det_identity,
)
from .brackets import (
    RPStructure,
    SymplecticChart,
    canonical_bracket,
    contact_frame,
    hamiltonian_field,
    jacobi_residual,
    novikov_structure,
    rp_bracket,
    rp_hamiltonian_field,
)
from .gallery import Fixture, fixture, list_fixtures
from .checks import Report, run_check, run_fixture
from .manifest import Manifest, ManifestError, load_manifest, parse_manifest_text
from .sampling import SplitMix64, sample_points

__version__ = "0.1.0"
