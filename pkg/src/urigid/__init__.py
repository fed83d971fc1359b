"""Universal-rigidity analysis of bar frameworks.

A bar framework is a simple connected graph realized by points in R^r; it is
universally rigid when no other realization in any dimension has the same bar
lengths without being a rigid-motion image.  This package decides and
certifies that property through equilibrium stress matrices, null-space
(Gale) bases of the augmented coordinate matrix, and affine-flex detection,
and double-checks verdicts with an independent numerical refutation search.
"""

from ._kernels import backend_name
from .affine import (
    FlexMotion,
    detect_quadric_at_infinity,
    edge_quadric_system,
    flex_motion_from_quadric,
    mean_centering_basis,
    missing_edge_matrix,
    missing_edge_system,
    missing_edge_system_canonical,
)
from .certify import (
    Certificate,
    CertifyOptions,
    VERDICT_AFFINE_FLEX,
    VERDICT_INCONCLUSIVE,
    VERDICT_UNIVERSALLY_RIGID,
    certify,
    refute_by_search,
    verify_certificate,
)
from .errors import FrameworkError, NumericalError, SchemaError, UrigidError
from .framework import (
    Configuration,
    Framework,
    Graph,
    augmented_matrix,
    check_spanning,
    congruent,
    distance_profile,
    equivalent,
    is_general_position,
    min_degree_check,
)
from .gale import canonical_gale, canonical_gale_product, gale_basis, gale_general_position_check
from .generators import (
    GeneratorSpec,
    lateration_graph,
    named_example,
    named_examples,
    random_general_position,
)
from .jsonio import framework_digest, load_framework, parse_framework, serialize_framework
from .numerics import TolerancePolicy, numeric_rank, nullspace_basis, psd_sqrt, sym_eigen
from .stress import (
    StressSearchOptions,
    assemble_stress,
    equilibrium_system,
    find_max_rank_psd_stress,
    max_rank_stress_search,
    reduced_stress,
    stress_space_basis,
    validate_stress,
)

__version__ = "0.1.0"

__all__ = [
    "Certificate",
    "CertifyOptions",
    "Configuration",
    "FlexMotion",
    "Framework",
    "FrameworkError",
    "GeneratorSpec",
    "Graph",
    "NumericalError",
    "SchemaError",
    "StressSearchOptions",
    "TolerancePolicy",
    "UrigidError",
    "VERDICT_AFFINE_FLEX",
    "VERDICT_INCONCLUSIVE",
    "VERDICT_UNIVERSALLY_RIGID",
    "assemble_stress",
    "augmented_matrix",
    "backend_name",
    "canonical_gale",
    "canonical_gale_product",
    "certify",
    "check_spanning",
    "congruent",
    "detect_quadric_at_infinity",
    "distance_profile",
    "edge_quadric_system",
    "equilibrium_system",
    "equivalent",
    "find_max_rank_psd_stress",
    "flex_motion_from_quadric",
    "framework_digest",
    "gale_basis",
    "gale_general_position_check",
    "is_general_position",
    "lateration_graph",
    "load_framework",
    "max_rank_stress_search",
    "mean_centering_basis",
    "min_degree_check",
    "missing_edge_matrix",
    "missing_edge_system",
    "missing_edge_system_canonical",
    "named_example",
    "named_examples",
    "numeric_rank",
    "nullspace_basis",
    "parse_framework",
    "psd_sqrt",
    "random_general_position",
    "reduced_stress",
    "refute_by_search",
    "serialize_framework",
    "stress_space_basis",
    "sym_eigen",
    "validate_stress",
    "verify_certificate",
]
