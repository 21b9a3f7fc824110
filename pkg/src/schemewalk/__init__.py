from .config import (
    SchemeWalkConfig,
    SchemeCommandConfig,
    IfsCommandConfig,
    WalkCommandConfig,
    FusionCommandConfig,
)
from .exceptions import (
    SchemeWalkError,
    InputError,
    SerializationError,
    VertexCapExceeded,
    IntegerOverflowError,
    SchemeAxiomError,
    NotCommutativeError,
    EigenspaceSeparationError,
    FusionAxiomError,
    NormalizationError,
    TridiagonalityError,
    MomentOverflowError,
)
from .graphs import Graph, graph_from_adjacency, graph_from_edges, path_graph, cycle_graph, complete_graph, regular_tree
from .reports import AxiomCheck, VerificationReport
from .scheme_core import (
    AssociationScheme,
    IntersectionTensor,
    BoseMesnerSpectral,
    KreinTensor,
    build_johnson,
    build_grassmann,
    build_group_scheme,
    build_complete_scheme,
    build_distance_scheme,
    cyclic_group_table,
    symmetric_group_table,
    verify_scheme,
    intersection_numbers,
    class_inner_products,
    is_distance_ordered,
    primitive_idempotents,
    krein_parameters,
)
from .ifs import (
    Stratification,
    QuantumDecomposition,
    JacobiSequences,
    CAPFamily,
    stratify,
    quantum_decompose,
    jacobi_coefficients,
    jacobi_from_intersection_numbers,
    bosonic_sequences,
    fermionic_sequences,
    tridiagonal_from_jacobi,
    orthogonal_polynomials,
    spectral_measure,
    vacuum_moments,
    moments_from_jacobi,
    cap_operators,
)
from .walks import (
    ArcState,
    CoinSpec,
    LineState,
    TreeOrbitState,
    grover_coin,
    unitary_coin,
    rotation_coin,
    hadamard_coin,
    grover_walk_run,
    grover_walk_matrix,
    tree_orbit_walk_run,
    position_distribution,
    stratum_distribution,
    line_walk_run,
    split_step_run,
)
from .fusion import (
    FusionRing,
    AnyonModelData,
    FusionTreeSpace,
    fusion_ring,
    trivial_ring,
    ising_ring,
    ising_model,
    verify_fusion_ring,
    quantum_dimensions,
    perron_multiplicities,
    fusion_matrices,
    fusion_power,
    fusion_tree_space,
    total_quantum_dimension,
    central_charge,
    qutrit_encoding,
    verlinde_check,
    fusion_ring_from_krein,
)

__all__ = [
    "SchemeWalkConfig",
    "SchemeCommandConfig",
    "IfsCommandConfig",
    "WalkCommandConfig",
    "FusionCommandConfig",
    "SchemeWalkError",
    "InputError",
    "SerializationError",
    "VertexCapExceeded",
    "IntegerOverflowError",
    "SchemeAxiomError",
    "NotCommutativeError",
    "EigenspaceSeparationError",
    "FusionAxiomError",
    "NormalizationError",
    "TridiagonalityError",
    "MomentOverflowError",
    "Graph",
    "graph_from_adjacency",
    "graph_from_edges",
    "path_graph",
    "cycle_graph",
    "complete_graph",
    "regular_tree",
    "AxiomCheck",
    "VerificationReport",
    "AssociationScheme",
    "IntersectionTensor",
    "BoseMesnerSpectral",
    "KreinTensor",
    "build_johnson",
    "build_grassmann",
    "build_group_scheme",
    "build_complete_scheme",
    "build_distance_scheme",
    "cyclic_group_table",
    "symmetric_group_table",
    "verify_scheme",
    "intersection_numbers",
    "class_inner_products",
    "is_distance_ordered",
    "primitive_idempotents",
    "krein_parameters",
    "Stratification",
    "QuantumDecomposition",
    "JacobiSequences",
    "CAPFamily",
    "stratify",
    "quantum_decompose",
    "jacobi_coefficients",
    "jacobi_from_intersection_numbers",
    "bosonic_sequences",
    "fermionic_sequences",
    "tridiagonal_from_jacobi",
    "orthogonal_polynomials",
    "spectral_measure",
    "vacuum_moments",
    "moments_from_jacobi",
    "cap_operators",
    "ArcState",
    "CoinSpec",
    "LineState",
    "TreeOrbitState",
    "grover_coin",
    "unitary_coin",
    "rotation_coin",
    "hadamard_coin",
    "grover_walk_run",
    "grover_walk_matrix",
    "tree_orbit_walk_run",
    "position_distribution",
    "stratum_distribution",
    "line_walk_run",
    "split_step_run",
    "FusionRing",
    "AnyonModelData",
    "FusionTreeSpace",
    "fusion_ring",
    "trivial_ring",
    "ising_ring",
    "ising_model",
    "verify_fusion_ring",
    "quantum_dimensions",
    "perron_multiplicities",
    "fusion_matrices",
    "fusion_power",
    "fusion_tree_space",
    "total_quantum_dimension",
    "central_charge",
    "qutrit_encoding",
    "verlinde_check",
    "fusion_ring_from_krein",
]
