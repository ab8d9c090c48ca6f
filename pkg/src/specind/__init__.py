"""Exact desk-scale tools for spectral-independence certificates.

The package computes Gibbs distributions of small constraint models exactly,
measures pairwise influence and its largest eigenvalue under every pinning,
builds stability regions for named edge-function families, converts boundary
distances into eigenvalue bounds, and cross-checks the results with chain
diagnostics, randomized zero probes, and an exact even-subgraph-to-Ising
sample transform.
"""

from .errors import (
    CapExceededError,
    InternalError,
    NonConvergenceError,
    ParseError,
    ValidationError,
)
from .graphs import Graph, complete_graph, cycle_graph, path_graph, star_graph
from .models import (
    DEFAULT_CONFIG_CAP,
    DEFAULT_PINNING_CAP,
    EMPTY_PINNING,
    NAMED_FAMILIES,
    SPECIAL_SPIN,
    BinarySymmetricHolant,
    CubeFourierModel,
    FeasiblePairs,
    Pinning,
    SiteSpace,
    TensorNetworkModel,
    VertexSpinModel,
    build_named_model,
    enumerate_configurations,
    enumerate_pinnings,
    feasible_configurations,
    feasible_pairs,
    is_feasible_pinning,
    weight,
)
from .multiaffine import MultiAffinePolynomial
from .exact import (
    EigmaxResult,
    GibbsTable,
    InfluenceMatrix,
    ZeroScanReport,
    eigmax,
    gibbs_table,
    influence_eigmax,
    influence_matrix,
    marginal,
    marginal_bound,
    partition_function,
    partition_zero_scan,
    pin_polynomial,
    to_multiaffine,
    uniform_field_coefficients,
    zero_scan,
)
from .regions import (
    ClosedDiskComplement,
    DistanceResult,
    Intersection,
    Inverted,
    NegMinkowskiProductComplement,
    NegMinkowskiSquareComplement,
    OpenDisk,
    OpenHalfPlane,
    Region,
    Scaled,
    asano_ruelle_edge_region,
    cardioid_complement,
    delta,
    describe,
    dist_to_boundary,
    distance_report,
    halfplane_square_complement,
    neg_minkowski_complement,
    parse_region,
    same_component,
)
from .stability import (
    ETA_VARIANTS,
    CertificationResult,
    EtaCertificate,
    FamilyRegion,
    MixingTimeEstimate,
    RealPolynomial,
    TwoSpinRootsReport,
    certify_model,
    check_two_spin_roots,
    cset_distance_bound,
    eta_bound,
    even_subgraph_local_polynomial,
    even_subgraph_root_disk,
    even_subgraph_t,
    local_polynomial,
    mixing_time_formula,
    poly_roots,
    stability_region_for_family,
    two_spin_polynomial,
    two_spin_recursion_coefficient_deltas,
    two_spin_recursion_residual,
)
from .glauber import (
    TRANSITION_STATE_CAP,
    ChainRun,
    ChainState,
    EmpiricalTv,
    ErgodicityReport,
    MixingReport,
    TraceRow,
    TransitionSystem,
    config_hash,
    ergodicity_check,
    estimate_tv_empirical,
    glauber_step,
    greedy_feasible_start,
    run_chain,
    trace_csv_lines,
    transition_matrix,
    tv_curve,
)
from .ising import (
    EXACT_COMPOSITION_EDGE_CAP,
    IsingParameters,
    even_subgraph_to_ising,
    exact_transform_distribution,
    ising_model_from_even_subgraph,
    ising_parameters,
    ising_sample_batch,
)
from .extended import (
    C_FOURIER,
    AdmissibilityReport,
    FourierPotential,
    FourierStats,
    ThresholdConstants,
    build_gibbs_from_extended,
    fourier_eta,
    fourier_stats,
    hom_admissible,
    hom_polydisk_radius,
    hom_threshold,
    log_disk_containment_gap,
    polydisk_eta,
    polydisk_zero_scan,
    solve_threshold_constants,
    tensor_admissible,
    tensor_threshold,
)
from .modelfile import load_model, parse_model
from .reports import (
    VERSION,
    canonical_json,
    csv_text,
    envelope_json,
    flatten_results,
    make_report,
)

__version__ = VERSION
