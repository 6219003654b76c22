"""Maximal n-local violations of chain and star networks of two-qubit sources."""

from .bounds import (
    ConcurrenceProfile,
    lower_lin,
    lower_star,
    required_K,
    star_separable_nogo,
    threshold_product,
    upper_lin,
    upper_star_entangled,
    upper_star_general,
)
from .entanglement import concurrence, entanglement_certified_by_tensor
from .errors import DescriptorError, NLocalError, PhysicalityError, SettingsError, TopologyError
from .harness import frontier_scan, region_scan, run_campaign, werner_sweep
from .measures import delta_n, fixed_measure_entanglement, measure, werner_delta
from .network import (
    BoundReport,
    LinearSettings,
    NetworkSpec,
    StarSettings,
    analyze,
    b_linear,
    b_star,
    linear_correlators,
    network_from_descriptor,
    star_correlators,
    star_free_supremum,
)
from .optimizer import OptimizationResult, maximize_linear, maximize_star
from .qstate import (
    BellDiagonal,
    BellState,
    BlochDecomposition,
    Explicit,
    HorodeckiMix,
    PureSchmidt,
    RankTwoBellDiagonal,
    SingularTriple,
    TwoQubitState,
    Werner,
    XState,
    bloch_decompose,
    make_state,
    random_state,
    singular_triple,
    state_from_descriptor,
)

__all__ = [name for name in dir() if not name.startswith("_")]
