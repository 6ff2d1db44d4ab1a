"""Certify entanglement, steering and Bell nonlocality of two-qubit states.

One family of local-uncertainty functionals ``F = sum V(a,b|i,j) P(a,b|i,j)``
covers all three correlations; only the condition tensor ``V`` and the
classical bound change.
"""

__version__ = "0.1.0"

from .bounds import (
    BoundReport,
    DeterministicStrategy,
    bound_bell_deterministic,
    bound_entanglement_product,
    bound_steering_bloch,
    classical_bound,
    classical_bound_report,
    quantum_maximum_seesaw,
)
from .correlations import JointDistribution, SettingPair, anti_corr_prob, expectation, joint_distribution
from .qlinalg import (
    PSI_PLUS,
    SINGLET,
    BlochObservable,
    DensityMatrix,
    DimensionError,
    InvariantError,
    PureState,
    fidelity,
    nearest_density_matrix,
    observable_matrix,
    pauli,
    projector,
    tensor,
)
from .tomography import (
    CountRecord,
    depolarized_state,
    ReconstructionResult,
    TomographySpec,
    fidelity_experiment,
    reconstruct,
    simulate_counts,
)
from .werner import (
    MixtureWeights,
    WernerParams,
    integer_weight_table,
    twirl_mixture_state,
    violation_threshold,
    weights_for_p,
    werner_state,
    witness_value_of_p,
)
from .witnesses import (
    ConditionTensor,
    WitnessKind,
    WitnessResult,
    canonical_settings,
    condition_bell3322,
    condition_chsh,
    condition_entanglement,
    condition_for,
    condition_steering,
    entropy_degree,
    evaluate,
)
