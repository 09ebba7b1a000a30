"""Analysis of iterated Kraus channels: invariant-subspace stability,
transient decompositions with convergence-rate estimates, and asymptotic
absorption probabilities."""

from .asymptotics import (
    AsymptoticReport,
    analyze_asymptotics,
    asymptotic_probability,
    dual_step_identity_check,
    iterate_oracle,
    limit_dual_projection,
)
from .channel import (
    BlockDecomposedMap,
    InvarianceCheck,
    KrausMap,
    ReducedMaps,
    ValidationReport,
    block_decompose,
    check_density,
    dual_support_sequence,
    is_invariant,
    is_subharmonic,
    reduced_maps,
    superoperator,
    support_of_state_set,
    unvec,
    validate,
    vec,
)
from .did import (
    DidResult,
    DidStage,
    TransitionRates,
    did,
    did_dual_consistency,
    is_gas_did,
    is_gas_dual,
    transition_rates,
)
from .errors import InternalInconsistencyError, NumericalDegeneracyError, QstabError
from .linalg import (
    SpectralData,
    SubspaceBasis,
    column_space,
    eig,
    kernel,
    orth_complement,
    psd_cone_project,
    subspace_sum,
)
from .models import GammaConstraintError, seven_level, toy3
from .nfd import NfdResult, NfdStage, nfd, peripheral_face_support

__version__ = "0.1.0"

__all__ = [
    "AsymptoticReport",
    "BlockDecomposedMap",
    "DidResult",
    "DidStage",
    "GammaConstraintError",
    "InternalInconsistencyError",
    "InvarianceCheck",
    "KrausMap",
    "NfdResult",
    "NfdStage",
    "NumericalDegeneracyError",
    "QstabError",
    "ReducedMaps",
    "SpectralData",
    "SubspaceBasis",
    "TransitionRates",
    "ValidationReport",
    "analyze_asymptotics",
    "asymptotic_probability",
    "block_decompose",
    "check_density",
    "column_space",
    "did",
    "did_dual_consistency",
    "dual_step_identity_check",
    "dual_support_sequence",
    "eig",
    "is_gas_did",
    "is_gas_dual",
    "is_invariant",
    "is_subharmonic",
    "iterate_oracle",
    "kernel",
    "limit_dual_projection",
    "nfd",
    "orth_complement",
    "peripheral_face_support",
    "psd_cone_project",
    "reduced_maps",
    "seven_level",
    "subspace_sum",
    "superoperator",
    "support_of_state_set",
    "toy3",
    "transition_rates",
    "unvec",
    "validate",
    "vec",
]
