"""Two-qubit pseudo-density operators and their spatial/temporal causal structure."""

from .channels import QuantumChannel, choi_from_kraus, is_cptp, random_channel, random_density_operator
from .errors import (
    ArgumentError,
    ContractViolation,
    DataError,
    InvalidCorrelationsError,
    NormalizationError,
    PdoError,
    RankDeficientError,
    SolverError,
)
from .measures import (
    CausalReport,
    aspatiality,
    atemporality,
    classify,
    entanglement_negativity,
    forward_atemporality,
    reverse_atemporality,
)
from .pdo import Pdo, TemporalSpec, pdo_from_pauli_coeffs, pdo_from_state, pdo_from_temporal
from .pseudo_channel import PseudoChannel, recover_pseudo_channel, verify_compatibility

__version__ = "0.1.0"
