"""Five-party quantum state sharing over three-particle GHZ channels."""

__version__ = "0.1.0"

from .adversary import (
    DetectionStats,
    SuccessStats,
    eve_act,
    intercept_resend_experiment,
    missing_controller_experiment,
)
from .decoys import DecoyReport, EveModel, run_decoy_check
from .ghz import GhzOutcome, ghz_code, ghz_family, ghz_state, measure_ghz
from .metrics import EfficiencyReport, efficiency, transcript_audit
from .protocol import (
    Party,
    ProtocolConfig,
    RunTranscript,
    correction,
    p_total,
    run_branch,
    run_protocol,
)
from .qstate import (
    Pauli,
    QubitLabel,
    Register,
    StateVector,
    apply_1q,
    basis_state,
    fidelity,
    measure_basis,
    project_family,
    random_pure_state,
    tensor,
)
