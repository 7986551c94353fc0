"""qdmlab: a quantum denoising diffusion model laboratory.

State-vector simulation of bottleneck-ansatz denoising circuits with
mid-circuit measurement channels, classical latent autoencoders,
distribution metrics, and a reproducible CLI.
"""

from .ansatz import (
    AnsatzConfig,
    CircuitSpec,
    GateOp,
    build_circuit,
    build_hardware_adapted,
    cnot_moments,
    hardware_ansatz_config,
    param_count,
    real_two_qubit_prep_angles,
)
from .diffusion import (
    Checkpoint,
    NoiseSchedule,
    SampleSet,
    TrainingConfig,
    forward_noise,
    infidelity_loss,
    make_linear_schedule,
    parameter_shift_grad,
    sample,
    train,
)
from .errors import (
    ConfigError,
    EncodingError,
    ExportError,
    FormatError,
    LabelError,
    NormError,
    PostselectError,
    QdmError,
    ShapeError,
    StatError,
    StateError,
)
from .execution import execute
from .latent import AutoencoderParams, ae_forward, ae_train, decode_batch, encode_batch
from .metrics import fit_gaussian, fit_gmm, frechet_distance, roc_auc, wam
from .qasm import export_qasm
from .serialization import (
    load_autoencoder,
    load_checkpoint,
    save_autoencoder,
    save_checkpoint,
)
from .statevec import (
    BranchEnsemble,
    QuantumState,
    amplitude_encode,
    basis_state,
    decode_amplitudes,
    fidelity,
)

__version__ = "0.1.0"

__all__ = [
    "AnsatzConfig",
    "AutoencoderParams",
    "BranchEnsemble",
    "Checkpoint",
    "CircuitSpec",
    "ConfigError",
    "EncodingError",
    "ExportError",
    "FormatError",
    "GateOp",
    "LabelError",
    "NoiseSchedule",
    "NormError",
    "PostselectError",
    "QdmError",
    "QuantumState",
    "SampleSet",
    "ShapeError",
    "StatError",
    "StateError",
    "TrainingConfig",
    "ae_forward",
    "ae_train",
    "amplitude_encode",
    "basis_state",
    "build_circuit",
    "build_hardware_adapted",
    "cnot_moments",
    "decode_amplitudes",
    "decode_batch",
    "encode_batch",
    "execute",
    "export_qasm",
    "fidelity",
    "fit_gaussian",
    "fit_gmm",
    "forward_noise",
    "frechet_distance",
    "hardware_ansatz_config",
    "infidelity_loss",
    "load_autoencoder",
    "load_checkpoint",
    "make_linear_schedule",
    "param_count",
    "parameter_shift_grad",
    "real_two_qubit_prep_angles",
    "roc_auc",
    "sample",
    "save_autoencoder",
    "save_checkpoint",
    "train",
    "wam",
]
