"""Named model presets for the standard experiment configurations.

full_quantum: 8 qubits on 16x16 images of zeros and ones, layers
30+40+30, 15 denoising steps, 2520 parameters. latent: 3 qubits on
8-dimensional latents of all digits, layers 15+20+15, 8 steps, 510
parameters. latent_conditioned: the same plus 4 label qubits, 1110
parameters. hardware: the 4-qubit linear-connectivity adaptation with a
4-dimensional latent space, one label qubit, and 3 denoising steps.
"""

from __future__ import annotations

import copy

from .ansatz import AnsatzConfig, hardware_ansatz_config
from .diffusion import TrainingConfig
from .errors import ConfigError

PRESETS: dict[str, dict] = {
    "full_quantum": {
        "variant": "full",
        "n_data": 8,
        "n_label": 0,
        "m": 1,
        "layers": [30, 40, 30],
        "ansatz_variant": "reverse_bottleneck",
        "connectivity": "ring",
        "cnot_schedule": "sequential",
        "T": 15,
        "image_size": 16,
        "latent_dim": None,
        "digits": [0, 1],
        "epochs": 10,
        "batch_size": 25,
        "learning_rate": 0.02,
        "lr_decay": 1.0,
        "beta_start": 0.25,
        "beta_end": 0.65,
        "coupled_pairs": False,
        "complex_noise": True,
        "share_params_across_t": False,
    },
    "latent": {
        "variant": "latent",
        "n_data": 3,
        "n_label": 0,
        "m": 1,
        "layers": [15, 20, 15],
        "ansatz_variant": "reverse_bottleneck",
        "connectivity": "ring",
        "cnot_schedule": "sequential",
        "T": 8,
        "image_size": 28,
        "latent_dim": 8,
        "digits": list(range(10)),
        "epochs": 10,
        "batch_size": 25,
        "learning_rate": 0.02,
        "lr_decay": 1.0,
        "beta_start": 0.25,
        "beta_end": 0.65,
        "coupled_pairs": False,
        "complex_noise": True,
        "share_params_across_t": False,
    },
    "latent_conditioned": {
        "variant": "latent_conditioned",
        "n_data": 3,
        "n_label": 4,
        "m": 1,
        "layers": [15, 20, 15],
        "ansatz_variant": "reverse_bottleneck",
        "connectivity": "ring",
        "cnot_schedule": "sequential",
        "T": 8,
        "image_size": 28,
        "latent_dim": 8,
        "digits": list(range(10)),
        "epochs": 10,
        "batch_size": 25,
        "learning_rate": 0.02,
        "lr_decay": 1.0,
        "beta_start": 0.25,
        "beta_end": 0.65,
        "coupled_pairs": False,
        "complex_noise": True,
        "share_params_across_t": False,
    },
    "hardware": {
        "variant": "hardware",
        "n_data": 2,
        "n_label": 1,
        "m": 1,
        "layers": [2, 2, 1],
        "ansatz_variant": "reverse_bottleneck",
        "connectivity": "line",
        "cnot_schedule": "even_odd",
        "T": 3,
        "image_size": 28,
        "latent_dim": 4,
        "digits": [0, 1],
        "epochs": 10,
        "batch_size": 25,
        "learning_rate": 0.02,
        "lr_decay": 1.0,
        "beta_start": 0.25,
        "beta_end": 0.65,
        "coupled_pairs": False,
        "complex_noise": True,
        "share_params_across_t": False,
    },
}


def preset(name: str) -> dict:
    if name not in PRESETS:
        raise ConfigError(f"unknown preset {name!r} (have {sorted(PRESETS)})")
    return copy.deepcopy(PRESETS[name])


def ansatz_config_from_model(model: dict) -> AnsatzConfig:
    return AnsatzConfig(
        n_data=model["n_data"],
        n_label=model["n_label"],
        m=model["m"],
        layers=tuple(model["layers"]),
        variant=model["ansatz_variant"],
        connectivity=model["connectivity"],
        cnot_schedule=model["cnot_schedule"],
    )


def training_config_from_model(model: dict, seed: int) -> TrainingConfig:
    return TrainingConfig(
        ansatz=ansatz_config_from_model(model),
        T=model["T"],
        beta_start=model["beta_start"],
        beta_end=model["beta_end"],
        complex_noise=model["complex_noise"],
        coupled_pairs=model["coupled_pairs"],
        share_params_across_t=model["share_params_across_t"],
        batch_size=model["batch_size"],
        epochs=model["epochs"],
        learning_rate=model["learning_rate"],
        lr_decay=model["lr_decay"],
        seed=seed,
    )
