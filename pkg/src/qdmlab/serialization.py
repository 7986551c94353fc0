"""Versioned structured-text (JSON) checkpoint files.

Same container for diffusion and autoencoder checkpoints: a top-level
``kind`` and ``format_version``, a config snapshot, and flattened
parameter arrays stored as decimal numbers (shortest round-trip
representation, exact under float64). Serialization is deterministic:
sorted keys, fixed separators, trailing newline.
"""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from .ansatz import AnsatzConfig
from .diffusion import Checkpoint, TrainingConfig
from .errors import FormatError
from .latent import AutoencoderParams

FORMAT_VERSION = 1


def _to_plain(obj):
    if isinstance(obj, np.ndarray):
        return [_to_plain(x) for x in obj.tolist()]
    if isinstance(obj, (np.floating, float)):
        return float(obj)
    if isinstance(obj, (np.integer, int)):
        return int(obj)
    if isinstance(obj, (list, tuple)):
        return [_to_plain(x) for x in obj]
    if isinstance(obj, dict):
        return {k: _to_plain(v) for k, v in obj.items()}
    return obj


def dumps(doc: dict) -> str:
    return json.dumps(_to_plain(doc), sort_keys=True, indent=2) + "\n"


def training_config_to_dict(cfg: TrainingConfig) -> dict:
    a = cfg.ansatz
    return {
        "ansatz": {
            "n_data": a.n_data,
            "n_label": a.n_label,
            "m": a.m,
            "layers": list(a.layers),
            "variant": a.variant,
            "connectivity": a.connectivity,
            "cnot_schedule": a.cnot_schedule,
        },
        "T": cfg.T,
        "beta_start": cfg.beta_start,
        "beta_end": cfg.beta_end,
        "complex_noise": cfg.complex_noise,
        "share_params_across_t": cfg.share_params_across_t,
        "coupled_pairs": cfg.coupled_pairs,
        "batch_size": cfg.batch_size,
        "epochs": cfg.epochs,
        "learning_rate": cfg.learning_rate,
        "lr_decay": cfg.lr_decay,
        "seed": cfg.seed,
        "gradient_method": cfg.gradient_method,
    }


def training_config_from_dict(doc: dict) -> TrainingConfig:
    a = doc["ansatz"]
    return TrainingConfig(
        ansatz=AnsatzConfig(
            n_data=a["n_data"],
            n_label=a["n_label"],
            m=a["m"],
            layers=tuple(a["layers"]),
            variant=a["variant"],
            connectivity=a["connectivity"],
            cnot_schedule=a["cnot_schedule"],
        ),
        T=doc["T"],
        beta_start=doc["beta_start"],
        beta_end=doc["beta_end"],
        complex_noise=doc["complex_noise"],
        share_params_across_t=doc["share_params_across_t"],
        coupled_pairs=doc["coupled_pairs"],
        batch_size=doc["batch_size"],
        epochs=doc["epochs"],
        learning_rate=doc["learning_rate"],
        lr_decay=doc.get("lr_decay", 1.0),
        seed=doc["seed"],
        gradient_method=doc["gradient_method"],
    )


def save_checkpoint(ckpt: Checkpoint, path) -> None:
    doc = {
        "kind": "qdm_checkpoint",
        "format_version": ckpt.format_version,
        "config": training_config_to_dict(ckpt.config),
        "parameters": [p.tolist() for p in ckpt.parameters],
        "loss_history": list(ckpt.loss_history),
    }
    Path(path).write_text(dumps(doc))


def load_checkpoint(path) -> Checkpoint:
    doc = json.loads(Path(path).read_text())
    if doc.get("kind") != "qdm_checkpoint":
        raise FormatError(f"not a qdm checkpoint: {path}")
    if doc.get("format_version") != FORMAT_VERSION:
        raise FormatError(f"unsupported format version {doc.get('format_version')}")
    return Checkpoint(
        config=training_config_from_dict(doc["config"]),
        parameters=[np.array(p, dtype=np.float64) for p in doc["parameters"]],
        loss_history=[float(x) for x in doc["loss_history"]],
        format_version=doc["format_version"],
    )


_AE_FIELDS = (
    "enc_w1", "enc_b1", "enc_w2", "enc_b2",
    "dec_w1", "dec_b1", "dec_w2", "dec_b2",
)


def save_autoencoder(params: AutoencoderParams, path, loss_history=None) -> None:
    doc = {
        "kind": "autoencoder_checkpoint",
        "format_version": FORMAT_VERSION,
        "arrays": {name: getattr(params, name).tolist() for name in _AE_FIELDS},
        "loss_history": list(loss_history or []),
    }
    Path(path).write_text(dumps(doc))


def load_autoencoder(path) -> AutoencoderParams:
    doc = json.loads(Path(path).read_text())
    if doc.get("kind") != "autoencoder_checkpoint":
        raise FormatError(f"not an autoencoder checkpoint: {path}")
    if doc.get("format_version") != FORMAT_VERSION:
        raise FormatError(f"unsupported format version {doc.get('format_version')}")
    return AutoencoderParams(
        **{name: np.array(doc["arrays"][name], dtype=np.float64) for name in _AE_FIELDS}
    )
