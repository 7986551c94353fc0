"""Command-line entry point.

Subcommands: train-ae, train-qdm, sample, evaluate, export-qasm,
noise-study, plot-pca. Every run is driven by a JSON config (merged
over a named preset and built-in defaults, with --set dotted-path
overrides), writes its resolved config into the run directory, and is
reproducible: all randomness comes from explicit seeds.

Exit codes: 0 success, 1 runtime failure, 2 missing input artifacts,
3 config validation error.
"""

from __future__ import annotations

import argparse
import copy
import json
import sys
import time
from pathlib import Path

import numpy as np

from . import data as data_mod
from . import diffusion, latent, metrics, plots, presets, serialization
from .ansatz import build_hardware_adapted, real_two_qubit_prep_angles
from .engine import decoded_mixture, run_batched
from .errors import ConfigError, QdmError
from .qasm import export_qasm

SCHEMA_VERSION = 1

DEFAULT_CONFIG: dict = {
    "schema_version": SCHEMA_VERSION,
    "preset": "latent",
    "data_dir": None,
    "data_split": "train",
    "output_dir": "runs",
    "run_name": None,
    "seed": 0,
    "max_train_samples": None,
    "model": {},
    "autoencoder": {
        "hidden": 128,
        "epochs": 20,
        "learning_rate": 1e-3,
        "batch_size": 64,
        "seed": 0,
    },
    "sample": {
        "count": 16,
        "label": None,
        "measurement_mode": "sample",
        "seed": 1,
    },
    "evaluate": {
        "n_generated": 200,
        "n_real": 500,
        "gmm_components": 10,
        "seed": 2,
    },
    "noise_study": {
        "shots": 320_000,
        "depolarize_p": [0.004],
        "readout_p": 0.01,
        "seed": 3,
    },
    "ae_checkpoint": None,
    "checkpoint": None,
}


def _deep_merge(base: dict, extra: dict) -> dict:
    out = copy.deepcopy(base)
    for key, value in extra.items():
        if isinstance(value, dict) and isinstance(out.get(key), dict):
            out[key] = _deep_merge(out[key], value)
        else:
            out[key] = copy.deepcopy(value)
    return out


def _apply_override(cfg: dict, dotted: str) -> None:
    if "=" not in dotted:
        raise ConfigError(f"--set expects key.path=value, got {dotted!r}")
    path, raw = dotted.split("=", 1)
    try:
        value = json.loads(raw)
    except json.JSONDecodeError:
        value = raw
    node = cfg
    keys = path.split(".")
    for key in keys[:-1]:
        if key not in node or not isinstance(node[key], dict):
            node[key] = {}
        node = node[key]
    node[keys[-1]] = value


def load_config(args) -> dict:
    cfg = copy.deepcopy(DEFAULT_CONFIG)
    if args.config:
        path = Path(args.config)
        if not path.exists():
            raise FileNotFoundError(f"config file {path} not found")
        cfg = _deep_merge(cfg, json.loads(path.read_text()))
    for override in args.set or []:
        _apply_override(cfg, override)
    if cfg.get("schema_version") != SCHEMA_VERSION:
        raise ConfigError(f"unsupported schema_version {cfg.get('schema_version')}")
    model = presets.preset(cfg["preset"])
    cfg["model"] = _deep_merge(model, cfg.get("model") or {})
    if args.run_dir:
        cfg["run_name"] = None
        cfg["_run_dir"] = args.run_dir
    return cfg


def make_run_dir(cfg: dict, command: str) -> Path:
    if cfg.get("_run_dir"):
        run_dir = Path(cfg["_run_dir"])
    else:
        name = cfg.get("run_name") or f"{command}-{time.strftime('%Y%m%d-%H%M%S')}"
        run_dir = Path(cfg["output_dir"]) / name
    run_dir.mkdir(parents=True, exist_ok=True)
    resolved = {k: v for k, v in cfg.items() if not k.startswith("_")}
    (run_dir / "config.json").write_text(serialization.dumps(resolved))
    return run_dir


def load_corpus(cfg: dict) -> data_mod.Dataset:
    if cfg["data_dir"]:
        directory = Path(cfg["data_dir"])
        if not directory.exists():
            raise FileNotFoundError(f"data directory {directory} not found")
        ds = data_mod.load_mnist(directory, cfg["data_split"])
    else:
        ds = data_mod.load_demo_digits()
    return data_mod.filter_digits(ds, cfg["model"]["digits"])


def _require(path, what: str) -> Path:
    if not path:
        raise FileNotFoundError(f"config field for {what} is not set")
    path = Path(path)
    if not path.exists():
        raise FileNotFoundError(f"{what} {path} not found")
    return path


def _training_vectors(cfg: dict, ds: data_mod.Dataset):
    """(vectors, labels) ready for diffusion.train, per model variant."""
    model = cfg["model"]
    limit = cfg.get("max_train_samples")
    images = ds.images[:limit] if limit else ds.images
    labels = ds.labels[:limit] if limit else ds.labels
    if model["variant"] == "full":
        vectors = np.stack(
            [data_mod.to_unit_vector(data_mod.downsample_16(im)) for im in images]
        )
    else:
        ae = serialization.load_autoencoder(_require(cfg["ae_checkpoint"], "autoencoder checkpoint"))
        if ae.latent_dim != model["latent_dim"]:
            raise ConfigError(
                f"autoencoder latent dim {ae.latent_dim} != model latent dim {model['latent_dim']}"
            )
        vectors = latent.encode_batch(ae, images.reshape(len(images), -1))
    if (1 << model["n_data"]) != vectors.shape[1]:
        raise ConfigError(
            f"model n_data={model['n_data']} cannot encode vectors of dim {vectors.shape[1]}"
        )
    return vectors, (labels if model["n_label"] else None)


def cmd_train_ae(cfg: dict) -> int:
    run_dir = make_run_dir(cfg, "train-ae")
    ds = load_corpus(cfg)
    ae_cfg = cfg["autoencoder"]
    images = ds.images.reshape(len(ds), -1)
    params, history = latent.ae_train(
        images,
        hidden=ae_cfg["hidden"],
        latent_dim=cfg["model"]["latent_dim"] or 8,
        lr=ae_cfg["learning_rate"],
        epochs=ae_cfg["epochs"],
        batch_size=ae_cfg["batch_size"],
        seed=ae_cfg["seed"],
    )
    serialization.save_autoencoder(params, run_dir / "autoencoder.json", history)
    data_mod.write_csv(
        [(i + 1, loss) for i, loss in enumerate(history)],
        run_dir / "ae_loss.csv",
        header=["epoch", "mse"],
    )
    print(f"wrote {run_dir / 'autoencoder.json'}")
    return 0


def cmd_train_qdm(cfg: dict) -> int:
    run_dir = make_run_dir(cfg, "train-qdm")
    ds = load_corpus(cfg)
    vectors, labels = _training_vectors(cfg, ds)
    tcfg = presets.training_config_from_model(cfg["model"], cfg["seed"])
    ckpt = diffusion.train(vectors, tcfg, labels=labels)
    serialization.save_checkpoint(ckpt, run_dir / "checkpoint.json")
    data_mod.write_csv(
        [(i + 1, loss) for i, loss in enumerate(ckpt.loss_history)],
        run_dir / "loss_history.csv",
        header=["epoch", "infidelity"],
    )
    print(f"wrote {run_dir / 'checkpoint.json'}")
    return 0


def _generate(cfg: dict, ckpt, count: int, rng, label):
    return diffusion.sample(
        ckpt,
        count,
        rng,
        label=label,
        measurement_mode=cfg["sample"]["measurement_mode"],
    )


def cmd_sample(cfg: dict) -> int:
    run_dir = make_run_dir(cfg, "sample")
    ckpt = serialization.load_checkpoint(_require(cfg["checkpoint"], "checkpoint"))
    model = cfg["model"]
    scfg = cfg["sample"]
    label = scfg["label"]
    if model["n_label"] and label is None:
        raise ConfigError("conditioned model needs sample.label")
    rng = np.random.default_rng(scfg["seed"])
    result = _generate(cfg, ckpt, scfg["count"], rng, label)
    samples_dir = run_dir / "samples"
    samples_dir.mkdir(exist_ok=True)
    data_mod.write_csv(
        [list(v) for v in result.vectors],
        samples_dir / "vectors.csv",
        header=[f"a{i}" for i in range(result.vectors.shape[1])],
    )
    if model["variant"] == "full":
        images = result.vectors.reshape(-1, model["image_size"], model["image_size"])
    else:
        ae = serialization.load_autoencoder(_require(cfg["ae_checkpoint"], "autoencoder checkpoint"))
        side = int(np.sqrt(ae.input_dim))
        images = latent.decode_batch(ae, result.vectors).reshape(-1, side, side)
    for i, image in enumerate(images):
        data_mod.write_pgm(image, samples_dir / f"sample_{i:03d}.pgm")
    print(
        f"wrote {len(images)} samples to {samples_dir} "
        f"(measurement acceptance {result.acceptance_rate:.3f})"
    )
    return 0


def cmd_evaluate(cfg: dict) -> int:
    run_dir = make_run_dir(cfg, "evaluate")
    ckpt = serialization.load_checkpoint(_require(cfg["checkpoint"], "checkpoint"))
    model = cfg["model"]
    ecfg = cfg["evaluate"]
    ds = load_corpus(cfg)
    rng = np.random.default_rng(ecfg["seed"])
    vectors, _ = _training_vectors(cfg, ds)
    real = vectors[: ecfg["n_real"]]

    if model["n_label"]:
        per_label = max(1, ecfg["n_generated"] // len(model["digits"]))
        generated = np.vstack(
            [
                _generate(cfg, ckpt, per_label, rng, int(d)).vectors
                for d in model["digits"]
            ]
        )
    else:
        generated = _generate(cfg, ckpt, ecfg["n_generated"], rng, None).vectors

    rows = []
    fd = metrics.frechet_distance(metrics.fit_gaussian(real), metrics.fit_gaussian(generated))
    rows.append(("raw_feature_frechet", fd))
    k = min(ecfg["gmm_components"], len(real) // 10 or 1, len(generated) // 10 or 1)
    if k >= 1:
        gmm_real = metrics.fit_gmm(real, k, seed=ecfg["seed"])
        gmm_gen = metrics.fit_gmm(generated, k, seed=ecfg["seed"])
        rows.append((f"wam_k{k}", metrics.wam(gmm_real, gmm_gen)))
    metrics_dir = run_dir / "metrics"
    metrics_dir.mkdir(exist_ok=True)
    data_mod.write_csv(rows, metrics_dir / "metrics.csv", header=["metric", "value"])
    print(f"wrote {metrics_dir / 'metrics.csv'}")
    return 0


def _hardware_params(cfg: dict, rng) -> np.ndarray:
    """Merged parameter vector for the flattened hardware circuit."""
    circuit = build_hardware_adapted(label=cfg["sample"]["label"] or 0)
    prior = rng.standard_normal(4)
    prior /= np.linalg.norm(prior)
    prep = real_two_qubit_prep_angles(prior)
    n_prep = circuit.metadata["prep_params"]
    if cfg["checkpoint"]:
        ckpt = serialization.load_checkpoint(_require(cfg["checkpoint"], "checkpoint"))
        per_step = (circuit.param_count - n_prep) // circuit.metadata["repetitions"]
        if (
            ckpt.config.T != circuit.metadata["repetitions"]
            or len(ckpt.params_for_step(1)) != per_step
        ):
            raise ConfigError("checkpoint does not match the hardware ansatz")
        steps = [ckpt.params_for_step(t) for t in range(ckpt.config.T, 0, -1)]
        merged = np.concatenate([prep] + steps)
    else:
        merged = np.concatenate(
            [prep, rng.uniform(-np.pi, np.pi, circuit.param_count - n_prep)]
        )
    if merged.size != circuit.param_count:
        raise ConfigError(
            f"hardware circuit needs {circuit.param_count} params, built {merged.size}"
        )
    return merged


def cmd_export_qasm(cfg: dict) -> int:
    run_dir = make_run_dir(cfg, "export-qasm")
    rng = np.random.default_rng(cfg["seed"])
    label = cfg["sample"]["label"] or 0
    circuit = build_hardware_adapted(label=label)
    params = _hardware_params(cfg, rng)
    qasm_dir = run_dir / "qasm"
    qasm_dir.mkdir(exist_ok=True)
    out = qasm_dir / "hardware_circuit.qasm"
    out.write_text(export_qasm(circuit, params))
    print(f"wrote {out}")
    return 0


def _sampled_frequencies(circuit, params, shots, rng, depolarize_p=0.0, readout_p=0.0):
    """Basis-measurement frequencies of the circuit output over ``shots``."""
    dim_out = 1 << circuit.n_exit
    counts = np.zeros(dim_out)
    chunk = 40_000
    state0 = np.zeros(1 << circuit.n_entry, dtype=np.complex128)
    state0[0] = 1.0
    done = 0
    while done < shots:
        k = min(chunk, shots - done)
        amps, _ = run_batched(
            circuit,
            np.tile(params, (k, 1)),
            np.tile(state0, (k, 1)),
            mode="sample",
            rng=rng,
            depolarize_p=depolarize_p,
        )
        probs = np.abs(amps) ** 2
        probs /= probs.sum(axis=1, keepdims=True)
        u = rng.random(k)
        drawn = (np.cumsum(probs, axis=1) < u[:, None]).sum(axis=1)
        drawn = np.minimum(drawn, dim_out - 1)
        if readout_p:
            for bit in range(circuit.n_exit):
                flips = rng.random(k) < readout_p
                drawn = np.where(flips, drawn ^ (1 << (circuit.n_exit - 1 - bit)), drawn)
        counts += np.bincount(drawn, minlength=dim_out)
        done += k
    return counts / shots


def cmd_noise_study(cfg: dict) -> int:
    run_dir = make_run_dir(cfg, "noise-study")
    ncfg = cfg["noise_study"]
    rng = np.random.default_rng(ncfg["seed"])
    label = cfg["sample"]["label"] or 0
    circuit = build_hardware_adapted(label=label)
    params = _hardware_params(cfg, rng)

    state0 = np.zeros(1 << circuit.n_entry, dtype=np.complex128)
    state0[0] = 1.0
    paths = run_batched(circuit, params, state0, mode="ensemble")
    exact = decoded_mixture(paths)[0]

    conditions = [("statevector", exact)]
    shots = int(ncfg["shots"])
    freq = _sampled_frequencies(circuit, params, shots, rng)
    conditions.append((f"shots_{shots}", np.sqrt(freq)))
    for p in ncfg["depolarize_p"]:
        freq = _sampled_frequencies(
            circuit, params, shots, rng, depolarize_p=float(p), readout_p=ncfg["readout_p"]
        )
        conditions.append((f"depolarizing_p{p}", np.sqrt(freq)))

    metrics_dir = run_dir / "metrics"
    metrics_dir.mkdir(exist_ok=True)
    n_out = circuit.n_exit
    rows = []
    for idx in range(1 << n_out):
        bits = format(idx, f"0{n_out}b")
        rows.append([bits] + [f"{vals[idx]:.6f}" for _, vals in conditions])
    data_mod.write_csv(
        rows,
        metrics_dir / "noise_study.csv",
        header=["basis_state"] + [name for name, _ in conditions],
    )
    print(f"wrote {metrics_dir / 'noise_study.csv'}")
    return 0


def cmd_plot_pca(cfg: dict) -> int:
    run_dir = make_run_dir(cfg, "plot-pca")
    ckpt = serialization.load_checkpoint(_require(cfg["checkpoint"], "checkpoint"))
    model = cfg["model"]
    ecfg = cfg["evaluate"]
    ds = load_corpus(cfg)
    rng = np.random.default_rng(ecfg["seed"])
    vectors, labels = _training_vectors(cfg, ds)
    real = vectors[: ecfg["n_real"]]
    proj = metrics.pca_fit(real, dims=2)
    groups = []
    if model["n_label"]:
        real_labels = (labels if labels is not None else ds.labels)[: ecfg["n_real"]]
        for d in model["digits"]:
            pts = metrics.pca_project(proj, real[real_labels == d])
            groups.append((f"real_{d}", pts, plots.DIGIT_COLORS[d % 10]))
        per_label = max(1, ecfg["n_generated"] // len(model["digits"]))
        for d in model["digits"]:
            gen = _generate(cfg, ckpt, per_label, rng, int(d)).vectors
            groups.append((f"gen_{d}", metrics.pca_project(proj, gen), "#000000"))
    else:
        groups.append(("real", metrics.pca_project(proj, real), "#1f77b4"))
        gen = _generate(cfg, ckpt, ecfg["n_generated"], rng, None).vectors
        groups.append(("generated", metrics.pca_project(proj, gen), "#d62728"))
    plots_dir = run_dir / "plots"
    plots_dir.mkdir(exist_ok=True)
    plots.write_scatter_svg(groups, plots_dir / "pca.svg")
    print(f"wrote {plots_dir / 'pca.svg'}")
    return 0


COMMANDS = {
    "train-ae": cmd_train_ae,
    "train-qdm": cmd_train_qdm,
    "sample": cmd_sample,
    "evaluate": cmd_evaluate,
    "export-qasm": cmd_export_qasm,
    "noise-study": cmd_noise_study,
    "plot-pca": cmd_plot_pca,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="qdmlab",
        description="Quantum diffusion model laboratory",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        p = sub.add_parser(name)
        p.add_argument("--config", help="path to a JSON run config")
        p.add_argument(
            "--set",
            action="append",
            metavar="KEY.PATH=VALUE",
            help="override a config field (value parsed as JSON when possible)",
        )
        p.add_argument("--run-dir", help="exact run directory (overrides output_dir/run_name)")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = load_config(args)
        return COMMANDS[args.command](cfg)
    except FileNotFoundError as exc:
        print(f"error: missing-input: {exc}", file=sys.stderr)
        return 2
    except ConfigError as exc:
        print(f"error: config: {exc}", file=sys.stderr)
        return 3
    except QdmError as exc:
        print(f"error: runtime: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
