"""Forward noising process, infidelity-loss training, and sampling.

Timestep convention: the circuit indexed t maps |x_t> -> |x_{t-1}| for
t in 1..T, so training pairs are (input x_t, target x_{t-1}) and the
sampling chain applies circuits t = T down to 1 on an encoded
complex-Gaussian prior draw.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace

import numpy as np

from . import engine
from .ansatz import AnsatzConfig, CircuitSpec, build_circuit
from .errors import ConfigError, NormError, PostselectError
from .execution import execute
from .statevec import QuantumState, amplitude_encode

DEFAULT_BETA_START = 0.25
DEFAULT_BETA_END = 0.65


@dataclass(frozen=True)
class NoiseSchedule:
    """Variance schedule: betas, alphas = 1 - betas, and their running product."""

    betas: np.ndarray

    def __post_init__(self):
        betas = np.asarray(self.betas, dtype=np.float64)
        if betas.ndim != 1 or betas.size < 1:
            raise ConfigError("schedule needs at least one beta")
        if np.any(betas <= 0.0) or np.any(betas >= 1.0):
            raise ConfigError("betas must lie strictly inside (0, 1)")
        betas.setflags(write=False)
        object.__setattr__(self, "betas", betas)

    @property
    def T(self) -> int:
        return self.betas.size

    @property
    def alphas(self) -> np.ndarray:
        return 1.0 - self.betas

    @property
    def alpha_bars(self) -> np.ndarray:
        return np.cumprod(self.alphas)

    def alpha_bar(self, t: int) -> float:
        """Cumulative product at step t, with alpha_bar(0) = 1."""
        if not 0 <= t <= self.T:
            raise ConfigError(f"step {t} outside 0..{self.T}")
        return 1.0 if t == 0 else float(self.alpha_bars[t - 1])


def make_linear_schedule(
    T: int,
    beta_start: float = DEFAULT_BETA_START,
    beta_end: float = DEFAULT_BETA_END,
) -> NoiseSchedule:
    if T < 1:
        raise ConfigError("T must be >= 1")
    if not 0.0 < beta_start <= beta_end < 1.0:
        raise ConfigError("need 0 < beta_start <= beta_end < 1")
    return NoiseSchedule(np.linspace(beta_start, beta_end, T))


def _complex_normal(rng: np.random.Generator, dim: int) -> np.ndarray:
    """Isotropic complex Gaussian scaled to unit expected squared norm.

    Data vectors are unit norm, so the noise is drawn at the same scale:
    E||eps||^2 = 1. This keeps alpha_bar equal to the expected signal
    fraction of the noised vector, which is what makes the schedule an
    actual interpolation between data and pure noise.
    """
    raw = rng.standard_normal(dim) + 1j * rng.standard_normal(dim)
    return raw / np.sqrt(2.0 * dim)


def _real_normal(rng: np.random.Generator, dim: int) -> np.ndarray:
    """Real Gaussian scaled to unit expected squared norm."""
    return rng.standard_normal(dim).astype(np.complex128) / np.sqrt(dim)


def forward_noise(
    x0: np.ndarray,
    t: int,
    sched: NoiseSchedule,
    rng: np.random.Generator,
    complex_noise: bool = True,
) -> np.ndarray:
    """Closed-form noising x_t = sqrt(ab_t) x0 + sqrt(1-ab_t) eps, renormalized.

    eps has independent Gaussian real and imaginary parts when
    complex_noise is on (real entries otherwise), scaled so that
    E||eps||^2 = 1 and alpha_bar_t is the expected signal fraction.
    """
    x0 = np.asarray(x0)
    if abs(np.linalg.norm(x0) - 1.0) > 1e-9:
        raise NormError("x0 must be unit norm")
    ab = sched.alpha_bar(t)
    if complex_noise:
        eps = _complex_normal(rng, x0.size)
    else:
        eps = _real_normal(rng, x0.size)
    xt = np.sqrt(ab) * x0.astype(np.complex128) + np.sqrt(1.0 - ab) * eps
    return xt / np.linalg.norm(xt)


def make_training_pair(
    x0: np.ndarray,
    t: int,
    sched: NoiseSchedule,
    rng: np.random.Generator,
    complex_noise: bool = True,
    coupled: bool = False,
) -> tuple[np.ndarray, np.ndarray]:
    """(x_t, x_{t-1}) drawn from the same x0.

    Default: independent closed-form draws at levels t and t-1. With
    ``coupled`` the pair shares a path: x_{t-1} is drawn first and x_t
    follows from one application of the single-step kernel.
    """
    if not 1 <= t <= sched.T:
        raise ConfigError(f"t={t} outside 1..{sched.T}")
    x_tm1 = forward_noise(x0, t - 1, sched, rng, complex_noise) if t > 1 else (
        x0.astype(np.complex128)
    )
    if coupled:
        beta = float(sched.betas[t - 1])
        eps = _complex_normal(rng, x0.size) if complex_noise else _real_normal(rng, x0.size)
        xt = np.sqrt(1.0 - beta) * x_tm1 + np.sqrt(beta) * eps
        xt /= np.linalg.norm(xt)
    else:
        xt = forward_noise(x0, t, sched, rng, complex_noise)
    return xt, x_tm1


def embed_label(vec: np.ndarray, k: int, n_label: int) -> np.ndarray:
    """Place a unit vector in the |k> label block of the enlarged register."""
    if n_label == 0:
        return np.asarray(vec, dtype=np.complex128)
    dim = vec.size
    out = np.zeros(dim << n_label, dtype=np.complex128)
    out[k * dim : (k + 1) * dim] = vec
    return out


def batched_losses(
    circuit: CircuitSpec,
    params_rows: np.ndarray,
    inputs: np.ndarray,
    targets: np.ndarray,
) -> np.ndarray:
    """Infidelity loss of each parameter row, averaged over the pair batch.

    params_rows is (R, P); inputs/targets are (B, dim). Every row is
    evaluated on the full batch in one engine pass.
    """
    params_rows = np.atleast_2d(np.asarray(params_rows, dtype=np.float64))
    inputs = np.atleast_2d(np.asarray(inputs, dtype=np.complex128))
    targets = np.atleast_2d(np.asarray(targets, dtype=np.complex128))
    r, b = params_rows.shape[0], inputs.shape[0]
    big_params = np.repeat(params_rows, b, axis=0)
    big_inputs = np.tile(inputs, (r, 1))
    big_targets = np.tile(targets, (r, 1))
    paths = engine.run_batched(circuit, big_params, big_inputs, mode="ensemble")
    fid = engine.ensemble_fidelity(paths, big_targets)
    return 1.0 - fid.reshape(r, b).mean(axis=1)


def infidelity_loss(
    params: np.ndarray,
    batch: list[tuple[np.ndarray, int]],
    sched: NoiseSchedule,
    circuit: CircuitSpec,
    rng: np.random.Generator,
    complex_noise: bool = True,
    label: int | None = None,
) -> float:
    """1 - mean fidelity between circuit(|x_t>) and |x_{t-1}> over the batch.

    All batch items must share the timestep wired into ``circuit``'s
    parameters; mixed-t batches are handled by the trainer, which groups
    items per timestep.
    """
    if not batch:
        raise ConfigError("batch must be nonempty")
    n_label = circuit.n_label
    inputs, targets = [], []
    for x0, t in batch:
        xt, xtm1 = make_training_pair(x0, t, sched, rng, complex_noise)
        k = 0 if label is None else label
        inputs.append(embed_label(xt, k, n_label) if n_label else xt)
        targets.append(embed_label(xtm1, k, n_label) if n_label else xtm1)
    loss = batched_losses(circuit, params, np.array(inputs), np.array(targets))
    return float(loss[0])


def parameter_shift_grad(
    circuit: CircuitSpec,
    params: np.ndarray,
    inputs: np.ndarray,
    targets: np.ndarray,
    with_loss: bool = False,
):
    """Exact gradient via +-pi/2 shifts, one batched engine pass.

    The same training pairs (common random numbers) feed every shifted
    evaluation.
    """
    params = np.asarray(params, dtype=np.float64)
    p = params.size
    rows = np.tile(params, (2 * p + 1, 1))
    for j in range(p):
        rows[2 * j, j] += np.pi / 2.0
        rows[2 * j + 1, j] -= np.pi / 2.0
    losses = batched_losses(circuit, rows, inputs, targets)
    grad = (losses[0 : 2 * p : 2] - losses[1 : 2 * p : 2]) / 2.0
    if with_loss:
        return grad, float(losses[-1])
    return grad


def finite_difference_grad(
    circuit: CircuitSpec,
    params: np.ndarray,
    inputs: np.ndarray,
    targets: np.ndarray,
    h: float = 1e-5,
) -> np.ndarray:
    """Central finite differences; independent oracle for parameter shift."""
    params = np.asarray(params, dtype=np.float64)
    p = params.size
    rows = np.tile(params, (2 * p, 1))
    for j in range(p):
        rows[2 * j, j] += h
        rows[2 * j + 1, j] -= h
    losses = batched_losses(circuit, rows, inputs, targets)
    return (losses[0 : 2 * p : 2] - losses[1 : 2 * p : 2]) / (2.0 * h)


@dataclass
class AdamState:
    m: np.ndarray
    v: np.ndarray
    step: int = 0

    @classmethod
    def zeros(cls, n: int) -> "AdamState":
        return cls(m=np.zeros(n), v=np.zeros(n))


def adam_step(
    params: np.ndarray,
    grads: np.ndarray,
    state: AdamState,
    lr: float,
    beta1: float = 0.9,
    beta2: float = 0.999,
    eps: float = 1e-8,
) -> tuple[np.ndarray, AdamState]:
    """Standard bias-corrected Adam update; returns new params and state."""
    if params.shape != grads.shape:
        raise ConfigError("params and grads shapes differ")
    step = state.step + 1
    m = beta1 * state.m + (1.0 - beta1) * grads
    v = beta2 * state.v + (1.0 - beta2) * grads**2
    m_hat = m / (1.0 - beta1**step)
    v_hat = v / (1.0 - beta2**step)
    new_params = params - lr * m_hat / (np.sqrt(v_hat) + eps)
    return new_params, AdamState(m=m, v=v, step=step)


@dataclass(frozen=True)
class TrainingConfig:
    ansatz: AnsatzConfig
    T: int
    beta_start: float = DEFAULT_BETA_START
    beta_end: float = DEFAULT_BETA_END
    complex_noise: bool = True
    share_params_across_t: bool = False
    coupled_pairs: bool = False
    batch_size: int = 25
    epochs: int = 10
    learning_rate: float = 0.02
    lr_decay: float = 1.0  # per-epoch multiplicative decay (1.0 = constant)
    seed: int = 0
    gradient_method: str = "parameter_shift"

    def __post_init__(self):
        if self.batch_size < 1:
            raise ConfigError("batch_size must be >= 1")
        if self.learning_rate <= 0.0:
            raise ConfigError("learning_rate must be positive")
        if not 0.0 < self.lr_decay <= 1.0:
            raise ConfigError("lr_decay must be in (0, 1]")
        if self.T < 1:
            raise ConfigError("T must be >= 1")
        if self.gradient_method not in ("parameter_shift", "finite_difference"):
            raise ConfigError(f"unknown gradient method {self.gradient_method!r}")


@dataclass
class Checkpoint:
    """Trained parameters plus the configuration that produced them."""

    config: TrainingConfig
    parameters: list[np.ndarray]  # one vector per timestep, or one shared
    loss_history: list[float]
    format_version: int = 1

    @property
    def circuit(self) -> CircuitSpec:
        return build_circuit(self.config.ansatz)

    def params_for_step(self, t: int) -> np.ndarray:
        if self.config.share_params_across_t:
            return self.parameters[0]
        return self.parameters[t - 1]


def init_parameters(cfg: TrainingConfig, rng: np.random.Generator) -> list[np.ndarray]:
    from .ansatz import param_count

    p = param_count(cfg.ansatz)
    n_sets = 1 if cfg.share_params_across_t else cfg.T
    return [rng.uniform(-np.pi, np.pi, p) for _ in range(n_sets)]


def train(
    dataset: np.ndarray,
    cfg: TrainingConfig,
    labels: np.ndarray | None = None,
) -> Checkpoint:
    """Train the per-timestep denoising circuits on unit vectors.

    ``dataset`` is (N, 2**n_data) with unit-norm rows; ``labels`` (N,)
    of integers is required when the ansatz has label qubits. Each epoch
    shuffles the data, assigns every item a uniform timestep, and runs
    one Adam step per (batch, timestep) group. Deterministic under
    cfg.seed.
    """
    dataset = np.asarray(dataset, dtype=np.float64)
    if dataset.ndim != 2 or dataset.shape[1] != 1 << cfg.ansatz.n_data:
        raise ConfigError(
            f"dataset must be (N, {1 << cfg.ansatz.n_data}), got {dataset.shape}"
        )
    if dataset.shape[0] < 1:
        raise ConfigError("dataset must be nonempty")
    if np.any(np.abs(np.linalg.norm(dataset, axis=1) - 1.0) > 1e-6):
        raise NormError("dataset rows must be unit norm")
    n_label = cfg.ansatz.n_label
    if n_label and labels is None:
        raise ConfigError("conditioned ansatz needs labels")
    if labels is not None:
        labels = np.asarray(labels, dtype=np.int64)
        if labels.shape[0] != dataset.shape[0]:
            raise ConfigError("labels and dataset lengths differ")

    rng = np.random.default_rng(cfg.seed)
    circuit = build_circuit(cfg.ansatz)
    sched = make_linear_schedule(cfg.T, cfg.beta_start, cfg.beta_end)
    params = init_parameters(cfg, rng)
    adam = [AdamState.zeros(p.size) for p in params]
    loss_history: list[float] = []
    n = dataset.shape[0]

    for epoch in range(cfg.epochs):
        lr = cfg.learning_rate * cfg.lr_decay**epoch
        order = rng.permutation(n)
        ts = rng.integers(1, cfg.T + 1, size=n)
        epoch_losses: list[float] = []
        for start in range(0, n, cfg.batch_size):
            idx = order[start : start + cfg.batch_size]
            groups: dict[int, list[int]] = {}
            for i in idx:
                groups.setdefault(int(ts[i]), []).append(int(i))
            for t in sorted(groups):
                items = groups[t]
                inputs, targets = [], []
                for i in items:
                    xt, xtm1 = make_training_pair(
                        dataset[i], t, sched, rng, cfg.complex_noise, cfg.coupled_pairs
                    )
                    k = int(labels[i]) if labels is not None else 0
                    inputs.append(embed_label(xt, k, n_label))
                    targets.append(embed_label(xtm1, k, n_label))
                inputs = np.array(inputs)
                targets = np.array(targets)
                slot = 0 if cfg.share_params_across_t else t - 1
                if cfg.gradient_method == "parameter_shift":
                    grads, loss = parameter_shift_grad(
                        circuit, params[slot], inputs, targets, with_loss=True
                    )
                else:
                    grads = finite_difference_grad(circuit, params[slot], inputs, targets)
                    loss = float(batched_losses(circuit, params[slot], inputs, targets)[0])
                params[slot], adam[slot] = adam_step(params[slot], grads, adam[slot], lr)
                epoch_losses.extend([loss] * len(items))
        loss_history.append(float(np.mean(epoch_losses)))

    return Checkpoint(config=cfg, parameters=params, loss_history=loss_history)


@dataclass
class SampleSet:
    vectors: np.ndarray                     # (count, 2**n_data), nonnegative
    measurements_total: int = 0
    measurements_accepted: int = 0
    reruns: int = 0

    @property
    def acceptance_rate(self) -> float:
        if self.measurements_total == 0:
            return 1.0
        return self.measurements_accepted / self.measurements_total


def draw_prior(rng: np.random.Generator, dim: int) -> np.ndarray:
    """Unit-normalized complex standard normal vector."""
    v = _complex_normal(rng, dim)
    return v / np.linalg.norm(v)


def sample(
    ckpt: Checkpoint,
    count: int,
    rng: np.random.Generator,
    label: int | None = None,
    measurement_mode: str = "sample",
    max_reruns: int = 10_000,
) -> SampleSet:
    """Generate ``count`` decoded vectors from the trained denoising chain.

    measurement_mode "sample" accepts every mid-circuit outcome;
    "branch_selection" postselects the ancilla outcomes on 0 by
    rerunning a denoising step whenever a measurement misfires, and the
    returned statistics expose the per-measurement acceptance rate.
    Label qubits, when present, are always branch-selected onto |k>.
    """
    if count < 1:
        raise ConfigError("count must be >= 1")
    if measurement_mode not in ("sample", "branch_selection"):
        raise ConfigError(f"unknown measurement mode {measurement_mode!r}")
    cfg = ckpt.config
    n_label = cfg.ansatz.n_label
    if n_label and label is None:
        raise ConfigError("conditioned model needs a label")
    circuit = ckpt.circuit
    dim = 1 << cfg.ansatz.n_data
    out = np.empty((count, dim))
    total = accepted = reruns = 0

    for i in range(count):
        prior = draw_prior(rng, dim)
        vec = embed_label(prior, label, n_label) if n_label else prior
        state = amplitude_encode(vec, renormalize=True)
        for t in range(cfg.T, 0, -1):
            params_t = ckpt.params_for_step(t)
            for attempt in range(max_reruns):
                res = execute(
                    circuit,
                    params_t,
                    state,
                    mode="sample",
                    rng=rng,
                    label_postselect=label if n_label else None,
                )
                total += len(res.outcomes)
                hits = sum(1 for o in res.outcomes if all(b == 0 for b in o))
                accepted += hits
                if measurement_mode == "sample" or hits == len(res.outcomes):
                    break
                reruns += 1
            else:
                raise PostselectError(
                    f"branch selection failed {max_reruns} times at step {t}"
                )
            state = res.state
        out[i] = _decode_data_block(state, n_label, label)

    return SampleSet(
        vectors=out,
        measurements_total=total,
        measurements_accepted=accepted,
        reruns=reruns,
    )


def _decode_data_block(state: QuantumState, n_label: int, label: int | None) -> np.ndarray:
    if not n_label:
        return np.abs(state.amplitudes)
    dim = 1 << (state.n_qubits - n_label)
    block = state.amplitudes[label * dim : (label + 1) * dim]
    return np.abs(block) / np.linalg.norm(block)


def variability_probe(
    checkpoints: list[Checkpoint],
    count: int,
    rng: np.random.Generator,
    label: int | None = None,
) -> list[tuple[int, float]]:
    """(measurement count, mean pairwise L2 distance) per checkpoint.

    The measurement count is the number of sampled mid-circuit
    measurements across the whole denoising chain.
    """
    rows = []
    for ckpt in checkpoints:
        cfg = ckpt.config
        per_step = len(ckpt.circuit.measurement_events())
        n_meas = per_step * cfg.T
        vecs = sample(ckpt, count, rng, label=label).vectors
        dists = [
            float(np.linalg.norm(vecs[i] - vecs[j]))
            for i in range(count)
            for j in range(i + 1, count)
        ]
        rows.append((n_meas, float(np.mean(dists))))
    return rows
