"""Fully-connected autoencoder with manual backpropagation.

Produces encoding-ready latents: the latent layer applies softplus and
explicit L2 normalization, so every latent vector is nonnegative and
unit norm, exactly what amplitude encoding expects and what decoded
amplitude vectors look like. The decoder therefore learns on normalized
latents and accepts generated vectors directly.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ConfigError, ShapeError


def _softplus(x: np.ndarray) -> np.ndarray:
    return np.logaddexp(0.0, x)


def _sigmoid(x: np.ndarray) -> np.ndarray:
    return 1.0 / (1.0 + np.exp(-np.clip(x, -60, 60)))


@dataclass
class AutoencoderParams:
    enc_w1: np.ndarray
    enc_b1: np.ndarray
    enc_w2: np.ndarray
    enc_b2: np.ndarray
    dec_w1: np.ndarray
    dec_b1: np.ndarray
    dec_w2: np.ndarray
    dec_b2: np.ndarray

    def __post_init__(self):
        if self.enc_w1.shape[1] != self.enc_b1.size or self.enc_w2.shape[0] != self.enc_b1.size:
            raise ShapeError("encoder layer shapes do not chain")
        if self.enc_w2.shape[1] != self.enc_b2.size or self.dec_w1.shape[0] != self.enc_b2.size:
            raise ShapeError("latent layer shapes do not chain")
        if self.dec_w1.shape[1] != self.dec_b1.size or self.dec_w2.shape[0] != self.dec_b1.size:
            raise ShapeError("decoder layer shapes do not chain")
        if self.dec_w2.shape[1] != self.enc_w1.shape[0]:
            raise ShapeError("decoder output must match encoder input")
        for arr in self.arrays():
            if not np.all(np.isfinite(arr)):
                raise ConfigError("autoencoder parameters must be finite")

    @property
    def input_dim(self) -> int:
        return self.enc_w1.shape[0]

    @property
    def latent_dim(self) -> int:
        return self.enc_b2.size

    def arrays(self) -> list[np.ndarray]:
        return [
            self.enc_w1, self.enc_b1, self.enc_w2, self.enc_b2,
            self.dec_w1, self.dec_b1, self.dec_w2, self.dec_b2,
        ]

    def copy(self) -> "AutoencoderParams":
        return AutoencoderParams(*(a.copy() for a in self.arrays()))


def init_autoencoder(
    input_dim: int, hidden: int, latent_dim: int, rng: np.random.Generator
) -> AutoencoderParams:
    def glorot(fan_in, fan_out):
        scale = np.sqrt(6.0 / (fan_in + fan_out))
        return rng.uniform(-scale, scale, (fan_in, fan_out))

    return AutoencoderParams(
        enc_w1=glorot(input_dim, hidden),
        enc_b1=np.zeros(hidden),
        enc_w2=glorot(hidden, latent_dim),
        enc_b2=np.zeros(latent_dim),
        dec_w1=glorot(latent_dim, hidden),
        dec_b1=np.zeros(hidden),
        dec_w2=glorot(hidden, input_dim),
        dec_b2=np.zeros(input_dim),
    )


def _forward_all(p: AutoencoderParams, x: np.ndarray):
    """All intermediate activations for a (B, input_dim) batch."""
    h = np.tanh(x @ p.enc_w1 + p.enc_b1)
    z_pre = h @ p.enc_w2 + p.enc_b2
    u = _softplus(z_pre)
    r = np.linalg.norm(u, axis=1, keepdims=True)
    z = u / r
    g = np.tanh(z @ p.dec_w1 + p.dec_b1)
    y = _sigmoid(g @ p.dec_w2 + p.dec_b2)
    return h, z_pre, u, r, z, g, y


def ae_forward(p: AutoencoderParams, image: np.ndarray):
    """(latent, reconstruction) for one image or a batch of images."""
    x = np.asarray(image, dtype=np.float64)
    single = x.ndim == 1
    x = np.atleast_2d(x)
    if x.shape[1] != p.input_dim:
        raise ShapeError(f"expected input dim {p.input_dim}, got {x.shape[1]}")
    _, _, _, _, z, _, y = _forward_all(p, x)
    if single:
        return z[0], y[0]
    return z, y


def encode_batch(p: AutoencoderParams, images: np.ndarray) -> np.ndarray:
    z, _ = ae_forward(p, np.atleast_2d(images))
    return z


def decode_batch(p: AutoencoderParams, latents: np.ndarray) -> np.ndarray:
    z = np.atleast_2d(np.asarray(latents, dtype=np.float64))
    if z.shape[1] != p.latent_dim:
        raise ShapeError(f"expected latent dim {p.latent_dim}, got {z.shape[1]}")
    g = np.tanh(z @ p.dec_w1 + p.dec_b1)
    return _sigmoid(g @ p.dec_w2 + p.dec_b2)


def reconstruction_loss(p: AutoencoderParams, x: np.ndarray) -> float:
    _, y = ae_forward(p, x)
    return float(np.mean((y - np.atleast_2d(x)) ** 2))


def ae_gradients(p: AutoencoderParams, x: np.ndarray):
    """Mean-squared-error loss and its gradient for a batch.

    Hand-derived backward pass; spot-checked against finite differences
    in the test suite.
    """
    x = np.atleast_2d(np.asarray(x, dtype=np.float64))
    b = x.shape[0]
    h, z_pre, u, r, z, g, y = _forward_all(p, x)
    loss = float(np.mean((y - x) ** 2))

    d_y = 2.0 * (y - x) / y.size
    d_out_pre = d_y * y * (1.0 - y)
    d_dec_w2 = g.T @ d_out_pre
    d_dec_b2 = d_out_pre.sum(axis=0)
    d_g = d_out_pre @ p.dec_w2.T
    d_g_pre = d_g * (1.0 - g**2)
    d_dec_w1 = z.T @ d_g_pre
    d_dec_b1 = d_g_pre.sum(axis=0)
    d_z = d_g_pre @ p.dec_w1.T
    # Backward through z = u / ||u||.
    d_u = (d_z - z * np.sum(z * d_z, axis=1, keepdims=True)) / r
    d_z_pre = d_u * _sigmoid(z_pre)
    d_enc_w2 = h.T @ d_z_pre
    d_enc_b2 = d_z_pre.sum(axis=0)
    d_h = d_z_pre @ p.enc_w2.T
    d_h_pre = d_h * (1.0 - h**2)
    d_enc_w1 = x.T @ d_h_pre
    d_enc_b1 = d_h_pre.sum(axis=0)

    grads = AutoencoderParams(
        enc_w1=d_enc_w1, enc_b1=d_enc_b1, enc_w2=d_enc_w2, enc_b2=d_enc_b2,
        dec_w1=d_dec_w1, dec_b1=d_dec_b1, dec_w2=d_dec_w2, dec_b2=d_dec_b2,
    )
    return loss, grads


def ae_train(
    images: np.ndarray,
    hidden: int = 128,
    latent_dim: int = 8,
    lr: float = 1e-3,
    epochs: int = 20,
    batch_size: int = 64,
    seed: int = 0,
) -> tuple[AutoencoderParams, list[float]]:
    """Adam training of the reconstruction MSE; deterministic under seed."""
    images = np.atleast_2d(np.asarray(images, dtype=np.float64))
    if images.shape[0] < 1:
        raise ConfigError("dataset must be nonempty")
    if latent_dim < 1 or hidden < 1:
        raise ConfigError("layer sizes must be positive")
    rng = np.random.default_rng(seed)
    p = init_autoencoder(images.shape[1], hidden, latent_dim, rng)
    m = [np.zeros_like(a) for a in p.arrays()]
    v = [np.zeros_like(a) for a in p.arrays()]
    step = 0
    history: list[float] = []
    n = images.shape[0]
    for _ in range(epochs):
        order = rng.permutation(n)
        losses = []
        for start in range(0, n, batch_size):
            batch = images[order[start : start + batch_size]]
            loss, grads = ae_gradients(p, batch)
            losses.append(loss)
            step += 1
            new_arrays = []
            for i, (a, ga) in enumerate(zip(p.arrays(), grads.arrays())):
                m[i] = 0.9 * m[i] + 0.1 * ga
                v[i] = 0.999 * v[i] + 0.001 * ga**2
                m_hat = m[i] / (1.0 - 0.9**step)
                v_hat = v[i] / (1.0 - 0.999**step)
                new_arrays.append(a - lr * m_hat / (np.sqrt(v_hat) + 1e-8))
            p = AutoencoderParams(*new_arrays)
        history.append(float(np.mean(losses)))
    return p, history
