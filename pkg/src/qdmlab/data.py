"""Dataset ingestion and file output.

Reads the IDX binary container (big-endian magic, dimension sizes,
byte-per-pixel payload), filters digits, downsamples 28x28 images to
16x16 by bilinear interpolation, and writes deterministic PGM/CSV
artifacts. Dataset files are read from a local directory; there is no
network downloader.
"""

from __future__ import annotations

import csv
import io
import struct
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import ConfigError, EncodingError, FormatError, ShapeError

IDX_MAGIC_IMAGES = 2051
IDX_MAGIC_LABELS = 2049

MNIST_FILES = {
    "train": ("train-images-idx3-ubyte", "train-labels-idx1-ubyte"),
    "test": ("t10k-images-idx3-ubyte", "t10k-labels-idx1-ubyte"),
}


@dataclass(frozen=True)
class Dataset:
    images: np.ndarray  # (N, H, W) float in [0, 1]
    labels: np.ndarray  # (N,) ints 0..9
    split: str = ""

    def __post_init__(self):
        if self.images.shape[0] != self.labels.shape[0]:
            raise ShapeError("images and labels lengths differ")

    def __len__(self) -> int:
        return self.images.shape[0]


def parse_idx_images(data: bytes) -> np.ndarray:
    """Decode an IDX image file to a (N, rows, cols) uint8 array."""
    if len(data) < 16:
        raise FormatError("IDX image header truncated")
    magic, count, rows, cols = struct.unpack(">IIII", data[:16])
    if magic != IDX_MAGIC_IMAGES:
        raise FormatError(f"bad IDX image magic {magic} (expected {IDX_MAGIC_IMAGES})")
    expected = count * rows * cols
    payload = data[16:]
    if len(payload) < expected:
        raise FormatError(f"IDX payload has {len(payload)} bytes, expected {expected}")
    return np.frombuffer(payload[:expected], dtype=np.uint8).reshape(count, rows, cols)


def parse_idx_labels(data: bytes) -> np.ndarray:
    if len(data) < 8:
        raise FormatError("IDX label header truncated")
    magic, count = struct.unpack(">II", data[:8])
    if magic != IDX_MAGIC_LABELS:
        raise FormatError(f"bad IDX label magic {magic} (expected {IDX_MAGIC_LABELS})")
    payload = data[8:]
    if len(payload) < count:
        raise FormatError(f"IDX payload has {len(payload)} bytes, expected {count}")
    return np.frombuffer(payload[:count], dtype=np.uint8).astype(np.int64)


def load_mnist(directory, split: str = "train") -> Dataset:
    """Load MNIST IDX files from a local directory; pixels scaled to [0, 1]."""
    if split not in MNIST_FILES:
        raise ConfigError(f"unknown split {split!r}")
    img_name, lbl_name = MNIST_FILES[split]
    directory = Path(directory)
    images = parse_idx_images((directory / img_name).read_bytes())
    labels = parse_idx_labels((directory / lbl_name).read_bytes())
    return Dataset(images=images.astype(np.float64) / 255.0, labels=labels, split=split)


def bilinear_resize(image: np.ndarray, out_h: int, out_w: int) -> np.ndarray:
    """Bilinear resampling over pixel centers, vectorized."""
    image = np.asarray(image, dtype=np.float64)
    if image.ndim != 2:
        raise ShapeError(f"expected a 2-D image, got shape {image.shape}")
    in_h, in_w = image.shape
    ys = (np.arange(out_h) + 0.5) * in_h / out_h - 0.5
    xs = (np.arange(out_w) + 0.5) * in_w / out_w - 0.5
    ys = np.clip(ys, 0.0, in_h - 1.0)
    xs = np.clip(xs, 0.0, in_w - 1.0)
    y0 = np.floor(ys).astype(int)
    x0 = np.floor(xs).astype(int)
    y1 = np.minimum(y0 + 1, in_h - 1)
    x1 = np.minimum(x0 + 1, in_w - 1)
    wy = (ys - y0)[:, None]
    wx = (xs - x0)[None, :]
    top = image[np.ix_(y0, x0)] * (1 - wx) + image[np.ix_(y0, x1)] * wx
    bot = image[np.ix_(y1, x0)] * (1 - wx) + image[np.ix_(y1, x1)] * wx
    return top * (1 - wy) + bot * wy


def downsample_16(image: np.ndarray) -> np.ndarray:
    """28x28 -> 16x16, the encoding size for the 8-qubit register."""
    image = np.asarray(image, dtype=np.float64)
    if image.shape != (28, 28):
        raise ShapeError(f"expected 28x28 image, got {image.shape}")
    return bilinear_resize(image, 16, 16)


def filter_digits(ds: Dataset, allowed) -> Dataset:
    allowed = set(int(a) for a in allowed)
    mask = np.isin(ds.labels, sorted(allowed))
    return Dataset(images=ds.images[mask], labels=ds.labels[mask], split=ds.split)


def to_unit_vector(image: np.ndarray) -> np.ndarray:
    """Flatten row-major and normalize to unit L2 norm."""
    v = np.asarray(image, dtype=np.float64).reshape(-1)
    norm = np.linalg.norm(v)
    if norm == 0.0:
        raise EncodingError("cannot normalize an all-zero image")
    return v / norm


def write_pgm(image: np.ndarray, path) -> None:
    """Binary PGM (P5, maxval 255); values in [0, 1] are scaled and clipped."""
    image = np.asarray(image, dtype=np.float64)
    if image.ndim != 2:
        raise ShapeError(f"expected a 2-D image, got shape {image.shape}")
    pixels = np.clip(np.round(image * 255.0), 0, 255).astype(np.uint8)
    h, w = pixels.shape
    with open(path, "wb") as f:
        f.write(f"P5\n{w} {h}\n255\n".encode("ascii"))
        f.write(pixels.tobytes())


def write_csv(rows, path, header: list[str] | None = None) -> None:
    """CSV with CRLF line endings and an optional header row."""
    with open(path, "w", newline="") as f:
        writer = csv.writer(f)
        if header is not None:
            writer.writerow(header)
        for row in rows:
            writer.writerow(list(row))


def load_demo_digits(upscale: bool = True) -> Dataset:
    """Bundled scikit-learn digits as a hermetic stand-in corpus.

    The 8x8 images are bilinearly upscaled to 28x28 so the full pipeline
    (784-input autoencoder, 28->16 downsampling) runs unchanged when no
    MNIST directory is available.
    """
    from sklearn.datasets import load_digits

    raw = load_digits()
    images = raw.images / 16.0
    if upscale:
        images = np.stack([bilinear_resize(im, 28, 28) for im in images])
    return Dataset(images=images, labels=raw.target.astype(np.int64), split="demo")
