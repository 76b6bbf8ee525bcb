"""Seeded stochastic views of a batch.

Randomness comes from a counter-based Philox stream keyed by (seed, step);
row i of the stream belongs to dataset index i, and a batch slices the stream
by the indices it carries. The same (seed, step, index) therefore always
yields the same transformation regardless of batch composition or order.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ParameterError, ShapeError
from .tensor import Tensor

KINDS = ("gaussian_noise", "feature_dropout", "image_basic")


@dataclass
class AugmentSpec:
    kind: str = "gaussian_noise"
    noise_sigma: float = 0.5
    dropout_prob: float = 0.1
    flip_prob: float = 0.5
    crop_padding: int = 2
    jitter_strength: float = 0.2
    seed: int = 0
    image_shape: tuple[int, int, int] | None = None

    def validate(self) -> None:
        if self.kind not in KINDS:
            raise ParameterError(f"unknown augmentation kind {self.kind!r}; choose from {KINDS}")
        if self.noise_sigma < 0:
            raise ParameterError(f"noise_sigma must be >= 0, got {self.noise_sigma}")
        if not 0.0 <= self.dropout_prob < 1.0:
            raise ParameterError(f"dropout_prob must be in [0, 1), got {self.dropout_prob}")
        if not 0.0 <= self.flip_prob <= 1.0:
            raise ParameterError(f"flip_prob must be in [0, 1], got {self.flip_prob}")
        if self.crop_padding < 0:
            raise ParameterError(f"crop_padding must be >= 0, got {self.crop_padding}")
        if not 0.0 <= self.jitter_strength <= 1.0:
            raise ParameterError(f"jitter_strength must be in [0, 1], got {self.jitter_strength}")


def default_noise_sigma(x: np.ndarray) -> float:
    """Half the mean per-feature standard deviation of the dataset."""
    return 0.5 * float(np.std(np.asarray(x, dtype=np.float64), axis=0).mean())


def _stream(spec: AugmentSpec, step: int) -> np.random.Generator:
    key = np.array([np.uint64(spec.seed), np.uint64(step)], dtype=np.uint64)
    return np.random.Generator(np.random.Philox(key=key))


def _resolve_image_shape(spec: AugmentSpec, d: int) -> tuple[int, int, int]:
    if spec.image_shape is not None:
        h, w, c = spec.image_shape
        if h * w * c != d:
            raise ShapeError(f"image shape {spec.image_shape} does not factor feature dim {d}")
        return h, w, c
    for c in (3, 1):
        side = round((d / c) ** 0.5)
        if side * side * c == d:
            return side, side, c
    raise ShapeError(f"feature dim {d} is not a square image; set image_shape explicitly")


def augment_batch(x, spec: AugmentSpec, step: int, indices=None):
    """Produce the augmented view of a batch for a given training step.

    ``indices`` are the dataset indices of the batch rows (default: 0..N-1);
    they select which rows of the (seed, step) random stream apply to which
    sample.
    """
    spec.validate()
    was_tensor = isinstance(x, Tensor)
    arr = x.data if was_tensor else np.asarray(x, dtype=np.float64)
    if arr.ndim != 2:
        raise ShapeError(f"augment_batch: expected an N x D batch, got {arr.shape}")
    n, d = arr.shape
    idx = np.arange(n) if indices is None else np.asarray(indices, dtype=np.int64)
    if idx.shape != (n,):
        raise ShapeError(f"augment_batch: {n} rows but {idx.shape} indices")
    rng = _stream(spec, step)
    rows = int(idx.max()) + 1 if n else 0

    if spec.kind == "gaussian_noise":
        noise = rng.standard_normal((rows, d))
        out = arr + spec.noise_sigma * noise[idx]
    elif spec.kind == "feature_dropout":
        if spec.dropout_prob == 0.0:
            out = arr.copy()
        else:
            keep = rng.random((rows, d)) >= spec.dropout_prob
            out = arr * keep[idx] / (1.0 - spec.dropout_prob)
    else:
        out = _augment_images(arr, idx, spec, rng)

    return Tensor(out) if was_tensor else out


def _augment_images(arr, idx, spec, rng):
    h, w, c = _resolve_image_shape(spec, arr.shape[1])
    rows = int(idx.max()) + 1
    pad = spec.crop_padding
    flips = rng.random(rows) < spec.flip_prob
    offsets = rng.integers(0, 2 * pad + 1, size=(rows, 2))
    jit = 1.0 + spec.jitter_strength * (2.0 * rng.random((rows, c)) - 1.0)

    out = np.empty_like(arr)
    for row, i in enumerate(idx):
        img = arr[row].reshape(h, w, c)
        if flips[i]:
            img = img[:, ::-1, :]
        if pad > 0:
            padded = np.pad(img, ((pad, pad), (pad, pad), (0, 0)), mode="reflect")
            oy, ox = offsets[i]
            img = padded[oy:oy + h, ox:ox + w, :]
        img = img * jit[i][None, None, :]
        out[row] = img.reshape(-1)
    return out
