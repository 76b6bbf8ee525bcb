"""Clustering network: MLP encoder, linear head, softmax assignments.

The network maps an input vector to a K-dimensional assignment feature z;
row-wise softmax turns z into an assignment probability p and argmax of p is
the predicted cluster. Hidden layers use rectifier activations; the head is
a plain linear layer. Checkpoints are a flat little-endian binary container
(magic ``DRCM``).
"""

from __future__ import annotations

import struct
from dataclasses import dataclass, field

import numpy as np

from .errors import FormatError, ParameterError, ShapeError
from .tensor import Tensor, add_bias, matmul, softmax_rows

CHECKPOINT_MAGIC = b"DRCM"
CHECKPOINT_VERSION = 1


@dataclass
class ClusterModel:
    layer_sizes: list[int]
    weights: list[Tensor] = field(default_factory=list)
    biases: list[Tensor] = field(default_factory=list)

    @property
    def input_dim(self) -> int:
        return self.layer_sizes[0]

    @property
    def k(self) -> int:
        return self.layer_sizes[-1]

    def parameters(self) -> list[Tensor]:
        return [t for pair in zip(self.weights, self.biases) for t in pair]

    def parameter_count(self) -> int:
        return sum((i + 1) * o for i, o in zip(self.layer_sizes[:-1], self.layer_sizes[1:]))


def init_model(layer_sizes, seed: int) -> ClusterModel:
    """Fan-in-scaled symmetric init (scale sqrt(2/fan_in)), zero biases, seeded."""
    sizes = [int(s) for s in layer_sizes]
    if len(sizes) < 2:
        raise ParameterError(f"need at least input and output sizes, got {sizes}")
    if any(s <= 0 for s in sizes):
        raise ParameterError(f"layer sizes must be positive, got {sizes}")
    rng = np.random.default_rng(seed)
    model = ClusterModel(layer_sizes=sizes)
    for fan_in, fan_out in zip(sizes[:-1], sizes[1:]):
        w = rng.standard_normal((fan_in, fan_out)) * np.sqrt(2.0 / fan_in)
        model.weights.append(Tensor(w, requires_grad=True))
        model.biases.append(Tensor(np.zeros(fan_out), requires_grad=True))
    return model


def forward(model: ClusterModel, x: Tensor) -> tuple[Tensor, Tensor]:
    """Return (z, p): assignment features and softmax assignment probabilities."""
    if x.data.ndim != 2 or x.data.shape[1] != model.input_dim:
        raise ShapeError(f"forward: input shape {x.data.shape} does not match input dim {model.input_dim}")
    h = x
    last = len(model.weights) - 1
    for i, (w, b) in enumerate(zip(model.weights, model.biases)):
        h = add_bias(matmul(h, w), b)
        if i < last:
            h = h.relu()
    z = h
    return z, softmax_rows(z)


def predict(model: ClusterModel, x) -> np.ndarray:
    """Argmax cluster labels; ties resolve to the lowest index."""
    if not isinstance(x, Tensor):
        x = Tensor(x)
    _, p = forward(model, x)
    return np.argmax(p.data, axis=1)


def save_model(model: ClusterModel, path) -> None:
    with open(path, "wb") as fh:
        fh.write(CHECKPOINT_MAGIC)
        fh.write(struct.pack("<II", CHECKPOINT_VERSION, len(model.weights)))
        for w, b in zip(model.weights, model.biases):
            rows, cols = w.data.shape
            fh.write(struct.pack("<II", rows, cols))
            fh.write(w.data.astype("<f8").tobytes(order="C"))
            fh.write(b.data.astype("<f8").tobytes(order="C"))


def load_model(path) -> ClusterModel:
    with open(path, "rb") as fh:
        blob = fh.read()
    if blob[:4] != CHECKPOINT_MAGIC:
        raise FormatError(f"bad checkpoint magic {blob[:4]!r} at byte 0")
    version, n_layers = struct.unpack_from("<II", blob, 4)
    if version != CHECKPOINT_VERSION:
        raise FormatError(f"unsupported checkpoint version {version}")
    off = 12
    weights, biases, sizes = [], [], []
    for layer in range(n_layers):
        if off + 8 > len(blob):
            raise FormatError(f"truncated checkpoint: layer {layer} header at byte {off}")
        rows, cols = struct.unpack_from("<II", blob, off)
        off += 8
        need = (rows * cols + cols) * 8
        if off + need > len(blob):
            raise FormatError(f"truncated checkpoint: expected {need} bytes for layer {layer} at byte {off}, have {len(blob) - off}")
        w = np.frombuffer(blob, dtype="<f8", count=rows * cols, offset=off).reshape(rows, cols)
        off += rows * cols * 8
        b = np.frombuffer(blob, dtype="<f8", count=cols, offset=off)
        off += cols * 8
        weights.append(Tensor(w.copy(), requires_grad=True))
        biases.append(Tensor(b.copy(), requires_grad=True))
        if layer == 0:
            sizes.append(rows)
        sizes.append(cols)
    if off != len(blob):
        raise FormatError(f"trailing bytes in checkpoint: expected length {off}, got {len(blob)}")
    model = ClusterModel(layer_sizes=sizes)
    model.weights = weights
    model.biases = biases
    return model
