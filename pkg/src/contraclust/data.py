"""Dataset generation, ingestion and persistence.

On-disk format (``.drcd``, little-endian): magic ``DRCD``, version u32=1,
N u64, D u64, has_labels u8, k_true u32 (0 when unlabeled), N*D float64
features row-major, then N int32 labels when labeled. CSV import expects a
header row; a trailing ``label`` column is optional.
"""

from __future__ import annotations

import csv
import struct
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import FormatError, GeometryError, ParameterError

MAGIC = b"DRCD"
VERSION = 1
HEADER = struct.Struct("<4sIQQBI")  # 29 bytes


@dataclass
class Dataset:
    x: np.ndarray
    y: np.ndarray | None = None
    k_true: int | None = None
    name: str = ""

    def __post_init__(self):
        self.x = np.ascontiguousarray(self.x, dtype=np.float64)
        if self.x.ndim != 2 or self.x.shape[0] < 1 or self.x.shape[1] < 1:
            raise ParameterError(f"features must be a nonempty N x D matrix, got {self.x.shape}")
        if self.y is not None:
            self.y = np.ascontiguousarray(self.y, dtype=np.int32)
            if self.y.shape != (self.x.shape[0],):
                raise ParameterError(f"{len(self.y)} labels for {self.x.shape[0]} samples")
            if self.k_true is None:
                self.k_true = int(self.y.max()) + 1
            if self.y.min() < 0 or self.y.max() >= self.k_true:
                raise ParameterError(f"labels must lie in [0, {self.k_true})")

    @property
    def n(self) -> int:
        return self.x.shape[0]

    @property
    def d(self) -> int:
        return self.x.shape[1]


def gen_blobs(k: int, n_per: int, d: int, center_spread: float, sigma: float, seed: int) -> Dataset:
    """k isotropic Gaussian clusters with centers kept >= 6*sigma apart.

    Centers are drawn uniformly in [-spread, spread]^d and rejection-resampled;
    after 10^4 failed tries the spread is declared too small.
    """
    if min(k, n_per, d) < 1 or center_spread <= 0 or sigma <= 0:
        raise ParameterError("k, n_per, d must be >= 1 and spread, sigma > 0")
    rng = np.random.default_rng(seed)
    centers = []
    tries = 0
    while len(centers) < k:
        cand = rng.uniform(-center_spread, center_spread, size=d)
        if all(np.linalg.norm(cand - c) >= 6.0 * sigma for c in centers):
            centers.append(cand)
        else:
            tries += 1
            if tries > 10_000:
                raise GeometryError(
                    f"could not place {k} centers >= {6 * sigma:.3g} apart in [-{center_spread}, {center_spread}]^{d}"
                )
    centers = np.asarray(centers)
    x = np.concatenate([c + sigma * rng.standard_normal((n_per, d)) for c in centers])
    y = np.repeat(np.arange(k, dtype=np.int32), n_per)
    return Dataset(x=x, y=y, k_true=k, name=f"blobs-k{k}")


def gen_rings(k: int, n_per: int, radius_gap: float, noise: float, seed: int) -> Dataset:
    """k concentric 2-d rings (radius (i+1)*gap) with radial Gaussian noise."""
    if k < 1 or n_per < 1 or radius_gap <= 0 or noise < 0:
        raise ParameterError("k, n_per must be >= 1, radius_gap > 0, noise >= 0")
    rng = np.random.default_rng(seed)
    parts = []
    for ring in range(k):
        theta = rng.uniform(0.0, 2.0 * np.pi, size=n_per)
        r = (ring + 1) * radius_gap + noise * rng.standard_normal(n_per)
        parts.append(np.stack([r * np.cos(theta), r * np.sin(theta)], axis=1))
    x = np.concatenate(parts)
    y = np.repeat(np.arange(k, dtype=np.int32), n_per)
    return Dataset(x=x, y=y, k_true=k, name=f"rings-k{k}")


def save_drcd(ds: Dataset, path) -> None:
    has_labels = ds.y is not None
    with open(path, "wb") as fh:
        fh.write(HEADER.pack(MAGIC, VERSION, ds.n, ds.d, int(has_labels), ds.k_true if has_labels else 0))
        fh.write(ds.x.astype("<f8").tobytes(order="C"))
        if has_labels:
            fh.write(ds.y.astype("<i4").tobytes(order="C"))


def load_drcd(path) -> Dataset:
    blob = Path(path).read_bytes()
    if len(blob) < HEADER.size:
        raise FormatError(f"file too short for header: expected >= {HEADER.size} bytes, got {len(blob)}")
    magic, version, n, d, has_labels, k_true = HEADER.unpack_from(blob, 0)
    if magic != MAGIC:
        raise FormatError(f"bad magic {magic!r} at byte 0")
    if version != VERSION:
        raise FormatError(f"unsupported version {version} at byte 4")
    expected = HEADER.size + n * d * 8 + (n * 4 if has_labels else 0)
    if len(blob) != expected:
        raise FormatError(f"truncated or oversized file: expected {expected} bytes, got {len(blob)}")
    x = np.frombuffer(blob, dtype="<f8", count=n * d, offset=HEADER.size).reshape(n, d).copy()
    y = None
    if has_labels:
        y = np.frombuffer(blob, dtype="<i4", count=n, offset=HEADER.size + n * d * 8).copy()
    return Dataset(x=x, y=y, k_true=k_true if has_labels else None, name=Path(path).stem)


def load_csv(path) -> Dataset:
    """Header-row CSV; a last column named ``label`` becomes integer labels."""
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if not header:
            raise FormatError(f"{path}: empty csv")
        has_labels = header[-1].strip().lower() == "label"
        rows = [row for row in reader if row]
    if not rows:
        raise FormatError(f"{path}: no data rows")
    arr = np.asarray(rows, dtype=np.float64)
    if has_labels:
        return Dataset(x=arr[:, :-1], y=arr[:, -1].astype(np.int32), name=Path(path).stem)
    return Dataset(x=arr, name=Path(path).stem)


def load_cifar10_binary(directory) -> Dataset:
    """CIFAR-10 binary batches: train + test joined, features scaled to [0, 1]."""
    directory = Path(directory)
    names = [f"data_batch_{i}.bin" for i in range(1, 6)] + ["test_batch.bin"]
    record = 3073
    xs, ys = [], []
    for name in names:
        path = directory / name
        blob = path.read_bytes()
        if len(blob) % record != 0:
            raise FormatError(f"{path}: size {len(blob)} is not a multiple of {record}")
        count = len(blob) // record
        if count != 10_000:
            raise FormatError(f"{path}: expected 10000 records, got {count}")
        raw = np.frombuffer(blob, dtype=np.uint8).reshape(count, record)
        labels = raw[:, 0]
        if labels.max() > 9:
            raise FormatError(f"{path}: label byte out of range [0, 9]")
        xs.append(raw[:, 1:].astype(np.float64) / 255.0)
        ys.append(labels.astype(np.int32))
    return Dataset(x=np.concatenate(xs), y=np.concatenate(ys), k_true=10, name="cifar10")


def standardize(ds: Dataset) -> Dataset:
    """Per-feature z-scoring; constant features are left centered only."""
    mean = ds.x.mean(axis=0)
    std = ds.x.std(axis=0)
    std[std == 0.0] = 1.0
    return Dataset(x=(ds.x - mean) / std, y=ds.y, k_true=ds.k_true, name=ds.name)
