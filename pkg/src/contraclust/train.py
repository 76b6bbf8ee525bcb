"""Minibatch training loop: sample batch, augment, evaluate the three loss
terms, update parameters with Adam. One history record per epoch."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import metrics
from .augment import AugmentSpec, augment_batch
from .errors import ContractError, ParameterError
from .losses import total_loss
from .model import ClusterModel, forward
from .tensor import Tensor


@dataclass
class TrainConfig:
    k: int
    lr: float = 1e-4
    epochs: int = 500
    batch_size: int = 256
    lam: float = 0.005
    t_af: float = 0.5
    t_ap: float = 0.95
    views_per_sample: int = 2
    seed: int = 0
    beta1: float = 0.9
    beta2: float = 0.999
    eps: float = 1e-8
    normalize_af: bool = True
    normalize_ap: bool = True

    def validate(self, n_samples: int | None = None) -> None:
        problems = []
        if self.k < 2:
            problems.append(f"k must be >= 2, got {self.k}")
        if self.lr <= 0:
            problems.append(f"lr must be > 0, got {self.lr}")
        if self.epochs < 0:
            problems.append(f"epochs must be >= 0, got {self.epochs}")
        if self.batch_size < 1:
            problems.append(f"batch_size must be >= 1, got {self.batch_size}")
        if self.lam < 0:
            problems.append(f"lambda must be >= 0, got {self.lam}")
        if self.t_af <= 0 or self.t_ap <= 0:
            problems.append(f"temperatures must be > 0, got t_af={self.t_af}, t_ap={self.t_ap}")
        if self.views_per_sample < 2:
            problems.append(f"views_per_sample must be >= 2, got {self.views_per_sample}")
        if n_samples is not None and self.batch_size > n_samples:
            problems.append(f"batch_size {self.batch_size} exceeds dataset size {n_samples}")
        if problems:
            raise ParameterError("; ".join(problems))


@dataclass
class EpochRecord:
    epoch: int
    af: float
    ap: float
    cr: float
    total: float
    acc: float | None
    nmi: float | None
    ari: float | None
    cluster_sizes: list[int]
    steps: int

    def as_csv_row(self) -> list:
        fmt = lambda v: "" if v is None else repr(v)
        return [self.epoch, repr(self.af), repr(self.ap), repr(self.cr), repr(self.total),
                fmt(self.acc), fmt(self.nmi), fmt(self.ari)]


CSV_COLUMNS = ["epoch", "af", "ap", "cr", "total", "acc", "nmi", "ari"]


class Adam:
    """Standard Adam with bias correction; state per parameter tensor."""

    def __init__(self, params: list[Tensor], lr: float, beta1: float = 0.9, beta2: float = 0.999, eps: float = 1e-8):
        self.params = params
        self.lr = lr
        self.beta1 = beta1
        self.beta2 = beta2
        self.eps = eps
        self.t = 0
        self.m = [np.zeros_like(p.data) for p in params]
        self.v = [np.zeros_like(p.data) for p in params]

    def step(self) -> None:
        self.t += 1
        for i, p in enumerate(self.params):
            g = p.grad
            if g is None:
                continue
            if g.shape != p.data.shape:
                raise ContractError(f"grad shape {g.shape} does not match parameter shape {p.data.shape}")
            self.m[i] = self.beta1 * self.m[i] + (1.0 - self.beta1) * g
            self.v[i] = self.beta2 * self.v[i] + (1.0 - self.beta2) * g * g
            m_hat = self.m[i] / (1.0 - self.beta1 ** self.t)
            v_hat = self.v[i] / (1.0 - self.beta2 ** self.t)
            p.data = p.data - self.lr * m_hat / (np.sqrt(v_hat) + self.eps)

    def zero_grad(self) -> None:
        for p in self.params:
            p.grad = None


def evaluate(model: ClusterModel, dataset) -> dict:
    """Full-dataset predictions plus ACC/NMI/ARI when ground truth exists."""
    pred = _predict_labels(model, dataset.x)
    sizes = metrics.cluster_sizes(pred, model.k)
    out = {"pred": pred, "cluster_sizes": sizes.tolist(), "acc": None, "nmi": None, "ari": None}
    if dataset.y is not None:
        k = max(model.k, int(dataset.y.max()) + 1)
        out["acc"] = metrics.acc(pred, dataset.y, k)
        out["nmi"] = metrics.nmi(pred, dataset.y)
        out["ari"] = metrics.ari(pred, dataset.y)
    return out


def train(
    model: ClusterModel,
    dataset,
    cfg: TrainConfig,
    augment_spec: AugmentSpec,
    disable_af: bool = False,
    disable_ap: bool = False,
    disable_cr: bool = False,
) -> tuple[ClusterModel, list[EpochRecord]]:
    """Run the seeded epoch/minibatch loop and return the model with its history.

    Each step draws the next shuffled minibatch, builds views_per_sample - 1
    augmented views, averages the combined loss across original/augmented
    pairs and applies one Adam update. The last incomplete minibatch of an
    epoch is dropped so contrastive denominators stay homogeneous. Any
    non-finite parameter aborts with the offending epoch and batch.
    """
    cfg.validate(n_samples=dataset.n)
    if dataset.n < 1:
        raise ParameterError("dataset is empty")
    augment_spec.validate()

    history: list[EpochRecord] = []
    opt = Adam(model.parameters(), lr=cfg.lr, beta1=cfg.beta1, beta2=cfg.beta2, eps=cfg.eps)
    shuffle_rng = np.random.default_rng(cfg.seed)
    steps_per_epoch = dataset.n // cfg.batch_size
    global_step = 0

    for epoch in range(cfg.epochs):
        order = shuffle_rng.permutation(dataset.n)
        sums = {"af": 0.0, "ap": 0.0, "cr": 0.0, "total": 0.0}
        for b in range(steps_per_epoch):
            idx = order[b * cfg.batch_size:(b + 1) * cfg.batch_size]
            x = Tensor(dataset.x[idx])
            z, p = forward(model, x)

            breakdowns = []
            for view in range(1, cfg.views_per_sample):
                x_aug = augment_batch(x, augment_spec, step=global_step * 1024 + view, indices=idx)
                z_aug, p_aug = forward(model, x_aug)
                breakdowns.append(total_loss(z, z_aug, p, p_aug, cfg,
                                             disable_af=disable_af, disable_ap=disable_ap, disable_cr=disable_cr))
            loss = breakdowns[0].total
            for extra in breakdowns[1:]:
                loss = loss + extra.total
            loss = loss.scale(1.0 / len(breakdowns))

            opt.zero_grad()
            loss.backward()
            opt.step()
            global_step += 1

            for key in ("af", "ap", "cr"):
                sums[key] += float(np.mean([getattr(bd, key).item() for bd in breakdowns]))
            sums["total"] += loss.item()
            _check_finite(model, epoch, b)

        scale = 1.0 / max(steps_per_epoch, 1)
        ev = evaluate(model, dataset)
        history.append(EpochRecord(
            epoch=epoch,
            af=sums["af"] * scale, ap=sums["ap"] * scale,
            cr=sums["cr"] * scale, total=sums["total"] * scale,
            acc=ev["acc"], nmi=ev["nmi"], ari=ev["ari"],
            cluster_sizes=ev["cluster_sizes"],
            steps=steps_per_epoch,
        ))
    return model, history


def _predict_labels(model: ClusterModel, x: np.ndarray) -> np.ndarray:
    z, p = forward(model, Tensor(x))
    return np.argmax(p.data, axis=1)


def _check_finite(model: ClusterModel, epoch: int, batch: int) -> None:
    for i, p in enumerate(model.parameters()):
        if not np.all(np.isfinite(p.data)):
            raise ContractError(f"non-finite parameter {i} after epoch {epoch}, batch {batch}")
