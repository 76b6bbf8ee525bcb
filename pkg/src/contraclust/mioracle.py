"""Exact mutual information on small discrete systems, plus the contrastive bound.

A ``DiscreteSystem`` fixes n points, a row-stochastic conditional matrix
p(x'_j | x_i) and a prior over the x_i (uniform by default). ``mi_exact``
brute-forces MI of the induced joint. ``make_kernel`` builds a score matrix
f with f_ij = scale_i * p(x'_j | x_i) / p(x'_j), the exact per-row
proportional kernel, and ``contrastive_bound`` evaluates

    log n + (c0 / n) * sum_i log( f_ii / sum_t f_it )

which is invariant to the per-row scales. ``bound_vs_loss`` exposes the
affine bridge bound = log n - c0 * loss to the batch contrastive loss.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import ContractError, ParameterError

DIST_TOL = 1e-12


def _check_distribution(name: str, dist: np.ndarray) -> None:
    if dist.ndim != 1 or np.any(dist < 0) or abs(dist.sum() - 1.0) > DIST_TOL:
        raise ContractError(f"{name} must be a nonnegative vector summing to 1 within {DIST_TOL}")


@dataclass
class DiscreteSystem:
    conditional: np.ndarray
    prior: np.ndarray | None = None

    def __post_init__(self):
        self.conditional = np.asarray(self.conditional, dtype=np.float64)
        if self.conditional.ndim != 2 or self.conditional.shape[0] != self.conditional.shape[1]:
            raise ContractError(f"conditional must be square, got {self.conditional.shape}")
        n = self.conditional.shape[0]
        if self.prior is None:
            self.prior = np.full(n, 1.0 / n)
        else:
            self.prior = np.asarray(self.prior, dtype=np.float64)
        _check_distribution("prior", self.prior)
        if np.any(self.conditional < 0):
            raise ContractError("conditional entries must be >= 0")
        rows = self.conditional.sum(axis=1)
        if np.abs(rows - 1.0).max() > DIST_TOL:
            raise ContractError(f"conditional rows must sum to 1 within {DIST_TOL}")

    @property
    def n(self) -> int:
        return self.conditional.shape[0]

    def joint(self) -> np.ndarray:
        return self.prior[:, None] * self.conditional

    def marginal(self) -> np.ndarray:
        """Distribution of the transformed point, p(x'_j) = sum_i prior_i cond_ij."""
        return self.joint().sum(axis=0)


@dataclass
class KernelMatrix:
    f: np.ndarray
    per_row_scale: np.ndarray = field(default=None)

    def __post_init__(self):
        self.f = np.asarray(self.f, dtype=np.float64)
        if self.per_row_scale is None:
            self.per_row_scale = np.ones(self.f.shape[0])


def mi_exact(sys: DiscreteSystem) -> float:
    """sum_ij joint_ij log( joint_ij / (row_i col_j) ) with 0 log 0 := 0."""
    joint = sys.joint()
    row = joint.sum(axis=1)
    col = joint.sum(axis=0)
    mask = joint > 0
    outer = np.outer(row, col)
    return float(np.sum(joint[mask] * np.log(joint[mask] / outer[mask])))


def make_kernel(sys: DiscreteSystem, scales=None) -> KernelMatrix:
    """Kernel satisfying the per-row proportionality f_ij = s_i * cond_ij / marg_j."""
    if scales is None:
        scales = np.ones(sys.n)
    scales = np.asarray(scales, dtype=np.float64)
    if scales.shape != (sys.n,) or np.any(scales <= 0):
        raise ParameterError(f"scales must be {sys.n} strictly positive values")
    marg = sys.marginal()
    if np.any(marg <= 0):
        raise ContractError("marginal has a zero entry; kernel ratios undefined")
    f = scales[:, None] * sys.conditional / marg[None, :]
    return KernelMatrix(f=f, per_row_scale=scales)


def kernel_loss(kernel: KernelMatrix | np.ndarray) -> float:
    """Batch contrastive loss of a kernel: -(1/n) sum_i log( f_ii / sum_t f_it )."""
    f = kernel.f if isinstance(kernel, KernelMatrix) else np.asarray(kernel, dtype=np.float64)
    n = f.shape[0]
    diag = f.diagonal()
    if np.any(diag <= 0):
        raise ContractError("kernel diagonal must be strictly positive")
    return float(-np.mean(np.log(diag / f.sum(axis=1))))


def contrastive_bound(sys: DiscreteSystem, kernel: KernelMatrix | np.ndarray, c0: float | None = None) -> float:
    """log n + (c0/n) * sum_i log(f_ii / sum_t f_it).

    c0 defaults to min_i p(x'_i | x_i), the largest admissible constant; any
    0 < c0 <= that minimum is accepted, and a zero diagonal conditional makes
    the hypothesis unmeetable.
    """
    diag_cond = sys.conditional.diagonal()
    max_c0 = float(diag_cond.min())
    if max_c0 <= 0:
        raise ContractError("system has a zero diagonal conditional; no admissible c0 exists")
    if c0 is None:
        c0 = max_c0
    if not 0 < c0 <= max_c0 + DIST_TOL:
        raise ContractError(f"c0 must satisfy 0 < c0 <= min diagonal conditional ({max_c0:.6g}), got {c0}")
    return float(np.log(sys.n) - c0 * kernel_loss(kernel))


def bound_vs_loss(sys: DiscreteSystem, kernel: KernelMatrix | np.ndarray, c0: float | None = None) -> tuple[float, float]:
    """(loss, bound) for a kernel on a system; bound = log n - c0 * loss.

    The relation is affine with negative slope, so across kernels on a fixed
    system a lower loss always means a higher bound.
    """
    loss = kernel_loss(kernel)
    bound = contrastive_bound(sys, kernel, c0)
    return loss, bound


def random_system(n: int, rng: np.random.Generator) -> DiscreteSystem:
    """Uniform-prior system with Dirichlet(1) conditional rows (a.s. positive diagonal)."""
    if n < 1:
        raise ParameterError(f"n must be >= 1, got {n}")
    cond = rng.dirichlet(np.ones(n), size=n)
    return DiscreteSystem(conditional=cond)
