"""Contrastive clustering objective: feature term, assignment term, balance term.

All losses are differentiable scalars built from :mod:`contraclust.tensor`
operations. The feature loss contrasts each sample's embedding against the
batch of augmented embeddings; the assignment loss applies the same form to
the K cluster-membership columns of the probability matrices; the balance
term penalizes uneven cluster mass. Everything uses natural logs and the
negated (minimization) sign convention.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ContractError, ParameterError, ShapeError
from .tensor import Tensor, diag_part, l2_normalize_rows, logsumexp_rows, matmul

SIMPLEX_TOL = 1e-9


def info_nce(s: Tensor, temperature: float) -> Tensor:
    """-(1/N) sum_i log( exp(s_ii/T) / sum_j exp(s_ij/T) ) for a square score matrix.

    Always >= 0; equals log N when every score in a row is identical.
    """
    if s.data.ndim != 2 or s.data.shape[0] != s.data.shape[1]:
        raise ShapeError(f"info_nce: score matrix must be square, got {s.data.shape}")
    t = float(temperature)
    if not t > 0.0:
        raise ParameterError(f"info_nce: temperature must be > 0, got {temperature}")
    n = s.data.shape[0]
    scaled = s.scale(1.0 / t)
    per_row = logsumexp_rows(scaled) - diag_part(scaled)
    return per_row.sum().scale(1.0 / n)


def af_loss(z: Tensor, z_aug: Tensor, temperature: float, normalize: bool = True) -> Tensor:
    """Contrastive loss over the N sample embeddings and their augmented pairs.

    Scores are s_ij = z_i . z'_j, after optional row L2-normalization of both
    views (on by default: bounded scores keep exp well-conditioned at small T).
    """
    if z.data.shape != z_aug.data.shape:
        raise ShapeError(f"af_loss: shapes {z.data.shape} and {z_aug.data.shape} differ")
    if z.data.ndim != 2:
        raise ShapeError(f"af_loss: expected N x K matrices, got {z.data.shape}")
    if normalize:
        z = l2_normalize_rows(z)
        z_aug = l2_normalize_rows(z_aug)
    return info_nce(matmul(z, z_aug.T), temperature)


def ap_loss(p: Tensor, p_aug: Tensor, temperature: float, normalize: bool = True) -> Tensor:
    """Contrastive loss over the K cluster columns of two assignment matrices.

    Column i of p is the membership profile of cluster i across the batch;
    s_ij = q_i . q'_j and the contrast runs over clusters, not samples. By
    default both column sets are L2-normalized first: raw column dot products
    grow with the batch size (up to N, overflowing exp(s/T) at the default
    batch 256) and give near-empty clusters no reviving gradient. Pass
    ``normalize=False`` for the literal raw-column form.
    """
    if p.data.shape != p_aug.data.shape:
        raise ShapeError(f"ap_loss: shapes {p.data.shape} and {p_aug.data.shape} differ")
    _check_simplex_rows("ap_loss", p)
    _check_simplex_rows("ap_loss", p_aug)
    q = p.T
    q_aug = p_aug.T
    if normalize:
        q = l2_normalize_rows(q)
        q_aug = l2_normalize_rows(q_aug)
    return info_nce(matmul(q, q_aug.T), temperature)


def cr_loss(p: Tensor) -> Tensor:
    """(1/N) * sum over clusters of (column mass)^2.

    For simplex rows the value lies in [N/K, N]: minimized by perfectly
    balanced columns, maximized when one cluster absorbs everything.
    """
    _check_simplex_rows("cr_loss", p)
    n = p.data.shape[0]
    return p.sum_cols().square().sum().scale(1.0 / n)


@dataclass
class LossBreakdown:
    af: Tensor
    ap: Tensor
    cr: Tensor
    total: Tensor
    lam: float

    def values(self) -> dict:
        return {
            "af": self.af.item(),
            "ap": self.ap.item(),
            "cr": self.cr.item(),
            "total": self.total.item(),
        }


def total_loss(
    z: Tensor,
    z_aug: Tensor,
    p: Tensor,
    p_aug: Tensor,
    cfg,
    disable_af: bool = False,
    disable_ap: bool = False,
    disable_cr: bool = False,
) -> LossBreakdown:
    """Combined objective af + ap + lambda * cr with per-term ablation switches.

    ``cfg`` supplies ``t_af``, ``t_ap``, ``lam``, ``normalize_af`` and
    ``normalize_ap``. Disabled terms are replaced by constant zeros so the
    breakdown keeps its shape for logging.
    """
    zero = Tensor(np.array(0.0))
    af = zero if disable_af else af_loss(z, z_aug, cfg.t_af, normalize=cfg.normalize_af)
    ap = zero if disable_ap else ap_loss(p, p_aug, cfg.t_ap, normalize=cfg.normalize_ap)
    cr = zero if disable_cr else cr_loss(p)
    total = af + ap + cr.scale(cfg.lam)
    return LossBreakdown(af=af, ap=ap, cr=cr, total=total, lam=cfg.lam)


def _check_simplex_rows(op: str, p: Tensor) -> None:
    if p.data.ndim != 2:
        raise ShapeError(f"{op}: expected an N x K matrix, got {p.data.shape}")
    if np.any(p.data < -SIMPLEX_TOL):
        raise ContractError(f"{op}: negative assignment probability (min {p.data.min():.3e})")
    row_sums = p.data.sum(axis=1)
    err = np.abs(row_sums - 1.0).max()
    if err > SIMPLEX_TOL:
        raise ContractError(f"{op}: rows must sum to 1 within {SIMPLEX_TOL}, worst deviation {err:.3e}")
