"""Contrastive deep clustering at desk scale.

A small float64 autograd core drives a clustering MLP trained with two
contrastive losses (over sample embeddings and over cluster-membership
columns) plus a cluster-balance penalty. Ships with exact-oracle evaluation
metrics, a brute-force mutual-information checker for the contrastive bound,
synthetic dataset generators and a CLI experiment runner.
"""

from .augment import AugmentSpec, augment_batch, default_noise_sigma
from .data import Dataset, gen_blobs, gen_rings, load_cifar10_binary, load_csv, load_drcd, save_drcd, standardize
from .losses import LossBreakdown, af_loss, ap_loss, cr_loss, info_nce, total_loss
from .metrics import acc, ari, cluster_sizes, contingency, hungarian, nmi, variance_report
from .mioracle import DiscreteSystem, KernelMatrix, bound_vs_loss, contrastive_bound, kernel_loss, make_kernel, mi_exact, random_system
from .model import ClusterModel, forward, init_model, load_model, predict, save_model
from .tensor import Tensor, add_bias, diag_part, l2_normalize_rows, logsumexp_rows, matmul, softmax_rows, tensor
from .train import Adam, EpochRecord, TrainConfig, evaluate, train

__version__ = "0.1.0"
