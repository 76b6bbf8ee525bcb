"""Shared test oracles: central finite differences and error measures."""

import numpy as np


def finite_diff(fn, arrays, h=1e-5):
    """Central-difference gradients of a scalar function of numpy arrays.

    ``fn`` must re-evaluate from scratch on every call (it receives the same
    array objects, mutated one coordinate at a time).
    """
    grads = []
    for base in arrays:
        grad = np.zeros_like(base)
        flat, gflat = base.reshape(-1), grad.reshape(-1)
        for i in range(flat.size):
            orig = flat[i]
            flat[i] = orig + h
            up = fn(*arrays)
            flat[i] = orig - h
            down = fn(*arrays)
            flat[i] = orig
            gflat[i] = (up - down) / (2.0 * h)
        grads.append(grad)
    return grads


def rel_err(a, b):
    """Worst absolute difference, scaled by the larger magnitude (floor 1)."""
    a, b = np.asarray(a), np.asarray(b)
    scale = max(np.abs(a).max(initial=0.0), np.abs(b).max(initial=0.0), 1.0)
    return float(np.abs(a - b).max(initial=0.0) / scale)
