"""Dense float64 tensors with reverse-mode automatic differentiation.

The graph is implicit: every tensor produced by an operation keeps references
to its parents plus a closure that routes the incoming gradient to them.
``backward()`` on a scalar root replays those closures in reverse execution
order. Shapes are explicit everywhere; the only broadcasting allowed is
scalar * tensor and the dedicated row-vector bias add.
"""

from __future__ import annotations

import itertools

import numpy as np

from .errors import ContractError, DegenerateInputError, DomainError, ShapeError

_seq_counter = itertools.count()


class Tensor:
    __slots__ = ("data", "grad", "requires_grad", "_parents", "_grad_fn", "_seq", "_backward_done")

    def __init__(self, data, requires_grad: bool = False):
        self.data = np.asarray(data, dtype=np.float64)
        self.grad = None
        self.requires_grad = bool(requires_grad)
        self._parents = ()
        self._grad_fn = None
        self._seq = next(_seq_counter)
        self._backward_done = False

    @property
    def shape(self):
        return self.data.shape

    def item(self) -> float:
        if self.data.size != 1:
            raise ShapeError(f"item() needs a single-element tensor, got shape {self.data.shape}")
        return float(self.data.reshape(-1)[0])

    def zero_grad(self):
        self.grad = None

    def __repr__(self):
        return f"Tensor(shape={self.data.shape}, requires_grad={self.requires_grad})"

    # -- graph construction -------------------------------------------------

    @staticmethod
    def _result(data, parents, grad_fn):
        out = Tensor(data, requires_grad=any(p.requires_grad for p in parents))
        if out.requires_grad:
            out._parents = tuple(parents)
            out._grad_fn = grad_fn
        return out

    def _accumulate(self, g):
        if self.grad is None:
            self.grad = np.array(g, dtype=np.float64, copy=True)
        else:
            self.grad = self.grad + g

    def backward(self):
        """Populate ``grad`` on every reachable requires_grad tensor.

        The root must be a scalar (single element). Replays node closures in
        reverse execution order, visiting each node once. Calling backward a
        second time on the same root is a contract error; build a fresh graph
        per backward pass.
        """
        if self.data.size != 1:
            raise ContractError(f"backward root must be scalar, got shape {self.data.shape}")
        if self._backward_done:
            raise ContractError("backward already ran on this graph; rebuild the graph to differentiate again")
        self._backward_done = True

        nodes = []
        seen = set()
        stack = [self]
        while stack:
            t = stack.pop()
            if id(t) in seen or not t.requires_grad:
                continue
            seen.add(id(t))
            nodes.append(t)
            stack.extend(t._parents)
        nodes.sort(key=lambda t: t._seq, reverse=True)

        self._accumulate(np.ones_like(self.data))
        for t in nodes:
            if t._grad_fn is not None:
                t._grad_fn(t.grad)

    # -- elementwise / structural ops ---------------------------------------

    def __add__(self, other):
        other = _as_tensor(other)
        _require_same_shape("add", self, other)
        a, b = self, other
        return Tensor._result(a.data + b.data, (a, b), lambda g: (a._accumulate(g), b._accumulate(g)))

    def __sub__(self, other):
        other = _as_tensor(other)
        _require_same_shape("sub", self, other)
        a, b = self, other
        return Tensor._result(a.data - b.data, (a, b), lambda g: (a._accumulate(g), b._accumulate(-g)))

    def scale(self, s: float):
        """Multiply by a python scalar (the only tensor-scalar broadcast)."""
        s = float(s)
        a = self
        return Tensor._result(a.data * s, (a,), lambda g: a._accumulate(g * s))

    def __mul__(self, s):
        if isinstance(s, Tensor):
            raise ShapeError("elementwise tensor*tensor is not supported; use scale() or square()")
        return self.scale(s)

    __rmul__ = __mul__

    def __neg__(self):
        return self.scale(-1.0)

    def exp(self):
        a = self
        out_data = np.exp(a.data)
        return Tensor._result(out_data, (a,), lambda g: a._accumulate(g * out_data))

    def log(self):
        if np.any(self.data <= 0.0):
            raise DomainError("log requires strictly positive input")
        a = self
        return Tensor._result(np.log(a.data), (a,), lambda g: a._accumulate(g / a.data))

    def relu(self):
        a = self
        mask = a.data > 0.0
        return Tensor._result(np.where(mask, a.data, 0.0), (a,), lambda g: a._accumulate(g * mask))

    def square(self):
        a = self
        return Tensor._result(a.data * a.data, (a,), lambda g: a._accumulate(2.0 * a.data * g))

    def sum(self) -> "Tensor":
        a = self
        return Tensor._result(np.array(a.data.sum()), (a,), lambda g: a._accumulate(np.full_like(a.data, float(g))))

    def sum_rows(self) -> "Tensor":
        """Row sums of an N x K matrix -> length-N vector."""
        a = _require_matrix("sum_rows", self)
        return Tensor._result(a.data.sum(axis=1), (a,), lambda g: a._accumulate(np.repeat(np.asarray(g)[:, None], a.data.shape[1], axis=1)))

    def sum_cols(self) -> "Tensor":
        """Column sums of an N x K matrix -> length-K vector."""
        a = _require_matrix("sum_cols", self)
        return Tensor._result(a.data.sum(axis=0), (a,), lambda g: a._accumulate(np.repeat(np.asarray(g)[None, :], a.data.shape[0], axis=0)))

    def transpose(self) -> "Tensor":
        a = _require_matrix("transpose", self)
        return Tensor._result(a.data.T.copy(), (a,), lambda g: a._accumulate(np.asarray(g).T))

    @property
    def T(self) -> "Tensor":
        return self.transpose()


def _as_tensor(x) -> Tensor:
    return x if isinstance(x, Tensor) else Tensor(x)


def _require_same_shape(op, a, b):
    if a.data.shape != b.data.shape:
        raise ShapeError(f"{op}: shapes {a.data.shape} and {b.data.shape} differ")


def _require_matrix(op, t):
    if t.data.ndim != 2:
        raise ShapeError(f"{op}: expected a 2-d tensor, got shape {t.data.shape}")
    return t


def tensor(data, requires_grad: bool = False) -> Tensor:
    return Tensor(data, requires_grad=requires_grad)


def matmul(a: Tensor, b: Tensor) -> Tensor:
    """Matrix product of an M x K and a K x N tensor."""
    _require_matrix("matmul", a)
    _require_matrix("matmul", b)
    if a.data.shape[1] != b.data.shape[0]:
        raise ShapeError(f"matmul: inner extents disagree, {a.data.shape} @ {b.data.shape}")

    def grad_fn(g):
        g = np.asarray(g)
        a._accumulate(g @ b.data.T)
        b._accumulate(a.data.T @ g)

    return Tensor._result(a.data @ b.data, (a, b), grad_fn)


def add_bias(x: Tensor, b: Tensor) -> Tensor:
    """Add a length-K bias vector to every row of an N x K matrix."""
    _require_matrix("add_bias", x)
    if b.data.ndim != 1 or b.data.shape[0] != x.data.shape[1]:
        raise ShapeError(f"add_bias: bias shape {b.data.shape} does not match row width {x.data.shape}")

    def grad_fn(g):
        g = np.asarray(g)
        x._accumulate(g)
        b._accumulate(g.sum(axis=0))

    return Tensor._result(x.data + b.data[None, :], (x, b), grad_fn)


def softmax_rows(x: Tensor) -> Tensor:
    """Row-wise softmax with max-subtraction; each output row sums to 1."""
    _require_matrix("softmax_rows", x)
    shifted = x.data - x.data.max(axis=1, keepdims=True)
    e = np.exp(shifted)
    y = e / e.sum(axis=1, keepdims=True)

    def grad_fn(g):
        g = np.asarray(g)
        dot = (g * y).sum(axis=1, keepdims=True)
        x._accumulate(y * (g - dot))

    return Tensor._result(y, (x,), grad_fn)


def logsumexp_rows(x: Tensor) -> Tensor:
    """Row-wise log(sum(exp(x))) with max-subtraction -> length-N vector."""
    _require_matrix("logsumexp_rows", x)
    m = x.data.max(axis=1, keepdims=True)
    e = np.exp(x.data - m)
    s = e.sum(axis=1, keepdims=True)
    out = (m + np.log(s)).reshape(-1)
    soft = e / s

    def grad_fn(g):
        x._accumulate(soft * np.asarray(g)[:, None])

    return Tensor._result(out, (x,), grad_fn)


def diag_part(x: Tensor) -> Tensor:
    """Diagonal of a square matrix -> length-N vector."""
    _require_matrix("diag_part", x)
    n, m = x.data.shape
    if n != m:
        raise ShapeError(f"diag_part: matrix must be square, got {x.data.shape}")

    def grad_fn(g):
        full = np.zeros_like(x.data)
        np.fill_diagonal(full, np.asarray(g))
        x._accumulate(full)

    return Tensor._result(x.data.diagonal().copy(), (x,), grad_fn)


def l2_normalize_rows(x: Tensor) -> Tensor:
    """Scale every row of an N x K matrix to unit Euclidean norm."""
    _require_matrix("l2_normalize_rows", x)
    norms = np.linalg.norm(x.data, axis=1, keepdims=True)
    if np.any(norms == 0.0):
        raise DegenerateInputError("l2_normalize_rows: zero-norm row")
    y = x.data / norms

    def grad_fn(g):
        g = np.asarray(g)
        dot = (g * y).sum(axis=1, keepdims=True)
        x._accumulate((g - dot * y) / norms)

    return Tensor._result(y, (x,), grad_fn)
