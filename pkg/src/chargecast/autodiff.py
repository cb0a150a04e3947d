"""Minimal reverse-mode automatic differentiation over float64 numpy arrays.

A Tensor wraps an ndarray and remembers how it was produced; calling
backward() on a scalar result accumulates gradients into every reachable
tensor with requires_grad set. Broadcasting follows numpy semantics, with
gradients summed back over the broadcast axes. This is deliberately a
small engine: only the operations the forecasting network needs exist.
"""

from __future__ import annotations

import numpy as np

__all__ = ["Tensor", "concat", "softmax", "take_rows"]


def _unbroadcast(grad: np.ndarray, shape: tuple) -> np.ndarray:
    while grad.ndim > len(shape):
        grad = grad.sum(axis=0)
    for axis, size in enumerate(shape):
        if size == 1 and grad.shape[axis] != 1:
            grad = grad.sum(axis=axis, keepdims=True)
    return grad


class Tensor:
    __slots__ = ("data", "grad", "requires_grad", "_parents", "_backward")

    def __init__(self, data, requires_grad: bool = False):
        self.data = np.asarray(data, dtype=float)
        self.grad = None
        self.requires_grad = bool(requires_grad)
        self._parents = ()
        self._backward = None

    # -- graph construction -------------------------------------------------

    @staticmethod
    def _lift(value) -> "Tensor":
        return value if isinstance(value, Tensor) else Tensor(value)

    @staticmethod
    def _result(data, parents, backward) -> "Tensor":
        out = Tensor(data)
        if any(p.requires_grad for p in parents):
            out.requires_grad = True
            out._parents = tuple(parents)
            out._backward = backward
        return out

    def _accum(self, grad: np.ndarray) -> None:
        if not self.requires_grad:
            return
        grad = _unbroadcast(grad, self.data.shape)
        self.grad = grad if self.grad is None else self.grad + grad

    # -- arithmetic ----------------------------------------------------------

    def __add__(self, other):
        other = Tensor._lift(other)
        out_data = self.data + other.data

        def backward(out):
            self._accum(out.grad)
            other._accum(out.grad)

        return Tensor._result(out_data, (self, other), backward)

    __radd__ = __add__

    def __neg__(self):
        def backward(out):
            self._accum(-out.grad)

        return Tensor._result(-self.data, (self,), backward)

    def __sub__(self, other):
        return self + (-Tensor._lift(other))

    def __rsub__(self, other):
        return Tensor._lift(other) + (-self)

    def __mul__(self, other):
        other = Tensor._lift(other)
        out_data = self.data * other.data

        def backward(out):
            self._accum(out.grad * other.data)
            other._accum(out.grad * self.data)

        return Tensor._result(out_data, (self, other), backward)

    __rmul__ = __mul__

    def __truediv__(self, other):
        other = Tensor._lift(other)
        out_data = self.data / other.data

        def backward(out):
            self._accum(out.grad / other.data)
            other._accum(-out.grad * self.data / (other.data * other.data))

        return Tensor._result(out_data, (self, other), backward)

    def __rtruediv__(self, other):
        return Tensor._lift(other) / self

    def __matmul__(self, other):
        other = Tensor._lift(other)
        if self.data.ndim < 2 or other.data.ndim < 2:
            raise ValueError("matmul operands must be at least 2-D")
        out_data = self.data @ other.data

        def backward(out):
            self._accum(out.grad @ np.swapaxes(other.data, -1, -2))
            other._accum(np.swapaxes(self.data, -1, -2) @ out.grad)

        return Tensor._result(out_data, (self, other), backward)

    def __pow__(self, exponent):
        if not isinstance(exponent, (int, float)):
            raise TypeError("only constant exponents are supported")
        out_data = self.data**exponent

        def backward(out):
            self._accum(out.grad * exponent * self.data ** (exponent - 1))

        return Tensor._result(out_data, (self,), backward)

    # -- elementwise nonlinearities -------------------------------------------

    def relu(self):
        out_data = np.maximum(self.data, 0.0)

        def backward(out):
            self._accum(out.grad * (self.data > 0.0))

        return Tensor._result(out_data, (self,), backward)

    def tanh(self):
        out_data = np.tanh(self.data)

        def backward(out):
            self._accum(out.grad * (1.0 - out_data * out_data))

        return Tensor._result(out_data, (self,), backward)

    def exp(self):
        out_data = np.exp(self.data)

        def backward(out):
            self._accum(out.grad * out_data)

        return Tensor._result(out_data, (self,), backward)

    def log(self):
        def backward(out):
            self._accum(out.grad / self.data)

        return Tensor._result(np.log(self.data), (self,), backward)

    def sqrt(self):
        out_data = np.sqrt(self.data)

        def backward(out):
            # subgradient 0 at the origin, where sqrt has no derivative
            safe = np.where(out_data > 0.0, out_data, 1.0)
            self._accum(out.grad * np.where(out_data > 0.0, 0.5 / safe, 0.0))

        return Tensor._result(out_data, (self,), backward)

    def abs(self):
        def backward(out):
            self._accum(out.grad * np.sign(self.data))

        return Tensor._result(np.abs(self.data), (self,), backward)

    # -- reductions and shape ops ---------------------------------------------

    def sum(self, axis=None, keepdims: bool = False):
        out_data = self.data.sum(axis=axis, keepdims=keepdims)

        def backward(out):
            g = out.grad
            if axis is not None and not keepdims:
                g = np.expand_dims(g, axis)
            self._accum(np.broadcast_to(g, self.data.shape).copy())

        return Tensor._result(out_data, (self,), backward)

    def mean(self, axis=None, keepdims: bool = False):
        if axis is None:
            count = self.data.size
        else:
            count = self.data.shape[axis]
        return self.sum(axis=axis, keepdims=keepdims) * (1.0 / count)

    def reshape(self, *shape):
        if len(shape) == 1 and isinstance(shape[0], (tuple, list)):
            shape = tuple(shape[0])
        out_data = self.data.reshape(shape)
        src_shape = self.data.shape

        def backward(out):
            self._accum(out.grad.reshape(src_shape))

        return Tensor._result(out_data, (self,), backward)

    def transpose(self, *axes):
        if len(axes) == 1 and isinstance(axes[0], (tuple, list)):
            axes = tuple(axes[0])
        inverse = np.argsort(axes)

        def backward(out):
            self._accum(out.grad.transpose(inverse))

        return Tensor._result(self.data.transpose(axes), (self,), backward)

    def broadcast_to(self, shape):
        out_data = np.broadcast_to(self.data, shape).copy()

        def backward(out):
            self._accum(out.grad)

        return Tensor._result(out_data, (self,), backward)

    def __getitem__(self, key):
        out_data = self.data[key]

        def backward(out):
            g = np.zeros_like(self.data)
            g[key] = out.grad
            self._accum(g)

        return Tensor._result(out_data, (self,), backward)

    # -- autodiff driver --------------------------------------------------------

    def backward(self):
        if self.data.size != 1:
            raise ValueError("backward() requires a scalar loss")
        topo: list[Tensor] = []
        seen = set()
        stack = [(self, False)]
        while stack:
            node, expanded = stack.pop()
            if id(node) in seen:
                continue
            if expanded:
                seen.add(id(node))
                topo.append(node)
            else:
                stack.append((node, True))
                for parent in node._parents:
                    if id(parent) not in seen:
                        stack.append((parent, False))
        for node in topo:
            node.grad = None
        self.grad = np.ones_like(self.data)
        for node in reversed(topo):
            if node._backward is not None:
                node._backward(node)

    @property
    def shape(self):
        return self.data.shape


def concat(tensors, axis: int = -1) -> Tensor:
    tensors = [Tensor._lift(t) for t in tensors]
    out_data = np.concatenate([t.data for t in tensors], axis=axis)
    sizes = [t.data.shape[axis] for t in tensors]
    offsets = np.cumsum([0] + sizes)

    def backward(out):
        for t, lo, hi in zip(tensors, offsets[:-1], offsets[1:]):
            index = [slice(None)] * out.grad.ndim
            index[axis] = slice(lo, hi)
            t._accum(out.grad[tuple(index)])

    return Tensor._result(out_data, tuple(tensors), backward)


def take_rows(table: Tensor, indices) -> Tensor:
    """Row lookup table[indices] with scatter-add gradients."""
    idx = np.asarray(indices, dtype=int)
    out_data = table.data[idx]

    def backward(out):
        g = np.zeros_like(table.data)
        np.add.at(g, idx, out.grad)
        table._accum(g)

    return Tensor._result(out_data, (table,), backward)


def softmax(x: Tensor, axis: int = -1) -> Tensor:
    """Numerically stable softmax; the max shift is a constant w.r.t. gradients."""
    shift = Tensor(x.data.max(axis=axis, keepdims=True))
    e = (x - shift).exp()
    return e / e.sum(axis=axis, keepdims=True)
