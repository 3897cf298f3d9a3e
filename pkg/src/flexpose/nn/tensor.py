"""Minimal reverse-mode autodiff over float64 numpy arrays.

A Tensor wraps an ndarray and records the op that produced it; backward()
walks the tape in reverse topological order. Only what the models here
need is implemented: elementwise arithmetic, 2-D matmul, the usual
activations, reductions, shape ops, and slicing/concatenation.
"""

import numpy as np


def _unbroadcast(grad, shape):
    """Sum a broadcasted gradient back down to `shape`."""
    extra = grad.ndim - len(shape)
    if extra > 0:
        grad = grad.sum(axis=tuple(range(extra)))
    axes = tuple(i for i, s in enumerate(shape) if s == 1 and grad.shape[i] != 1)
    if axes:
        grad = grad.sum(axis=axes, keepdims=True)
    return grad.reshape(shape)


class Tensor:
    """Graph node: float64 payload plus the closure that propagates grads."""

    __slots__ = ("data", "grad", "requires_grad", "op", "_parents", "_backward")

    def __init__(self, data, requires_grad=False, parents=(), op="leaf"):
        self.data = np.asarray(data, dtype=np.float64)
        self.grad = None
        self.requires_grad = requires_grad
        self.op = op
        self._parents = parents
        self._backward = None

    @property
    def shape(self):
        return self.data.shape

    @property
    def ndim(self):
        return self.data.ndim

    def item(self):
        return float(self.data)

    def _accum(self, g):
        if self.grad is None:
            self.grad = np.array(g, dtype=np.float64)
        else:
            self.grad += g

    def backward(self):
        if self.data.size != 1:
            raise ValueError("backward() requires a scalar loss")
        topo, seen = [], set()

        def visit(node):
            if id(node) in seen:
                return
            seen.add(id(node))
            for p in node._parents:
                visit(p)
            topo.append(node)

        visit(self)
        self.grad = np.ones_like(self.data)
        for node in reversed(topo):
            if node._backward is not None and node.grad is not None:
                node._backward(node.grad)

    # -- elementwise arithmetic ------------------------------------------

    def __add__(self, other):
        other = _as_tensor(other)
        out = Tensor(self.data + other.data, self.requires_grad or other.requires_grad,
                     (self, other), "add")

        def bw(g):
            if self.requires_grad:
                self._accum(_unbroadcast(g, self.data.shape))
            if other.requires_grad:
                other._accum(_unbroadcast(g, other.data.shape))
        out._backward = bw
        return out

    def __mul__(self, other):
        other = _as_tensor(other)
        out = Tensor(self.data * other.data, self.requires_grad or other.requires_grad,
                     (self, other), "mul")

        def bw(g):
            if self.requires_grad:
                self._accum(_unbroadcast(g * other.data, self.data.shape))
            if other.requires_grad:
                other._accum(_unbroadcast(g * self.data, other.data.shape))
        out._backward = bw
        return out

    def __truediv__(self, other):
        other = _as_tensor(other)
        out = Tensor(self.data / other.data, self.requires_grad or other.requires_grad,
                     (self, other), "div")

        def bw(g):
            if self.requires_grad:
                self._accum(_unbroadcast(g / other.data, self.data.shape))
            if other.requires_grad:
                other._accum(_unbroadcast(-g * self.data / other.data ** 2, other.data.shape))
        out._backward = bw
        return out

    def __neg__(self):
        out = Tensor(-self.data, self.requires_grad, (self,), "neg")

        def bw(g):
            if self.requires_grad:
                self._accum(-g)
        out._backward = bw
        return out

    def __sub__(self, other):
        return self + (-_as_tensor(other))

    def __rsub__(self, other):
        return _as_tensor(other) + (-self)

    __radd__ = __add__
    __rmul__ = __mul__

    def __pow__(self, p):
        out = Tensor(self.data ** p, self.requires_grad, (self,), "pow")

        def bw(g):
            if self.requires_grad:
                self._accum(g * p * self.data ** (p - 1))
        out._backward = bw
        return out

    # -- matmul -----------------------------------------------------------

    def matmul(self, other):
        if self.data.ndim != 2 or other.data.ndim != 2:
            raise ValueError(f"matmul needs 2-D operands, got {self.data.shape} @ {other.data.shape}")
        if self.data.shape[1] != other.data.shape[0]:
            raise ValueError(f"matmul shape mismatch: {self.data.shape} @ {other.data.shape}")
        out = Tensor(self.data @ other.data, self.requires_grad or other.requires_grad,
                     (self, other), "matmul")

        def bw(g):
            if self.requires_grad:
                self._accum(g @ other.data.T)
            if other.requires_grad:
                other._accum(self.data.T @ g)
        out._backward = bw
        return out

    __matmul__ = matmul

    # -- activations and pointwise functions ------------------------------

    def _pointwise(self, fn, dfn, name):
        y = fn(self.data)
        out = Tensor(y, self.requires_grad, (self,), name)

        def bw(g):
            if self.requires_grad:
                self._accum(g * dfn(self.data, y))
        out._backward = bw
        return out

    def sigmoid(self):
        return self._pointwise(lambda x: 1.0 / (1.0 + np.exp(-x)), lambda x, y: y * (1.0 - y), "sigmoid")

    def tanh(self):
        return self._pointwise(np.tanh, lambda x, y: 1.0 - y * y, "tanh")

    def exp(self):
        return self._pointwise(np.exp, lambda x, y: y, "exp")

    def log(self):
        return self._pointwise(np.log, lambda x, y: 1.0 / x, "log")

    def sqrt(self):
        return self._pointwise(np.sqrt, lambda x, y: 0.5 / y, "sqrt")

    def abs(self):
        return self._pointwise(np.abs, lambda x, y: np.sign(x), "abs")

    def sin(self):
        return self._pointwise(np.sin, lambda x, y: np.cos(x), "sin")

    def cos(self):
        return self._pointwise(np.cos, lambda x, y: -np.sin(x), "cos")

    def arccos(self):
        return self._pointwise(np.arccos, lambda x, y: -1.0 / np.sqrt(1.0 - x * x), "arccos")

    def arccos_clamped(self, grad_floor=1e-12):
        """arccos with the input clipped into [-1, 1] and the gradient
        denominator floored, so values at the domain edge stay exact while
        gradients stay finite."""
        y = np.arccos(np.clip(self.data, -1.0, 1.0))
        out = Tensor(y, self.requires_grad, (self,), "arccos_clamped")

        def bw(g):
            if self.requires_grad:
                denom = np.sqrt(np.maximum(1.0 - self.data * self.data, grad_floor))
                self._accum(-g / denom)
        out._backward = bw
        return out

    def clip(self, lo, hi):
        y = np.clip(self.data, lo, hi)
        out = Tensor(y, self.requires_grad, (self,), "clip")

        def bw(g):
            if self.requires_grad:
                self._accum(g * ((self.data >= lo) & (self.data <= hi)))
        out._backward = bw
        return out

    # -- reductions --------------------------------------------------------

    def sum(self, axis=None, keepdims=False):
        out = Tensor(self.data.sum(axis=axis, keepdims=keepdims), self.requires_grad, (self,), "sum")

        def bw(g):
            if not self.requires_grad:
                return
            if axis is None:
                self._accum(np.broadcast_to(g, self.data.shape).copy())
                return
            if not keepdims:
                axes = axis if isinstance(axis, tuple) else (axis,)
                g = np.expand_dims(g, axes)
            self._accum(np.broadcast_to(g, self.data.shape).copy())
        out._backward = bw
        return out

    def mean(self, axis=None, keepdims=False):
        if axis is None:
            count = self.data.size
        else:
            axes = axis if isinstance(axis, tuple) else (axis,)
            count = int(np.prod([self.data.shape[a] for a in axes]))
        return self.sum(axis=axis, keepdims=keepdims) * (1.0 / count)

    # -- shape ops ---------------------------------------------------------

    def reshape(self, *shape):
        if len(shape) == 1 and isinstance(shape[0], (tuple, list)):
            shape = tuple(shape[0])
        out = Tensor(self.data.reshape(shape), self.requires_grad, (self,), "reshape")

        def bw(g):
            if self.requires_grad:
                self._accum(g.reshape(self.data.shape))
        out._backward = bw
        return out

    def transpose(self, axes):
        out = Tensor(self.data.transpose(axes), self.requires_grad, (self,), "transpose")
        inv = np.argsort(axes)

        def bw(g):
            if self.requires_grad:
                self._accum(g.transpose(inv))
        out._backward = bw
        return out

    def __getitem__(self, idx):
        out = Tensor(self.data[idx], self.requires_grad, (self,), "slice")

        def bw(g):
            if self.requires_grad:
                full = np.zeros_like(self.data)
                full[idx] += g
                self._accum(full)
        out._backward = bw
        return out

    def __repr__(self):
        return f"Tensor(shape={self.data.shape}, op={self.op}, grad={self.requires_grad})"


def _as_tensor(x):
    return x if isinstance(x, Tensor) else Tensor(x)


def tensor(data):
    """Constant (non-trainable) tensor."""
    return Tensor(data)


def param(data):
    """Trainable tensor."""
    return Tensor(data, requires_grad=True)


def concat(tensors, axis):
    datas = [t.data for t in tensors]
    out = Tensor(np.concatenate(datas, axis=axis),
                 any(t.requires_grad for t in tensors), tuple(tensors), "concat")
    sizes = [d.shape[axis] for d in datas]
    offsets = np.cumsum([0] + sizes)

    def bw(g):
        for t, a, b in zip(tensors, offsets[:-1], offsets[1:]):
            if t.requires_grad:
                sl = [slice(None)] * g.ndim
                sl[axis] = slice(a, b)
                t._accum(g[tuple(sl)])
    out._backward = bw
    return out


def tile_leading(x, reps):
    """Repeat x along a new leading axis: (..) -> (reps, ..)."""
    out = Tensor(np.broadcast_to(x.data, (reps,) + x.data.shape).copy(),
                 x.requires_grad, (x,), "tile")

    def bw(g):
        if x.requires_grad:
            x._accum(g.sum(axis=0))
    out._backward = bw
    return out


def mse(a, b):
    """Mean of squared element differences; operands may be Tensor or array."""
    a, b = _as_tensor(a), _as_tensor(b)
    if a.shape != b.shape:
        raise ValueError(f"mse shape mismatch: {a.shape} vs {b.shape}")
    d = a - b
    return (d * d).mean()


def l1(a, b, axis=None):
    """Sum of absolute element differences (optionally over given axes)."""
    a, b = _as_tensor(a), _as_tensor(b)
    if a.shape != b.shape:
        raise ValueError(f"l1 shape mismatch: {a.shape} vs {b.shape}")
    return (a - b).abs().sum(axis=axis)
