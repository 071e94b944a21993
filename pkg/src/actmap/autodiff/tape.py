"""Reverse-mode differentiation over numpy arrays.

A ``Tape`` records operations in execution order; ``gradient`` replays them
backwards and accumulates vector-Jacobian products. Values are float64
ndarrays throughout (scalars are 0-d arrays). The op set is the minimum the
losses in this package need: dense layers, the four supported activations,
log/exp, elementwise min/max and shape plumbing.
"""

from __future__ import annotations

import numpy as np


class Node:
    """Handle to one tape entry."""

    __slots__ = ("tape", "idx", "value")

    def __init__(self, tape: "Tape", idx: int, value: np.ndarray):
        self.tape = tape
        self.idx = idx
        self.value = value

    @property
    def shape(self):
        return self.value.shape

    # convenience arithmetic; constants are promoted by the tape
    def __add__(self, other):
        return add(self, other)

    def __radd__(self, other):
        return add(self, other)

    def __sub__(self, other):
        return sub(self, other)

    def __rsub__(self, other):
        return sub(self.tape.constant(other), self)

    def __mul__(self, other):
        return mul(self, other)

    def __rmul__(self, other):
        return mul(self, other)

    def __neg__(self):
        return neg(self)


class Tape:
    """Ordered record of operations on which ``gradient`` runs reverse passes."""

    def __init__(self):
        self._values: list[np.ndarray] = []
        self._parents: list[tuple[int, ...]] = []
        self._vjps: list = []  # callable(upstream) -> tuple of parent grads, or None for leaves
        self._params: list[Node] = []

    def _push(self, value, parents=(), vjp=None) -> Node:
        value = np.asarray(value, dtype=np.float64)
        idx = len(self._values)
        self._values.append(value)
        self._parents.append(tuple(p.idx for p in parents))
        self._vjps.append(vjp)
        return Node(self, idx, value)

    def constant(self, value) -> Node:
        return self._push(value)

    def param(self, value) -> Node:
        """Leaf registered as a differentiation target."""
        node = self._push(value)
        self._params.append(node)
        return node

    @property
    def params(self) -> list[Node]:
        return list(self._params)

    def __len__(self):
        return len(self._values)


def _as_node(tape: Tape, x) -> Node:
    return x if isinstance(x, Node) else tape.constant(x)


def _unbroadcast(grad: np.ndarray, shape: tuple) -> np.ndarray:
    """Sum a broadcasted gradient back down to the operand's shape."""
    if grad.shape == shape:
        return grad
    extra = grad.ndim - len(shape)
    if extra > 0:
        grad = grad.sum(axis=tuple(range(extra)))
    axes = tuple(i for i, s in enumerate(shape) if s == 1 and grad.shape[i] != 1)
    if axes:
        grad = grad.sum(axis=axes, keepdims=True)
    return grad.reshape(shape)


def add(a: Node, b) -> Node:
    t = a.tape
    b = _as_node(t, b)
    sa, sb = a.value.shape, b.value.shape
    return t._push(
        a.value + b.value,
        (a, b),
        lambda g: (_unbroadcast(g, sa), _unbroadcast(g, sb)),
    )


def sub(a: Node, b) -> Node:
    t = a.tape
    b = _as_node(t, b)
    sa, sb = a.value.shape, b.value.shape
    return t._push(
        a.value - b.value,
        (a, b),
        lambda g: (_unbroadcast(g, sa), _unbroadcast(-g, sb)),
    )


def mul(a: Node, b) -> Node:
    t = a.tape
    b = _as_node(t, b)
    sa, sb = a.value.shape, b.value.shape
    av, bv = a.value, b.value
    return t._push(
        av * bv,
        (a, b),
        lambda g: (_unbroadcast(g * bv, sa), _unbroadcast(g * av, sb)),
    )


def neg(a: Node) -> Node:
    return a.tape._push(-a.value, (a,), lambda g: (-g,))


def matmul(a: Node, b: Node) -> Node:
    av, bv = a.value, b.value
    return a.tape._push(av @ bv, (a, b), lambda g: (g @ bv.T, av.T @ g))


def transpose(a: Node) -> Node:
    return a.tape._push(a.value.T, (a,), lambda g: (g.T,))


def reshape(a: Node, shape) -> Node:
    old = a.value.shape
    return a.tape._push(a.value.reshape(shape), (a,), lambda g: (g.reshape(old),))


def concat(nodes, axis=-1) -> Node:
    t = nodes[0].tape
    sizes = [n.value.shape[axis] for n in nodes]
    splits = np.cumsum(sizes)[:-1]
    return t._push(
        np.concatenate([n.value for n in nodes], axis=axis),
        tuple(nodes),
        lambda g: tuple(np.split(g, splits, axis=axis)),
    )


def flat_slice(a: Node, start: int, stop: int) -> Node:
    """Contiguous slice of a 1-D node; backward scatters into zeros."""
    size = a.value.shape[0]

    def back(g):
        out = np.zeros(size)
        out[start:stop] = g
        return (out,)

    return a.tape._push(a.value[start:stop], (a,), back)


def sum_(a: Node, axis=None, keepdims=False) -> Node:
    shape = a.value.shape

    def back(g):
        if axis is None:
            return (np.broadcast_to(g, shape).copy(),)
        g2 = g if keepdims else np.expand_dims(g, axis)
        return (np.broadcast_to(g2, shape).copy(),)

    return a.tape._push(a.value.sum(axis=axis, keepdims=keepdims), (a,), back)


def mean(a: Node, axis=None, keepdims=False) -> Node:
    shape = a.value.shape
    count = a.value.size if axis is None else shape[axis]

    def back(g):
        if axis is None:
            return (np.broadcast_to(g / count, shape).copy(),)
        g2 = g if keepdims else np.expand_dims(g, axis)
        return (np.broadcast_to(g2 / count, shape).copy(),)

    return a.tape._push(a.value.mean(axis=axis, keepdims=keepdims), (a,), back)


def exp(a: Node) -> Node:
    out = np.exp(a.value)
    return a.tape._push(out, (a,), lambda g: (g * out,))


def log(a: Node) -> Node:
    av = a.value
    return a.tape._push(np.log(av), (a,), lambda g: (g / av,))


def tanh(a: Node) -> Node:
    out = np.tanh(a.value)
    return a.tape._push(out, (a,), lambda g: (g * (1.0 - out * out),))


def relu(a: Node) -> Node:
    av = a.value
    return a.tape._push(np.maximum(av, 0.0), (a,), lambda g: (g * (av > 0.0),))


def softplus(a: Node) -> Node:
    av = a.value
    # stable: log(1 + e^x) = max(x, 0) + log1p(e^-|x|)
    out = np.maximum(av, 0.0) + np.log1p(np.exp(-np.abs(av)))
    sig = 1.0 / (1.0 + np.exp(-av))
    return a.tape._push(out, (a,), lambda g: (g * sig,))


def square(a: Node) -> Node:
    av = a.value
    return a.tape._push(av * av, (a,), lambda g: (2.0 * g * av,))


def minimum(a: Node, b) -> Node:
    t = a.tape
    b = _as_node(t, b)
    av, bv = a.value, b.value
    mask = av <= bv  # ties route to the first operand
    return t._push(
        np.minimum(av, bv),
        (a, b),
        lambda g: (
            _unbroadcast(g * mask, av.shape),
            _unbroadcast(g * ~mask, bv.shape),
        ),
    )


def maximum(a: Node, b) -> Node:
    t = a.tape
    b = _as_node(t, b)
    av, bv = a.value, b.value
    mask = av >= bv
    return t._push(
        np.maximum(av, bv),
        (a, b),
        lambda g: (
            _unbroadcast(g * mask, av.shape),
            _unbroadcast(g * ~mask, bv.shape),
        ),
    )


def clip(a: Node, lo: float, hi: float) -> Node:
    av = a.value
    mask = (av >= lo) & (av <= hi)
    return a.tape._push(np.clip(av, lo, hi), (a,), lambda g: (g * mask,))


def gradient(tape: Tape, loss: Node, wrt: Node | None = None) -> np.ndarray:
    """Reverse-accumulate d loss / d wrt.

    ``loss`` must be scalar; ``wrt`` defaults to the tape's single registered
    parameter leaf. Returns an array shaped like ``wrt``.
    """
    if loss.value.ndim != 0 and loss.value.size != 1:
        raise ValueError(f"loss must be scalar, got shape {loss.value.shape}")
    if wrt is None:
        if len(tape._params) != 1:
            raise ValueError(
                f"tape has {len(tape._params)} parameter leaves; pass wrt explicitly"
            )
        wrt = tape._params[0]
    grads: dict[int, np.ndarray] = {loss.idx: np.ones_like(loss.value)}
    for idx in range(loss.idx, -1, -1):
        g = grads.pop(idx, None)
        if g is None:
            continue
        if idx == wrt.idx:
            # keep it; leaves below wrt cannot feed back into it
            grads[idx] = g
            continue
        vjp = tape._vjps[idx]
        if vjp is None:
            continue
        for pidx, pg in zip(tape._parents[idx], vjp(g)):
            if pidx in grads:
                grads[pidx] = grads[pidx] + pg
            else:
                grads[pidx] = pg
    out = grads.get(wrt.idx)
    if out is None:
        return np.zeros_like(wrt.value)
    return np.asarray(out, dtype=np.float64).reshape(wrt.value.shape)
