# walkpool/core/autodiff.py
"""
Minimal reverse-mode automatic differentiation over dense float64 arrays.

Every op records its parents and a backward closure while gradients are
enabled; ``Tensor.backward`` walks the recorded graph once in reverse
topological order. Records are built per forward pass, so they belong to the
thread that ran it.

Numerics shared with other ports:
    sigmoid(x)        = 1 / (1 + exp(-x))        for x >= 0
                      = exp(x) / (1 + exp(x))    for x < 0
    masked_softmax(x) = exp(x - m) * mask / sum(exp(x - m) * mask), row-wise,
                        with m the row max over unmasked entries; rows with
                        no unmasked entry are all zero.
"""
import logging
import threading
from contextlib import contextmanager
from dataclasses import dataclass, field
from typing import Callable, Dict, Iterable, List, Mapping, Optional, Sequence, Tuple, Union

import numpy as np

from .errors import ShapeError
from .graph import Graph, gcn_normalized_adjacency
from .rng import PortableRng

logger = logging.getLogger(__name__)

_grad_state = threading.local()


def is_grad_enabled() -> bool:
    return getattr(_grad_state, "enabled", True)


@contextmanager
def no_grad():
    """Forward passes inside the block record nothing"""
    previous = is_grad_enabled()
    _grad_state.enabled = False
    try:
        yield
    finally:
        _grad_state.enabled = previous


class Tensor:
    __slots__ = ("values", "grad", "requires_grad", "_parents", "_backward", "name")

    def __init__(
        self,
        values,
        requires_grad: bool = False,
        parents: Tuple["Tensor", ...] = (),
        backward: Optional[Callable[[np.ndarray], None]] = None,
        name: Optional[str] = None,
    ):
        self.values = np.asarray(values, dtype=np.float64)
        self.requires_grad = requires_grad
        # intermediate results allocate their gradient on first accumulation
        self.grad = np.zeros_like(self.values) if requires_grad and not parents else None
        self._parents = parents
        self._backward = backward
        self.name = name

    @property
    def shape(self) -> Tuple[int, ...]:
        return self.values.shape

    @property
    def ndim(self) -> int:
        return self.values.ndim

    def item(self) -> float:
        return float(self.values.reshape(-1)[0]) if self.values.size == 1 else float(self.values)

    def numpy(self) -> np.ndarray:
        return self.values.copy()

    def zero_grad(self) -> None:
        if self.requires_grad:
            self.grad = np.zeros_like(self.values)

    def backward(self, grad: Optional[np.ndarray] = None) -> None:
        if not self.requires_grad:
            return
        if grad is None:
            if self.values.size != 1:
                raise ShapeError("backward needs an explicit gradient for", self.shape)
            grad = np.ones_like(self.values)
        _accumulate(self, np.asarray(grad, dtype=np.float64))

        for node in reversed(_topological_order(self)):
            if node._backward is not None and node.grad is not None:
                node._backward(node.grad)

    def __add__(self, other): return add(self, _wrap(other, self))
    def __radd__(self, other): return add(_wrap(other, self), self)
    def __sub__(self, other): return sub(self, _wrap(other, self))
    def __neg__(self): return scalar_mul(self, -1.0)
    def __matmul__(self, other): return matmul(self, other)

    def __mul__(self, other):
        if isinstance(other, Tensor):
            return mul(self, other)
        return scalar_mul(self, float(other))

    __rmul__ = __mul__

    def __repr__(self) -> str:
        tag = f" {self.name}" if self.name else ""
        return f"<Tensor{tag} shape={self.shape} grad={self.requires_grad}>"


def _wrap(value, like: Tensor) -> Tensor:
    if isinstance(value, Tensor):
        return value
    return Tensor(np.full(like.shape, float(value)))


def _topological_order(root: Tensor) -> List[Tensor]:
    order: List[Tensor] = []
    visited = set()
    stack = [(root, False)]
    while stack:
        node, expanded = stack.pop()
        if expanded:
            order.append(node)
            continue
        if id(node) in visited:
            continue
        visited.add(id(node))
        stack.append((node, True))
        for parent in node._parents:
            if parent.requires_grad and id(parent) not in visited:
                stack.append((parent, False))
    return order


def _result(values: np.ndarray, parents: Sequence[Tensor], backward) -> Tensor:
    if is_grad_enabled() and any(p.requires_grad for p in parents):
        return Tensor(values, requires_grad=True, parents=tuple(parents), backward=backward)
    return Tensor(values)


def _grad_buffer(t: Tensor) -> np.ndarray:
    if t.grad is None:
        t.grad = np.zeros_like(t.values)
    return t.grad


def _accumulate(t: Tensor, g: np.ndarray) -> None:
    if not t.requires_grad:
        return
    if t.grad is None:
        t.grad = np.array(np.broadcast_to(g, t.shape), dtype=np.float64)
    else:
        t.grad += g


def parameter(values, name: Optional[str] = None) -> Tensor:
    return Tensor(np.array(values, dtype=np.float64), requires_grad=True, name=name)


def constant(values) -> Tensor:
    return Tensor(values)


# ============================================================================
# Core ops
# ============================================================================

def add(a: Tensor, b: Tensor) -> Tensor:
    """Elementwise sum; ``b`` may also be a bias row broadcast over ``a``'s rows"""
    if a.shape == b.shape:
        def backward(g):
            _accumulate(a, g)
            _accumulate(b, g)
        return _result(a.values + b.values, (a, b), backward)

    bias_row = (
        a.ndim == 2
        and (b.shape == (a.shape[1],) or b.shape == (1, a.shape[1]))
    )
    if not bias_row:
        raise ShapeError("add", a.shape, b.shape)

    def backward(g):
        _accumulate(a, g)
        _accumulate(b, g.sum(axis=0).reshape(b.shape))
    return _result(a.values + b.values.reshape(1, -1), (a, b), backward)


def sub(a: Tensor, b: Tensor) -> Tensor:
    if a.shape != b.shape:
        raise ShapeError("sub", a.shape, b.shape)

    def backward(g):
        _accumulate(a, g)
        _accumulate(b, -g)
    return _result(a.values - b.values, (a, b), backward)


def mul(a: Tensor, b: Tensor) -> Tensor:
    if a.shape != b.shape:
        raise ShapeError("mul", a.shape, b.shape)

    def backward(g):
        _accumulate(a, g * b.values)
        _accumulate(b, g * a.values)
    return _result(a.values * b.values, (a, b), backward)


def scalar_mul(a: Tensor, c: float) -> Tensor:
    c = float(c)

    def backward(g):
        _accumulate(a, g * c)
    return _result(a.values * c, (a,), backward)


def matmul(a: Tensor, b: Tensor) -> Tensor:
    if a.ndim != 2 or b.ndim != 2 or a.shape[1] != b.shape[0]:
        raise ShapeError("matmul", a.shape, b.shape)

    def backward(g):
        if a.requires_grad:
            _accumulate(a, g @ b.values.T)
        if b.requires_grad:
            _accumulate(b, a.values.T @ g)
    return _result(a.values @ b.values, (a, b), backward)


def transpose(a: Tensor) -> Tensor:
    if a.ndim != 2:
        raise ShapeError("transpose", a.shape)

    def backward(g):
        _accumulate(a, g.T)
    return _result(a.values.T, (a,), backward)


def reshape(a: Tensor, shape: Tuple[int, ...]) -> Tensor:
    try:
        values = a.values.reshape(shape)
    except ValueError:
        raise ShapeError("reshape", a.shape, shape) from None

    def backward(g):
        _accumulate(a, g.reshape(a.shape))
    return _result(values, (a,), backward)


def relu(a: Tensor) -> Tensor:
    active = a.values > 0

    def backward(g):
        _accumulate(a, g * active)
    return _result(np.where(active, a.values, 0.0), (a,), backward)


def _stable_sigmoid(x: np.ndarray) -> np.ndarray:
    out = np.empty_like(x)
    pos = x >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-x[pos]))
    ex = np.exp(x[~pos])
    out[~pos] = ex / (1.0 + ex)
    return out


def sigmoid(a: Tensor) -> Tensor:
    s = _stable_sigmoid(a.values)

    def backward(g):
        _accumulate(a, g * s * (1.0 - s))
    return _result(s, (a,), backward)


def masked_softmax(a: Tensor, mask: np.ndarray) -> Tensor:
    """Row-wise softmax restricted to ``mask``; fully masked rows are zero"""
    mask = np.asarray(mask, dtype=bool)
    if a.ndim != 2 or mask.shape != a.shape:
        raise ShapeError("masked_softmax", a.shape, mask.shape)

    shifted = np.where(mask, a.values, -np.inf)
    row_max = shifted.max(axis=1, keepdims=True)
    row_max = np.where(np.isfinite(row_max), row_max, 0.0)
    ex = np.where(mask, np.exp(np.where(mask, a.values - row_max, 0.0)), 0.0)
    totals = ex.sum(axis=1, keepdims=True)
    out = np.divide(ex, totals, out=np.zeros_like(ex), where=totals > 0)

    def backward(g):
        inner = (g * out).sum(axis=1, keepdims=True)
        _accumulate(a, out * (g - inner))
    return _result(out, (a,), backward)


def trace(a: Tensor) -> Tensor:
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ShapeError("trace", a.shape)
    n = a.shape[0]

    def backward(g):
        if a.requires_grad:
            _grad_buffer(a)[np.arange(n), np.arange(n)] += g
    return _result(np.trace(a.values), (a,), backward)


def gather(a: Tensor, rows: Sequence[int], cols: Sequence[int]) -> Tensor:
    """1-D tensor of the entries a[rows[k], cols[k]]"""
    rows = np.asarray(rows, dtype=np.int64)
    cols = np.asarray(cols, dtype=np.int64)
    if a.ndim != 2 or rows.shape != cols.shape:
        raise ShapeError("gather", a.shape, rows.shape, cols.shape)

    def backward(g):
        if a.requires_grad:
            np.add.at(_grad_buffer(a), (rows, cols), g)
    return _result(a.values[rows, cols], (a,), backward)


def index_select(a: Tensor, index: Sequence[int]) -> Tensor:
    """Rows of ``a`` in the given order (repeats allowed)"""
    index = np.asarray(index, dtype=np.int64)

    def backward(g):
        if a.requires_grad:
            np.add.at(_grad_buffer(a), index, g)
    return _result(a.values[index], (a,), backward)


def concat(tensors: Sequence[Tensor], axis: int = 0) -> Tensor:
    tensors = list(tensors)
    try:
        values = np.concatenate([t.values for t in tensors], axis=axis)
    except ValueError:
        raise ShapeError("concat", *[t.shape for t in tensors]) from None
    bounds = np.cumsum([t.shape[axis] for t in tensors])[:-1]

    def backward(g):
        for t, piece in zip(tensors, np.split(g, bounds, axis=axis)):
            _accumulate(t, piece)
    return _result(values, tensors, backward)


def stack_scalars(tensors: Sequence[Tensor]) -> Tensor:
    """1-D tensor from 0-d / size-1 tensors"""
    return concat([reshape(t, (1,)) for t in tensors], axis=0)


def sum_all(a: Tensor) -> Tensor:
    def backward(g):
        _accumulate(a, np.full(a.shape, float(g)))
    return _result(a.values.sum(), (a,), backward)


def mse_loss(pred: Tensor, target) -> Tensor:
    """mean((pred - target)^2) against a constant target"""
    target = np.asarray(target, dtype=np.float64)
    if target.shape != pred.shape:
        raise ShapeError("mse_loss", pred.shape, target.shape)
    diff = pred.values - target
    n = max(diff.size, 1)

    def backward(g):
        _accumulate(pred, g * 2.0 * diff / n)
    return _result(np.mean(diff ** 2) if diff.size else 0.0, (pred,), backward)


# ============================================================================
# Layers
# ============================================================================

Affine = Tuple[Tensor, Tensor]


def gcn_layer(adjacency: Union[Graph, np.ndarray], z: Tensor, w: Tensor) -> Tensor:
    """relu(D^-1/2 (A+I) D^-1/2 . z . w); a precomputed normalization may be passed"""
    a_norm = gcn_normalized_adjacency(adjacency) if isinstance(adjacency, Graph) else adjacency
    if a_norm.shape[1] != z.shape[0]:
        raise ShapeError("gcn_layer", a_norm.shape, z.shape)
    return relu(matmul(constant(a_norm), matmul(z, w)))


def mlp_forward(weights: Sequence[Affine], x: Tensor) -> Tensor:
    """Affine+relu for every layer but the last, which stays affine"""
    h = x
    last = len(weights) - 1
    for k, (w, b) in enumerate(weights):
        h = add(matmul(h, w), b)
        if k < last:
            h = relu(h)
    return h


def glorot_uniform(rng: PortableRng, fan_in: int, fan_out: int) -> np.ndarray:
    limit = np.sqrt(6.0 / (fan_in + fan_out))
    return rng.uniform_array((fan_in, fan_out), -limit, limit)


def init_mlp(
    rng: PortableRng,
    sizes: Sequence[int],
    prefix: str,
    zero_last: bool = False,
) -> List[Affine]:
    layers = []
    for k, (fan_in, fan_out) in enumerate(zip(sizes[:-1], sizes[1:])):
        if zero_last and k == len(sizes) - 2:
            w = np.zeros((fan_in, fan_out))
        else:
            w = glorot_uniform(rng, fan_in, fan_out)
        layers.append((
            parameter(w, name=f"{prefix}.{k}.weight"),
            parameter(np.zeros(fan_out), name=f"{prefix}.{k}.bias"),
        ))
    return layers


# ============================================================================
# Optimizer
# ============================================================================

@dataclass
class AdamState:
    step: int = 0
    m: Dict[str, np.ndarray] = field(default_factory=dict)
    v: Dict[str, np.ndarray] = field(default_factory=dict)


def adam_step(
    params: Mapping[str, Tensor],
    grads: Optional[Mapping[str, np.ndarray]],
    state: AdamState,
    lr: float = 5e-5,
    betas: Tuple[float, float] = (0.9, 0.999),
    eps: float = 1e-8,
    weight_decay: float = 0.0,
) -> Tuple[Mapping[str, Tensor], AdamState]:
    """
    One bias-corrected Adam update, in place on the parameter values.

    ``grads`` defaults to each parameter's accumulated ``.grad``. Weight decay
    is added to the gradient (L2 form).
    """
    beta1, beta2 = betas
    state.step += 1
    c1 = 1.0 - beta1 ** state.step
    c2 = 1.0 - beta2 ** state.step

    for name, p in params.items():
        g = p.grad if grads is None else grads[name]
        if g is None:
            continue
        if weight_decay:
            g = g + weight_decay * p.values
        m = state.m.get(name)
        v = state.v.get(name)
        if m is None:
            m = np.zeros_like(p.values)
            v = np.zeros_like(p.values)
        m = beta1 * m + (1.0 - beta1) * g
        v = beta2 * v + (1.0 - beta2) * g * g
        state.m[name], state.v[name] = m, v
        p.values -= lr * (m / c1) / (np.sqrt(v / c2) + eps)
    return params, state


# ============================================================================
# Gradient check
# ============================================================================

@dataclass
class GradCheckReport:
    max_rel_error: float
    worst: str
    checked: int
    tol: float

    @property
    def passed(self) -> bool:
        return self.max_rel_error < self.tol


def grad_check(
    loss_fn: Callable[[], Tensor],
    params: Mapping[str, Tensor],
    step: float = 1e-5,
    tol: float = 1e-4,
    coords_per_param: int = 8,
    seed: int = 0,
    floor: float = 1e-6,
) -> GradCheckReport:
    """
    Central differences on a random subsample of coordinates per parameter.

    Relative error is |analytic - numeric| / max(|analytic|, |numeric|, floor).
    """
    for p in params.values():
        p.zero_grad()
    loss_fn().backward()
    analytic = {name: p.grad.copy() for name, p in params.items()}

    rng = PortableRng(seed)
    worst_err, worst_at, checked = 0.0, "", 0
    with no_grad():
        for name, p in params.items():
            flat = p.values.reshape(-1)
            picks = rng.sample(range(flat.size), min(coords_per_param, flat.size))
            for idx in picks:
                original = flat[idx]
                flat[idx] = original + step
                up = loss_fn().item()
                flat[idx] = original - step
                down = loss_fn().item()
                flat[idx] = original
                numeric = (up - down) / (2.0 * step)
                exact = analytic[name].reshape(-1)[idx]
                err = abs(exact - numeric) / max(abs(exact), abs(numeric), floor)
                checked += 1
                if err > worst_err:
                    worst_err, worst_at = err, f"{name}[{idx}]"

    for p in params.values():
        p.zero_grad()
    logger.debug("grad check: %d coords, max rel error %.3e at %s", checked, worst_err, worst_at)
    return GradCheckReport(max_rel_error=worst_err, worst=worst_at, checked=checked, tol=tol)


def named_parameters(layers: Iterable[Affine]) -> Dict[str, Tensor]:
    out: Dict[str, Tensor] = {}
    for w, b in layers:
        out[w.name] = w
        out[b.name] = b
    return out
