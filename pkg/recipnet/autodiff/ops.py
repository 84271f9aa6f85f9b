"""
Primitive differentiable operations on Tensors.

Binary elementwise operations accept operands of equal shape or operands
whose shape is a trailing suffix of the other's (leading-dimension
expansion, e.g. adding a bias of shape (H,) to a batch of shape (A, H)).
Anything else must be reshaped explicitly.
"""
import builtins
import numpy as np
from recipnet.exceptions import (
    RecipNetDimensionError, RecipNetDomainError, RecipNetIndexError,
    RecipNetUsageError)
from .tensor import Tensor, Node, DTYPE


def as_tensor(value):
    if isinstance(value, Tensor):
        return value
    return Tensor(value)


def _result(op, data, inputs, backward_fn):
    out = Tensor._wrap(data)
    if builtins.any(i.requires_grad for i in inputs):
        out.requires_grad = True
        out.node = Node(op, inputs, backward_fn)
    return out


def _broadcast_shape(op, a, b):
    sa, sb = a.shape, b.shape
    if sa == sb:
        return sa
    if len(sa) >= len(sb) and sa[len(sa) - len(sb):] == sb:
        return sa
    if len(sb) > len(sa) and sb[len(sb) - len(sa):] == sa:
        return sb
    raise RecipNetDimensionError(
        "Incompatible operand shapes for '{}'".format(op), sa, sb)


def _unbroadcast(grad, shape):
    extra = grad.ndim - len(shape)
    if extra:
        grad = grad.sum(axis=tuple(range(extra)))
    return grad


def _normalise_axes(a, axis):
    if axis is None:
        return tuple(range(a.ndim))
    axes = (axis,) if np.isscalar(axis) else tuple(axis)
    normalised = []
    for ax in axes:
        if not -a.ndim <= ax < a.ndim:
            raise RecipNetIndexError(
                "Axis {} is out of range for tensor of shape {}"
                .format(ax, a.shape))
        normalised.append(ax % a.ndim)
    return tuple(sorted(set(normalised)))


def _expand_reduced(grad, shape, axes):
    "Broadcasts the gradient of a reduction back to the input shape"
    for ax in axes:
        grad = np.expand_dims(grad, ax)
    return np.broadcast_to(grad, shape)


# -----------------------------------------------------------------------------
# Elementwise
# -----------------------------------------------------------------------------

def add(a, b):
    a, b = as_tensor(a), as_tensor(b)
    _broadcast_shape('add', a, b)

    def backward_fn(g):
        return _unbroadcast(g, a.shape), _unbroadcast(g, b.shape)
    return _result('add', a.data + b.data, (a, b), backward_fn)


def sub(a, b):
    a, b = as_tensor(a), as_tensor(b)
    _broadcast_shape('sub', a, b)

    def backward_fn(g):
        return _unbroadcast(g, a.shape), -_unbroadcast(g, b.shape)
    return _result('sub', a.data - b.data, (a, b), backward_fn)


def mul(a, b):
    a, b = as_tensor(a), as_tensor(b)
    _broadcast_shape('mul', a, b)

    def backward_fn(g):
        return (_unbroadcast(g * b.data, a.shape),
                _unbroadcast(g * a.data, b.shape))
    return _result('mul', a.data * b.data, (a, b), backward_fn)


def neg(a):
    a = as_tensor(a)
    return _result('neg', -a.data, (a,), lambda g: (-g,))


def tanh(a):
    a = as_tensor(a)
    y = np.tanh(a.data)
    return _result('tanh', y, (a,), lambda g: (g * (1.0 - y * y),))


def sigmoid(a):
    a = as_tensor(a)
    # Split on the sign of the input to avoid overflow in exp
    e = np.exp(-np.abs(a.data))
    y = np.where(a.data >= 0.0, 1.0 / (1.0 + e), e / (1.0 + e))
    return _result('sigmoid', y, (a,), lambda g: (g * y * (1.0 - y),))


def exp(a):
    a = as_tensor(a)
    y = np.exp(a.data)
    return _result('exp', y, (a,), lambda g: (g * y,))


def log(a):
    a = as_tensor(a)
    if np.any(a.data <= 0.0):
        raise RecipNetDomainError(
            "Logarithm of non-positive value {} (tensor of shape {})"
            .format(a.data.min(), a.shape))
    return _result('log', np.log(a.data), (a,), lambda g: (g / a.data,))


def relu(a):
    a = as_tensor(a)
    mask = a.data > 0.0
    return _result('relu', a.data * mask, (a,), lambda g: (g * mask,))


def sqrt(a):
    """
    Square root, with the gradient at 0 defined as 0
    """
    a = as_tensor(a)
    if np.any(a.data < 0.0):
        raise RecipNetDomainError(
            "Square root of negative value {}".format(a.data.min()))
    y = np.sqrt(a.data)

    def backward_fn(g):
        safe = np.where(y > 0.0, y, 1.0)
        return (np.where(y > 0.0, g * 0.5 / safe, 0.0),)
    return _result('sqrt', y, (a,), backward_fn)


def clip(a, low=None, high=None):
    """
    Clips values into [low, high]; the gradient only passes where the input
    lies inside the range
    """
    a = as_tensor(a)
    y = np.clip(a.data, low, high)
    mask = np.ones(a.shape, dtype=bool)
    if low is not None:
        mask &= a.data >= low
    if high is not None:
        mask &= a.data <= high
    return _result('clip', y, (a,), lambda g: (g * mask,))


ELEMENTWISE = {
    'add': add, 'sub': sub, 'mul': mul, 'tanh': tanh, 'sigmoid': sigmoid,
    'exp': exp, 'log': log, 'relu': relu}


def elementwise(op, a, b=None):
    """
    Applies the named elementwise operation ('add', 'sub', 'mul', 'tanh',
    'sigmoid', 'exp', 'log' or 'relu')
    """
    try:
        fn = ELEMENTWISE[op]
    except KeyError:
        raise RecipNetUsageError(
            "Unrecognised elementwise op '{}' (valid: '{}')"
            .format(op, "', '".join(ELEMENTWISE)))
    if op in ('add', 'sub', 'mul'):
        return fn(a, b)
    return fn(a)


# -----------------------------------------------------------------------------
# Linear algebra and reductions
# -----------------------------------------------------------------------------

def matmul(a, b):
    a, b = as_tensor(a), as_tensor(b)
    if a.ndim != 2 or b.ndim != 2 or a.shape[1] != b.shape[0]:
        raise RecipNetDimensionError(
            "Inner dimensions of matrix product do not match", a.shape,
            b.shape)

    def backward_fn(g):
        return g @ b.data.T, a.data.T @ g
    return _result('matmul', a.data @ b.data, (a, b), backward_fn)


def transpose(a):
    a = as_tensor(a)
    if a.ndim != 2:
        raise RecipNetDimensionError(
            "Transpose is only defined for matrices", a.shape)
    return _result('transpose', a.data.T, (a,), lambda g: (g.T,))


def sum(a, axis=None):  # @ReservedAssignment
    a = as_tensor(a)
    axes = _normalise_axes(a, axis)
    return _result(
        'sum', a.data.sum(axis=axes), (a,),
        lambda g: (_expand_reduced(g, a.shape, axes),))


def mean(a, axis=None):
    a = as_tensor(a)
    axes = _normalise_axes(a, axis)
    count = float(np.prod([a.shape[ax] for ax in axes]))
    return _result(
        'mean', a.data.mean(axis=axes), (a,),
        lambda g: (_expand_reduced(g / count, a.shape, axes),))


def max_over_axis(a, axis):
    """
    Maximum along a single axis. The gradient is routed to the position of
    the maximum only, the lowest index winning ties.
    """
    a = as_tensor(a)
    ax, = _normalise_axes(a, axis)
    idx = np.expand_dims(np.argmax(a.data, axis=ax), ax)
    y = np.take_along_axis(a.data, idx, axis=ax).squeeze(ax)

    def backward_fn(g):
        grad = np.zeros(a.shape, dtype=DTYPE)
        np.put_along_axis(grad, idx, np.expand_dims(g, ax), axis=ax)
        return (grad,)
    return _result('max_over_axis', y, (a,), backward_fn)


REDUCTIONS = {'sum': sum, 'mean': mean, 'max_over_axis': max_over_axis}


def reduce(op, a, axis=None):  # @ReservedAssignment
    "Applies the named reduction ('sum', 'mean' or 'max_over_axis')"
    try:
        fn = REDUCTIONS[op]
    except KeyError:
        raise RecipNetUsageError(
            "Unrecognised reduction '{}' (valid: '{}')"
            .format(op, "', '".join(REDUCTIONS)))
    if op == 'max_over_axis':
        if axis is None:
            raise RecipNetIndexError("'max_over_axis' requires an axis")
        return fn(a, axis)
    return fn(a, axis=axis)


def l2norm(a, axis=None):
    """
    Euclidean norm over the given axes (all axes by default). The gradient
    at the origin is defined as the zero vector.
    """
    a = as_tensor(a)
    axes = _normalise_axes(a, axis)
    n = np.sqrt((a.data * a.data).sum(axis=axes))

    def backward_fn(g):
        safe = np.where(n > 0.0, n, 1.0)
        scale = np.where(n > 0.0, g / safe, 0.0)
        return (a.data * _expand_reduced(scale, a.shape, axes),)
    return _result('l2norm', n, (a,), backward_fn)


# -----------------------------------------------------------------------------
# Shape manipulation
# -----------------------------------------------------------------------------

def reshape(a, shape):
    a = as_tensor(a)
    try:
        y = a.data.reshape(shape)
    except ValueError:
        raise RecipNetDimensionError(
            "Cannot reshape tensor", a.shape, tuple(shape))
    return _result('reshape', y, (a,), lambda g: (g.reshape(a.shape),))


def concat(tensors, axis=-1):
    tensors = [as_tensor(t) for t in tensors]
    try:
        y = np.concatenate([t.data for t in tensors], axis=axis)
    except ValueError:
        raise RecipNetDimensionError(
            "Cannot concatenate tensors along axis {}".format(axis),
            *[t.shape for t in tensors])
    bounds = np.cumsum([t.shape[axis] for t in tensors])[:-1]

    def backward_fn(g):
        return tuple(np.split(g, bounds, axis=axis))
    return _result('concat', y, tensors, backward_fn)


def stack(tensors, axis=0):
    tensors = [as_tensor(t) for t in tensors]
    try:
        y = np.stack([t.data for t in tensors], axis=axis)
    except ValueError:
        raise RecipNetDimensionError(
            "Cannot stack tensors", *[t.shape for t in tensors])

    def backward_fn(g):
        return tuple(np.take(g, i, axis=axis) for i in range(len(tensors)))
    return _result('stack', y, tensors, backward_fn)


def _is_basic_key(key):
    keys = key if isinstance(key, tuple) else (key,)
    return builtins.all(
        isinstance(k, (int, np.integer, slice)) or k is None or k is Ellipsis
        for k in keys)


def getitem(a, key):
    a = as_tensor(a)
    try:
        y = a.data[key]
    except IndexError as e:
        raise RecipNetIndexError(str(e))
    basic = _is_basic_key(key)

    def backward_fn(g):
        grad = np.zeros(a.shape, dtype=DTYPE)
        if basic:
            grad[key] = g
        else:
            np.add.at(grad, key, g)
        return (grad,)
    return _result('getitem', np.array(y), (a,), backward_fn)


def take(a, indices, axis=0):
    """
    Gathers slices along ``axis`` at the (possibly multi-dimensional)
    integer ``indices``; repeated indices accumulate in the backward pass
    """
    a = as_tensor(a)
    indices = np.asarray(indices, dtype=int)
    ax, = _normalise_axes(a, axis)
    if indices.size and (indices.min() < 0 or indices.max() >= a.shape[ax]):
        raise RecipNetIndexError(
            "Gather indices out of range for axis {} of size {}"
            .format(ax, a.shape[ax]))
    y = np.take(a.data, indices, axis=ax)

    def backward_fn(g):
        grad = np.zeros(a.shape, dtype=DTYPE)
        g0 = np.moveaxis(g, list(range(ax, ax + indices.ndim)),
                         list(range(indices.ndim)))
        np.add.at(np.moveaxis(grad, ax, 0), indices, g0)
        return (grad,)
    return _result('take', y, (a,), backward_fn)


def flip(a, axis=0):
    a = as_tensor(a)
    ax, = _normalise_axes(a, axis)
    return _result('flip', np.flip(a.data, axis=ax).copy(), (a,),
                   lambda g: (np.flip(g, axis=ax).copy(),))


def cumsum(a, axis=0):
    a = as_tensor(a)
    ax, = _normalise_axes(a, axis)

    def backward_fn(g):
        return (np.flip(np.cumsum(np.flip(g, axis=ax), axis=ax), axis=ax),)
    return _result('cumsum', np.cumsum(a.data, axis=ax), (a,), backward_fn)


def zeros(shape):
    return Tensor(np.zeros(shape, dtype=DTYPE))
