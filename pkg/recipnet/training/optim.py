"""
Adam optimiser and gradient-norm clipping over named parameters.
"""
from collections import OrderedDict
import numpy as np
from recipnet.exceptions import RecipNetNumericError, RecipNetDimensionError


class OptimState(object):
    """
    Moment buffers and step counter of an Adam optimiser

    Parameters
    ----------
    names : list(str)
        Names of the parameters
    shapes : list(tuple(int))
        Shapes of the parameters
    lr, beta1, beta2, eps : float
        Adam hyperparameters
    """

    def __init__(self, names, shapes, lr=1e-3, beta1=0.9, beta2=0.999,
                 eps=1e-8):
        self.lr = lr
        self.beta1 = beta1
        self.beta2 = beta2
        self.eps = eps
        self.step = 0
        self.m = OrderedDict((n, np.zeros(s)) for n, s in zip(names, shapes))
        self.v = OrderedDict((n, np.zeros(s)) for n, s in zip(names, shapes))

    def __eq__(self, other):
        return (self.step == other.step and
                (self.lr, self.beta1, self.beta2, self.eps) ==
                (other.lr, other.beta1, other.beta2, other.eps) and
                list(self.m) == list(other.m) and
                all(np.array_equal(self.m[n], other.m[n]) and
                    np.array_equal(self.v[n], other.v[n]) for n in self.m))

    def __ne__(self, other):
        return not self == other


def adam_step(params, grads, state):
    """
    One bias-corrected Adam update, applied in place

    Parameters
    ----------
    params : OrderedDict(str, np.ndarray)
        Parameter values, updated in place
    grads : dict(str, np.ndarray | None)
        Gradients (None is treated as zero)
    state : OptimState
        Moment buffers, updated in place
    """
    for name, grad in grads.items():
        if grad is not None and not np.all(np.isfinite(grad)):
            raise RecipNetNumericError(
                "Non-finite gradient of parameter '{}'".format(name))
    state.step += 1
    b1, b2 = state.beta1, state.beta2
    correction1 = 1.0 - b1 ** state.step
    correction2 = 1.0 - b2 ** state.step
    for name, value in params.items():
        grad = grads.get(name)
        if grad is None:
            grad = np.zeros_like(value)
        if grad.shape != value.shape:
            raise RecipNetDimensionError(
                "Gradient of parameter '{}' has the wrong shape".format(name),
                grad.shape, value.shape)
        m = state.m[name] = b1 * state.m[name] + (1.0 - b1) * grad
        v = state.v[name] = b2 * state.v[name] + (1.0 - b2) * grad * grad
        value -= state.lr * (m / correction1) / (np.sqrt(v / correction2) +
                                                  state.eps)
    return params


def clip_grad_norm(grads, max_norm):
    """
    Scales the gradients in place so that their global L2 norm is at most
    ``max_norm``. Returns the norm before clipping.
    """
    total = np.sqrt(sum(float(np.sum(g * g)) for g in grads.values()
                        if g is not None))
    if max_norm and total > max_norm:
        scale = max_norm / total
        for name, g in grads.items():
            if g is not None:
                grads[name] = g * scale
    return total


class Adam(object):
    """
    Adam optimiser bound to the parameters of a module

    Parameters
    ----------
    module : Module
        Owner of the parameters
    lr : float
        Learning rate
    clip_norm : float | None
        Maximum global gradient norm (no clipping if None or 0)
    """

    def __init__(self, module, lr=1e-3, beta1=0.9, beta2=0.999, eps=1e-8,
                 clip_norm=None):
        self.module = module
        self.clip_norm = clip_norm
        named = list(module.named_parameters())
        self.state = OptimState([n for n, _ in named],
                                [p.shape for _, p in named],
                                lr=lr, beta1=beta1, beta2=beta2, eps=eps)

    def step(self):
        """
        Updates the parameters from their accumulated gradients and resets
        the gradients. Returns the gradient norm before clipping.
        """
        named = OrderedDict(self.module.named_parameters())
        grads = OrderedDict((n, p.grad) for n, p in named.items())
        for name, grad in grads.items():
            if grad is not None and not np.all(np.isfinite(grad)):
                raise RecipNetNumericError(
                    "Non-finite gradient of parameter '{}'".format(name))
        norm = clip_grad_norm(grads, self.clip_norm)
        adam_step(OrderedDict((n, p.data) for n, p in named.items()), grads,
                  self.state)
        for p in named.values():
            p.zero_grad()
        return norm
