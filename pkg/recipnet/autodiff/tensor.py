"""
Dense 64-bit tensors that record the operations applied to them so that
gradients can be propagated back to the leaves in reverse mode.

Each tensor produced by an operation on gradient-requiring inputs carries a
``node`` that references its inputs and a closure computing the input
gradients from the output gradient. Nothing is recorded globally, so
independent graphs can be built and differentiated on separate threads.
"""
import numpy as np
from recipnet.exceptions import (
    RecipNetDimensionError, RecipNetUsageError)

DTYPE = np.float64


class Node(object):
    """
    The record of the operation that produced a tensor

    Parameters
    ----------
    op : str
        Name of the operation kind (e.g. 'matmul')
    inputs : tuple(Tensor)
        The operands of the operation
    backward_fn : callable
        Maps the gradient w.r.t. the output to a tuple of gradients w.r.t.
        the inputs (entries may be None for inputs without gradients)

    Whether each input required gradients is fixed when the record is
    created, so parameters frozen while the graph is built never receive
    gradients from it.
    """

    __slots__ = ('op', 'inputs', 'backward_fn', 'needs_grad')

    def __init__(self, op, inputs, backward_fn):
        self.op = op
        self.inputs = tuple(inputs)
        self.backward_fn = backward_fn
        self.needs_grad = tuple(i.requires_grad for i in self.inputs)

    def __repr__(self):
        return "Node('{}', {} inputs)".format(self.op, len(self.inputs))


class Tensor(object):
    """
    An n-dimensional array of 64-bit floats participating in a reverse-mode
    gradient graph

    Parameters
    ----------
    data : array-like
        Values of the tensor (copied)
    requires_grad : bool
        Whether gradients should be accumulated into this tensor when it is a
        leaf of a graph passed to ``backward``
    name : str | None
        Optional name used in error messages
    """

    # Make numpy defer to the reflected operators of Tensor
    __array_priority__ = 100

    def __init__(self, data, requires_grad=False, name=None):
        self.data = np.array(data, dtype=DTYPE)
        self.requires_grad = bool(requires_grad)
        self.grad = None
        self.node = None
        self.name = name

    @classmethod
    def _wrap(cls, data):
        "Wraps an array produced by an operation without copying it"
        tensor = cls.__new__(cls)
        tensor.data = np.asarray(data, dtype=DTYPE)
        tensor.requires_grad = False
        tensor.grad = None
        tensor.node = None
        tensor.name = None
        return tensor

    @property
    def shape(self):
        return self.data.shape

    @property
    def ndim(self):
        return self.data.ndim

    @property
    def size(self):
        return self.data.size

    @property
    def is_leaf(self):
        return self.node is None

    @property
    def T(self):
        return ops.transpose(self)

    def numpy(self):
        return self.data

    def item(self):
        return float(self.data)

    def detach(self):
        return Tensor(self.data)

    def zero_grad(self):
        self.grad = None

    def backward(self):
        backward(self)

    def sum(self, axis=None):
        return ops.sum(self, axis=axis)

    def mean(self, axis=None):
        return ops.mean(self, axis=axis)

    def reshape(self, *shape):
        if len(shape) == 1 and isinstance(shape[0], (tuple, list)):
            shape = shape[0]
        return ops.reshape(self, shape)

    def __add__(self, other):
        return ops.add(self, other)

    def __radd__(self, other):
        return ops.add(other, self)

    def __sub__(self, other):
        return ops.sub(self, other)

    def __rsub__(self, other):
        return ops.sub(other, self)

    def __mul__(self, other):
        return ops.mul(self, other)

    def __rmul__(self, other):
        return ops.mul(other, self)

    def __truediv__(self, other):
        if isinstance(other, Tensor):
            raise RecipNetUsageError(
                "Division is only supported by constant scalars")
        return ops.mul(self, 1.0 / float(other))

    def __neg__(self):
        return ops.neg(self)

    def __matmul__(self, other):
        return ops.matmul(self, other)

    def __getitem__(self, key):
        return ops.getitem(self, key)

    def __len__(self):
        return len(self.data)

    def __repr__(self):
        return 'Tensor(shape={}{}{})'.format(
            self.shape,
            ", op='{}'".format(self.node.op) if self.node is not None else '',
            ', requires_grad' if self.requires_grad else '')


class Parameter(Tensor):
    """
    A named leaf tensor holding trainable weights
    """

    def __init__(self, data, name=None):
        super(Parameter, self).__init__(data, requires_grad=True, name=name)


class Graph(object):
    """
    The operation records reachable from an output tensor in topological
    order (the inputs of every record precede it)

    Parameters
    ----------
    output : Tensor
        The tensor the graph is traced back from
    """

    def __init__(self, output):
        self.output = output
        self.records = self._toposort(output)

    @staticmethod
    def _toposort(output):
        order = []
        if output.node is None:
            return order
        visited = set([id(output)])
        # Iterative post-order DFS as unrolled sequence models are deep
        stack = [(output, iter(output.node.inputs))]
        while stack:
            tensor, inputs = stack[-1]
            for inpt in inputs:
                if inpt.node is not None and id(inpt) not in visited:
                    visited.add(id(inpt))
                    stack.append((inpt, iter(inpt.node.inputs)))
                    break
            else:
                stack.pop()
                order.append(tensor)
        return order

    def __len__(self):
        return len(self.records)

    def leaves(self):
        "The gradient-requiring leaf tensors reachable from the output"
        seen = set()
        leaves = []
        candidates = [self.output] if self.output.node is None else []
        for record in self.records:
            candidates.extend(i for i, needs in zip(record.node.inputs,
                                                    record.node.needs_grad)
                              if needs)
        for tensor in candidates:
            if (tensor.node is None and tensor.requires_grad and
                    id(tensor) not in seen):
                seen.add(id(tensor))
                leaves.append(tensor)
        return leaves

    def backward(self, grad):
        """
        Propagates ``grad`` (the gradient w.r.t. the output) back through the
        records, visiting each exactly once, and accumulates the result into
        the ``grad`` attribute of the leaves
        """
        grad = np.asarray(grad, dtype=DTYPE)
        if self.output.node is None:
            _accumulate(self.output, grad)
            return
        grads = {id(self.output): grad}
        for tensor in reversed(self.records):
            out_grad = grads.pop(id(tensor), None)
            if out_grad is None:
                continue
            in_grads = tensor.node.backward_fn(out_grad)
            for inpt, needs, in_grad in zip(tensor.node.inputs,
                                            tensor.node.needs_grad, in_grads):
                if in_grad is None or not needs:
                    continue
                if in_grad.shape != inpt.shape:
                    raise RecipNetDimensionError(
                        "Gradient of '{}' has the wrong shape"
                        .format(tensor.node.op), in_grad.shape, inpt.shape)
                if inpt.node is None:
                    _accumulate(inpt, in_grad)
                else:
                    key = id(inpt)
                    if key in grads:
                        grads[key] = grads[key] + in_grad
                    else:
                        grads[key] = in_grad


def _accumulate(leaf, grad):
    if leaf.grad is None:
        leaf.grad = np.array(grad, dtype=DTYPE)
    else:
        leaf.grad = leaf.grad + grad


def backward(loss):
    """
    Accumulates the gradients of a scalar loss into every gradient-requiring
    leaf it depends on. Repeated calls without resetting the leaves' ``grad``
    attributes add to the previously accumulated values.

    Parameters
    ----------
    loss : Tensor
        A tensor holding a single value
    """
    if loss.size != 1 or loss.ndim > 1:
        raise RecipNetDimensionError(
            "Backward can only be called on a scalar loss", loss.shape)
    if not loss.requires_grad:
        raise RecipNetUsageError(
            "Loss does not depend on any tensor that requires gradients")
    Graph(loss).backward(np.ones(loss.shape, dtype=DTYPE))


from . import ops  # @IgnorePep8
