"""
Minimal dense-tensor engine with reverse-mode automatic differentiation
"""
from .tensor import Tensor, Parameter, Graph, Node, backward, DTYPE
from .ops import (
    as_tensor, elementwise, add, sub, mul, neg, tanh, sigmoid, exp, log, relu,
    sqrt, clip, matmul, transpose, reduce, sum, mean, max_over_axis, l2norm,
    reshape, concat, stack, getitem, take, flip, cumsum, zeros)
