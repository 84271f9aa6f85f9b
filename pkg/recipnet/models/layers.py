"""
Parameter containers and the dense/LSTM layers the prediction networks are
assembled from.
"""
import hashlib
from collections import OrderedDict
from contextlib import contextmanager
import numpy as np
from recipnet.autodiff import Parameter, Tensor, ops
from recipnet.exceptions import RecipNetDimensionError, RecipNetUsageError


def uniform_init(rng, shape, fan_in):
    "Uniform in [-1/sqrt(fan_in), 1/sqrt(fan_in)]"
    bound = 1.0 / np.sqrt(fan_in)
    return rng.uniform(-bound, bound, size=shape)


class Module(object):
    """
    Base class of objects owning named parameters and sub-modules. Parameter
    names are qualified by the names of the enclosing modules, e.g.
    'generator.encoder.w_f'.
    """

    def __init__(self):
        self._parameters = OrderedDict()
        self._modules = OrderedDict()

    def add_parameter(self, name, data):
        param = Parameter(data, name=name)
        self._parameters[name] = param
        setattr(self, name, param)
        return param

    def add_module(self, name, module):
        self._modules[name] = module
        setattr(self, name, module)
        return module

    def named_parameters(self, prefix=''):
        for name, param in self._parameters.items():
            yield prefix + name, param
        for mod_name, module in self._modules.items():
            if module is not None:
                for item in module.named_parameters(prefix + mod_name + '.'):
                    yield item

    def parameters(self):
        return [p for _, p in self.named_parameters()]

    @property
    def num_parameters(self):
        return sum(p.size for p in self.parameters())

    def zero_grad(self):
        for param in self.parameters():
            param.zero_grad()

    def state_dict(self):
        return OrderedDict((n, p.data.copy())
                           for n, p in self.named_parameters())

    def load_state_dict(self, state):
        params = OrderedDict(self.named_parameters())
        missing = set(params) - set(state)
        unexpected = set(state) - set(params)
        if missing or unexpected:
            raise RecipNetUsageError(
                "Parameter names do not match the architecture (missing: "
                "'{}', unexpected: '{}')".format(
                    "', '".join(sorted(missing)),
                    "', '".join(sorted(unexpected))))
        for name, param in params.items():
            value = np.asarray(state[name], dtype=np.float64)
            if value.shape != param.shape:
                raise RecipNetDimensionError(
                    "Shape of parameter '{}' does not match the architecture"
                    .format(name), value.shape, param.shape)
            param.data = value.copy()
            param.zero_grad()

    @contextmanager
    def frozen(self):
        """
        Within the block no gradients are recorded for (or accumulated into)
        the parameters of the module
        """
        params = self.parameters()
        previous = [p.requires_grad for p in params]
        for p in params:
            p.requires_grad = False
        try:
            yield self
        finally:
            for p, flag in zip(params, previous):
                p.requires_grad = flag

    def checksum(self):
        "SHA-256 digest of the names, shapes and values of all parameters"
        sha = hashlib.sha256()
        for name, param in self.named_parameters():
            sha.update(name.encode('utf-8'))
            sha.update(str(param.shape).encode('utf-8'))
            sha.update(np.ascontiguousarray(param.data, '<f8').tobytes())
        return sha.hexdigest()

    def __call__(self, *args, **kwargs):
        return self.forward(*args, **kwargs)

    def forward(self, *args, **kwargs):
        raise NotImplementedError


class Linear(Module):
    """
    Affine map x W^T + b applied to the rows of x

    Parameters
    ----------
    in_dim : int
        Size of the input vectors
    out_dim : int
        Size of the output vectors
    rng : numpy.random.RandomState
        Used to draw the initial weights
    """

    def __init__(self, in_dim, out_dim, rng):
        super(Linear, self).__init__()
        self.in_dim = in_dim
        self.out_dim = out_dim
        fan_in = max(in_dim, 1)
        self.add_parameter('weight',
                           uniform_init(rng, (out_dim, in_dim), fan_in))
        self.add_parameter('bias', uniform_init(rng, (out_dim,), fan_in))

    def forward(self, x):
        x = ops.as_tensor(x)
        if x.shape[-1] != self.in_dim:
            raise RecipNetDimensionError(
                "Input size does not match linear layer", x.shape,
                (self.out_dim, self.in_dim))
        if x.ndim == 1:
            return self.forward(x.reshape(1, -1)).reshape(self.out_dim)
        return x @ self.weight.T + self.bias


class LstmCell(Module):
    """
    A single LSTM cell. Each gate has a weight matrix shaped
    (H, H + input_dim) acting on concat(h, x) and a bias of length H; the
    forget-gate bias starts at +1.

    Parameters
    ----------
    input_dim : int
        Size of the inputs
    hidden_dim : int
        Size H of the hidden and cell states
    rng : numpy.random.RandomState
        Used to draw the initial weights
    """

    GATES = ('i', 'f', 'o', 'g')

    def __init__(self, input_dim, hidden_dim, rng):
        super(LstmCell, self).__init__()
        self.input_dim = input_dim
        self.hidden_dim = hidden_dim
        fan_in = hidden_dim + input_dim
        for gate in self.GATES:
            self.add_parameter(
                'w_' + gate,
                uniform_init(rng, (hidden_dim, fan_in), fan_in))
        for gate in self.GATES:
            bias = uniform_init(rng, (hidden_dim,), fan_in)
            if gate == 'f':
                bias = np.ones(hidden_dim)
            self.add_parameter('b_' + gate, bias)

    def zero_state(self, num_agents):
        return (Tensor(np.zeros((num_agents, self.hidden_dim))),
                Tensor(np.zeros((num_agents, self.hidden_dim))))

    def lstm_step(self, x, state):
        """
        Advances the cell by one step

        Parameters
        ----------
        x : Tensor, shape (input_dim,) or (A, input_dim)
            Input at the current step
        state : tuple(Tensor, Tensor)
            Hidden and cell states shaped like x but with H columns

        Returns
        -------
        state : tuple(Tensor, Tensor)
            The next hidden and cell states
        """
        x = ops.as_tensor(x)
        h, c = (ops.as_tensor(s) for s in state)
        if x.ndim == 1:
            h, c = self.lstm_step(x.reshape(1, -1),
                                  (h.reshape(1, -1), c.reshape(1, -1)))
            return h.reshape(self.hidden_dim), c.reshape(self.hidden_dim)
        if x.shape[-1] != self.input_dim:
            raise RecipNetDimensionError(
                "LSTM input size mismatch", x.shape, (self.input_dim,))
        if (h.shape != (x.shape[0], self.hidden_dim) or
                c.shape != h.shape):
            raise RecipNetDimensionError(
                "LSTM state shape mismatch", h.shape, c.shape,
                (x.shape[0], self.hidden_dim))
        H = self.hidden_dim
        weights = ops.concat([getattr(self, 'w_' + g) for g in self.GATES],
                             axis=0)
        biases = ops.concat([getattr(self, 'b_' + g) for g in self.GATES],
                            axis=0)
        z = ops.concat([h, x], axis=1) @ weights.T + biases
        i = ops.sigmoid(z[:, 0:H])
        f = ops.sigmoid(z[:, H:2 * H])
        o = ops.sigmoid(z[:, 2 * H:3 * H])
        g = ops.tanh(z[:, 3 * H:4 * H])
        c_next = f * c + i * g
        h_next = o * ops.tanh(c_next)
        return h_next, c_next

    forward = lstm_step
