"""
The noise-conditioned LSTM encoder/decoder that predicts trajectories.

Positions are encoded as per-step displacements whose first entry is zero.
The encoder runs over the embedded displacements of the observed segment;
its final hidden state (F_h), the pooled social feature (F_s), the scene
context and a noise vector are concatenated and projected to the initial
hidden state of the decoder, whose cell state starts at zero. The decoder
emits one displacement per step, feeding the embedding of each back in as
the next input.
"""
import numpy as np
from recipnet.autodiff import Tensor, ops
from recipnet.exceptions import RecipNetNumericError, RecipNetDimensionError
from recipnet.data.batch import PoolingIndex
from .layers import Module, Linear, LstmCell
from .pooling import SocialPooling


def displacements(positions):
    "Per-step displacements of positions shaped (T, A, 2), the first zero"
    positions = ops.as_tensor(positions)
    num_agents = positions.shape[1]
    first = Tensor(np.zeros((1, num_agents, 2)))
    if positions.shape[0] == 1:
        return first
    return ops.concat([first, positions[1:] - positions[:-1]], axis=0)


def positions_from(displacement, last_position):
    "Positions reached from ``last_position`` (A, 2) by the displacements"
    return ops.cumsum(displacement, axis=0) + last_position


class Generator(Module):
    """
    Parameters
    ----------
    config : NetworkConfig
        Architecture of the network
    t_out : int
        Number of steps the decoder emits
    rng : numpy.random.RandomState
        Used to draw the initial weights
    """

    def __init__(self, config, t_out, rng):
        super(Generator, self).__init__()
        self.config = config
        self.t_out = t_out
        H = config.encoder_hidden
        self.add_module('embedding', Linear(2, config.embedding_dim, rng))
        self.add_module('encoder', LstmCell(config.embedding_dim, H, rng))
        if config.pooling:
            self.add_module('pooling',
                            SocialPooling(H, config.pool_dim, rng))
        else:
            self.pooling = None
        merge_dim = (H + (config.pool_dim if config.pooling else 0) +
                     config.context_dim + config.noise_dim)
        self.add_module('merge', Linear(merge_dim, H, rng))
        self.add_module('decoder', LstmCell(config.embedding_dim, H, rng))
        self.add_module('output', Linear(H, 2, rng))

    def embed(self, displacement):
        return ops.tanh(self.embedding(displacement))

    def encode(self, displacement):
        "Final hidden state of the encoder run over (T_in, A, 2) displacements"
        state = self.encoder.zero_state(displacement.shape[1])
        for t in range(displacement.shape[0]):
            state = self.encoder.lstm_step(self.embed(displacement[t]), state)
        return state[0]

    def forward(self, observed, index, context=None, z=None,
                check_finite=True):
        """
        Predicts the displacements of every agent

        Parameters
        ----------
        observed : Tensor, shape (T_in, A, 2)
            Observed positions
        index : PoolingIndex
            Scene membership of the agents
        context : Tensor | None, shape (A, context_dim)
            Context features of each agent's scene (zeros if None)
        z : Tensor | None, shape (A, noise_dim)
            Noise vectors (zeros if None)
        check_finite : bool
            Raise RecipNetNumericError if any displacement is non-finite

        Returns
        -------
        displacement : Tensor, shape (t_out, A, 2)
        """
        cfg = self.config
        observed = ops.as_tensor(observed)
        if observed.ndim != 3 or observed.shape[-1] != 2:
            raise RecipNetDimensionError(
                "Observed positions must be shaped (time, agents, 2)",
                observed.shape)
        num_agents = observed.shape[1]
        disp = displacements(observed)
        h_enc = self.encode(disp)
        features = [h_enc]
        if self.pooling is not None:
            features.append(self.pooling(h_enc, observed[-1], index))
        if cfg.context_dim:
            if context is None:
                context = np.zeros((num_agents, cfg.context_dim))
            features.append(ops.as_tensor(context))
        if cfg.noise_dim:
            if z is None:
                z = np.zeros((num_agents, cfg.noise_dim))
            features.append(ops.as_tensor(z))
        merged = ops.concat(features, axis=1)
        state = (self.merge(merged),
                 Tensor(np.zeros((num_agents, cfg.encoder_hidden))))
        step = disp[-1]
        outputs = []
        for _ in range(self.t_out):
            state = self.decoder.lstm_step(self.embed(step), state)
            step = self.output(state[0])
            outputs.append(step)
        prediction = ops.stack(outputs, axis=0)
        if check_finite and not np.all(np.isfinite(prediction.data)):
            raise RecipNetNumericError(
                "Generator produced non-finite displacements")
        return prediction


def generator_forward(generator, observed, context=None, z=None):
    """
    Runs the generator over a single scene

    Parameters
    ----------
    generator : Generator
        The generator of a prediction network
    observed : Tensor | np.ndarray, shape (T_in, N, 2)
        Observed positions of the N agents of the scene
    context : array-like | None, shape (context_dim,)
        Context features of the scene
    z : Tensor | np.ndarray | None, shape (N, noise_dim)
        Noise vectors

    Returns
    -------
    displacement : Tensor, shape (t_out, N, 2)
    """
    observed = ops.as_tensor(observed)
    num_agents = observed.shape[1]
    if context is not None:
        context = np.tile(np.asarray(context, dtype=np.float64),
                          (num_agents, 1))
    return generator(observed, PoolingIndex.single_scene(num_agents),
                     context=context, z=z)
