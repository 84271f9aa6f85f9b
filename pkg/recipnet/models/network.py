"""
A complete prediction network (generator plus discriminator). The forward
network F_theta maps T_obs observed positions to T_pred future positions and
the backward network G_phi maps the time-reversed future to the time-reversed
past; both share the same architecture.
"""
from collections import OrderedDict
import hashlib
import yaml
from recipnet.autodiff import ops
from recipnet.data.trajectories import T_OBS, T_PRED
from recipnet.exceptions import RecipNetUsageError, RecipNetDimensionError
from recipnet.utils.config import Config
from .layers import Module
from .generator import Generator, positions_from
from .discriminator import Discriminator

FORWARD = 'forward'
BACKWARD = 'backward'


class NetworkConfig(Config):
    """
    Architecture of the prediction networks

    Parameters
    ----------
    embedding_dim : int
        Size of the displacement embedding
    encoder_hidden : int
        Hidden size of the generator's encoder and decoder LSTMs
    discriminator_hidden : int
        Hidden size of the discriminator's LSTM
    pool_dim : int
        Size of the pooled social feature
    noise_dim : int
        Size of the per-agent noise vector (0 for a deterministic network)
    context_dim : int
        Size of the per-scene context vector (0 to disable the pathway)
    pooling : bool
        Whether the generator pools its neighbours' hidden states
    adversarial : bool
        Whether the network has a discriminator
    t_obs, t_pred : int
        Lengths of the observed and predicted segments in forward time
    """

    defaults = OrderedDict([
        ('embedding_dim', 16),
        ('encoder_hidden', 32),
        ('discriminator_hidden', 48),
        ('pool_dim', 32),
        ('noise_dim', 8),
        ('context_dim', 4),
        ('pooling', True),
        ('adversarial', True),
        ('t_obs', T_OBS),
        ('t_pred', T_PRED)])

    def validate(self):
        for name in ('embedding_dim', 'encoder_hidden', 'discriminator_hidden',
                     'pool_dim', 't_obs', 't_pred'):
            self._check(getattr(self, name) >= 1, "{} must be positive ({})",
                        name, getattr(self, name))
        for name in ('noise_dim', 'context_dim'):
            self._check(getattr(self, name) >= 0,
                        "{} must be non-negative ({})", name,
                        getattr(self, name))

    @classmethod
    def preset(cls, mode, **overrides):
        """
        Architecture used by each training mode: 'lstm' is the plain LSTM
        comparator without pooling, noise or discriminator
        """
        if mode == 'lstm':
            dct = dict(pooling=False, noise_dim=0, adversarial=False)
        else:
            dct = {}
        dct.update(overrides)
        return cls(**dct)


class PredictionNetwork(Module):
    """
    Parameters
    ----------
    config : NetworkConfig
        Architecture shared by the forward and backward networks
    direction : str
        'forward' (T_obs -> T_pred) or 'backward' (T_pred -> T_obs)
    rng : numpy.random.RandomState
        Used to draw the initial weights
    """

    def __init__(self, config, direction, rng):
        super(PredictionNetwork, self).__init__()
        if direction == FORWARD:
            self.t_in, self.t_out = config.t_obs, config.t_pred
        elif direction == BACKWARD:
            self.t_in, self.t_out = config.t_pred, config.t_obs
        else:
            raise RecipNetUsageError(
                "Unrecognised network direction '{}'".format(direction))
        self.config = config
        self.direction = direction
        self.add_module('generator', Generator(config, self.t_out, rng))
        if config.adversarial:
            self.add_module('discriminator', Discriminator(
                config, self.t_in + self.t_out, rng))
        else:
            self.discriminator = None

    def sample_noise(self, num_agents, rng):
        "Standard normal noise for every agent, None without a noise channel"
        if not self.config.noise_dim:
            return None
        return rng.normal(size=(num_agents, self.config.noise_dim))

    def predict(self, observed, batch, z=None, check_finite=True):
        """
        Predicted displacements for every agent of ``batch``

        Parameters
        ----------
        observed : Tensor | np.ndarray, shape (t_in, A, 2)
            Input positions (usually ``batch.observed``, but may be a
            computed tensor such as the output of the partner network)
        batch : SceneBatch
            Supplies the scene structure and context of the agents
        z : np.ndarray | None, shape (A, noise_dim)
            Noise vectors (zeros if None)
        check_finite : bool
            Raise RecipNetNumericError on non-finite displacements (otherwise
            they are returned)

        Returns
        -------
        displacement : Tensor, shape (t_out, A, 2)
        """
        observed = ops.as_tensor(observed)
        if observed.shape[0] != self.t_in:
            raise RecipNetDimensionError(
                "{} network expects {} input steps".format(
                    self.direction.capitalize(), self.t_in),
                observed.shape, (self.t_in, batch.num_agents, 2))
        context = (batch.agent_context(self.config.context_dim)
                   if self.config.context_dim else None)
        return self.generator(observed, batch.pooling_index, context=context,
                              z=z, check_finite=check_finite)

    def predict_positions(self, observed, batch, z=None, check_finite=True):
        "Predicted positions, shape (t_out, A, 2)"
        observed = ops.as_tensor(observed)
        return positions_from(self.predict(observed, batch, z=z,
                                           check_finite=check_finite),
                              observed[-1])

    def score(self, full):
        if self.discriminator is None:
            raise RecipNetUsageError(
                "{} network has no discriminator".format(self.direction))
        return self.discriminator(full)

    def architecture(self):
        "Description of the architecture the parameters must conform to"
        return OrderedDict([
            ('direction', self.direction),
            ('config', dict(self.config.to_dict())),
            ('parameters', [[n, list(p.shape)]
                            for n, p in self.named_parameters()])])

    def architecture_hash(self):
        text = yaml.safe_dump(dict(self.architecture()),
                              default_flow_style=True)
        return hashlib.sha256(text.encode('utf-8')).digest()

    def __repr__(self):
        return "PredictionNetwork('{}', {} -> {}, {} parameters)".format(
            self.direction, self.t_in, self.t_out, self.num_parameters)
