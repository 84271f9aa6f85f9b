"""
Independent pretraining of the forward and backward networks followed by
their joint reciprocal training.

Every update of a network on a batch consists of a generator step on its
overall objective (reciprocal objective plus weighted adversarial loss, with
the discriminator and the partner network frozen) and a discriminator step on
the detached predictions. All random draws (batch order and noise vectors)
come from the pair's single RandomState, whose state is checkpointed with
the parameters so that interrupted runs resume exactly.
"""
from collections import OrderedDict
import numpy as np
from recipnet.autodiff import backward
from recipnet.data.batch import iterate_batches, num_batches
from recipnet.data.trajectories import (
    SceneSample, BackwardSample, time_reverse)
from recipnet.exceptions import RecipNetUsageError, TrainingDivergedError
from recipnet.losses import (
    LossConfig, j_forward, generator_adversarial_loss, discriminator_loss,
    total_loss)
from recipnet.models.network import PredictionNetwork, FORWARD, BACKWARD
from recipnet.utils.config import Config
from recipnet.utils.logging import logger
from .optim import Adam

MODES = ('reciprocal', 'baseline', 'lstm')
ALTERNATIONS = ('per-batch', 'per-epoch')
PRETRAIN, JOINT = 'pretrain', 'joint'

HISTORY_FIELDS = ('phase', 'epoch', 'batch', 'network', 'loss', 'primary',
                  'reciprocal', 'adversarial', 'discriminator')


class TrainConfig(Config):
    """
    Parameters
    ----------
    mode : str
        'reciprocal' (pretraining then joint training), 'baseline' (both
        networks trained independently with lam = 1) or 'lstm' (forward
        network only, plain supervised training)
    batch_size : int
        Number of scenes per batch
    epochs : int
        Number of joint-training epochs (after pretraining)
    pretrain_epochs : int
        Number of independent pretraining epochs
    lam : float
        Weight of the prediction against the reciprocal term
    gan_weight : float
        Multiplier of the adversarial generator loss
    seed : int
        Seed of the random number generator driving initialisation, batch
        order and noise
    alternation : str
        'per-batch' (theta step then phi step on every batch) or 'per-epoch'
        (an epoch of theta steps then an epoch of phi steps)
    lr : float
        Adam learning rate
    clip_norm : float
        Maximum global gradient norm of every update (0 disables clipping)
    divergence_threshold : float
        Training aborts when a loss exceeds this value
    """

    defaults = OrderedDict([
        ('mode', 'reciprocal'),
        ('batch_size', 64),
        ('epochs', 50),
        ('pretrain_epochs', 20),
        ('lam', 0.5),
        ('gan_weight', 1.0),
        ('seed', 0),
        ('alternation', 'per-batch'),
        ('lr', 1e-3),
        ('clip_norm', 10.0),
        ('divergence_threshold', 1e6)])

    PRESETS = {'desk': dict(epochs=50, pretrain_epochs=20),
               'full': dict(epochs=200, pretrain_epochs=20)}

    def validate(self):
        self._check(self.mode in MODES, "mode must be one of '{}' ('{}')",
                    "', '".join(MODES), self.mode)
        self._check(self.batch_size >= 1, "batch_size must be positive ({})",
                    self.batch_size)
        self._check(self.epochs >= 0 and self.pretrain_epochs >= 0,
                    "epoch counts must be non-negative")
        self._check(0.0 <= self.lam <= 1.0, "lam must be in [0, 1] ({})",
                    self.lam)
        self._check(self.gan_weight >= 0.0, "gan_weight must be non-negative")
        self._check(0 <= self.seed < 2 ** 32, "seed must be in [0, 2^32)")
        self._check(self.alternation in ALTERNATIONS,
                    "alternation must be one of '{}' ('{}')",
                    "', '".join(ALTERNATIONS), self.alternation)
        self._check(self.lr > 0.0, "lr must be positive")
        self._check(self.clip_norm >= 0.0, "clip_norm must be non-negative")
        self._check(self.divergence_threshold > 0.0,
                    "divergence_threshold must be positive")

    @classmethod
    def preset(cls, name, **overrides):
        try:
            dct = dict(cls.PRESETS[name])
        except KeyError:
            raise RecipNetUsageError(
                "Unrecognised preset '{}' (valid: '{}')".format(
                    name, "', '".join(sorted(cls.PRESETS))))
        dct.update(overrides)
        return cls(**dct)

    @property
    def loss_config(self):
        "The loss weights of the joint phase of the training mode"
        if self.mode == 'lstm':
            return LossConfig(lam=1.0, gan_weight=0.0)
        if self.mode == 'baseline':
            return LossConfig(lam=1.0, gan_weight=self.gan_weight)
        return LossConfig(lam=self.lam, gan_weight=self.gan_weight)

    @property
    def pretrain_loss_config(self):
        return self.loss_config.replace(lam=1.0)


def make_optimizers(network, cfg):
    "Separate Adam optimisers for the generator and discriminator"
    optimizers = OrderedDict()
    optimizers['generator'] = Adam(network.generator, lr=cfg.lr,
                                   clip_norm=cfg.clip_norm)
    if network.discriminator is not None:
        optimizers['discriminator'] = Adam(network.discriminator, lr=cfg.lr,
                                           clip_norm=cfg.clip_norm)
    return optimizers


class ReciprocalPair(object):
    """
    The forward and backward networks with their optimisers and training
    state

    Parameters
    ----------
    network_config : NetworkConfig
        Architecture shared by both networks
    train_config : TrainConfig
        Training parameters (the seed initialises the random state)
    """

    def __init__(self, network_config, train_config):
        self.network_config = network_config
        self.train_config = train_config
        self.rng = np.random.RandomState(train_config.seed)
        self.forward = PredictionNetwork(network_config, FORWARD, self.rng)
        if train_config.mode == 'lstm':
            self.backward = None
        else:
            self.backward = PredictionNetwork(network_config, BACKWARD,
                                              self.rng)
        self.optimizers = OrderedDict()
        for name, network in self.networks.items():
            for part, opt in make_optimizers(network, train_config).items():
                self.optimizers[name + '.' + part] = opt
        self.history = []
        self.pretrain_done = 0
        self.epochs_done = 0

    @property
    def mode(self):
        return self.train_config.mode

    @property
    def networks(self):
        networks = OrderedDict([(FORWARD, self.forward)])
        if self.backward is not None:
            networks[BACKWARD] = self.backward
        return networks

    def network_optimizers(self, direction):
        prefix = direction + '.'
        return OrderedDict((n[len(prefix):], o)
                           for n, o in self.optimizers.items()
                           if n.startswith(prefix))

    @property
    def finished(self):
        return (self.pretrain_done >= self.train_config.pretrain_epochs and
                self.epochs_done >= self.train_config.epochs)

    def checksum(self):
        return ''.join(n.checksum() for n in self.networks.values())

    def __repr__(self):
        return ("ReciprocalPair(mode='{}', pretrained={}, epochs={})"
                .format(self.mode, self.pretrain_done, self.epochs_done))


def train_step(network, optimizers, batch, loss_cfg, rng, partner=None,
               threshold=1e6):
    """
    One generator update and one discriminator update of ``network`` on
    ``batch`` (whose direction matches the network's)

    Returns
    -------
    record : OrderedDict
        The loss values of the step
    """
    z = network.sample_noise(batch.num_agents, rng)
    use_partner = partner is not None and loss_cfg.lam < 1.0
    z_partner = (partner.sample_noise(batch.num_agents, rng)
                 if use_partner else None)
    terms = j_forward(batch, network, partner if use_partner else None,
                      loss_cfg if use_partner else loss_cfg.replace(lam=1.0),
                      z_forward=z, z_backward=z_partner)
    adversarial = None
    if network.discriminator is not None and loss_cfg.gan_weight:
        adversarial = generator_adversarial_loss(network, batch,
                                                 terms.prediction)
    loss = total_loss(terms.total, adversarial, loss_cfg.gan_weight)
    value = loss.item()
    if not np.isfinite(value) or value > threshold:
        raise TrainingDivergedError(
            "Training of the {} network diverged: loss {} exceeds {} "
            "(prediction term {}, reciprocal term {})".format(
                network.direction, value, threshold,
                terms.primary.item(),
                terms.reciprocal.item() if terms.reciprocal is not None
                else 'n/a'))
    backward(loss)
    optimizers['generator'].step()
    d_value = None
    if adversarial is not None:
        d_loss = discriminator_loss(network, batch, terms.prediction)
        backward(d_loss)
        optimizers['discriminator'].step()
        d_value = d_loss.item()
    return OrderedDict([
        ('network', network.direction),
        ('loss', value),
        ('primary', terms.primary.item()),
        ('reciprocal', (terms.reciprocal.item()
                        if terms.reciprocal is not None else None)),
        ('adversarial',
         adversarial.item() if adversarial is not None else None),
        ('discriminator', d_value)])


def _check_samples(samples, direction):
    if not samples:
        raise RecipNetUsageError("Cannot train on an empty dataset")
    expected = SceneSample if direction == FORWARD else BackwardSample
    for sample in samples:
        if not isinstance(sample, expected):
            raise RecipNetUsageError(
                "The {} network is trained on {}s, found {}".format(
                    direction, expected.__name__, type(sample).__name__))


def _record(history, phase, epoch, batch_num, step):
    record = OrderedDict([('phase', phase), ('epoch', epoch),
                          ('batch', batch_num)])
    record.update(step)
    history.append(record)
    logger.debug("{} epoch {} batch {} ({}): loss {:.6g}".format(
        phase, epoch, batch_num, step['network'], step['loss']))


def _epoch_summary(phase, epoch, records):
    for direction in (FORWARD, BACKWARD):
        losses = [r['loss'] for r in records if r['network'] == direction]
        if losses:
            logger.info("{} epoch {}: mean {} loss {:.6g}".format(
                phase.capitalize(), epoch, direction, np.mean(losses)))


def train_epoch(network, optimizers, samples, cfg, loss_cfg, rng,
                partner=None, history=None, phase=PRETRAIN, epoch=0):
    """
    Trains a single network for one epoch over ``samples`` (SceneSamples for
    the forward network and BackwardSamples for the backward network)
    """
    _check_samples(samples, network.direction)
    history = history if history is not None else []
    records = []
    for i, batch in enumerate(iterate_batches(samples, cfg.batch_size, rng)):
        step = train_step(network, optimizers, batch, loss_cfg, rng,
                          partner=partner,
                          threshold=cfg.divergence_threshold)
        _record(history, phase, epoch, i, step)
        records.append(step)
    return records


def pretrain(network, samples, cfg, rng=None, optimizers=None, history=None,
             epochs=None):
    """
    Trains a network on its own with the lam = 1 objective (prediction plus
    adversarial loss)

    Parameters
    ----------
    network : PredictionNetwork
        Forward network (trained on SceneSamples) or backward network
        (trained on BackwardSamples)
    samples : list(SceneSample | BackwardSample)
        Training samples matching the direction of the network
    cfg : TrainConfig
        Training parameters
    rng : numpy.random.RandomState | None
        Random state (seeded from cfg.seed if None)
    history : list | None
        List the per-batch loss records are appended to

    Returns
    -------
    network : PredictionNetwork
        The trained network (updated in place)
    """
    _check_samples(samples, network.direction)
    rng = rng if rng is not None else np.random.RandomState(cfg.seed)
    optimizers = (optimizers if optimizers is not None
                  else make_optimizers(network, cfg))
    history = history if history is not None else []
    epochs = cfg.pretrain_epochs if epochs is None else epochs
    loss_cfg = cfg.pretrain_loss_config
    for epoch in range(epochs):
        records = train_epoch(network, optimizers, samples, cfg, loss_cfg,
                              rng, history=history, phase=PRETRAIN,
                              epoch=epoch)
        _epoch_summary(PRETRAIN, epoch, records)
    return network


def _pretrain_epoch(pair, forward_samples, backward_samples):
    cfg = pair.train_config
    epoch = pair.pretrain_done
    records = []
    for direction, samples in ((FORWARD, forward_samples),
                               (BACKWARD, backward_samples)):
        network = pair.networks.get(direction)
        if network is None:
            continue
        records.extend(train_epoch(
            network, pair.network_optimizers(direction), samples, cfg,
            cfg.pretrain_loss_config, pair.rng, history=pair.history,
            phase=PRETRAIN, epoch=epoch))
    _epoch_summary(PRETRAIN, epoch, records)
    pair.pretrain_done += 1


def _joint_epoch(pair, samples):
    cfg = pair.train_config
    loss_cfg = cfg.loss_config
    epoch = pair.epochs_done
    partners = {FORWARD: pair.backward, BACKWARD: pair.forward}
    if pair.mode != 'reciprocal':
        partners = {FORWARD: None, BACKWARD: None}
    records = []

    def step(direction, batch, batch_num):
        network = pair.networks[direction]
        record = train_step(network, pair.network_optimizers(direction),
                            batch, loss_cfg, pair.rng,
                            partner=partners[direction],
                            threshold=cfg.divergence_threshold)
        _record(pair.history, JOINT, epoch, batch_num, record)
        records.append(record)

    directions = list(pair.networks)
    if cfg.alternation == 'per-batch':
        for i, batch in enumerate(iterate_batches(samples, cfg.batch_size,
                                                  pair.rng)):
            for direction in directions:
                step(direction,
                     batch if direction == FORWARD else batch.reversed(), i)
    else:
        for direction in directions:
            for i, batch in enumerate(iterate_batches(
                    samples, cfg.batch_size, pair.rng)):
                step(direction,
                     batch if direction == FORWARD else batch.reversed(), i)
    _epoch_summary(JOINT, epoch, records)
    pair.epochs_done += 1


def reciprocal_train(pair, samples, cfg=None, on_epoch_end=None):
    """
    Runs the remaining pretraining and joint-training epochs of ``pair``.
    In joint training each batch first updates theta (minimising L_theta
    with phi frozen) and then phi (minimising L_phi with theta frozen);
    with per-epoch alternation the updates are grouped by epoch instead.

    Parameters
    ----------
    pair : ReciprocalPair
        The networks and training state, trained in place
    samples : list(SceneSample)
        Training samples in forward time
    cfg : TrainConfig | None
        Replaces the pair's training config if given (e.g. to extend the
        number of epochs of a resumed run)
    on_epoch_end : callable | None
        Called with the pair after every epoch (e.g. to write a checkpoint)

    Returns
    -------
    pair : ReciprocalPair
    """
    if cfg is not None:
        pair.train_config = cfg
    cfg = pair.train_config
    _check_samples(samples, FORWARD)
    backward_samples = [time_reverse(s) for s in samples]
    num = num_batches(len(samples), cfg.batch_size)
    logger.info("Training {} pair on {} scenes ({} batches per epoch)"
                .format(pair.mode, len(samples), num))
    while pair.pretrain_done < cfg.pretrain_epochs:
        _pretrain_epoch(pair, samples, backward_samples)
        if on_epoch_end is not None:
            on_epoch_end(pair)
    while pair.epochs_done < cfg.epochs:
        _joint_epoch(pair, samples)
        if on_epoch_end is not None:
            on_epoch_end(pair)
    return pair
