"""
Training objectives of the forward (theta) and backward (phi) networks.

For a batch with observed past X and future Y

    J+[theta] = lam * |Y - F(X)| + (1 - lam) * |X - G(F(X))|
    J-[phi]   = lam * |X - G(Y)| + (1 - lam) * |Y - F(G(Y))|

where G consumes and produces time-reversed trajectories, and each network's
objective adds its weighted adversarial generator loss. While one objective is
evaluated the partner network takes part in the computation with its
parameters frozen.
"""
from collections import OrderedDict, namedtuple
import numpy as np
from recipnet.autodiff import Tensor, ops
from recipnet.exceptions import RecipNetDimensionError
from recipnet.utils.config import Config

LOG_CLAMP = 1e-12

LossTerms = namedtuple('LossTerms', 'total primary reciprocal prediction')


class LossConfig(Config):
    """
    Parameters
    ----------
    lam : float
        Weight of the prediction term against the reciprocal term, in [0, 1]
    gan_weight : float
        Multiplier of the adversarial generator loss
    """

    defaults = OrderedDict([
        ('lam', 0.5),
        ('gan_weight', 1.0)])

    def validate(self):
        self._check(0.0 <= self.lam <= 1.0, "lam must be in [0, 1] ({})",
                    self.lam)
        self._check(np.isfinite(self.gan_weight) and self.gan_weight >= 0.0,
                    "gan_weight must be finite and non-negative ({})",
                    self.gan_weight)


def _check_shapes(a, b):
    if a.shape != b.shape:
        raise RecipNetDimensionError(
            "Trajectories differ in length or agent count", a.shape, b.shape)


def l2_traj(a, b):
    "L2 norm of the flattened coordinate difference of two trajectories"
    a, b = ops.as_tensor(a), ops.as_tensor(b)
    _check_shapes(a, b)
    return ops.l2norm(a - b)


def batch_l2(a, b):
    """
    Mean over agents of each agent's trajectory L2 distance, for
    trajectories shaped (T, A, 2)
    """
    a, b = ops.as_tensor(a), ops.as_tensor(b)
    _check_shapes(a, b)
    return ops.mean(ops.l2norm(a - b, axis=(0, 2)))


def reciprocal_objective(primary, reciprocal, lam):
    "lam * primary + (1 - lam) * reciprocal"
    return lam * primary + (1.0 - lam) * reciprocal


def j_forward(batch, forward, backward, cfg, z_forward=None,
              z_backward=None):
    """
    The reciprocal objective of ``forward`` on ``batch``. ``backward`` is
    frozen and is not evaluated at all when lam == 1.

    Returns
    -------
    terms : LossTerms
        The total objective, the prediction term, the reciprocal term (None
        when lam == 1) and the predicted positions
    """
    prediction = forward.predict_positions(batch.observed, batch,
                                           z=z_forward)
    primary = batch_l2(prediction, batch.target)
    if cfg.lam >= 1.0:
        return LossTerms(primary, primary, None, prediction)
    with backward.frozen():
        reconstruction = backward.predict_positions(
            ops.flip(prediction, axis=0), batch.reversed(), z=z_backward)
    reciprocal = batch_l2(reconstruction, batch.observed[::-1].copy())
    total = reciprocal_objective(primary, reciprocal, cfg.lam)
    return LossTerms(total, primary, reciprocal, prediction)


def j_backward(batch, forward, backward, cfg, z_forward=None,
               z_backward=None):
    "The mirror of j_forward: the roles of the networks and time are swapped"
    return j_forward(batch.reversed(), backward, forward, cfg,
                     z_forward=z_backward, z_backward=z_forward)


def reconstruction_error(batch, forward, backward, z_forward=None,
                         z_backward=None):
    "|X - G(F(X))| averaged over agents, without recording gradients"
    with forward.frozen(), backward.frozen():
        prediction = forward.predict_positions(batch.observed, batch,
                                               z=z_forward)
        reconstruction = backward.predict_positions(
            ops.flip(prediction, axis=0), batch.reversed(), z=z_backward)
        return batch_l2(reconstruction, batch.observed[::-1].copy()).item()


def _neg_log(x):
    return -ops.log(ops.clip(x, LOG_CLAMP, None))


def adversarial_losses(real_scores, fake_scores):
    """
    Discriminator and (non-saturating) generator losses from the scores of
    real and fake trajectories, averaged over the trajectories

    Returns
    -------
    d_loss : Tensor
        -log D(real) - log(1 - D(fake))
    g_loss : Tensor
        -log D(fake)
    """
    real_scores = ops.as_tensor(real_scores)
    fake_scores = ops.as_tensor(fake_scores)
    d_loss = ops.mean(_neg_log(real_scores) + _neg_log(1.0 - fake_scores))
    g_loss = ops.mean(_neg_log(fake_scores))
    return d_loss, g_loss


def gan_losses(discriminator, real, fake):
    "Adversarial losses of a discriminator on real and fake trajectories"
    return adversarial_losses(discriminator(real), discriminator(fake))


def discriminator_loss(network, batch, prediction):
    """
    Loss of the network's discriminator on the ground truth of ``batch``
    against the predicted positions, which are detached from the generator
    """
    real = Tensor(batch.full)
    fake = ops.concat([Tensor(batch.observed), prediction.detach()], axis=0)
    return ops.mean(_neg_log(network.score(real)) +
                    _neg_log(1.0 - network.score(fake)))


def generator_adversarial_loss(network, batch, prediction):
    "-log D(fake) with the discriminator frozen"
    with network.discriminator.frozen():
        fake = ops.concat([Tensor(batch.observed), prediction], axis=0)
        return ops.mean(_neg_log(network.score(fake)))


def total_loss(objective, g_loss, gan_weight):
    "The reciprocal objective plus the weighted generator loss"
    if g_loss is None or not gan_weight:
        return objective
    return objective + gan_weight * g_loss


def total_losses(j_plus, j_minus, g_theta, g_phi, cfg):
    """
    Overall objectives of the forward and backward networks

    Returns
    -------
    L_theta, L_phi : Tensor
    """
    return (total_loss(j_plus, g_theta, cfg.gan_weight),
            total_loss(j_minus, g_phi, cfg.gan_weight))
