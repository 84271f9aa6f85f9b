"""
Matched prediction by reciprocal attack: the forward prediction is perturbed
by gradient steps that reduce the error with which the backward network
reconstructs the observed past from it,

    E(Y) = |X - G(Y)|,    Y^m = Y^(m-1) + epsilon * grad E(Y^(m-1)),

and the iterates Y^1..Y^M are exponentially averaged with weights
exp(alpha * m). Iterates are displacement-encoded predictions (the
representation the networks produce), so epsilon < 0 descends E. Network
weights are frozen throughout.
"""
from collections import OrderedDict
import numpy as np
from recipnet.autodiff import Tensor, ops, backward as backprop
from recipnet.exceptions import RecipNetNumericError, RecipNetUsageError
from recipnet.models.generator import positions_from
from recipnet.utils.config import Config
from recipnet.utils.logging import logger
from recipnet.utils.reports import write_csv
from .metrics import ade


class AttackConfig(Config):
    """
    Parameters
    ----------
    epsilon : float
        Step size (negative to descend the matching error)
    iterations : int
        Number M of attack steps
    alpha : float
        Rate of the exponential average of the iterates
    use_sign : bool
        Step along the sign of the gradient instead of the gradient
    """

    defaults = OrderedDict([
        ('epsilon', -0.05),
        ('iterations', 20),
        ('alpha', 0.1),
        ('use_sign', False)])

    def validate(self):
        self._check(self.iterations >= 1, "iterations must be positive ({})",
                    self.iterations)
        self._check(np.isfinite(self.alpha), "alpha must be finite ({})",
                    self.alpha)
        self._check(np.isfinite(self.epsilon), "epsilon must be finite ({})",
                    self.epsilon)


class AttackState(object):
    """
    The record of an attack on a batch

    Parameters
    ----------
    iterates : list(np.ndarray)
        Displacement iterates Y^0..Y^M, each shaped (T_pred, A, 2)
    errors : np.ndarray, shape (M + 1, S)
        Matching error of every scene at every iterate
    valid : np.ndarray(int), shape (S,)
        Number of iterates (after Y^0) of each scene that entered the average
        (fewer than M if the scene's attack was truncated)
    refined : np.ndarray, shape (T_pred, A, 2)
        Exponentially averaged displacements
    origin : np.ndarray, shape (A, 2)
        Last observed positions the displacements start from
    """

    def __init__(self, iterates, errors, valid, refined, origin,
                 scene_slices):
        self.iterates = iterates
        self.errors = errors
        self.valid = valid
        self.refined = refined
        self.origin = origin
        self.scene_slices = scene_slices

    @property
    def num_iterations(self):
        return len(self.iterates) - 1

    def positions(self, displacement):
        return self.origin + np.cumsum(displacement, axis=0)

    @property
    def initial_positions(self):
        return self.positions(self.iterates[0])

    @property
    def refined_positions(self):
        return self.positions(self.refined)

    @property
    def improved(self):
        "Whether E^M <= E^0 for each scene"
        return self.errors[-1] <= self.errors[0]


def matching_error(X, Y_tilde, G, scene_slices=None):
    """
    L2 error with which ``G`` reconstructs ``X`` from ``Y_tilde``

    Parameters
    ----------
    X : array-like | Tensor
        The trajectory to be reconstructed
    Y_tilde : Tensor
        The prediction fed to G
    G : callable
        Maps Y_tilde to a tensor shaped like X
    scene_slices : list(slice) | None
        If given, the error is the sum over these agent slices (axis 1) of
        the per-slice L2 errors

    Returns
    -------
    E : Tensor (scalar)
    """
    diff = ops.as_tensor(X) - G(Y_tilde)
    if scene_slices is None:
        return ops.l2norm(diff)
    return ops.sum(ops.stack([ops.l2norm(diff[:, s]) for s in scene_slices]))


def _per_scene(diff, scene_slices):
    if scene_slices is None:
        return ops.l2norm(diff).reshape(1)
    return ops.stack([ops.l2norm(diff[:, s]) for s in scene_slices])


def _errors_and_gradient(X, Y, G, scene_slices):
    Y = Tensor(Y, requires_grad=True)
    per_scene = _per_scene(ops.as_tensor(X) - G(Y), scene_slices)
    backprop(ops.sum(per_scene))
    return per_scene.data.copy(), Y.grad


def _errors(X, Y, G, scene_slices):
    return _per_scene(ops.as_tensor(X) - G(Tensor(Y)), scene_slices).data


def attack_step(X, Y_prev, G, epsilon, scene_slices=None, use_sign=False):
    """
    One step Y^m = Y^(m-1) + epsilon * grad E(Y^(m-1)) (or the sign of the
    gradient)

    Returns
    -------
    Y_m : np.ndarray
    """
    Y_prev = np.asarray(ops.as_tensor(Y_prev).data, dtype=np.float64)
    _, grad = _errors_and_gradient(X, Y_prev, G, scene_slices)
    if not np.all(np.isfinite(grad)):
        raise RecipNetNumericError(
            "Non-finite gradient of the matching error")
    step = np.sign(grad) if use_sign else grad
    return Y_prev + epsilon * step


def exp_average(iterates, alpha):
    """
    Exponential average sum(e^(alpha m) Y^m) / sum(e^(alpha m)) of the
    iterates Y^1..Y^M
    """
    if not len(iterates):
        raise RecipNetUsageError("Cannot average an empty list of iterates")
    iterates = np.asarray(iterates, dtype=np.float64)
    num = len(iterates)
    exponents = alpha * np.arange(1, num + 1)
    # Shifted exponents give the same weights without overflow
    weights = np.exp(exponents - exponents.max())
    weights /= weights.sum()
    return np.tensordot(weights, iterates, axes=1)


def backward_map(forward, backward, batch, z_backward=None):
    """
    The reconstruction map of the attack on ``batch``: forward
    displacements -> positions -> time-reversed input of the backward
    network -> its (time-reversed) reconstruction of the observed past.
    Non-finite reconstructions are returned, not raised.

    Returns
    -------
    G : callable
        Tensor (T_pred, A, 2) -> Tensor (T_obs, A, 2)
    X : np.ndarray
        The time-reversed observed past G should reconstruct
    """
    origin = batch.observed[-1]
    reversed_batch = batch.reversed()

    def G(displacement):
        positions = positions_from(displacement, origin)
        return backward.predict_positions(ops.flip(positions, axis=0),
                                          reversed_batch, z=z_backward,
                                          check_finite=False)

    return G, batch.observed[::-1].copy()


def matched_predict(batch, forward, backward, cfg, z_forward=None,
                    z_backward=None):
    """
    Refines the forward prediction of every scene of ``batch`` by reciprocal
    attack. A scene whose gradient becomes non-finite at step m keeps the
    iterates before m while the other scenes of the batch carry on.

    Returns
    -------
    state : AttackState
        Iterates, matching errors and the refined prediction
    """
    if backward is None:
        raise RecipNetUsageError(
            "Matched prediction requires a backward network")
    slices = batch.scene_slices
    with forward.frozen(), backward.frozen():
        G, X = backward_map(forward, backward, batch, z_backward=z_backward)
        Y = forward.predict(batch.observed, batch, z=z_forward).data.copy()
        iterates = [Y]
        errors = []
        active = np.ones(len(slices), dtype=bool)
        valid = np.full(len(slices), cfg.iterations, dtype=int)
        for m in range(1, cfg.iterations + 1):
            try:
                E, grad = _errors_and_gradient(X, Y, G, slices)
            except RecipNetNumericError:
                E, grad = np.full(len(slices), np.nan), np.full(Y.shape,
                                                               np.nan)
            errors.append(E)
            step = np.zeros_like(Y)
            for s, slc in enumerate(slices):
                if not active[s]:
                    continue
                if not np.all(np.isfinite(grad[:, slc])):
                    active[s] = False
                    valid[s] = m - 1
                    logger.warning(
                        "Attack of scene {} truncated at iteration {} "
                        "(non-finite gradient)".format(s, m))
                    continue
                g = grad[:, slc]
                step[:, slc] = np.sign(g) if cfg.use_sign else g
            Y = Y + cfg.epsilon * step
            iterates.append(Y)
        try:
            errors.append(_errors(X, Y, G, slices))
        except RecipNetNumericError:
            errors.append(np.full(len(slices), np.nan))
    refined = Y.copy()
    for s, slc in enumerate(slices):
        if valid[s]:
            refined[:, slc] = exp_average(
                [it[:, slc] for it in iterates[1:valid[s] + 1]], cfg.alpha)
        else:
            refined[:, slc] = iterates[0][:, slc]
    return AttackState(iterates, np.array(errors), valid, refined,
                       batch.observed[-1].copy(), slices)


def diagnostic_rows(state, batch, label=''):
    """
    Per-scene rows (iteration, matching error, ADE against the ground truth)
    of an attack
    """
    rows = []
    scene_ids = ([s.scene_id for s in batch.samples]
                 if batch.samples is not None else range(len(state.errors[0])))
    for s, (slc, scene_id) in enumerate(zip(state.scene_slices, scene_ids)):
        for m, iterate in enumerate(state.iterates):
            rows.append(OrderedDict([
                ('label', label), ('scene_id', scene_id), ('iteration', m),
                ('E', float(state.errors[m, s])),
                ('ade', ade(state.positions(iterate)[:, slc],
                            batch.target[:, slc]))]))
    return rows


DIAGNOSTIC_FIELDS = ('label', 'scene_id', 'iteration', 'E', 'ade')


def write_diagnostics(path, rows):
    write_csv(path, DIAGNOSTIC_FIELDS, rows)
