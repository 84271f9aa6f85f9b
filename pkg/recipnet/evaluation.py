"""
Runs trained networks (and the linear comparator) over sample sets and
collects their metrics into EvalReports.
"""
import numpy as np
from recipnet.attack import matched_predict, diagnostic_rows
from recipnet.data.batch import iterate_batches
from recipnet.exceptions import RecipNetUsageError
from recipnet.metrics import (
    best_of_k, collision_pct, ade, fde, EvalReport, SceneResult)
from recipnet.models.baselines import linear_predict
from recipnet.utils.logging import logger

EVAL_BATCH_SIZE = 64


def _check(samples, k):
    if not samples:
        raise RecipNetUsageError("No samples to evaluate")
    if k < 1:
        raise RecipNetUsageError("K must be at least 1 ({})".format(k))


def sample_predictions(network, batch, k, rng):
    """
    K predictions of every agent in ``batch``, each with fresh noise

    Returns
    -------
    predictions : np.ndarray, shape (K, T_pred, A, 2)
    """
    predictions = []
    with network.frozen():
        for _ in range(k):
            z = network.sample_noise(batch.num_agents, rng)
            predictions.append(
                network.predict_positions(batch.observed, batch, z=z).data)
    return np.array(predictions)


def _scene_results(batch, predictions):
    "Best-of-K results of every scene of a batch from (K, T, A, 2) arrays"
    results = []
    chosen = []
    for sample, slc in zip(batch.samples, batch.scene_slices):
        gt = batch.target[:, slc]
        best = best_of_k(predictions[:, :, slc], gt)
        best_pred = predictions[best.index, :, slc]
        results.append(SceneResult(sample.scene_id, sample.subset,
                                   sample.num_agents, best.ade, best.fde,
                                   collision_pct(best_pred)))
        chosen.append(best_pred)
    return results, chosen


def evaluate(network, samples, k, rng, label='Model',
             batch_size=EVAL_BATCH_SIZE):
    """
    Best-of-K evaluation of a forward network

    Returns
    -------
    report : EvalReport
    predictions : list(np.ndarray)
        The best prediction of every scene, shaped (T_pred, N, 2)
    """
    _check(samples, k)
    results = []
    chosen = []
    for batch in iterate_batches(samples, batch_size):
        r, c = _scene_results(batch,
                              sample_predictions(network, batch, k, rng))
        results.extend(r)
        chosen.extend(c)
    report = EvalReport(label, k, results)
    logger.info(repr(report))
    return report, chosen


def evaluate_linear(samples, label='Linear'):
    "The least-squares constant-velocity comparator"
    _check(samples, 1)
    results = []
    for sample in samples:
        pred = linear_predict(sample.observed, len(sample.future))
        results.append(SceneResult(
            sample.scene_id, sample.subset, sample.num_agents,
            ade(pred, sample.future), fde(pred, sample.future),
            collision_pct(pred)))
    report = EvalReport(label, 1, results)
    logger.info(repr(report))
    return report


def ground_truth_collisions(samples, label='Ground truth'):
    "Near-collision percentage of the true futures (zero displacement error)"
    _check(samples, 1)
    return EvalReport(label, 1, [
        SceneResult(s.scene_id, s.subset, s.num_agents, 0.0, 0.0,
                    collision_pct(s.future)) for s in samples])


def evaluate_attack(forward, backward, samples, k, attack_cfg, rng,
                    label='Model', batch_size=EVAL_BATCH_SIZE):
    """
    Best-of-K metrics of the raw forward predictions and of their matched
    (attacked) refinements, with the same noise for both

    Returns
    -------
    pre, post : EvalReport
        Reports without and with reciprocal attack
    diagnostics : list(OrderedDict)
        Matching-error curves of the first of the K samples of every scene
    improved : float
        Fraction of (scene, sample) attacks with E^M <= E^0
    """
    _check(samples, k)
    if backward is None:
        raise RecipNetUsageError(
            "Attack evaluation requires a checkpoint with a backward network")
    pre_results, post_results, diagnostics = [], [], []
    improved = []
    for batch in iterate_batches(samples, batch_size):
        raw, refined = [], []
        for i in range(k):
            z_f = forward.sample_noise(batch.num_agents, rng)
            z_b = backward.sample_noise(batch.num_agents, rng)
            state = matched_predict(batch, forward, backward, attack_cfg,
                                    z_forward=z_f, z_backward=z_b)
            raw.append(state.initial_positions)
            refined.append(state.refined_positions)
            improved.extend(state.improved)
            if i == 0:
                diagnostics.extend(diagnostic_rows(state, batch, label))
        pre_results.extend(_scene_results(batch, np.array(raw))[0])
        post_results.extend(_scene_results(batch, np.array(refined))[0])
    pre = EvalReport(label, k, pre_results)
    post = EvalReport(label + ' + attack', k, post_results)
    fraction = float(np.mean(improved))
    logger.info("{} -> {} (E^M <= E^0 for {:.1f}% of attacks)".format(
        pre, post, 100.0 * fraction))
    return pre, post, diagnostics, fraction
