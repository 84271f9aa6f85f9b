"""
Displacement and near-collision metrics, and the report they are collected in.

All trajectories are arrays shaped (T, A, 2) of positions in meters over the
T predicted steps of A agents.
"""
from collections import namedtuple, OrderedDict
import numpy as np
from recipnet.exceptions import RecipNetDimensionError, RecipNetUsageError
from recipnet.utils.reports import write_csv, write_yaml

COLLISION_THRESHOLD = 0.1

BestOfK = namedtuple('BestOfK', 'ade fde index')


def _distances(pred, gt):
    pred = np.asarray(pred, dtype=np.float64)
    gt = np.asarray(gt, dtype=np.float64)
    if pred.shape != gt.shape:
        raise RecipNetDimensionError(
            "Predicted and ground-truth trajectories differ in shape",
            pred.shape, gt.shape)
    if pred.ndim != 3 or pred.shape[-1] != 2:
        raise RecipNetDimensionError(
            "Trajectories must be shaped (time, agents, 2)", pred.shape)
    return np.linalg.norm(pred - gt, axis=-1)


def ade(pred, gt):
    "Mean Euclidean distance over the agents and predicted steps"
    return float(np.mean(_distances(pred, gt)))


def fde(pred, gt):
    "Mean over the agents of the Euclidean distance at the final step"
    return float(np.mean(_distances(pred, gt)[-1]))


def best_of_k(pred_samples, gt):
    """
    The lowest ADE among K predictions of a scene and the FDE of that same
    prediction

    Parameters
    ----------
    pred_samples : array-like, shape (K, T, A, 2)
        K sampled predictions
    gt : np.ndarray, shape (T, A, 2)
        Ground truth

    Returns
    -------
    result : BestOfK
        ADE, FDE and index of the ADE-minimising sample (first on ties)
    """
    pred_samples = np.asarray(pred_samples, dtype=np.float64)
    if not len(pred_samples):
        raise RecipNetUsageError("best-of-K requires at least one sample")
    ades = [ade(p, gt) for p in pred_samples]
    index = int(np.argmin(ades))
    return BestOfK(ades[index], fde(pred_samples[index], gt), index)


def collision_pct(positions, threshold=COLLISION_THRESHOLD):
    """
    Percentage of agents closer than ``threshold`` (strictly) to at least one
    other agent, averaged over frames

    Parameters
    ----------
    positions : array-like, shape (T, N, 2)
        Per-frame positions of the agents of a scene
    """
    positions = np.asarray(positions, dtype=np.float64)
    if positions.ndim == 2:
        positions = positions[np.newaxis]
    num_agents = positions.shape[1]
    if num_agents < 2:
        return 0.0
    diff = positions[:, :, np.newaxis, :] - positions[:, np.newaxis, :, :]
    dist = np.linalg.norm(diff, axis=-1)
    close = dist < threshold
    idx = np.arange(num_agents)
    close[:, idx, idx] = False
    colliding = np.any(close, axis=2)
    return float(100.0 * np.mean(np.mean(colliding, axis=1)))


SceneResult = namedtuple('SceneResult',
                         'scene_id subset num_agents ade fde collision_pct')


class EvalReport(object):
    """
    Metrics of one method over a set of scenes

    Parameters
    ----------
    label : str
        Name of the method (and held-out subset) the row describes
    k : int
        Number of samples of the best-of-K evaluation
    scenes : list(SceneResult)
        Per-scene results
    """

    FIELDS = ('label', 'k', 'scenes', 'agents', 'ade', 'fde',
              'collision_pct')
    SCENE_FIELDS = ('label', 'scene_id', 'subset', 'agents', 'ade', 'fde',
                    'collision_pct')

    def __init__(self, label, k, scenes):
        self.label = label
        self.k = k
        self.scenes = list(scenes)
        if not self.scenes:
            raise RecipNetUsageError(
                "Cannot build report '{}' from no scenes".format(label))

    @property
    def num_agents(self):
        return sum(s.num_agents for s in self.scenes)

    @property
    def ade(self):
        "Agent-weighted mean, equal to the ADE over all agents"
        return float(sum(s.ade * s.num_agents for s in self.scenes) /
                     self.num_agents)

    @property
    def fde(self):
        return float(sum(s.fde * s.num_agents for s in self.scenes) /
                     self.num_agents)

    @property
    def collision_pct(self):
        return float(np.mean([s.collision_pct for s in self.scenes]))

    def row(self):
        return OrderedDict([
            ('label', self.label), ('k', self.k), ('scenes', len(self.scenes)),
            ('agents', self.num_agents), ('ade', self.ade), ('fde', self.fde),
            ('collision_pct', self.collision_pct)])

    def scene_rows(self):
        return [OrderedDict([
            ('label', self.label), ('scene_id', s.scene_id),
            ('subset', s.subset), ('agents', s.num_agents), ('ade', s.ade),
            ('fde', s.fde), ('collision_pct', s.collision_pct)])
            for s in self.scenes]

    def __repr__(self):
        return ("EvalReport('{}', K={}, ADE={:.4f}, FDE={:.4f}, "
                "collisions={:.2f}%)".format(self.label, self.k, self.ade,
                                             self.fde, self.collision_pct))


def average_row(reports, label='Avg'):
    "Unweighted mean of the summary rows of several reports"
    rows = [r.row() for r in reports]
    return OrderedDict([
        ('label', label), ('k', rows[0]['k']),
        ('scenes', sum(r['scenes'] for r in rows)),
        ('agents', sum(r['agents'] for r in rows)),
        ('ade', float(np.mean([r['ade'] for r in rows]))),
        ('fde', float(np.mean([r['fde'] for r in rows]))),
        ('collision_pct', float(np.mean([r['collision_pct'] for r in rows])))])


def write_reports(reports, summary_path, scenes_path=None, yaml_path=None,
                  extra_rows=()):
    """
    Writes the summary rows of ``reports`` (plus ``extra_rows``) as CSV and,
    optionally, their per-scene breakdown as CSV and the summary as YAML
    """
    rows = [r.row() for r in reports] + list(extra_rows)
    write_csv(summary_path, EvalReport.FIELDS, rows)
    if scenes_path is not None:
        scene_rows = []
        for report in reports:
            scene_rows.extend(report.scene_rows())
        write_csv(scenes_path, EvalReport.SCENE_FIELDS, scene_rows)
    if yaml_path is not None:
        write_yaml(yaml_path, [dict(r) for r in rows])
