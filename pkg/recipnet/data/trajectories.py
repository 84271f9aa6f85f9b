"""
Trajectory data model. Positions are in meters, sampled every DT seconds,
and stored as arrays of shape (time, agents, 2).
"""
import numpy as np
from recipnet.exceptions import (
    RecipNetUsageError, RecipNetDimensionError)

DT = 0.4  # seconds between frames
T_OBS = 8
T_PRED = 12
MAX_AGENTS = 32


def _positions(array, name):
    array = np.array(array, dtype=np.float64)
    if array.ndim != 3 or array.shape[-1] != 2:
        raise RecipNetDimensionError(
            "{} positions must be shaped (time, agents, 2)".format(name),
            array.shape)
    if not np.all(np.isfinite(array)):
        raise RecipNetUsageError(
            "{} positions contain non-finite coordinates".format(name))
    return array


class Trajectory(object):
    """
    The positions of a single agent at consecutive frames

    Parameters
    ----------
    agent_id : int
        Identifier of the agent within its source
    points : array-like, shape (T, 2)
        The (x, y) positions in meters
    """

    def __init__(self, agent_id, points):
        self.agent_id = int(agent_id)
        points = np.array(points, dtype=np.float64).reshape(-1, 2)
        if not len(points):
            raise RecipNetUsageError(
                "Trajectory of agent {} has no points".format(agent_id))
        if not np.all(np.isfinite(points)):
            raise RecipNetUsageError(
                "Trajectory of agent {} has non-finite coordinates"
                .format(agent_id))
        self.points = points

    def __len__(self):
        return len(self.points)

    def reversed(self):
        return Trajectory(self.agent_id, self.points[::-1])

    def __eq__(self, other):
        return (self.agent_id == other.agent_id and
                np.array_equal(self.points, other.points))

    def __repr__(self):
        return 'Trajectory(agent_id={}, {} points)'.format(self.agent_id,
                                                          len(self))


class _SampleBase(object):

    def __init__(self, observed, target, agent_ids=None, context=None,
                 scene_id=0, subset=''):
        self.observed = _positions(observed, 'Observed')
        target = _positions(target, 'Target')
        if target.shape[1] != self.observed.shape[1]:
            raise RecipNetDimensionError(
                "Observed and target agent counts differ",
                self.observed.shape, target.shape)
        if self.num_agents > MAX_AGENTS:
            raise RecipNetUsageError(
                "Scene {} has {} agents, more than the maximum of {}"
                .format(scene_id, self.num_agents, MAX_AGENTS))
        self._target = target
        if agent_ids is None:
            agent_ids = np.arange(self.num_agents)
        self.agent_ids = np.asarray(agent_ids, dtype=int)
        self.context = (np.asarray(context, dtype=np.float64)
                        if context is not None else None)
        self.scene_id = int(scene_id)
        self.subset = str(subset)

    @property
    def num_agents(self):
        return self.observed.shape[1]

    @property
    def target(self):
        return self._target

    @property
    def full(self):
        "Observed positions followed by the target positions"
        return np.concatenate((self.observed, self._target))

    def trajectories(self):
        full = self.full
        return [Trajectory(aid, full[:, i])
                for i, aid in enumerate(self.agent_ids)]

    def _metadata(self):
        return dict(agent_ids=self.agent_ids, context=self.context,
                    scene_id=self.scene_id, subset=self.subset)

    def __eq__(self, other):
        return (type(self) is type(other) and
                np.array_equal(self.observed, other.observed) and
                np.array_equal(self._target, other._target) and
                np.array_equal(self.agent_ids, other.agent_ids) and
                ((self.context is None and other.context is None) or
                 (self.context is not None and other.context is not None and
                  np.array_equal(self.context, other.context))) and
                self.scene_id == other.scene_id and
                self.subset == other.subset)

    def __ne__(self, other):
        return not self == other


class SceneSample(_SampleBase):
    """
    A window of a scene in forward time: the observed positions of every agent
    present in the window and their future positions

    Parameters
    ----------
    observed : array-like, shape (T_o, N, 2)
        Observed positions
    future : array-like, shape (T_pred, N, 2)
        Ground-truth future positions
    agent_ids : array-like(int) | None
        Identifiers of the N agents
    context : array-like(float) | None
        Optional fixed-length feature vector describing the scene
    scene_id : int
        Index of the scene within its dataset
    subset : str
        Name of the sub-dataset the scene belongs to
    """

    def __init__(self, observed, future, **kwargs):
        super(SceneSample, self).__init__(observed, future, **kwargs)

    @property
    def future(self):
        return self._target

    def __repr__(self):
        return 'SceneSample(scene_id={}, agents={}, T_o={}, T_pred={})'.format(
            self.scene_id, self.num_agents, len(self.observed),
            len(self.future))


class BackwardSample(_SampleBase):
    """
    A scene window reversed in time: the reversed future is observed and the
    reversed past is the prediction target
    """

    def __repr__(self):
        return ('BackwardSample(scene_id={}, agents={}, T_in={}, T_out={})'
                .format(self.scene_id, self.num_agents, len(self.observed),
                        len(self.target)))


def time_reverse(sample):
    """
    Maps a SceneSample to its BackwardSample (and vice versa): the observed
    segment of the result is the reversed target of the input and its target
    the reversed observed segment
    """
    if isinstance(sample, SceneSample):
        cls = BackwardSample
    elif isinstance(sample, BackwardSample):
        cls = SceneSample
    else:
        raise RecipNetUsageError(
            "Cannot time-reverse object of type {}".format(type(sample)))
    return cls(sample.target[::-1], sample.observed[::-1],
               **sample._metadata())


class NormalizationSpec(object):
    """
    How positions are encoded for the networks

    Parameters
    ----------
    mode : str
        'absolute' leaves positions unchanged, 'relative-displacement' encodes
        them as per-step displacements from a stored per-agent origin
    """

    MODES = ('absolute', 'relative-displacement')

    def __init__(self, mode='relative-displacement'):
        if mode not in self.MODES:
            raise RecipNetUsageError(
                "Unrecognised normalization mode '{}' (valid: '{}')"
                .format(mode, "', '".join(self.MODES)))
        self.mode = mode


class NormalizedSample(object):
    """
    Encoded positions of a sample

    Parameters
    ----------
    values : np.ndarray
        Positions (absolute mode, shape (T, N, 2)) or displacements
        (relative mode, shape (T - 1, N, 2))
    origin : np.ndarray, shape (N, 2)
        Per-agent origin offset (zeros in absolute mode)
    """

    def __init__(self, spec, values, origin, num_observed, sample_type,
                 metadata):
        self.spec = spec
        self.values = values
        self.origin = origin
        self.num_observed = num_observed
        self.sample_type = sample_type
        self.metadata = metadata


def encode_positions(positions, mode):
    "Returns (values, origin) for positions shaped (T, N, 2)"
    positions = np.asarray(positions, dtype=np.float64)
    if mode == 'absolute':
        return positions.copy(), np.zeros(positions.shape[1:])
    return np.diff(positions, axis=0), positions[0].copy()


def decode_positions(values, origin, mode):
    if mode == 'absolute':
        return np.asarray(values, dtype=np.float64).copy()
    return np.concatenate(
        (origin[np.newaxis], origin + np.cumsum(values, axis=0)))


def normalize(sample, spec):
    """
    Encodes the full (observed + target) positions of a sample according to
    ``spec``
    """
    values, origin = encode_positions(sample.full, spec.mode)
    return NormalizedSample(spec, values, origin, len(sample.observed),
                            type(sample), sample._metadata())


def denormalize(normalized, spec=None):
    "Inverts ``normalize``"
    spec = spec if spec is not None else normalized.spec
    full = decode_positions(normalized.values, normalized.origin, spec.mode)
    n = normalized.num_observed
    return normalized.sample_type(full[:n], full[n:], **normalized.metadata)
