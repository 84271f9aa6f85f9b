"""
Packing of scene samples into batches the networks run on in one pass.

The agents of all scenes are concatenated along the agent axis, so the
observed and target positions of a batch are arrays shaped (T, A, 2), where
A is the total number of agents. ``scene_slices`` delimit the agents of each
scene along that axis.
"""
import numpy as np
from recipnet.exceptions import RecipNetUsageError, RecipNetDimensionError
from .trajectories import BackwardSample, time_reverse, MAX_AGENTS


class PoolingIndex(object):
    """
    Index arrays that let the social pooling of every agent in a batch be
    computed with one gather.

    Each ordered (target, neighbour) pair of agents sharing a scene becomes a
    "pair row". Row ``num_pairs`` is reserved for the zero-padded absent
    neighbour, so ``gather[i]`` lists the pair rows of the neighbours of
    agent i followed by the padding row up to MAX_AGENTS - 1 slots.

    Parameters
    ----------
    scene_sizes : list(int)
        Number of agents in each scene
    """

    def __init__(self, scene_sizes, max_agents=MAX_AGENTS):
        targets = []
        neighbours = []
        gather_rows = []
        offset = 0
        for size in scene_sizes:
            if size > max_agents:
                raise RecipNetUsageError(
                    "Scene with {} agents exceeds the maximum of {}"
                    .format(size, max_agents))
            for i in range(size):
                rows = []
                for j in range(size):
                    if j != i:
                        rows.append(len(targets))
                        targets.append(offset + i)
                        neighbours.append(offset + j)
                gather_rows.append(rows)
            offset += size
        self.num_agents = offset
        self.num_pairs = len(targets)
        self.targets = np.array(targets, dtype=int)
        self.neighbours = np.array(neighbours, dtype=int)
        self.gather = np.full((offset, max_agents - 1), self.num_pairs,
                              dtype=int)
        for i, rows in enumerate(gather_rows):
            self.gather[i, :len(rows)] = rows

    @classmethod
    def single_scene(cls, num_agents):
        return cls([num_agents])


class SceneBatch(object):
    """
    A set of scene samples packed along the agent axis

    Parameters
    ----------
    observed : np.ndarray, shape (T_in, A, 2)
        Observed positions of all agents
    target : np.ndarray, shape (T_out, A, 2)
        Target positions of all agents
    scene_sizes : list(int)
        Number of agents of each scene, in order
    context : np.ndarray | None, shape (S, C)
        Per-scene context features
    samples : list(SceneSample | BackwardSample)
        The samples the batch was built from
    """

    def __init__(self, observed, target, scene_sizes, context=None,
                 samples=None):
        self.observed = np.asarray(observed, dtype=np.float64)
        self.target = np.asarray(target, dtype=np.float64)
        self.scene_sizes = [int(s) for s in scene_sizes]
        if self.observed.shape[1] != sum(self.scene_sizes):
            raise RecipNetDimensionError(
                "Scene sizes do not sum to the number of agents",
                self.observed.shape, (sum(self.scene_sizes),))
        if self.target.shape[1] != self.observed.shape[1]:
            raise RecipNetDimensionError(
                "Observed and target agent counts differ",
                self.observed.shape, self.target.shape)
        self.context = context
        self.samples = samples
        bounds = np.cumsum([0] + self.scene_sizes)
        self.scene_slices = [slice(int(s), int(e))
                             for s, e in zip(bounds[:-1], bounds[1:])]
        self.scene_index = np.repeat(np.arange(len(self.scene_sizes)),
                                     self.scene_sizes)
        self._pooling_index = None

    @classmethod
    def from_samples(cls, samples):
        samples = list(samples)
        if not samples:
            raise RecipNetUsageError("Cannot build a batch from no samples")
        kinds = set(type(s) for s in samples)
        if len(kinds) > 1:
            raise RecipNetUsageError(
                "Cannot mix forward and backward samples in one batch")
        lengths = set((len(s.observed), len(s.target)) for s in samples)
        if len(lengths) > 1:
            raise RecipNetDimensionError(
                "Samples in a batch must have equal lengths",
                *sorted(lengths))
        observed = np.concatenate([s.observed for s in samples], axis=1)
        target = np.concatenate([s.target for s in samples], axis=1)
        if all(s.context is not None for s in samples):
            context = np.array([s.context for s in samples])
        else:
            context = None
        return cls(observed, target, [s.num_agents for s in samples],
                   context=context, samples=samples)

    @property
    def num_agents(self):
        return self.observed.shape[1]

    @property
    def num_scenes(self):
        return len(self.scene_sizes)

    @property
    def t_in(self):
        return self.observed.shape[0]

    @property
    def t_out(self):
        return self.target.shape[0]

    @property
    def full(self):
        return np.concatenate((self.observed, self.target))

    @property
    def pooling_index(self):
        if self._pooling_index is None:
            self._pooling_index = PoolingIndex(self.scene_sizes)
        return self._pooling_index

    def agent_context(self, context_dim):
        """
        Context features of every agent's scene, shaped (A, context_dim).
        Zeros when the batch has no context.
        """
        if self.context is None:
            return np.zeros((self.num_agents, context_dim))
        if self.context.shape[1] != context_dim:
            raise RecipNetDimensionError(
                "Context features do not match the network's context size",
                self.context.shape, (self.num_scenes, context_dim))
        return self.context[self.scene_index]

    def reversed(self):
        "The time-reversed batch (reversed target observed, and vice versa)"
        samples = (None if self.samples is None
                   else [time_reverse(s) for s in self.samples])
        batch = SceneBatch(self.target[::-1].copy(),
                           self.observed[::-1].copy(), self.scene_sizes,
                           context=self.context, samples=samples)
        batch._pooling_index = self._pooling_index
        return batch

    def is_backward(self):
        return bool(self.samples) and isinstance(self.samples[0],
                                                 BackwardSample)

    def __repr__(self):
        return 'SceneBatch(scenes={}, agents={}, T_in={}, T_out={})'.format(
            self.num_scenes, self.num_agents, self.t_in, self.t_out)


def iterate_batches(samples, batch_size, rng=None):
    """
    Yields SceneBatches of ``batch_size`` scenes (the last may be smaller),
    shuffling the scene order with ``rng`` if given
    """
    order = np.arange(len(samples))
    if rng is not None:
        order = rng.permutation(len(samples))
    for start in range(0, len(order), batch_size):
        yield SceneBatch.from_samples(
            [samples[i] for i in order[start:start + batch_size]])


def num_batches(num_samples, batch_size):
    return (num_samples + batch_size - 1) // batch_size
