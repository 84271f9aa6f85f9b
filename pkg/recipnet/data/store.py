"""
Versioned HDF5 store for scene samples.

Layout (all datasets at the root, agents of all scenes concatenated):

    observed       float64 (total_agents, T_o, 2)
    future         float64 (total_agents, T_pred, 2)
    agent_ids      int64   (total_agents,)
    scene_offsets  int64   (n_scenes + 1,)  agents of scene s are
                                            offsets[s]:offsets[s + 1]
    scene_ids      int64   (n_scenes,)
    scene_subset   bytes   (n_scenes,)      sub-dataset names
    scene_split    int8    (n_scenes,)      0 = train, 1 = test
    context        float64 (n_scenes, C)    only if the scenes have context

The root attributes 'format', 'version' and 'schema' (this description as
YAML) form the header.
"""
import os
import numpy as np
import h5py
import yaml
from recipnet.exceptions import RecipNetUsageError
from recipnet.utils.logging import logger
from .trajectories import SceneSample

STORE_FORMAT = 'recipnet-samples'
STORE_VERSION = 1
TRAIN, TEST = 0, 1

SCHEMA = {
    'observed': 'float64 (total_agents, T_o, 2) observed positions (m)',
    'future': 'float64 (total_agents, T_pred, 2) future positions (m)',
    'agent_ids': 'int64 (total_agents,) agent identifiers',
    'scene_offsets': 'int64 (n_scenes + 1,) agent offsets of each scene',
    'scene_ids': 'int64 (n_scenes,) scene identifiers',
    'scene_subset': 'bytes (n_scenes,) sub-dataset names',
    'scene_split': 'int8 (n_scenes,) 0 = train, 1 = test',
    'context': 'float64 (n_scenes, C) optional per-scene context features'}


class SampleSet(object):
    """
    A list of scene samples with their train/test assignment

    Parameters
    ----------
    samples : list(SceneSample)
    split : array-like(int) | None
        TRAIN or TEST for each sample (all TRAIN if None)
    """

    def __init__(self, samples, split=None):
        self.samples = list(samples)
        if split is None:
            split = np.zeros(len(self.samples), dtype=np.int8)
        self.split = np.asarray(split, dtype=np.int8)
        if len(self.split) != len(self.samples):
            raise RecipNetUsageError(
                "Split has {} entries for {} samples".format(
                    len(self.split), len(self.samples)))

    def __len__(self):
        return len(self.samples)

    def __iter__(self):
        return iter(self.samples)

    @property
    def subsets(self):
        names = []
        for s in self.samples:
            if s.subset not in names:
                names.append(s.subset)
        return names

    def select(self, split=None, subsets=None, exclude_subsets=None):
        "Returns the samples with the given split in/outside the subsets"
        selected = []
        for sample, s in zip(self.samples, self.split):
            if split is not None and s != split:
                continue
            if subsets is not None and sample.subset not in subsets:
                continue
            if (exclude_subsets is not None and
                    sample.subset in exclude_subsets):
                continue
            selected.append(sample)
        return selected


def assign_split(num_samples, test_fraction, rng):
    "Marks a random ``test_fraction`` of the samples as TEST"
    split = np.zeros(num_samples, dtype=np.int8)
    num_test = int(round(test_fraction * num_samples))
    if num_test:
        split[rng.permutation(num_samples)[:num_test]] = TEST
    return split


def save_samples(path, sample_set):
    samples = sample_set.samples
    if not samples:
        raise RecipNetUsageError("Cannot save an empty sample set")
    has_context = [s.context is not None for s in samples]
    if any(has_context) and not all(has_context):
        raise RecipNetUsageError(
            "Either all or none of the samples must have context features")
    offsets = np.cumsum([0] + [s.num_agents for s in samples])
    kwargs = {'track_times': False}
    with h5py.File(path, 'w') as f:
        f.attrs['format'] = STORE_FORMAT
        f.attrs['version'] = STORE_VERSION
        f.attrs['schema'] = yaml.safe_dump(SCHEMA, default_flow_style=False)
        f.create_dataset(
            'observed', data=np.concatenate(
                [s.observed.transpose(1, 0, 2) for s in samples]), **kwargs)
        f.create_dataset(
            'future', data=np.concatenate(
                [s.future.transpose(1, 0, 2) for s in samples]), **kwargs)
        f.create_dataset('agent_ids', data=np.concatenate(
            [s.agent_ids for s in samples]).astype(np.int64), **kwargs)
        f.create_dataset('scene_offsets', data=offsets.astype(np.int64),
                         **kwargs)
        f.create_dataset('scene_ids', data=np.array(
            [s.scene_id for s in samples], dtype=np.int64), **kwargs)
        f.create_dataset('scene_subset', data=np.array(
            [s.subset.encode('utf-8') for s in samples]), **kwargs)
        f.create_dataset('scene_split', data=sample_set.split, **kwargs)
        if all(has_context):
            f.create_dataset('context', data=np.array(
                [s.context for s in samples]), **kwargs)
    logger.info("Saved {} scenes to '{}'".format(len(samples), path))


def load_samples(path):
    if not os.path.isfile(path):
        raise RecipNetUsageError("Sample file '{}' does not exist"
                                 .format(path))
    try:
        f = h5py.File(path, 'r')
    except (OSError, IOError) as e:
        raise RecipNetUsageError(
            "Could not open sample file '{}' ({})".format(path, e))
    with f:
        fmt = f.attrs.get('format')
        if isinstance(fmt, bytes):
            fmt = fmt.decode('utf-8')
        if fmt != STORE_FORMAT:
            raise RecipNetUsageError(
                "'{}' is not a sample file (format '{}')".format(path, fmt))
        version = int(f.attrs.get('version', -1))
        if version != STORE_VERSION:
            raise RecipNetUsageError(
                "Sample file '{}' has version {}, expected {}"
                .format(path, version, STORE_VERSION))
        observed = f['observed'][()]
        future = f['future'][()]
        agent_ids = f['agent_ids'][()]
        offsets = f['scene_offsets'][()]
        scene_ids = f['scene_ids'][()]
        subsets = [s.decode('utf-8') for s in f['scene_subset'][()]]
        split = f['scene_split'][()]
        context = f['context'][()] if 'context' in f else None
    samples = []
    for i, (start, end) in enumerate(zip(offsets[:-1], offsets[1:])):
        samples.append(SceneSample(
            observed[start:end].transpose(1, 0, 2),
            future[start:end].transpose(1, 0, 2),
            agent_ids=agent_ids[start:end],
            context=context[i] if context is not None else None,
            scene_id=scene_ids[i], subset=subsets[i]))
    return SampleSet(samples, split)
