"""
Helpers shared by the unit tests: finite-difference gradient checks, tiny
deterministic fixtures and a stand-in TestCase for running test modules as
scripts
"""
from __future__ import print_function
import numpy as np


def numerical_gradient(f, x, eps=1e-5):
    """
    Central finite-difference gradient of the scalar function ``f`` at ``x``

    Parameters
    ----------
    f : callable
        Maps an array shaped like x to a float
    x : np.ndarray
        Point the gradient is evaluated at (not modified)
    """
    x = np.array(x, dtype=np.float64)
    grad = np.zeros_like(x)
    it = np.nditer(x, flags=['multi_index'])
    while not it.finished:
        idx = it.multi_index
        orig = x[idx]
        x[idx] = orig + eps
        plus = f(x.copy())
        x[idx] = orig - eps
        minus = f(x.copy())
        x[idx] = orig
        grad[idx] = (plus - minus) / (2.0 * eps)
        it.iternext()
    return grad


def relative_error(analytic, numeric, floor=1e-8):
    "Max-norm relative error between two gradients"
    analytic = np.asarray(analytic, dtype=np.float64)
    numeric = np.asarray(numeric, dtype=np.float64)
    scale = max(np.max(np.abs(analytic)), np.max(np.abs(numeric)), floor)
    return float(np.max(np.abs(analytic - numeric)) / scale)


def tiny_network_config(**overrides):
    "A NetworkConfig small enough for finite-difference checks"
    from recipnet.models import NetworkConfig
    dct = dict(embedding_dim=4, encoder_hidden=4, discriminator_hidden=4,
               pool_dim=4, noise_dim=2, context_dim=2, t_obs=3, t_pred=3)
    dct.update(overrides)
    return NetworkConfig(**dct)


def toy_samples(n_scenes=4, agents=2, t_obs=3, t_pred=3, seed=0,
                context_dim=2, subset='toy'):
    """
    Scenes of agents walking at constant velocity with small jitter

    Returns
    -------
    samples : list(SceneSample)
    """
    from recipnet.data import SceneSample
    rng = np.random.RandomState(seed)
    length = t_obs + t_pred
    samples = []
    for i in range(n_scenes):
        start = rng.uniform(-3.0, 3.0, size=(agents, 2))
        velocity = rng.uniform(-0.5, 0.5, size=(agents, 2))
        steps = np.arange(length)[:, np.newaxis, np.newaxis]
        positions = (start + steps * velocity +
                     0.01 * rng.normal(size=(length, agents, 2)))
        context = rng.uniform(size=context_dim) if context_dim else None
        samples.append(SceneSample(positions[:t_obs], positions[t_obs:],
                                   context=context, scene_id=i,
                                   subset=subset))
    return samples


def generate_data(out_dir, *extra, **options):
    """
    Runs 'recipnet generate' into ``out_dir`` for a handful of small scenes
    and returns the path of the sample file. Keyword options override the
    defaults (e.g. ``scenes=12``), ``extra`` is appended verbatim
    """
    from recipnet.cmd import generate
    values = dict(scenes=6, agents=2, seed=0, test_fraction=0.34)
    values.update(options)
    argv = ['--out', out_dir]
    for name, value in sorted(values.items()):
        argv.extend(['--' + name.replace('_', '-'), str(value)])
    return generate.run(argv + list(extra))


def train_checkpoint(data_path, out_dir, *extra):
    """
    Runs one pretraining and one joint epoch of 'recipnet train' into
    ``out_dir`` and returns the trained pairs
    """
    from recipnet.cmd import train
    argv = ['--data', data_path, '--out', out_dir, '--epochs', '1',
            '--pretrain-epochs', '1', '--batch-size', '2']
    return train.run(argv + list(extra))


class DummyTestCase(object):

    def __init__(self):
        self.setUp()

    def setUp(self):
        pass

    def tearDown(self):
        pass

    def __del__(self):
        self.tearDown()

    def assertEqual(self, first, second, msg=None):
        if first != second:
            if msg is None:
                msg = '{} and {} are not equal'.format(repr(first),
                                                       repr(second))
            print(msg)

    def assertAlmostEqual(self, first, second, places=None, msg=None,
                          delta=None):
        if delta is None:
            delta = 10 ** -(7 if places is None else places)
        if abs(first - second) > delta:
            if msg is None:
                msg = '{} and {} are not equal'.format(repr(first),
                                                       repr(second))
            print(msg)

    def assertLess(self, first, second, msg=None):
        if first >= second:
            if msg is None:
                msg = '{} is not less than {}'.format(repr(first),
                                                      repr(second))
            print(msg)

    def assertLessEqual(self, first, second, msg=None):
        if first > second:
            if msg is None:
                msg = '{} is not less than or equal to {}'.format(
                    repr(first), repr(second))
            print(msg)

    def assertGreater(self, first, second, msg=None):
        self.assertLess(second, first, msg=msg)

    def assertGreaterEqual(self, first, second, msg=None):
        self.assertLessEqual(second, first, msg=msg)

    def assertNotEqual(self, first, second, msg=None):
        if first == second:
            if msg is None:
                msg = '{} is equal to {}'.format(
                    repr(first), repr(second))
            print(msg)

    def assertTrue(self, statement, msg=None):
        if not statement:
            if msg is None:
                msg = '{} is not true'.format(repr(statement))
            print(msg)

    def assertFalse(self, statement, msg=None):
        if statement:
            if msg is None:
                msg = '{} is true'.format(repr(statement))
            print(msg)

    def assertIsNone(self, obj, msg=None):
        self.assertTrue(obj is None, msg=msg)

    def assertIsNotNone(self, obj, msg=None):
        self.assertTrue(obj is not None, msg=msg)

    def assertRaises(self, exc_type, *args, **kwargs):
        "Only the context-manager form is supported"
        return _Raises(exc_type)


class _Raises(object):

    def __init__(self, exc_type):
        self.exc_type = exc_type
        self.exception = None

    def __enter__(self):
        return self

    def __exit__(self, exc_type, exc_value, tb):
        if exc_type is None:
            print('{} not raised'.format(self.exc_type.__name__))
            return False
        if issubclass(exc_type, self.exc_type):
            self.exception = exc_value
            return True
        return False
