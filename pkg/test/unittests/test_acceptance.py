"""
Long-running empirical checks on synthetic social-force scenes. Each trains
several desk-scale models, so they only run when RECIPNET_SLOW_TESTS is set.
"""
import os
import time
import unittest
import numpy as np
from recipnet.attack import AttackConfig
from recipnet.data import (
    SocialForceConfig, generate_social_force, SceneBatch, assign_split, TEST)
from recipnet.evaluation import evaluate, evaluate_linear, evaluate_attack
from recipnet.losses import reconstruction_error
from recipnet.models import NetworkConfig
from recipnet.training import TrainConfig, ReciprocalPair, reciprocal_train
from recipnet.utils.logging import logger
if __name__ == '__main__':
    from recipnet.utils.testing import DummyTestCase as TestCase  # @UnusedImport
else:
    from unittest import TestCase  # @Reimport

SLOW_TESTS_ENV = 'RECIPNET_SLOW_TESTS'
SEEDS = (0, 1, 2)
NUM_SCENES = 500
TEST_FRACTION = 0.2
K = 20

_pairs = {}
_splits = {}


def _split(seed):
    if seed not in _splits:
        samples = generate_social_force(SocialForceConfig(
            n_scenes=NUM_SCENES, seed=seed))
        split = assign_split(len(samples), TEST_FRACTION,
                             np.random.RandomState(seed + 1))
        _splits[seed] = (
            [s for s, x in zip(samples, split) if x != TEST],
            [s for s, x in zip(samples, split) if x == TEST])
    return _splits[seed]


def _trained(mode, seed):
    if (mode, seed) not in _pairs:
        train, _ = _split(seed)
        pair = ReciprocalPair(NetworkConfig.preset(mode),
                              TrainConfig.preset('desk', mode=mode,
                                                 seed=seed))
        start = time.time()
        reciprocal_train(pair, train)
        logger.info("Trained {} pair (seed {}) in {:.0f} s".format(
            mode, seed, time.time() - start))
        _pairs[(mode, seed)] = pair
    return _pairs[(mode, seed)]


def _median(values):
    return float(np.median(values))


@unittest.skipUnless(os.environ.get(SLOW_TESTS_ENV),
                     'set {} to run'.format(SLOW_TESTS_ENV))
class TestAcceptance(TestCase):

    def test_beats_linear_model(self):
        model, linear = [], []
        for seed in SEEDS:
            _, test = _split(seed)
            pair = _trained('reciprocal', seed)
            report, _ = evaluate(pair.forward, test, K,
                                 np.random.RandomState(seed))
            model.append(report.ade)
            linear.append(evaluate_linear(test).ade)
        self.assertLessEqual(_median(model), _median(linear))

    def test_reciprocal_training_helps(self):
        reciprocal, baseline = [], []
        recon_reciprocal, recon_baseline = [], []
        for seed in SEEDS:
            _, test = _split(seed)
            batch = SceneBatch.from_samples(test)
            for mode, ades, recons in (
                    ('reciprocal', reciprocal, recon_reciprocal),
                    ('baseline', baseline, recon_baseline)):
                pair = _trained(mode, seed)
                report, _ = evaluate(pair.forward, test, K,
                                     np.random.RandomState(seed))
                ades.append(report.ade)
                recons.append(reconstruction_error(batch, pair.forward,
                                                   pair.backward))
        self.assertLessEqual(_median(reciprocal), 1.02 * _median(baseline))
        self.assertLess(_median(recon_reciprocal), _median(recon_baseline))

    def test_attack_refines_predictions(self):
        fractions, pre_ade, post_ade = [], [], []
        for seed in SEEDS:
            _, test = _split(seed)
            pair = _trained('reciprocal', seed)
            pre, post, _, fraction = evaluate_attack(
                pair.forward, pair.backward, test, K, AttackConfig(),
                np.random.RandomState(seed))
            fractions.append(fraction)
            pre_ade.append(pre.ade)
            post_ade.append(post.ade)
        self.assertGreaterEqual(_median(fractions), 0.8)
        self.assertLessEqual(_median(post_ade), 1.05 * _median(pre_ade))


if __name__ == '__main__':
    tester = TestAcceptance()
    tester.test_attack_refines_predictions()
