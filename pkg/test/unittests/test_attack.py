import os.path
import shutil
import tempfile
import numpy as np
from recipnet.autodiff import Tensor, backward as backprop
from recipnet.attack import (
    AttackConfig, matching_error, attack_step, exp_average, backward_map,
    matched_predict, diagnostic_rows, write_diagnostics, DIAGNOSTIC_FIELDS)
from recipnet.data import SceneBatch, SceneSample
from recipnet.models import PredictionNetwork, FORWARD, BACKWARD
from recipnet.exceptions import RecipNetUsageError
from recipnet.utils.testing import (
    tiny_network_config, toy_samples, numerical_gradient, relative_error)
if __name__ == '__main__':
    from recipnet.utils.testing import DummyTestCase as TestCase  # @UnusedImport
else:
    from unittest import TestCase  # @Reimport

END_TO_END_TOL = 1e-4


def _identity(y):
    return y


class TestAttackPrimitives(TestCase):

    def test_exact_reconstruction(self):
        Y = np.random.RandomState(0).normal(size=(3, 2, 2))
        self.assertEqual(matching_error(Y, Tensor(Y), _identity).item(), 0.0)
        # A zero gradient leaves the iterate unchanged
        np.testing.assert_array_equal(
            attack_step(Y, Y, _identity, -0.5), Y)

    def test_matching_error_per_scene(self):
        X = np.zeros((1, 2, 2))
        Y = np.array([[[3.0, 4.0], [0.0, 1.0]]])
        self.assertAlmostEqual(
            matching_error(X, Tensor(Y), _identity).item(), np.sqrt(26.0))
        self.assertAlmostEqual(
            matching_error(X, Tensor(Y), _identity,
                           [slice(0, 1), slice(1, 2)]).item(), 6.0)

    def test_step_descends(self):
        X = np.zeros((1, 1, 2))
        Y = np.array([[[3.0, 4.0]]])
        stepped = attack_step(X, Y, _identity, -1.0)
        np.testing.assert_allclose(stepped, [[[2.4, 3.2]]])
        signed = attack_step(X, Y, _identity, -0.5, use_sign=True)
        np.testing.assert_allclose(signed, [[[2.5, 3.5]]])

    def test_exp_average(self):
        Y = np.ones((2, 2))
        np.testing.assert_array_equal(exp_average([Y], 0.1), Y)
        self.assertAlmostEqual(float(exp_average([1.0, 2.0, 3.0], 0.0)), 2.0)
        self.assertAlmostEqual(float(exp_average([1.0, 2.0, 3.0], 0.1)),
                               2.0665, places=4)

    def test_exp_average_is_stable(self):
        iterates = np.arange(1.0, 6.0)
        self.assertAlmostEqual(float(exp_average(iterates, 1000.0)), 5.0)
        self.assertAlmostEqual(float(exp_average(iterates, -1000.0)), 1.0)
        with self.assertRaises(RecipNetUsageError):
            exp_average([], 0.1)

    def test_config(self):
        with self.assertRaises(RecipNetUsageError):
            AttackConfig(iterations=0)
        with self.assertRaises(RecipNetUsageError):
            AttackConfig(alpha=float('inf'))


class TestMatchedPrediction(TestCase):

    def setUp(self):
        config = tiny_network_config()
        self.forward = PredictionNetwork(config, FORWARD,
                                         np.random.RandomState(20))
        self.backward = PredictionNetwork(config, BACKWARD,
                                          np.random.RandomState(21))
        self.batch = SceneBatch.from_samples(toy_samples(n_scenes=3,
                                                         agents=2))
        rng = np.random.RandomState(22)
        self.z_forward = rng.normal(size=(6, 2))
        self.z_backward = rng.normal(size=(6, 2))

    def _attack(self, **kwargs):
        return matched_predict(self.batch, self.forward, self.backward,
                               AttackConfig(**kwargs),
                               z_forward=self.z_forward,
                               z_backward=self.z_backward)

    def test_no_step_recovers_prediction(self):
        state = self._attack(iterations=1, epsilon=0.0)
        raw = self.forward.predict_positions(self.batch.observed, self.batch,
                                             z=self.z_forward).data
        np.testing.assert_allclose(state.refined_positions, raw,
                                   atol=1e-12)
        np.testing.assert_allclose(state.initial_positions, raw, atol=1e-12)
        self.assertEqual(state.errors.shape, (2, 3))
        np.testing.assert_allclose(state.errors[0], state.errors[1])

    def test_small_steps_reduce_error(self):
        state = self._attack(iterations=2, epsilon=-1e-4)
        self.assertEqual(state.num_iterations, 2)
        self.assertTrue(np.all(state.improved))
        self.assertTrue(np.all(state.errors[-1] < state.errors[0]))
        np.testing.assert_array_equal(state.valid, [2, 2, 2])

    def test_weights_are_untouched(self):
        before = (self.forward.checksum(), self.backward.checksum())
        self._attack(iterations=3)
        self.assertEqual((self.forward.checksum(), self.backward.checksum()),
                         before)
        self.assertTrue(all(p.grad is None for p in
                            self.forward.parameters() +
                            self.backward.parameters()))
        self.assertTrue(all(p.requires_grad for p in
                            self.forward.parameters()))

    def test_non_finite_gradient_truncates(self):
        self.backward.generator.output.bias.data = np.array([np.nan, 0.0])
        state = self._attack(iterations=3)
        np.testing.assert_array_equal(state.valid, [0, 0, 0])
        np.testing.assert_array_equal(state.refined, state.iterates[0])

    def test_non_finite_scene_is_masked(self):
        samples = toy_samples(n_scenes=3, agents=2)
        middle = samples[1]
        samples[1] = SceneSample(middle.observed, middle.future,
                                 context=np.full(2, 1e308), scene_id=1,
                                 subset=middle.subset)
        batch = SceneBatch.from_samples(samples)
        # Context columns of the merge layer follow the hidden and pooled
        # features
        context_cols = slice(8, 10)
        self.forward.generator.merge.weight.data[:, context_cols] = 0.0
        self.backward.generator.merge.weight.data[:, context_cols] = 2.0
        state = matched_predict(batch, self.forward, self.backward,
                                AttackConfig(iterations=3, epsilon=-1e-4),
                                z_forward=self.z_forward,
                                z_backward=self.z_backward)
        np.testing.assert_array_equal(state.valid, [3, 0, 3])
        self.assertFalse(np.isfinite(state.errors[0, 1]))
        for s in (0, 2):
            self.assertTrue(np.all(np.isfinite(state.errors[:, s])))
            self.assertLess(state.errors[-1, s], state.errors[0, s])
        scene = batch.scene_slices[1]
        np.testing.assert_array_equal(state.refined[:, scene],
                                      state.iterates[0][:, scene])
        self.assertTrue(np.all(np.isfinite(state.refined)))

    def test_default_iterations(self):
        state = self._attack()
        self.assertEqual(state.num_iterations, 20)
        self.assertEqual(len(state.iterates), 21)
        self.assertEqual(state.errors.shape, (21, 3))
        np.testing.assert_array_equal(state.valid, [20, 20, 20])

    def test_requires_backward_network(self):
        with self.assertRaises(RecipNetUsageError):
            matched_predict(self.batch, self.forward, None, AttackConfig())

    def test_matching_error_gradient(self):
        G, X = backward_map(self.forward, self.backward, self.batch,
                            z_backward=self.z_backward)
        Y = self.forward.predict(self.batch.observed, self.batch,
                                 z=self.z_forward).data.copy()
        slices = self.batch.scene_slices
        with self.forward.frozen(), self.backward.frozen():
            Y_tensor = Tensor(Y, requires_grad=True)
            backprop(matching_error(X, Y_tensor, G, slices))
            numeric = numerical_gradient(
                lambda y: matching_error(X, Tensor(y), G, slices).item(), Y)
        self.assertLess(relative_error(Y_tensor.grad, numeric),
                        END_TO_END_TOL)


class TestDiagnostics(TestCase):

    def setUp(self):
        self.work_dir = tempfile.mkdtemp()

    def tearDown(self):
        shutil.rmtree(self.work_dir)

    def test_rows(self):
        config = tiny_network_config()
        forward = PredictionNetwork(config, FORWARD, np.random.RandomState(0))
        backward = PredictionNetwork(config, BACKWARD,
                                     np.random.RandomState(1))
        batch = SceneBatch.from_samples(toy_samples(n_scenes=2))
        state = matched_predict(batch, forward, backward,
                                AttackConfig(iterations=2))
        rows = diagnostic_rows(state, batch, label='model')
        self.assertEqual(len(rows), 2 * 3)
        self.assertEqual([r['iteration'] for r in rows], [0, 1, 2] * 2)
        self.assertEqual([r['scene_id'] for r in rows], [0] * 3 + [1] * 3)
        path = os.path.join(self.work_dir, 'curves.csv')
        write_diagnostics(path, rows)
        with open(path) as f:
            lines = f.read().split('\n')
        self.assertEqual(lines[0], ','.join(DIAGNOSTIC_FIELDS))
        self.assertEqual(len([l for l in lines if l]), 7)


if __name__ == '__main__':
    tester = TestMatchedPrediction()
    tester.test_non_finite_scene_is_masked()
