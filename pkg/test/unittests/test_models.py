import numpy as np
from recipnet.autodiff import Tensor, backward, ops
from recipnet.data import SceneBatch, PoolingIndex
from recipnet.models import (
    LstmCell, Linear, SocialPooling, social_pool, Generator, generator_forward,
    Discriminator, NetworkConfig, PredictionNetwork, FORWARD, BACKWARD,
    displacements, positions_from, linear_predict)
from recipnet.exceptions import (
    RecipNetIndexError, RecipNetNumericError, RecipNetDimensionError,
    RecipNetUsageError)
from recipnet.utils.testing import (
    tiny_network_config, toy_samples, numerical_gradient, relative_error)
if __name__ == '__main__':
    from recipnet.utils.testing import DummyTestCase as TestCase  # @UnusedImport
else:
    from unittest import TestCase  # @Reimport

GRADIENT_TOL = 1e-5


def _zero_parameters(module):
    for param in module.parameters():
        param.data = np.zeros_like(param.data)


class TestLayers(TestCase):

    def setUp(self):
        self.rng = np.random.RandomState(0)

    def test_lstm_zero_weights(self):
        cell = LstmCell(3, 5, self.rng)
        _zero_parameters(cell)
        x = self.rng.normal(size=(2, 3))
        h, c = cell.lstm_step(x, cell.zero_state(2))
        np.testing.assert_array_equal(h.data, np.zeros((2, 5)))
        np.testing.assert_array_equal(c.data, np.zeros((2, 5)))

    def test_lstm_single_vector(self):
        cell = LstmCell(3, 4, self.rng)
        x = self.rng.normal(size=3)
        h, c = cell.lstm_step(x, (np.zeros(4), np.zeros(4)))
        h2, c2 = cell.lstm_step(x.reshape(1, 3), cell.zero_state(1))
        self.assertEqual(h.shape, (4,))
        np.testing.assert_allclose(h.data, h2.data[0])
        np.testing.assert_allclose(c.data, c2.data[0])

    def test_lstm_unrolled_gradient(self):
        cell = LstmCell(3, 4, self.rng)
        inputs = self.rng.normal(size=(5, 2, 3))
        weights = self.rng.normal(size=(2, 4))

        def unrolled(x):
            state = cell.zero_state(2)
            for t in range(5):
                state = cell.lstm_step(x[t], state)
            return ops.sum(state[0] * weights)
        x = Tensor(inputs, requires_grad=True)
        backward(unrolled(x))
        numeric = numerical_gradient(
            lambda value: unrolled(Tensor(value)).item(), inputs)
        self.assertLess(relative_error(x.grad, numeric), GRADIENT_TOL)
        analytic = cell.w_f.grad.copy()
        original = cell.w_f.data.copy()

        def f(value):
            cell.w_f.data = value
            return unrolled(Tensor(inputs)).item()
        numeric = numerical_gradient(f, original)
        cell.w_f.data = original
        self.assertLess(relative_error(analytic, numeric), GRADIENT_TOL)

    def test_lstm_shape_errors(self):
        cell = LstmCell(3, 4, self.rng)
        with self.assertRaises(RecipNetDimensionError):
            cell.lstm_step(np.zeros((2, 2)), cell.zero_state(2))
        with self.assertRaises(RecipNetDimensionError):
            cell.lstm_step(np.zeros((2, 3)), cell.zero_state(3))

    def test_forget_bias(self):
        cell = LstmCell(2, 3, self.rng)
        np.testing.assert_array_equal(cell.b_f.data, np.ones(3))

    def test_linear(self):
        layer = Linear(3, 2, self.rng)
        x = self.rng.normal(size=(4, 3))
        np.testing.assert_allclose(
            layer(x).data, x.dot(layer.weight.data.T) + layer.bias.data)
        self.assertEqual(layer(x[0]).shape, (2,))
        with self.assertRaises(RecipNetDimensionError):
            layer(np.zeros((4, 2)))

    def test_state_dict_round_trip(self):
        first = Generator(tiny_network_config(), 3, np.random.RandomState(1))
        second = Generator(tiny_network_config(), 3, np.random.RandomState(2))
        self.assertNotEqual(first.checksum(), second.checksum())
        second.load_state_dict(first.state_dict())
        self.assertEqual(first.checksum(), second.checksum())
        state = first.state_dict()
        state['merge.weight'] = np.zeros((1, 1))
        with self.assertRaises(RecipNetDimensionError):
            second.load_state_dict(state)
        del state['merge.weight']
        with self.assertRaises(RecipNetUsageError):
            second.load_state_dict(state)

    def test_parameter_names(self):
        generator = Generator(tiny_network_config(), 3, self.rng)
        names = [n for n, _ in generator.named_parameters()]
        self.assertTrue('encoder.w_f' in names)
        self.assertTrue('pooling.mlp.weight' in names)
        self.assertEqual(len(names), len(set(names)))
        no_pool = Generator(tiny_network_config(pooling=False), 3, self.rng)
        self.assertFalse(any(n.startswith('pooling')
                             for n, _ in no_pool.named_parameters()))

    def test_frozen(self):
        layer = Linear(2, 2, self.rng)
        x = Tensor(np.ones((1, 2)), requires_grad=True)
        with layer.frozen():
            self.assertFalse(any(p.requires_grad for p in layer.parameters()))
            loss = ops.sum(layer(x))
        self.assertTrue(all(p.requires_grad for p in layer.parameters()))
        backward(loss)
        self.assertIsNone(layer.weight.grad)
        self.assertIsNotNone(x.grad)


class TestPooling(TestCase):

    def setUp(self):
        self.rng = np.random.RandomState(3)
        self.pooling = SocialPooling(4, 5, self.rng)

    def test_lone_agent(self):
        pooled = social_pool(self.pooling, self.rng.normal(size=(1, 4)),
                             np.zeros((1, 2)), 0)
        np.testing.assert_allclose(pooled.data,
                                   np.tanh(self.pooling.mlp.bias.data))

    def test_max_over_neighbours(self):
        hidden = self.rng.normal(size=(3, 4))
        positions = self.rng.normal(size=(3, 2))
        pooled = social_pool(self.pooling, hidden, positions, 0).data
        for j in (1, 2):
            row = np.concatenate((positions[j] - positions[0], hidden[j]))
            embedded = np.tanh(self.pooling.mlp.weight.data.dot(row) +
                               self.pooling.mlp.bias.data)
            self.assertTrue(np.all(pooled >= embedded - 1e-12))
        # Absent neighbour slots contribute the embedding of zero
        self.assertTrue(np.all(pooled >= np.tanh(self.pooling.mlp.bias.data)
                               - 1e-12))

    def test_target_out_of_range(self):
        with self.assertRaises(RecipNetIndexError):
            social_pool(self.pooling, np.zeros((2, 4)), np.zeros((2, 2)), 2)
        with self.assertRaises(IndexError):
            social_pool(self.pooling, np.zeros((2, 4)), np.zeros((2, 2)), -1)

    def test_scenes_do_not_interact(self):
        hidden = self.rng.normal(size=(4, 4))
        positions = self.rng.normal(size=(4, 2))
        batched = self.pooling(hidden, positions, PoolingIndex([2, 2])).data
        first = self.pooling(hidden[:2], positions[:2],
                             PoolingIndex([2])).data
        second = self.pooling(hidden[2:], positions[2:],
                              PoolingIndex([2])).data
        np.testing.assert_allclose(batched, np.concatenate((first, second)))

    def test_neighbour_order_and_padding(self):
        hidden = self.rng.normal(size=(4, 4))
        positions = self.rng.normal(size=(4, 2))
        pooled = social_pool(self.pooling, hidden, positions, 0).data
        order = [0, 3, 1, 2]
        permuted = social_pool(self.pooling, hidden[order], positions[order],
                               0).data
        np.testing.assert_allclose(permuted, pooled, atol=1e-12)
        # One padding slot or many give the same pooled features
        narrow = self.pooling(hidden, positions,
                              PoolingIndex([4], max_agents=5)).data
        wide = self.pooling(hidden, positions, PoolingIndex([4])).data
        np.testing.assert_allclose(narrow, wide, atol=1e-12)
        np.testing.assert_allclose(wide[0], pooled, atol=1e-12)


class TestGenerator(TestCase):

    def setUp(self):
        self.config = tiny_network_config()
        self.generator = Generator(self.config, 3, np.random.RandomState(4))
        self.sample = toy_samples(n_scenes=1, agents=3)[0]

    def test_deterministic_without_noise(self):
        first = generator_forward(self.generator, self.sample.observed,
                                  context=self.sample.context)
        second = generator_forward(self.generator, self.sample.observed,
                                   context=self.sample.context,
                                   z=np.zeros((3, 2)))
        self.assertEqual(first.shape, (3, 3, 2))
        np.testing.assert_array_equal(first.data, second.data)

    def test_noise_changes_output(self):
        z = np.random.RandomState(5).normal(size=(3, 2))
        first = generator_forward(self.generator, self.sample.observed)
        second = generator_forward(self.generator, self.sample.observed, z=z)
        self.assertFalse(np.allclose(first.data, second.data))

    def test_non_finite_output(self):
        self.generator.output.bias.data = np.array([np.nan, 0.0])
        with self.assertRaises(RecipNetNumericError):
            generator_forward(self.generator, self.sample.observed)

    def test_batching_matches_single_scenes(self):
        samples = toy_samples(n_scenes=3, agents=2)
        batch = SceneBatch.from_samples(samples)
        batched = self.generator(batch.observed, batch.pooling_index,
                                 context=batch.agent_context(2)).data
        for sample, scene in zip(samples, batch.scene_slices):
            single = generator_forward(self.generator, sample.observed,
                                       context=sample.context).data
            np.testing.assert_allclose(batched[:, scene], single,
                                       atol=1e-12)

    def test_displacements(self):
        positions = np.array([[[0.0, 0.0]], [[1.0, 0.0]], [[3.0, 1.0]]])
        disp = displacements(positions).data
        np.testing.assert_array_equal(disp[:, 0], [(0.0, 0.0), (1.0, 0.0),
                                                   (2.0, 1.0)])
        restored = positions_from(disp[1:], positions[0]).data
        np.testing.assert_array_equal(restored, positions[1:])

    def test_parameter_gradients(self):
        rng = np.random.RandomState(6)
        z = rng.normal(size=(3, 2))
        weights = rng.normal(size=(3, 3, 2))
        for name in ('merge.weight', 'encoder.w_i', 'pooling.mlp.weight',
                     'output.bias'):
            param = dict(self.generator.named_parameters())[name]
            original = param.data.copy()
            self.generator.zero_grad()
            out = generator_forward(self.generator, self.sample.observed,
                                    context=self.sample.context, z=z)
            backward(ops.sum(out * weights))
            analytic = param.grad.copy()

            def f(value):
                param.data = value
                out = generator_forward(self.generator, self.sample.observed,
                                        context=self.sample.context, z=z)
                return float(np.sum(out.data * weights))
            numeric = numerical_gradient(f, original)
            param.data = original
            self.assertLess(relative_error(analytic, numeric), GRADIENT_TOL)


class TestDiscriminator(TestCase):

    def test_zero_weights_score_half(self):
        config = tiny_network_config()
        discriminator = Discriminator(config, 6, np.random.RandomState(7))
        _zero_parameters(discriminator)
        trajectory = np.random.RandomState(8).normal(size=(6, 4, 2))
        np.testing.assert_array_equal(discriminator(trajectory).data,
                                      np.full(4, 0.5))

    def test_scores_in_unit_interval(self):
        discriminator = Discriminator(tiny_network_config(), 6,
                                      np.random.RandomState(9))
        scores = discriminator(np.random.RandomState(10).normal(
            size=(6, 5, 2))).data
        self.assertEqual(scores.shape, (5,))
        self.assertTrue(np.all((scores > 0.0) & (scores < 1.0)))

    def test_length_mismatch(self):
        discriminator = Discriminator(tiny_network_config(), 6,
                                      np.random.RandomState(9))
        with self.assertRaises(RecipNetDimensionError):
            discriminator(np.zeros((5, 2, 2)))

    def test_input_gradient(self):
        discriminator = Discriminator(tiny_network_config(), 6,
                                      np.random.RandomState(11))
        rng = np.random.RandomState(12)
        trajectory = rng.normal(size=(6, 3, 2))
        weights = rng.normal(size=3)
        x = Tensor(trajectory, requires_grad=True)
        backward(ops.sum(discriminator(x) * weights))

        def f(value):
            return float(np.sum(discriminator(value).data * weights))
        numeric = numerical_gradient(f, trajectory)
        self.assertLess(relative_error(x.grad, numeric), GRADIENT_TOL)


class TestPredictionNetwork(TestCase):

    def setUp(self):
        self.config = tiny_network_config(t_pred=4)

    def test_directions(self):
        forward = PredictionNetwork(self.config, FORWARD,
                                    np.random.RandomState(0))
        backward_net = PredictionNetwork(self.config, BACKWARD,
                                         np.random.RandomState(0))
        self.assertEqual((forward.t_in, forward.t_out), (3, 4))
        self.assertEqual((backward_net.t_in, backward_net.t_out), (4, 3))
        with self.assertRaises(RecipNetUsageError):
            PredictionNetwork(self.config, 'sideways',
                              np.random.RandomState(0))

    def test_predict_positions(self):
        network = PredictionNetwork(self.config, FORWARD,
                                    np.random.RandomState(1))
        batch = SceneBatch.from_samples(toy_samples(t_pred=4))
        disp = network.predict(batch.observed, batch).data
        positions = network.predict_positions(batch.observed, batch).data
        self.assertEqual(positions.shape, (4, batch.num_agents, 2))
        np.testing.assert_allclose(
            positions, batch.observed[-1] + np.cumsum(disp, axis=0))
        with self.assertRaises(RecipNetDimensionError):
            network.predict(batch.target, batch)

    def test_noise(self):
        network = PredictionNetwork(self.config, FORWARD,
                                    np.random.RandomState(1))
        self.assertEqual(network.sample_noise(
            5, np.random.RandomState(0)).shape, (5, 2))
        lstm = PredictionNetwork(tiny_network_config(noise_dim=0), FORWARD,
                                 np.random.RandomState(1))
        self.assertIsNone(lstm.sample_noise(5, np.random.RandomState(0)))

    def test_lstm_preset(self):
        config = NetworkConfig.preset('lstm')
        self.assertFalse(config.pooling)
        self.assertEqual(config.noise_dim, 0)
        network = PredictionNetwork(config, FORWARD, np.random.RandomState(0))
        self.assertIsNone(network.discriminator)
        with self.assertRaises(RecipNetUsageError):
            network.score(np.zeros((20, 1, 2)))

    def test_architecture_hash(self):
        first = PredictionNetwork(self.config, FORWARD,
                                  np.random.RandomState(0))
        second = PredictionNetwork(self.config, FORWARD,
                                   np.random.RandomState(1))
        self.assertEqual(first.architecture_hash(),
                         second.architecture_hash())
        self.assertEqual(len(first.architecture_hash()), 32)
        other = PredictionNetwork(self.config.replace(pooling=False),
                                  FORWARD, np.random.RandomState(0))
        self.assertNotEqual(first.architecture_hash(),
                            other.architecture_hash())

    def test_invalid_config(self):
        with self.assertRaises(RecipNetUsageError):
            NetworkConfig(encoder_hidden=0)
        with self.assertRaises(RecipNetUsageError):
            NetworkConfig(noise_dim=-1)


class TestLinearBaseline(TestCase):

    def test_constant_velocity_is_exact(self):
        steps = np.arange(20, dtype=float)[:, np.newaxis, np.newaxis]
        positions = np.array([[1.0, -2.0], [0.5, 0.0]]) + steps * np.array(
            [[0.3, 0.1], [-0.2, 0.4]])
        np.testing.assert_allclose(linear_predict(positions[:8], 12),
                                   positions[8:], atol=1e-9)

    def test_single_observation(self):
        observed = np.array([[[1.0, 2.0]]])
        np.testing.assert_array_equal(linear_predict(observed, 3),
                                      np.repeat(observed, 3, axis=0))


if __name__ == '__main__':
    tester = TestDiscriminator()
    tester.test_input_gradient()
