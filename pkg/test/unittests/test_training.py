import os.path
import shutil
import struct
import tempfile
from collections import OrderedDict
import numpy as np
import yaml
from recipnet.data import time_reverse, SceneBatch
from recipnet.losses import batch_l2
from recipnet.models import PredictionNetwork, FORWARD
from recipnet.training import (
    Adam, OptimState, adam_step, clip_grad_norm, TrainConfig, ReciprocalPair,
    pretrain, reciprocal_train, save_checkpoint, load_checkpoint,
    HISTORY_FIELDS)
from recipnet.exceptions import (
    RecipNetNumericError, RecipNetUsageError, TrainingDivergedError,
    CheckpointCorruptError, CheckpointVersionError, CheckpointShapeError)
from recipnet.training.checkpoint import END_MAGIC
from recipnet.utils.testing import tiny_network_config, toy_samples
if __name__ == '__main__':
    from recipnet.utils.testing import DummyTestCase as TestCase  # @UnusedImport
else:
    from unittest import TestCase  # @Reimport


def _train_config(**overrides):
    dct = dict(batch_size=2, pretrain_epochs=1, epochs=1, seed=3, lr=1e-2)
    dct.update(overrides)
    return TrainConfig(**dct)


class TestAdam(TestCase):

    def _state(self, **kwargs):
        return OptimState(['w'], [(2,)], **kwargs)

    def test_zero_gradient_is_fixed_point(self):
        params = OrderedDict([('w', np.array([1.0, -2.0]))])
        adam_step(params, {'w': np.zeros(2)}, self._state())
        np.testing.assert_array_equal(params['w'], [1.0, -2.0])
        adam_step(params, {'w': None}, self._state())
        np.testing.assert_array_equal(params['w'], [1.0, -2.0])

    def test_first_step_moves_by_learning_rate(self):
        params = OrderedDict([('w', np.array([1.0, 1.0]))])
        state = self._state(lr=0.1)
        adam_step(params, {'w': np.array([2.0, -0.5])}, state)
        np.testing.assert_allclose(params['w'], [0.9, 1.1], atol=1e-6)
        self.assertEqual(state.step, 1)

    def test_non_finite_gradient(self):
        params = OrderedDict([('w', np.array([1.0, 1.0]))])
        with self.assertRaises(RecipNetNumericError) as cm:
            adam_step(params, {'w': np.array([np.nan, 0.0])}, self._state())
        self.assertTrue("'w'" in str(cm.exception))
        np.testing.assert_array_equal(params['w'], [1.0, 1.0])

    def test_clip_grad_norm(self):
        grads = {'a': np.array([3.0, 4.0]), 'b': None}
        norm = clip_grad_norm(grads, 1.0)
        self.assertAlmostEqual(norm, 5.0)
        np.testing.assert_allclose(grads['a'], [0.6, 0.8])
        grads = {'a': np.array([3.0, 4.0])}
        clip_grad_norm(grads, 0)
        np.testing.assert_array_equal(grads['a'], [3.0, 4.0])

    def test_step_resets_gradients(self):
        network = PredictionNetwork(tiny_network_config(), FORWARD,
                                    np.random.RandomState(0))
        optimizer = Adam(network.generator, lr=1e-2)
        for param in network.generator.parameters():
            param.grad = np.ones(param.shape)
        before = network.generator.checksum()
        optimizer.step()
        self.assertNotEqual(before, network.generator.checksum())
        self.assertTrue(all(p.grad is None
                            for p in network.generator.parameters()))


class TestTraining(TestCase):

    def setUp(self):
        self.network_config = tiny_network_config()
        self.samples = toy_samples(n_scenes=4, agents=2)

    def _train(self, **overrides):
        pair = ReciprocalPair(self.network_config,
                              _train_config(**overrides))
        return reciprocal_train(pair, self.samples)

    def test_determinism(self):
        first = self._train()
        second = self._train()
        self.assertEqual(first.checksum(), second.checksum())
        self.assertEqual([r['loss'] for r in first.history],
                         [r['loss'] for r in second.history])
        other = self._train(seed=4)
        self.assertNotEqual(first.checksum(), other.checksum())

    def test_history(self):
        pair = self._train()
        # 2 batches x 2 networks in each of the pretraining and joint epochs
        self.assertEqual(len(pair.history), 8)
        self.assertEqual(list(pair.history[0]), list(HISTORY_FIELDS))
        self.assertEqual([r['phase'] for r in pair.history],
                         ['pretrain'] * 4 + ['joint'] * 4)
        joint = [r for r in pair.history if r['phase'] == 'joint']
        self.assertEqual([r['network'] for r in joint],
                         ['forward', 'backward'] * 2)
        self.assertTrue(all(r['reciprocal'] is not None for r in joint))
        self.assertTrue(pair.finished)

    def test_per_epoch_alternation(self):
        pair = self._train(alternation='per-epoch', pretrain_epochs=0)
        self.assertEqual([r['network'] for r in pair.history],
                         ['forward', 'forward', 'backward', 'backward'])

    def test_prediction_only_independent_of_partner(self):
        cfg = _train_config(lam=1.0, pretrain_epochs=0, epochs=2)
        first = ReciprocalPair(self.network_config, cfg)
        second = ReciprocalPair(self.network_config, cfg)
        for param in second.backward.generator.parameters():
            param.data = param.data + 0.1
        reciprocal_train(first, self.samples)
        reciprocal_train(second, self.samples)
        self.assertEqual(first.forward.checksum(), second.forward.checksum())
        self.assertNotEqual(first.backward.checksum(),
                            second.backward.checksum())

    def test_baseline_mode(self):
        pair = self._train(mode='baseline', lam=0.3)
        self.assertTrue(all(r['reciprocal'] is None for r in pair.history))

    def test_lstm_mode(self):
        config = tiny_network_config(pooling=False, noise_dim=0,
                                     adversarial=False)
        pair = ReciprocalPair(config, _train_config(mode='lstm'))
        self.assertIsNone(pair.backward)
        self.assertEqual(list(pair.optimizers), ['forward.generator'])
        reciprocal_train(pair, self.samples)
        self.assertEqual(set(r['network'] for r in pair.history),
                         set(['forward']))
        self.assertTrue(all(r['adversarial'] is None for r in pair.history))

    def test_optimizer_names(self):
        pair = ReciprocalPair(self.network_config, _train_config())
        self.assertEqual(list(pair.optimizers),
                         ['forward.generator', 'forward.discriminator',
                          'backward.generator', 'backward.discriminator'])

    def test_divergence(self):
        pair = ReciprocalPair(self.network_config,
                              _train_config(divergence_threshold=1e-9))
        with self.assertRaises(TrainingDivergedError):
            reciprocal_train(pair, self.samples)
        self.assertTrue(issubclass(TrainingDivergedError,
                                   RecipNetNumericError))

    def test_pretrain_direction(self):
        network = PredictionNetwork(self.network_config, FORWARD,
                                    np.random.RandomState(0))
        with self.assertRaises(RecipNetUsageError):
            pretrain(network, [time_reverse(s) for s in self.samples],
                     _train_config())
        history = []
        pretrain(network, self.samples, _train_config(), history=history)
        self.assertEqual(len(history), 2)

    def test_pretrain_epoch_reduces_loss(self):
        config = tiny_network_config(noise_dim=0, adversarial=False)
        network = PredictionNetwork(config, FORWARD, np.random.RandomState(1))
        batch = SceneBatch.from_samples(self.samples)

        def loss():
            with network.frozen():
                return batch_l2(network.predict_positions(batch.observed,
                                                          batch),
                                batch.target).item()
        before = loss()
        history = []
        pretrain(network, self.samples,
                 _train_config(batch_size=len(self.samples), lr=1e-3),
                 history=history)
        self.assertEqual(len(history), 1)
        self.assertLess(loss(), before)

    def test_invalid_config(self):
        with self.assertRaises(RecipNetUsageError):
            TrainConfig(mode='cyclic')
        with self.assertRaises(RecipNetUsageError):
            TrainConfig(alternation='per-step')
        with self.assertRaises(RecipNetUsageError):
            TrainConfig.preset('huge')
        self.assertEqual(TrainConfig.preset('full').epochs, 200)
        self.assertEqual(TrainConfig(mode='baseline', lam=0.2)
                         .loss_config.lam, 1.0)


class TestCheckpoint(TestCase):

    def setUp(self):
        self.work_dir = tempfile.mkdtemp()
        self.path = os.path.join(self.work_dir, 'checkpoint.rcpn')
        self.network_config = tiny_network_config()
        self.samples = toy_samples(n_scenes=4, agents=2)

    def tearDown(self):
        shutil.rmtree(self.work_dir)

    def test_round_trip(self):
        pair = reciprocal_train(
            ReciprocalPair(self.network_config, _train_config()),
            self.samples)
        save_checkpoint(pair, self.path)
        loaded = load_checkpoint(self.path)
        self.assertEqual(loaded.checksum(), pair.checksum())
        self.assertEqual(loaded.network_config, pair.network_config)
        self.assertEqual(loaded.train_config, pair.train_config)
        self.assertEqual((loaded.pretrain_done, loaded.epochs_done), (1, 1))
        for name, opt in pair.optimizers.items():
            self.assertTrue(loaded.optimizers[name].state == opt.state)
        self.assertEqual(loaded.rng.normal(), pair.rng.normal())
        self.assertEqual(loaded.history, pair.history)

    def test_lstm_round_trip(self):
        config = tiny_network_config(pooling=False, noise_dim=0,
                                     adversarial=False)
        pair = ReciprocalPair(config, _train_config(mode='lstm'))
        save_checkpoint(pair, self.path)
        loaded = load_checkpoint(self.path)
        self.assertIsNone(loaded.backward)
        self.assertEqual(loaded.checksum(), pair.checksum())

    def test_resume_matches_uninterrupted(self):
        full = _train_config(pretrain_epochs=1, epochs=3)
        uninterrupted = reciprocal_train(
            ReciprocalPair(self.network_config, full), self.samples)
        partial = reciprocal_train(
            ReciprocalPair(self.network_config, full.replace(epochs=1)),
            self.samples)
        save_checkpoint(partial, self.path)
        resumed = reciprocal_train(load_checkpoint(self.path), self.samples,
                                   cfg=full)
        self.assertEqual(resumed.checksum(), uninterrupted.checksum())
        self.assertEqual(len(resumed.history), len(uninterrupted.history))

    def test_truncated(self):
        save_checkpoint(ReciprocalPair(self.network_config, _train_config()),
                        self.path)
        with open(self.path, 'rb') as f:
            data = f.read()
        for length in (4, 100, len(data) - 3):
            with open(self.path, 'wb') as f:
                f.write(data[:length])
            with self.assertRaises(CheckpointCorruptError):
                load_checkpoint(self.path)

    def test_bad_magic(self):
        with open(self.path, 'wb') as f:
            f.write(b'NOTACKPT' + b'\0' * 64)
        with self.assertRaises(CheckpointCorruptError):
            load_checkpoint(self.path)

    def test_unknown_version(self):
        save_checkpoint(ReciprocalPair(self.network_config, _train_config()),
                        self.path)
        with open(self.path, 'rb') as f:
            data = bytearray(f.read())
        data[8:12] = struct.pack('<I', 2)
        with open(self.path, 'wb') as f:
            f.write(bytes(data))
        with self.assertRaises(CheckpointVersionError) as cm:
            load_checkpoint(self.path)
        self.assertEqual(cm.exception.found, 2)

    def test_missing(self):
        with self.assertRaises(RecipNetUsageError):
            load_checkpoint(os.path.join(self.work_dir, 'missing.rcpn'))

    def _edit_config_block(self, edit):
        "Rewrites the YAML block at the end of the checkpoint through ``edit``"
        with open(self.path, 'rb') as f:
            data = f.read()
        end = len(data) - len(END_MAGIC)
        # The block is preceded by its length
        start = next(o for o in range(end - 8, 0, -1)
                     if struct.unpack('<Q', data[o:o + 8])[0] == end - o - 8)
        config = yaml.safe_load(data[start + 8:end].decode('utf-8'))
        edit(config)
        text = yaml.safe_dump(config, default_flow_style=False).encode(
            'utf-8')
        with open(self.path, 'wb') as f:
            f.write(data[:start] + struct.pack('<Q', len(text)) + text +
                    END_MAGIC)

    def test_missing_state(self):
        pair = reciprocal_train(
            ReciprocalPair(self.network_config, _train_config()),
            self.samples)
        for key in ('optimizers', 'rng_state', 'pretrain_done',
                    'epochs_done', 'history'):
            save_checkpoint(pair, self.path)
            self._edit_config_block(lambda c: c.pop(key))
            with self.assertRaises(CheckpointCorruptError):
                load_checkpoint(self.path)
        save_checkpoint(pair, self.path)
        self._edit_config_block(
            lambda c: c['optimizers'].pop('forward.generator'))
        with self.assertRaises(CheckpointCorruptError):
            load_checkpoint(self.path)
        save_checkpoint(pair, self.path)
        self._edit_config_block(lambda c: c['rng_state'].update(keys=[1, 2]))
        with self.assertRaises(CheckpointCorruptError):
            load_checkpoint(self.path)

    def test_unchanged_config_block_loads(self):
        pair = ReciprocalPair(self.network_config, _train_config())
        save_checkpoint(pair, self.path)
        self._edit_config_block(lambda c: None)
        self.assertEqual(load_checkpoint(self.path).checksum(),
                         pair.checksum())

    def test_mismatched_architecture(self):
        save_checkpoint(ReciprocalPair(self.network_config, _train_config()),
                        self.path)
        self._edit_config_block(
            lambda c: c['network'].update(encoder_hidden=5))
        with self.assertRaises(CheckpointShapeError):
            load_checkpoint(self.path)


if __name__ == '__main__':
    tester = TestCheckpoint()
    tester.test_missing_state()
