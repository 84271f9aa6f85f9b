import csv
import os.path
import tempfile
import shutil
from recipnet.__main__ import main
from recipnet.cmd.train import CHECKPOINT_FILE, LOSS_CURVE_FILE
from recipnet.training import load_checkpoint, HISTORY_FIELDS
from recipnet.utils.testing import generate_data, train_checkpoint
if __name__ == '__main__':
    from recipnet.utils.testing import DummyTestCase as TestCase  # @UnusedImport
else:
    from unittest import TestCase  # @Reimport


class TestTrain(TestCase):

    def setUp(self):
        self.work_dir = tempfile.mkdtemp()
        self.data = generate_data(os.path.join(self.work_dir, 'data'))

    def tearDown(self):
        shutil.rmtree(self.work_dir)

    def test_outputs(self):
        out = os.path.join(self.work_dir, 'run')
        pair, = train_checkpoint(self.data, out)
        loaded = load_checkpoint(os.path.join(out, CHECKPOINT_FILE))
        self.assertEqual(loaded.checksum(), pair.checksum())
        self.assertEqual((loaded.pretrain_done, loaded.epochs_done), (1, 1))
        self.assertEqual(loaded.network_config.context_dim, 4)
        with open(os.path.join(out, LOSS_CURVE_FILE)) as f:
            rows = list(csv.DictReader(f))
        # 4 training scenes in batches of 2, 2 networks, 2 epochs
        self.assertEqual(len(rows), 8)
        self.assertEqual(list(rows[0]), list(HISTORY_FIELDS))

    def test_data_directory(self):
        out = os.path.join(self.work_dir, 'run')
        pair, = train_checkpoint(os.path.dirname(self.data), out,
                                 '--mode', 'baseline', '--no-pooling')
        self.assertEqual(pair.mode, 'baseline')
        self.assertFalse(pair.network_config.pooling)

    def test_resume(self):
        first = os.path.join(self.work_dir, 'first')
        train_checkpoint(self.data, first)
        second = os.path.join(self.work_dir, 'second')
        pair, = train_checkpoint(
            self.data, second, '--epochs', '2', '--lambda', '0.9',
            '--resume', os.path.join(first, CHECKPOINT_FILE))
        self.assertEqual(pair.epochs_done, 2)
        # The checkpointed configuration wins over new loss weights
        self.assertEqual(pair.train_config.lam, 0.5)
        self.assertEqual(len(pair.history), 12)

    def test_lstm_mode(self):
        out = os.path.join(self.work_dir, 'run')
        pair, = train_checkpoint(self.data, out, '--mode', 'lstm')
        self.assertIsNone(pair.backward)
        self.assertIsNone(load_checkpoint(
            os.path.join(out, CHECKPOINT_FILE)).backward)

    def test_no_context(self):
        data = generate_data(os.path.join(self.work_dir, 'plain'),
                             context_dim=0)
        pair, = train_checkpoint(data, os.path.join(self.work_dir, 'run'))
        self.assertEqual(pair.network_config.context_dim, 0)
        pair, = train_checkpoint(self.data, os.path.join(self.work_dir,
                                                         'run2'),
                                 '--no-context')
        self.assertEqual(pair.network_config.context_dim, 0)

    def test_leave_one_out(self):
        data = generate_data(os.path.join(self.work_dir, 'subsets'),
                             scenes=12, subsets=2, test_fraction=0.5)
        out = os.path.join(self.work_dir, 'loo')
        pairs = train_checkpoint(data, out, '--leave-one-out')
        self.assertEqual(len(pairs), 2)
        for subset in ('synthetic-0', 'synthetic-1'):
            self.assertTrue(os.path.exists(
                os.path.join(out, subset, CHECKPOINT_FILE)))

    def test_exit_codes(self):
        out = os.path.join(self.work_dir, 'run')
        ckpt = os.path.join(out, CHECKPOINT_FILE)
        self.assertEqual(main(['train', '--data', self.data]), 1)
        self.assertEqual(main(['train', '--data', self.data, '--out', out,
                               '--lambda', '1.5']), 1)
        self.assertEqual(main(['train', '--data', self.data, '--out', out,
                               '--mode', 'cyclic']), 1)
        self.assertEqual(main(['train', '--data', 'missing.h5', '--out',
                               out]), 1)
        self.assertEqual(main(['train', '--data', self.data, '--out', out,
                               '--epochs', '1', '--pretrain-epochs', '0']),
                         0)
        self.assertEqual(main(['train', '--data', self.data, '--out', out,
                               '--resume', ckpt, '--leave-one-out']), 1)
        with open(ckpt, 'rb') as f:
            data = f.read()
        with open(ckpt, 'wb') as f:
            f.write(data[:len(data) // 2])
        self.assertEqual(main(['train', '--data', self.data, '--out', out,
                               '--resume', ckpt]), 2)


if __name__ == '__main__':
    tester = TestTrain()
    tester.test_resume()
