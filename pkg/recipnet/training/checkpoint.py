"""
Binary checkpoints of a ReciprocalPair.

Layout (all integers little-endian):

    magic            8 bytes  b'RCPNCKPT'
    version          uint32
    architecture     32 bytes SHA-256 of the architecture description
    parameters       uint32 count, then blocks
    optimiser state  uint32 count, then blocks named
                     '<optimiser>/<m|v>/<parameter>'
    config           uint64 length, then UTF-8 YAML text holding the configs,
                     optimiser step counters, random state, epoch counters
                     and loss history
    end marker       8 bytes  b'RCPNEND\\n'

Each block is a uint16 name length, the UTF-8 name, a uint8 rank, rank uint32
dimensions and the float64 values in row-major order.
"""
import hashlib
import io
import os
import struct
from collections import OrderedDict
import numpy as np
import yaml
from recipnet.exceptions import (
    CheckpointCorruptError, CheckpointVersionError, CheckpointShapeError,
    RecipNetUsageError)
from recipnet.models.network import NetworkConfig
from recipnet.utils.logging import logger
from recipnet.utils.paths import atomic_write
from .trainer import ReciprocalPair, TrainConfig, HISTORY_FIELDS

MAGIC = b'RCPNCKPT'
END_MAGIC = b'RCPNEND\n'
CHECKPOINT_VERSION = 1


def architecture_hash(pair):
    "SHA-256 digest of the training mode and the architecture of both nets"
    description = OrderedDict([('mode', pair.mode)])
    for name, network in pair.networks.items():
        description[name] = dict(network.architecture())
    text = yaml.safe_dump(dict(description), default_flow_style=True)
    return hashlib.sha256(text.encode('utf-8')).digest()


def _write_block(f, name, array):
    name = name.encode('utf-8')
    array = np.ascontiguousarray(array, dtype='<f8')
    f.write(struct.pack('<H', len(name)))
    f.write(name)
    f.write(struct.pack('<B', array.ndim))
    f.write(struct.pack('<{}I'.format(array.ndim), *array.shape))
    f.write(array.tobytes())


class _Reader(object):

    def __init__(self, data, path):
        self.data = data
        self.pos = 0
        self.path = path

    def read(self, num_bytes):
        if self.pos + num_bytes > len(self.data):
            raise CheckpointCorruptError(
                "Checkpoint '{}' is truncated (needed {} bytes at offset {}, "
                "file has {})".format(self.path, num_bytes, self.pos,
                                      len(self.data)))
        chunk = self.data[self.pos:self.pos + num_bytes]
        self.pos += num_bytes
        return chunk

    def unpack(self, fmt):
        return struct.unpack(fmt, self.read(struct.calcsize(fmt)))

    def block(self):
        name_len, = self.unpack('<H')
        try:
            name = self.read(name_len).decode('utf-8')
        except UnicodeDecodeError:
            raise CheckpointCorruptError(
                "Checkpoint '{}' contains an invalid block name"
                .format(self.path))
        ndim, = self.unpack('<B')
        shape = self.unpack('<{}I'.format(ndim))
        count = int(np.prod(shape)) if ndim else 1
        values = np.frombuffer(self.read(8 * count), dtype='<f8')
        return name, values.astype(np.float64).reshape(shape)


def _rng_state(rng):
    name, keys, pos, has_gauss, cached = rng.get_state()
    return OrderedDict([('name', name), ('keys', [int(k) for k in keys]),
                        ('pos', int(pos)), ('has_gauss', int(has_gauss)),
                        ('cached_gaussian', float(cached))])


def _set_rng_state(rng, state):
    rng.set_state((state['name'], np.array(state['keys'], dtype=np.uint32),
                   state['pos'], state['has_gauss'],
                   state['cached_gaussian']))


def _plain(value):
    if isinstance(value, (np.floating,)):
        return float(value)
    if isinstance(value, (np.integer,)):
        return int(value)
    return value


def save_checkpoint(pair, path):
    """
    Writes all parameters, optimiser state, configs and the random state of
    ``pair`` to ``path`` (atomically)
    """
    buf = io.BytesIO()
    buf.write(MAGIC)
    buf.write(struct.pack('<I', CHECKPOINT_VERSION))
    buf.write(architecture_hash(pair))
    params = []
    for name, network in pair.networks.items():
        params.extend((name + '.' + n, p.data)
                      for n, p in network.named_parameters())
    buf.write(struct.pack('<I', len(params)))
    for name, value in params:
        _write_block(buf, name, value)
    moments = []
    for opt_name, opt in pair.optimizers.items():
        for kind in ('m', 'v'):
            for n, value in getattr(opt.state, kind).items():
                moments.append(('{}/{}/{}'.format(opt_name, kind, n), value))
    buf.write(struct.pack('<I', len(moments)))
    for name, value in moments:
        _write_block(buf, name, value)
    config = OrderedDict([
        ('network', dict(pair.network_config.to_dict())),
        ('train', dict(pair.train_config.to_dict())),
        ('seed', pair.train_config.seed),
        ('pretrain_done', pair.pretrain_done),
        ('epochs_done', pair.epochs_done),
        ('optimizers', dict(
            (n, dict(step=o.state.step, lr=o.state.lr, beta1=o.state.beta1,
                     beta2=o.state.beta2, eps=o.state.eps))
            for n, o in pair.optimizers.items())),
        ('rng_state', dict(_rng_state(pair.rng))),
        ('history', [dict((k, _plain(v)) for k, v in r.items())
                     for r in pair.history])])
    text = yaml.safe_dump(dict(config), default_flow_style=False).encode(
        'utf-8')
    buf.write(struct.pack('<Q', len(text)))
    buf.write(text)
    buf.write(END_MAGIC)
    with atomic_write(path, 'wb') as f:
        f.write(buf.getvalue())
    logger.info("Saved checkpoint to '{}' (pretrained {} epochs, trained {} "
                "epochs)".format(path, pair.pretrain_done, pair.epochs_done))


def load_checkpoint(path):
    """
    Reads a checkpoint written by ``save_checkpoint``

    Returns
    -------
    pair : ReciprocalPair
    """
    if not os.path.isfile(path):
        raise RecipNetUsageError("Checkpoint '{}' does not exist".format(path))
    with open(path, 'rb') as f:
        data = f.read()
    reader = _Reader(data, path)
    if reader.read(len(MAGIC)) != MAGIC:
        raise CheckpointCorruptError(
            "'{}' is not a checkpoint (bad magic number)".format(path))
    version, = reader.unpack('<I')
    if version != CHECKPOINT_VERSION:
        raise CheckpointVersionError(version, CHECKPOINT_VERSION)
    arch_hash = reader.read(32)
    num_params, = reader.unpack('<I')
    params = OrderedDict(reader.block() for _ in range(num_params))
    num_moments, = reader.unpack('<I')
    moments = OrderedDict(reader.block() for _ in range(num_moments))
    text_len, = reader.unpack('<Q')
    text = reader.read(text_len)
    if reader.read(len(END_MAGIC)) != END_MAGIC:
        raise CheckpointCorruptError(
            "Checkpoint '{}' has no end marker".format(path))
    try:
        config = yaml.safe_load(text.decode('utf-8'))
        network_config = NetworkConfig.from_dict(config['network'])
        train_config = TrainConfig.from_dict(config['train'])
    except (yaml.YAMLError, UnicodeDecodeError, KeyError, TypeError) as e:
        raise CheckpointCorruptError(
            "Could not read the config block of checkpoint '{}' ({})"
            .format(path, e))
    pair = ReciprocalPair(network_config, train_config)
    if architecture_hash(pair) != arch_hash:
        raise CheckpointShapeError(
            "Architecture of checkpoint '{}' does not match its declared "
            "configuration".format(path))
    expected = OrderedDict()
    for name, network in pair.networks.items():
        expected.update((name + '.' + n, p)
                        for n, p in network.named_parameters())
    if list(expected) != list(params):
        raise CheckpointShapeError(
            "Parameter names of checkpoint '{}' do not match the declared "
            "architecture".format(path))
    for name, param in expected.items():
        if params[name].shape != param.shape:
            raise CheckpointShapeError(
                "Parameter '{}' of checkpoint '{}' has shape {}, the "
                "architecture declares {}".format(
                    name, path, params[name].shape, param.shape))
        param.data = params[name].copy()
    try:
        _restore_state(pair, config, moments, path)
    except (KeyError, TypeError, ValueError, AttributeError) as e:
        raise CheckpointCorruptError(
            "Could not restore the training state of checkpoint '{}' "
            "(missing or malformed {})".format(path, e))
    return pair


def _restore_state(pair, config, moments, path):
    "Optimiser state, random state, counters and history from the config"
    for opt_name, opt in pair.optimizers.items():
        settings = config['optimizers'][opt_name]
        opt.state.step = settings['step']
        opt.state.lr = settings['lr']
        opt.state.beta1 = settings['beta1']
        opt.state.beta2 = settings['beta2']
        opt.state.eps = settings['eps']
        for kind in ('m', 'v'):
            buffers = getattr(opt.state, kind)
            for n in buffers:
                key = '{}/{}/{}'.format(opt_name, kind, n)
                stored = moments.get(key)
                if stored is None or stored.shape != buffers[n].shape:
                    raise CheckpointShapeError(
                        "Optimiser state '{}' of checkpoint '{}' is missing or "
                        "misshapen".format(key, path))
                buffers[n] = moments[key].copy()
    _set_rng_state(pair.rng, config['rng_state'])
    pair.pretrain_done = int(config['pretrain_done'])
    pair.epochs_done = int(config['epochs_done'])
    pair.history = [OrderedDict((k, r[k]) for k in HISTORY_FIELDS if k in r)
                    for r in config['history']]
