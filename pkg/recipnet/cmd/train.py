"""
Trains a forward/backward prediction pair on the training scenes of a sample
file, e.g.::

    $ recipnet train --data data/samples.h5 --out run --mode reciprocal \\
      --lambda 0.5

The modes are 'reciprocal' (independent pretraining followed by joint
training with the reciprocal loss), 'baseline' (both networks trained
independently, lambda = 1) and 'lstm' (a forward LSTM encoder-decoder
without pooling, noise or discriminator). A checkpoint is written after
every epoch, so an interrupted run can be continued with '--resume', and
the per-batch losses are written to 'loss_curve.csv'.

With '--leave-one-out' one pair is trained for every sub-dataset, on the
training scenes of the others, into a sub-directory named after it.
"""
import os.path
from recipnet.utils.arguments import (
    RecipNetArgumentParser, add_config_option, parse_args, required,
    prepare_output, existing_file, positive_int, fraction)
from recipnet.utils.logging import logger

CHECKPOINT_FILE = 'checkpoint.rcpn'
LOSS_CURVE_FILE = 'loss_curve.csv'


def argparser():
    from recipnet.training.trainer import MODES, ALTERNATIONS, TrainConfig
    parser = RecipNetArgumentParser(prog='recipnet train',
                                    description=__doc__)
    add_config_option(parser)
    required(parser.add_argument(
        '--data', type=str, default=None,
        help="Sample file written by 'recipnet generate'"))
    required(parser.add_argument(
        '--out', type=str, default=None,
        help="Output directory (relative to $RECIPNET_OUTPUT_ROOT if set)"))
    parser.add_argument('--mode', choices=MODES, default='reciprocal',
                        help="Training mode (default %(default)s)")
    parser.add_argument('--preset', choices=sorted(TrainConfig.PRESETS),
                        default='desk',
                        help=("Epoch counts used unless given explicitly "
                              "(default %(default)s)"))
    parser.add_argument('--epochs', type=int, default=None,
                        help="Number of joint-training epochs")
    parser.add_argument('--pretrain-epochs', type=int, default=None,
                        dest='pretrain_epochs',
                        help="Number of independent pretraining epochs")
    parser.add_argument('--lambda', type=fraction, default=0.5, dest='lam',
                        help=("Weight of the prediction term against the "
                              "reciprocal term (default %(default)s)"))
    parser.add_argument('--gan-weight', type=float, default=1.0,
                        dest='gan_weight',
                        help=("Weight of the adversarial loss "
                              "(default %(default)s)"))
    parser.add_argument('--batch-size', type=positive_int, default=64,
                        dest='batch_size',
                        help="Scenes per batch (default %(default)s)")
    parser.add_argument('--lr', type=float, default=1e-3,
                        help="Adam learning rate (default %(default)s)")
    parser.add_argument('--seed', type=int, default=0,
                        help="Random seed (default %(default)s)")
    parser.add_argument('--alternation', choices=ALTERNATIONS,
                        default='per-batch',
                        help=("Alternation of the theta and phi updates in "
                              "joint training (default %(default)s)"))
    parser.add_argument('--no-pooling', action='store_true', default=False,
                        dest='no_pooling',
                        help="Disable social pooling")
    parser.add_argument('--no-context', action='store_true', default=False,
                        dest='no_context',
                        help="Disable the scene-context pathway")
    parser.add_argument('--resume', type=existing_file, default=None,
                        help="Checkpoint of an interrupted run to continue")
    parser.add_argument('--leave-one-out', action='store_true',
                        default=False, dest='leave_one_out',
                        help="Train one pair per held-out sub-dataset")
    return parser


def resolve_data_path(path):
    "Accepts either a sample file or the directory 'generate' wrote it to"
    from recipnet.cmd.generate import SAMPLES_FILE
    if os.path.isdir(path):
        path = os.path.join(path, SAMPLES_FILE)
    return path


def configs(args, samples):
    "The network and training configurations the arguments describe"
    from recipnet.models import NetworkConfig
    from recipnet.training import TrainConfig
    overrides = dict(mode=args.mode, lam=args.lam, gan_weight=args.gan_weight,
                     batch_size=args.batch_size, lr=args.lr, seed=args.seed,
                     alternation=args.alternation)
    if args.epochs is not None:
        overrides['epochs'] = args.epochs
    if args.pretrain_epochs is not None:
        overrides['pretrain_epochs'] = args.pretrain_epochs
    train_config = TrainConfig.preset(args.preset, **overrides)
    has_context = all(s.context is not None for s in samples)
    context_dim = (0 if args.no_context or not has_context
                   else len(samples[0].context))
    if not has_context and not args.no_context:
        logger.warning("Samples have no context features, disabling the "
                       "scene-context pathway")
    net_overrides = dict(context_dim=context_dim,
                         t_obs=len(samples[0].observed),
                         t_pred=len(samples[0].future))
    if args.no_pooling:
        net_overrides['pooling'] = False
    network_config = NetworkConfig.preset(args.mode, **net_overrides)
    return network_config, train_config


def epoch_overrides(args):
    return dict((n, getattr(args, n)) for n in ('epochs', 'pretrain_epochs')
                if getattr(args, n) is not None)


def train_pair(samples, network_config, train_config, out_dir, resume=None,
               epoch_overrides=None):
    """
    Trains a pair (or continues a checkpointed one) into ``out_dir``. A
    resumed pair keeps its checkpointed configuration apart from the epoch
    counts in ``epoch_overrides``

    Returns
    -------
    pair : ReciprocalPair
    """
    from recipnet.exceptions import TrainingDivergedError
    from recipnet.training import (
        ReciprocalPair, reciprocal_train, save_checkpoint, load_checkpoint,
        HISTORY_FIELDS)
    from recipnet.utils.reports import write_csv

    ckpt_path = os.path.join(out_dir, CHECKPOINT_FILE)
    curve_path = os.path.join(out_dir, LOSS_CURVE_FILE)
    if resume is not None:
        pair = load_checkpoint(resume)
        # Only the epoch counts of a resumed run may change
        train_config = pair.train_config.replace(**(epoch_overrides or {}))
        logger.info("Resuming {} from '{}'".format(pair, resume))
    else:
        pair = ReciprocalPair(network_config, train_config)
    try:
        reciprocal_train(pair, samples, cfg=train_config,
                         on_epoch_end=lambda p: save_checkpoint(p, ckpt_path))
    except TrainingDivergedError:
        write_csv(curve_path, HISTORY_FIELDS, pair.history)
        logger.error("Training diverged, losses up to the failure written "
                     "to '{}'".format(curve_path))
        raise
    save_checkpoint(pair, ckpt_path)
    write_csv(curve_path, HISTORY_FIELDS, pair.history)
    return pair


def run(argv):
    """
    Trains the pair(s) described by the arguments
    """
    from recipnet.data import load_samples, TRAIN
    from recipnet.exceptions import RecipNetUsageError

    args = parse_args(argparser(), argv)
    if args.resume and args.leave_one_out:
        raise RecipNetUsageError(
            "'--resume' continues a single run and cannot be combined with "
            "'--leave-one-out'")
    sample_set = load_samples(resolve_data_path(args.data))
    train_samples = sample_set.select(split=TRAIN)
    if not train_samples:
        raise RecipNetUsageError(
            "No training scenes in '{}'".format(args.data))
    network_config, train_config = configs(args, train_samples)
    out_dir = prepare_output(args, 'train')
    if not args.leave_one_out:
        return [train_pair(train_samples, network_config, train_config,
                           out_dir, resume=args.resume,
                           epoch_overrides=epoch_overrides(args))]
    subsets = sample_set.subsets
    if len(subsets) < 2:
        raise RecipNetUsageError(
            "Leave-one-out training requires at least two sub-datasets "
            "(found '{}')".format("', '".join(subsets)))
    pairs = []
    for held_out in subsets:
        logger.info("Training with sub-dataset '{}' held out".format(
            held_out))
        sub_dir = os.path.join(out_dir, held_out)
        if not os.path.isdir(sub_dir):
            os.makedirs(sub_dir)
        pairs.append(train_pair(
            sample_set.select(split=TRAIN, exclude_subsets=[held_out]),
            network_config, train_config, sub_dir))
    return pairs
