"""
Evaluates a trained forward network on the test scenes of a sample file by
best-of-K average and final displacement errors and near-collision
percentage, alongside the linear comparator and the collisions of the ground
truth, e.g.::

    $ recipnet eval --checkpoint run --data data/samples.h5 --out eval --k 20

The summary is written to 'summary.csv' (and 'summary.yml'), the per-scene
breakdown to 'scenes.csv'. With '--leave-one-out' the checkpoint directory
must hold one sub-directory per sub-dataset (as written by 'recipnet train
--leave-one-out'); each is evaluated on the test scenes of its held-out
sub-dataset and an average row is added for every method. '--plot N' draws
the best predictions of the first N scenes as SVG files.
"""
import os.path
import numpy as np
from recipnet.utils.arguments import (
    RecipNetArgumentParser, add_config_option, parse_args, required,
    prepare_output, positive_int)
from recipnet.utils.logging import logger

SUMMARY_FILE = 'summary.csv'
SUMMARY_YAML = 'summary.yml'
SCENES_FILE = 'scenes.csv'
PLOT_DIR = 'plots'


def argparser():
    parser = RecipNetArgumentParser(prog='recipnet eval',
                                    description=__doc__)
    add_config_option(parser)
    required(parser.add_argument(
        '--checkpoint', type=str, default=None,
        help=("Checkpoint file or the output directory of "
              "'recipnet train'")))
    required(parser.add_argument(
        '--data', type=str, default=None,
        help="Sample file written by 'recipnet generate'"))
    required(parser.add_argument(
        '--out', type=str, default=None,
        help="Output directory (relative to $RECIPNET_OUTPUT_ROOT if set)"))
    parser.add_argument('--k', type=positive_int, default=20,
                        help=("Number of sampled predictions per scene "
                              "(default %(default)s)"))
    parser.add_argument('--seed', type=int, default=0,
                        help=("Seed of the prediction noise "
                              "(default %(default)s)"))
    parser.add_argument('--batch-size', type=positive_int, default=64,
                        dest='batch_size',
                        help=("Scenes evaluated together "
                              "(default %(default)s)"))
    parser.add_argument('--leave-one-out', action='store_true',
                        default=False, dest='leave_one_out',
                        help=("Evaluate one checkpoint per held-out "
                              "sub-dataset"))
    parser.add_argument('--plot', type=int, default=0, metavar='N',
                        help="Plot the first N test scenes (default none)")
    return parser


def checkpoint_path(path):
    "Accepts either a checkpoint file or the directory 'train' wrote it to"
    from recipnet.cmd.train import CHECKPOINT_FILE
    if os.path.isdir(path):
        path = os.path.join(path, CHECKPOINT_FILE)
    return path


def load_sample_set(data_path):
    from recipnet.cmd.train import resolve_data_path
    from recipnet.data import load_samples
    return load_samples(resolve_data_path(data_path))


def leave_one_out_checkpoints(path, subsets):
    "Checkpoint of every held-out sub-dataset under a leave-one-out directory"
    from recipnet.exceptions import RecipNetUsageError
    checkpoints = []
    for subset in subsets:
        ckpt = checkpoint_path(os.path.join(path, subset))
        if not os.path.isfile(ckpt):
            raise RecipNetUsageError(
                "No checkpoint for held-out sub-dataset '{}' in '{}'"
                .format(subset, path))
        checkpoints.append((subset, ckpt))
    return checkpoints


def plot_scenes(samples, predictions, out_dir, num):
    from recipnet.plot import plot_scene
    plot_dir = os.path.join(out_dir, PLOT_DIR)
    if not os.path.isdir(plot_dir):
        os.makedirs(plot_dir)
    for sample, pred in list(zip(samples, predictions))[:num]:
        plot_scene(sample, pred, save=os.path.join(
            plot_dir, 'scene_{}.svg'.format(sample.scene_id)))


def evaluate_checkpoint(ckpt, samples, args, label, rng):
    from recipnet.evaluation import (
        evaluate, evaluate_linear, ground_truth_collisions)
    from recipnet.training import load_checkpoint
    pair = load_checkpoint(ckpt)
    report, predictions = evaluate(pair.forward, samples, args.k, rng,
                                   label=label, batch_size=args.batch_size)
    linear = evaluate_linear(samples, label='Linear ' + label)
    truth = ground_truth_collisions(samples, label='Ground truth ' + label)
    return report, linear, truth, predictions


def run(argv):
    """
    Writes the evaluation reports of the checkpoint(s)
    """
    from recipnet.data import TEST
    from recipnet.exceptions import RecipNetUsageError
    from recipnet.metrics import write_reports, average_row

    args = parse_args(argparser(), argv)
    sample_set = load_sample_set(args.data)
    rng = np.random.RandomState(args.seed)
    if args.leave_one_out:
        runs = [(subset, ckpt, sample_set.select(split=TEST,
                                                 subsets=[subset]))
                for subset, ckpt in leave_one_out_checkpoints(
                    args.checkpoint, sample_set.subsets)]
    else:
        runs = [('model', checkpoint_path(args.checkpoint),
                 sample_set.select(split=TEST))]
    for label, _, samples in runs:
        if not samples:
            raise RecipNetUsageError(
                "No test scenes for '{}' in '{}'".format(label, args.data))
    out_dir = prepare_output(args, 'eval')
    models, linears, truths = [], [], []
    for label, ckpt, samples in runs:
        report, linear, truth, predictions = evaluate_checkpoint(
            ckpt, samples, args, label, rng)
        models.append(report)
        linears.append(linear)
        truths.append(truth)
        if args.plot > 0:
            plot_scenes(samples, predictions, out_dir, args.plot)
    extra_rows = []
    if args.leave_one_out:
        extra_rows = [average_row(models, 'Avg'),
                      average_row(linears, 'Linear Avg'),
                      average_row(truths, 'Ground truth Avg')]
    write_reports(models + linears + truths,
                  os.path.join(out_dir, SUMMARY_FILE),
                  scenes_path=os.path.join(out_dir, SCENES_FILE),
                  yaml_path=os.path.join(out_dir, SUMMARY_YAML),
                  extra_rows=extra_rows)
    logger.info("Wrote evaluation of {} checkpoint(s) to '{}'".format(
        len(runs), out_dir))
    return models
