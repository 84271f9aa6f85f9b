"""
Compares the best-of-K metrics of a trained reciprocal pair with and without
the reciprocal attack (matched prediction), e.g.::

    $ recipnet attack_eval --checkpoint run --data data/samples.h5 \\
      --out attack --iterations 20 --epsilon -0.05 --alpha 0.1

Both reports are written to 'summary.csv' (and 'summary.yml'), the
per-scene breakdown to 'scenes.csv' and the matching error and ADE of every
attack iterate to 'attack_curves.csv'. The checkpoint must contain a
backward network (i.e. not be trained in 'lstm' mode).
"""
import os.path
import numpy as np
from recipnet.utils.arguments import (
    RecipNetArgumentParser, add_config_option, parse_args, required,
    prepare_output, positive_int)
from recipnet.utils.logging import logger

CURVES_FILE = 'attack_curves.csv'


def argparser():
    parser = RecipNetArgumentParser(prog='recipnet attack_eval',
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
    parser.add_argument('--iterations', type=positive_int, default=20,
                        help="Number of attack steps M (default %(default)s)")
    parser.add_argument('--epsilon', type=float, default=-0.05,
                        help=("Attack step size, negative to descend the "
                              "matching error (default %(default)s)"))
    parser.add_argument('--alpha', type=float, default=0.1,
                        help=("Rate of the exponential average of the "
                              "iterates (default %(default)s)"))
    parser.add_argument('--use-sign', action='store_true', default=False,
                        dest='use_sign',
                        help="Step along the sign of the gradient")
    parser.add_argument('--k', type=positive_int, default=20,
                        help=("Number of sampled predictions per scene "
                              "(default %(default)s)"))
    parser.add_argument('--seed', type=int, default=0,
                        help=("Seed of the prediction noise "
                              "(default %(default)s)"))
    parser.add_argument('--batch-size', type=positive_int, default=64,
                        dest='batch_size',
                        help="Scenes attacked together (default %(default)s)")
    return parser


def run(argv):
    """
    Writes the reports with and without attack and the attack curves
    """
    from recipnet.attack import AttackConfig, write_diagnostics
    from recipnet.cmd.eval import checkpoint_path, load_sample_set
    from recipnet.data import TEST
    from recipnet.evaluation import evaluate_attack
    from recipnet.exceptions import RecipNetUsageError
    from recipnet.metrics import write_reports
    from recipnet.training import load_checkpoint

    args = parse_args(argparser(), argv)
    attack_config = AttackConfig(epsilon=args.epsilon,
                                 iterations=args.iterations,
                                 alpha=args.alpha, use_sign=args.use_sign)
    pair = load_checkpoint(checkpoint_path(args.checkpoint))
    if pair.backward is None:
        raise RecipNetUsageError(
            "Checkpoint '{}' was trained in '{}' mode and has no backward "
            "network to attack with".format(args.checkpoint, pair.mode))
    samples = load_sample_set(args.data).select(split=TEST)
    if not samples:
        raise RecipNetUsageError(
            "No test scenes in '{}'".format(args.data))
    out_dir = prepare_output(args, 'attack_eval')
    pre, post, curves, improved = evaluate_attack(
        pair.forward, pair.backward, samples, args.k, attack_config,
        np.random.RandomState(args.seed), label=pair.mode,
        batch_size=args.batch_size)
    write_reports([pre, post], os.path.join(out_dir, 'summary.csv'),
                  scenes_path=os.path.join(out_dir, 'scenes.csv'),
                  yaml_path=os.path.join(out_dir, 'summary.yml'))
    write_diagnostics(os.path.join(out_dir, CURVES_FILE), curves)
    logger.info("Matching error reduced on {:.1f}% of attacks, results "
                "written to '{}'".format(100.0 * improved, out_dir))
    return pre, post
