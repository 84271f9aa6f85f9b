"""
Draws scenes of a sample file as SVG figures (observed and ground-truth
trajectories, and optionally predictions of a trained forward network), e.g.::

    $ recipnet plot --data data/samples.h5 --out figures --scenes 5 \\
      --checkpoint run --k 3
"""
import os.path
import numpy as np
from recipnet.utils.arguments import (
    RecipNetArgumentParser, add_config_option, parse_args, required,
    prepare_output, positive_int)
from recipnet.utils.logging import logger

SPLITS = ('test', 'train', 'all')


def argparser():
    parser = RecipNetArgumentParser(prog='recipnet plot',
                                    description=__doc__)
    add_config_option(parser)
    required(parser.add_argument(
        '--data', type=str, default=None,
        help="Sample file written by 'recipnet generate'"))
    required(parser.add_argument(
        '--out', type=str, default=None,
        help="Output directory (relative to $RECIPNET_OUTPUT_ROOT if set)"))
    parser.add_argument('--scenes', type=positive_int, default=5,
                        help="Number of scenes to draw (default %(default)s)")
    parser.add_argument('--split', choices=SPLITS, default='test',
                        help="Scenes to draw from (default %(default)s)")
    parser.add_argument('--checkpoint', type=str, default=None,
                        help="Checkpoint whose predictions are drawn")
    parser.add_argument('--k', type=positive_int, default=1,
                        help=("Number of predictions drawn per scene "
                              "(default %(default)s)"))
    parser.add_argument('--seed', type=int, default=0,
                        help=("Seed of the prediction noise "
                              "(default %(default)s)"))
    return parser


def run(argv):
    """
    Writes one SVG file per scene and returns their paths
    """
    from recipnet.cmd.eval import checkpoint_path, load_sample_set
    from recipnet.data import TRAIN, TEST, SceneBatch
    from recipnet.evaluation import sample_predictions
    from recipnet.exceptions import RecipNetUsageError
    from recipnet.plot import plot_scene
    from recipnet.training import load_checkpoint

    args = parse_args(argparser(), argv)
    sample_set = load_sample_set(args.data)
    split = {'test': TEST, 'train': TRAIN, 'all': None}[args.split]
    samples = sample_set.select(split=split)[:args.scenes]
    if not samples:
        raise RecipNetUsageError(
            "No {} scenes in '{}'".format(args.split, args.data))
    network = None
    if args.checkpoint is not None:
        network = load_checkpoint(checkpoint_path(args.checkpoint)).forward
    out_dir = prepare_output(args, 'plot')
    rng = np.random.RandomState(args.seed)
    paths = []
    for sample in samples:
        predictions = None
        if network is not None:
            predictions = list(sample_predictions(
                network, SceneBatch.from_samples([sample]), args.k, rng))
        path = os.path.join(out_dir, 'scene_{}.svg'.format(sample.scene_id))
        plot_scene(sample, predictions, save=path)
        paths.append(path)
    logger.info("Drew {} scenes into '{}'".format(len(paths), out_dir))
    return paths
