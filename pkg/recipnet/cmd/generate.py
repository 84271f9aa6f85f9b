"""
Generates a sample file of synthetic social-force scenes, or converts
ETH/UCY trajectory files into one, and marks a fraction of the scenes for
testing, e.g.::

    $ recipnet generate --out data --scenes 500 --agents 4 --seed 7

With '--subsets N' the scenes are divided between N sub-datasets simulated
in arenas of increasing size (for leave-one-out evaluation). With
'--eth-ucy FILE [FILE ...]' each file becomes a sub-dataset named after its
file stem. The samples are written to 'samples.h5' in the output directory
alongside a 'manifest.yml' describing them.
"""
import os.path
from collections import OrderedDict
import numpy as np
from recipnet.utils.arguments import (
    RecipNetArgumentParser, add_config_option, parse_args, required,
    prepare_output, existing_file, positive_int, fraction)
from recipnet.utils.logging import logger

SAMPLES_FILE = 'samples.h5'
MANIFEST_FILE = 'manifest.yml'
SUBSET_ARENA_STEP = 0.25


def argparser():
    parser = RecipNetArgumentParser(prog='recipnet generate',
                                    description=__doc__)
    add_config_option(parser)
    required(parser.add_argument(
        '--out', type=str, default=None,
        help="Output directory (relative to $RECIPNET_OUTPUT_ROOT if set)"))
    parser.add_argument('--scenes', type=positive_int, default=500,
                        help=("Number of synthetic scenes "
                              "(default %(default)s)"))
    parser.add_argument('--agents', type=positive_int, default=4,
                        help=("Agents per synthetic scene, at most 32 "
                              "(default %(default)s)"))
    parser.add_argument('--seed', type=int, default=0,
                        help="Random seed (default %(default)s)")
    parser.add_argument('--subsets', type=positive_int, default=1,
                        help=("Number of synthetic sub-datasets "
                              "(default %(default)s)"))
    parser.add_argument('--arena-size', type=float, default=10.0,
                        dest='arena_size',
                        help=("Arena diameter (m) of the first sub-dataset "
                              "(default %(default)s)"))
    parser.add_argument('--context-dim', type=int, default=4,
                        dest='context_dim',
                        help=("Length of the per-scene context vector, 0 "
                              "for none (default %(default)s)"))
    parser.add_argument('--test-fraction', type=fraction, default=0.2,
                        dest='test_fraction',
                        help=("Fraction of the scenes held out for testing "
                              "(default %(default)s)"))
    parser.add_argument('--eth-ucy', type=existing_file, nargs='+',
                        default=None, dest='eth_ucy', metavar='FILE',
                        help=("ETH/UCY trajectory files to convert instead "
                              "of simulating scenes"))
    parser.add_argument('--stride', type=positive_int, default=1,
                        help=("Frames between the starts of consecutive "
                              "ETH/UCY windows (default %(default)s)"))
    return parser


def subset_seeds(seed, num_subsets):
    return [int(s) for s in np.random.RandomState(seed).randint(
        2 ** 31, size=num_subsets)]


def synthetic_samples(args):
    from recipnet.data import SocialForceConfig, generate_social_force
    counts = [args.scenes // args.subsets +
              (1 if i < args.scenes % args.subsets else 0)
              for i in range(args.subsets)]
    samples = []
    configs = OrderedDict()
    for i, (count, seed) in enumerate(zip(
            counts, subset_seeds(args.seed, args.subsets))):
        if not count:
            continue
        name = ('synthetic' if args.subsets == 1
                else 'synthetic-{}'.format(i))
        config = SocialForceConfig(
            n_scenes=count, agents_per_scene=args.agents, seed=seed,
            arena_size=args.arena_size * (1.0 + SUBSET_ARENA_STEP * i),
            context_dim=args.context_dim)
        samples.extend(generate_social_force(
            config, subset=name, first_scene_id=len(samples)))
        configs[name] = dict(config.to_dict())
    return samples, configs


def eth_ucy_samples(args):
    from recipnet.data import load_eth_ucy, extract_windows
    samples = []
    sources = OrderedDict()
    for path in args.eth_ucy:
        name = os.path.splitext(os.path.basename(path))[0]
        windows = extract_windows(load_eth_ucy(path), stride=args.stride,
                                  subset=name, first_scene_id=len(samples))
        logger.info("Extracted {} windows from '{}'".format(len(windows),
                                                            path))
        samples.extend(windows)
        sources[name] = {'path': os.path.abspath(path),
                         'windows': len(windows)}
    return samples, sources


def run(argv):
    """
    Generates (or converts) the samples and writes them with their manifest
    """
    from recipnet.data import SampleSet, save_samples, assign_split, TEST
    from recipnet.exceptions import RecipNetUsageError
    from recipnet.utils.reports import write_yaml

    args = parse_args(argparser(), argv)
    if args.eth_ucy:
        samples, sources = eth_ucy_samples(args)
        if not samples:
            raise RecipNetUsageError(
                "No complete windows found in the ETH/UCY files")
    else:
        samples, sources = synthetic_samples(args)
    out_dir = prepare_output(args, 'generate')
    # Offset the split stream from the scene generator's
    split = assign_split(len(samples), args.test_fraction,
                         np.random.RandomState(args.seed + 1))
    sample_set = SampleSet(samples, split)
    path = os.path.join(out_dir, SAMPLES_FILE)
    save_samples(path, sample_set)
    manifest = OrderedDict([
        ('samples', SAMPLES_FILE),
        ('seed', args.seed),
        ('scenes', len(samples)),
        ('agents', int(sum(s.num_agents for s in samples))),
        ('test_scenes', int(np.sum(split == TEST))),
        ('subsets', sample_set.subsets),
        ('sources', dict(sources))])
    write_yaml(os.path.join(out_dir, MANIFEST_FILE), dict(manifest))
    logger.info("Wrote {} scenes ({} for testing) to '{}'".format(
        manifest['scenes'], manifest['test_scenes'], path))
    return path
