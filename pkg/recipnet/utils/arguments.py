"""
Argument types and helpers shared by the command-line tools
"""
import os.path
from argparse import ArgumentParser, ArgumentTypeError
import yaml
from recipnet.exceptions import RecipNetUsageError
from recipnet.version import __version__
import recipnet.utils.logging.handlers.sysout  # @UnusedImport
from .paths import output_dir
from .reports import write_yaml

RESOLVED_CONFIG = 'resolved_config.yml'


class RecipNetArgumentParser(ArgumentParser):
    "Exits with status 1 (validation error) on invalid arguments"

    def error(self, message):
        self.print_usage()
        self.exit(1, '{}: error: {}\n'.format(self.prog, message))


def existing_file(fname):
    if not os.path.isfile(fname):
        raise ArgumentTypeError(
            "'{}' does not refer to an existing file".format(fname))
    return fname


def positive_int(value):
    try:
        value = int(value)
    except ValueError:
        raise ArgumentTypeError("'{}' is not an integer".format(value))
    if value < 1:
        raise ArgumentTypeError("'{}' is not positive".format(value))
    return value


def fraction(value):
    try:
        value = float(value)
    except ValueError:
        raise ArgumentTypeError("'{}' is not a number".format(value))
    if not 0.0 <= value <= 1.0:
        raise ArgumentTypeError("'{}' is not in [0, 1]".format(value))
    return value


def add_config_option(parser):
    parser.add_argument(
        '--config', type=existing_file, default=None,
        help=("YAML file of argument values (e.g. the {} written by a "
              "previous run). Options given on the command line take "
              "precedence".format(RESOLVED_CONFIG)))


def load_config(path, parser):
    "Reads argument defaults from a YAML file, checking the names"
    with open(path) as f:
        try:
            values = yaml.safe_load(f)
        except yaml.YAMLError as e:
            raise RecipNetUsageError(
                "Could not parse config file '{}' ({})".format(path, e))
    if values is None:
        return {}
    if not isinstance(values, dict):
        raise RecipNetUsageError(
            "Config file '{}' does not contain a mapping".format(path))
    values = dict(values)
    values.pop('command', None)
    values.pop('version', None)
    valid = set(a.dest for a in parser._actions) - set(['help', 'config'])
    unknown = set(values) - valid
    if unknown:
        raise RecipNetUsageError(
            "Unrecognised option(s) '{}' in config file '{}'".format(
                "', '".join(sorted(unknown)), path))
    return values


def parse_args(parser, argv):
    """
    Parses ``argv``, taking defaults from the file given by '--config' (if
    any) and checking that the required options are set after that
    """
    pre = ArgumentParser(add_help=False)
    pre.add_argument('--config', default=None)
    known, _ = pre.parse_known_args(argv)
    if known.config is not None:
        parser.set_defaults(**load_config(existing_file(known.config),
                                          parser))
    args = parser.parse_args(argv)
    missing = [a.option_strings[0] for a in parser._actions
               if getattr(a, 'recipnet_required', False) and
               getattr(args, a.dest) is None]
    if missing:
        parser.error("the following arguments are required: {}".format(
            ', '.join(missing)))
    return args


def required(action):
    """
    Marks an option as required after config-file defaults are applied
    (argparse's own 'required' would reject values from the file)
    """
    action.recipnet_required = True
    return action


def prepare_output(args, command):
    """
    Resolves the output directory of the command and writes the resolved
    configuration into it

    Returns
    -------
    out_dir : str
    """
    out_dir = output_dir(args.out)
    write_resolved_config(os.path.join(out_dir, RESOLVED_CONFIG), args,
                          command)
    return out_dir


def write_resolved_config(path, args, command):
    values = {'command': command, 'version': __version__}
    for name, value in sorted(vars(args).items()):
        if name == 'config':
            continue
        if isinstance(value, tuple):
            value = list(value)
        values[name] = value
    write_yaml(path, values)
