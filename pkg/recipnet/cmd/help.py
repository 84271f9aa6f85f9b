"""
Prints help information associated with a RecipNet command
"""
from __future__ import print_function
from recipnet.utils.arguments import RecipNetArgumentParser


def argparser():
    parser = RecipNetArgumentParser(prog='recipnet help', description=__doc__)
    parser.add_argument('cmd', default=None,
                        help="Name of the command to print help information")
    return parser


# List of available cmds
def all_cmds():
    return [c for c in dir(recipnet.cmd)
            if not c.startswith('_') and hasattr(getattr(recipnet.cmd, c),
                                                 'argparser')]


def get_parser(cmd):
    "Get the parser associated with a given cmd"
    from recipnet.exceptions import RecipNetUsageError
    cmd = cmd.replace('-', '_')
    if cmd not in all_cmds():
        raise RecipNetUsageError(
            "Unrecognised command '{}'\n\n{}".format(
                cmd, available_cmds_message()))
    return getattr(recipnet.cmd, cmd).argparser()


def available_cmds_message():
    return (
        "usage: recipnet <cmd> <args>\n\n"
        "available commands:\n{}""".format(
            "\n".join('    {}\n        {}'.format(c, _get_description(c))
                      for c in all_cmds())))


def _get_description(cmd):
    # First paragraph only
    return (get_parser(cmd).description.strip().split('\n\n')[0]
            .replace('\n', '\n        '))


def run(argv):
    if not argv:
        print(available_cmds_message())
    else:
        args = argparser().parse_args(argv)
        get_parser(args.cmd).print_help()


import recipnet.cmd  # @IgnorePep8
