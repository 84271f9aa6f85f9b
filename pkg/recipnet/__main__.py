"""
Dispatches 'recipnet <cmd> <args>' to the run function of the command and
maps errors onto exit codes: 1 for invalid arguments, configuration or input
files, 2 for runtime failures (numerical divergence, corrupt checkpoints,
file system errors)
"""
from __future__ import print_function
import sys
from recipnet.exceptions import RecipNetUsageError, RecipNetRuntimeError
from recipnet.utils.logging import logger

EXIT_SUCCESS = 0
EXIT_USAGE = 1
EXIT_RUNTIME = 2


def main(argv=None):
    import recipnet.cmd
    from recipnet.cmd.help import all_cmds, available_cmds_message
    if argv is None:
        argv = sys.argv[1:]
    if not argv:
        print(available_cmds_message())
        return EXIT_USAGE
    cmd, args = argv[0], argv[1:]
    if cmd in ('-h', '--help'):
        cmd = 'help'
    cmd = cmd.replace('-', '_')
    if cmd not in all_cmds():
        print("'{}' is not a recipnet command\n\n{}".format(
            cmd, available_cmds_message()), file=sys.stderr)
        return EXIT_USAGE
    try:
        getattr(recipnet.cmd, cmd).run(args)
    except RecipNetUsageError as e:
        logger.error(str(e))
        return EXIT_USAGE
    except RecipNetRuntimeError as e:
        logger.error(str(e))
        return EXIT_RUNTIME
    except OSError as e:
        logger.error(str(e))
        return EXIT_RUNTIME
    except SystemExit as e:
        # argparse exits 1 on invalid arguments and 0 after printing help
        return e.code if isinstance(e.code, int) else EXIT_USAGE
    return EXIT_SUCCESS


if __name__ == '__main__':
    sys.exit(main())
