import sys
import logging
from .. import loglevel, logger

logger.setLevel(loglevel)
# A single handler even if the module is reloaded
if not any(getattr(h, '_recipnet_sysout', False) for h in logger.handlers):
    handler = logging.StreamHandler(sys.stdout)
    formatter = logging.Formatter(
        '%(levelname)s - %(message)s')
    handler.setFormatter(formatter)
    handler._recipnet_sysout = True
    logger.addHandler(handler)
