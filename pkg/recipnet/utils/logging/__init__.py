import logging

logger = logging.getLogger('recipnet')
loglevel = logging.INFO
