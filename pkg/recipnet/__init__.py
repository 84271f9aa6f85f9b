"""
  Reciprocal forward/backward trajectory prediction networks.

  License: This file is part of the "RecipNet" package, which is released under
           the MIT Licence, see LICENSE for details.
"""
from .version import __version__
