"""
Base class for the keyword-configured parameter sets used throughout the
package (network architecture, losses, training, attack and data generation).
"""
import copy
from collections import OrderedDict
from recipnet.exceptions import RecipNetUsageError


class Config(object):
    """
    A set of named parameters with defaults. Subclasses list their parameters
    and default values in ``defaults`` and check them in ``validate``.

    Parameters
    ----------
    kwargs : dict(str, object)
        Overrides of the default values. Unknown names raise a
        RecipNetUsageError
    """

    defaults = OrderedDict()

    def __init__(self, **kwargs):
        unknown = set(kwargs) - set(self.defaults)
        if unknown:
            raise RecipNetUsageError(
                "Unrecognised {} parameter(s) '{}', valid names are '{}'"
                .format(type(self).__name__, "', '".join(sorted(unknown)),
                        "', '".join(self.defaults)))
        for name, default in self.defaults.items():
            setattr(self, name, copy.copy(kwargs.get(name, default)))
        self.validate()

    def validate(self):
        "Raise a RecipNetUsageError if any parameter is out of range"

    def _check(self, condition, msg, *args):
        if not condition:
            raise RecipNetUsageError(
                "Invalid {}: {}".format(type(self).__name__,
                                        msg.format(*args)))

    def to_dict(self):
        return OrderedDict((n, getattr(self, n)) for n in self.defaults)

    @classmethod
    def from_dict(cls, dct):
        return cls(**dict(dct))

    def replace(self, **overrides):
        dct = self.to_dict()
        dct.update(overrides)
        return type(self)(**dct)

    def __eq__(self, other):
        return (type(self) is type(other) and
                self.to_dict() == other.to_dict())

    def __ne__(self, other):
        return not self == other

    def __repr__(self):
        return '{}({})'.format(
            type(self).__name__,
            ', '.join('{}={!r}'.format(k, v)
                      for k, v in self.to_dict().items()))
