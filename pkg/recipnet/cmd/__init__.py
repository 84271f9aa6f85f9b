from . import generate
from . import train
from . import eval  # @ReservedAssignment
from . import attack_eval
from . import plot
from . import help  # @ReservedAssignment
