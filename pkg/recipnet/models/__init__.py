from .layers import Module, Linear, LstmCell
from .pooling import SocialPooling, social_pool
from .generator import (
    Generator, generator_forward, displacements, positions_from)
from .discriminator import Discriminator, discriminator_forward
from .network import NetworkConfig, PredictionNetwork, FORWARD, BACKWARD
from .baselines import linear_predict
