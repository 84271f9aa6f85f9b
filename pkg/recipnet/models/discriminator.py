from recipnet.autodiff import ops
from recipnet.exceptions import RecipNetDimensionError
from .layers import Module, Linear, LstmCell
from .generator import displacements


class Discriminator(Module):
    """
    Classifies complete (observed followed by predicted or ground-truth)
    trajectories as real or fake: an LSTM encoder over the embedded
    displacements followed by a linear head with sigmoid output

    Parameters
    ----------
    config : NetworkConfig
        Architecture of the network
    length : int
        Number of positions in the trajectories scored
    rng : numpy.random.RandomState
        Used to draw the initial weights
    """

    def __init__(self, config, length, rng):
        super(Discriminator, self).__init__()
        self.length = length
        self.add_module('embedding', Linear(2, config.embedding_dim, rng))
        self.add_module('encoder', LstmCell(config.embedding_dim,
                                            config.discriminator_hidden, rng))
        self.add_module('classifier',
                        Linear(config.discriminator_hidden, 1, rng))

    def forward(self, trajectory):
        """
        Parameters
        ----------
        trajectory : Tensor, shape (length, A, 2)
            Complete positions of A agents

        Returns
        -------
        scores : Tensor, shape (A,)
            Probability that each trajectory is real, in (0, 1)
        """
        trajectory = ops.as_tensor(trajectory)
        if trajectory.ndim != 3 or trajectory.shape[0] != self.length:
            raise RecipNetDimensionError(
                "Discriminator expects complete trajectories of {} positions"
                .format(self.length), trajectory.shape)
        disp = displacements(trajectory)
        state = self.encoder.zero_state(trajectory.shape[1])
        for t in range(self.length):
            state = self.encoder.lstm_step(
                ops.tanh(self.embedding(disp[t])), state)
        logits = self.classifier(state[0])
        return ops.sigmoid(logits.reshape(trajectory.shape[1]))


def discriminator_forward(discriminator, full_trajectory):
    "Score of each trajectory in a (length, A, 2) array"
    return discriminator(full_trajectory)
