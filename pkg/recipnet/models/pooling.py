"""
Social pooling: the relative position and hidden state of every neighbour of
an agent are embedded by a single-layer MLP and max-pooled into a
fixed-size interaction feature. Absent neighbours (up to MAX_AGENTS - 1 slots)
contribute the embedding of the zero vector.
"""
import numpy as np
from recipnet.autodiff import Tensor, ops
from recipnet.data.batch import PoolingIndex
from recipnet.exceptions import RecipNetIndexError, RecipNetDimensionError
from .layers import Module, Linear


class SocialPooling(Module):
    """
    Parameters
    ----------
    hidden_dim : int
        Size of the hidden states being pooled
    pool_dim : int
        Size of the pooled feature
    rng : numpy.random.RandomState
        Used to draw the initial weights
    """

    def __init__(self, hidden_dim, pool_dim, rng):
        super(SocialPooling, self).__init__()
        self.hidden_dim = hidden_dim
        self.pool_dim = pool_dim
        self.add_module('mlp', Linear(2 + hidden_dim, pool_dim, rng))

    def forward(self, hidden, positions, index):
        """
        Pools the neighbours of every agent

        Parameters
        ----------
        hidden : Tensor, shape (A, H)
            Hidden states of all agents
        positions : Tensor, shape (A, 2)
            Positions of all agents
        index : PoolingIndex
            Pair and gather indices of the scenes the agents belong to

        Returns
        -------
        pooled : Tensor, shape (A, pool_dim)
        """
        hidden = ops.as_tensor(hidden)
        positions = ops.as_tensor(positions)
        if (hidden.shape != (index.num_agents, self.hidden_dim) or
                positions.shape != (index.num_agents, 2)):
            raise RecipNetDimensionError(
                "Pooling inputs do not match the scenes", hidden.shape,
                positions.shape, (index.num_agents, self.hidden_dim))
        relative = (ops.take(positions, index.neighbours) -
                    ops.take(positions, index.targets))
        rows = ops.concat(
            [ops.concat([relative, ops.take(hidden, index.neighbours)],
                        axis=1),
             Tensor(np.zeros((1, 2 + self.hidden_dim)))], axis=0)
        embedded = ops.tanh(self.mlp(rows))
        return ops.max_over_axis(ops.take(embedded, index.gather), axis=1)


def social_pool(pooling, hidden_states, positions, target):
    """
    The pooled social feature of a single agent of a scene

    Parameters
    ----------
    pooling : SocialPooling
        The pooling layer
    hidden_states : Tensor, shape (N, H)
        Hidden states of the N agents of the scene
    positions : Tensor, shape (N, 2)
        Positions of the agents
    target : int
        Index of the agent the neighbourhood is pooled for

    Returns
    -------
    pooled : Tensor, shape (pool_dim,)
    """
    num_agents = ops.as_tensor(positions).shape[0]
    if not 0 <= target < num_agents:
        raise RecipNetIndexError(
            "Target agent {} out of range for scene of {} agents"
            .format(target, num_agents))
    pooled = pooling(hidden_states, positions,
                     PoolingIndex.single_scene(num_agents))
    return pooled[target]
