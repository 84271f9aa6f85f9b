"""
SVG rendering of scenes: observed, ground-truth and predicted trajectories
as polylines.
"""
import matplotlib
matplotlib.use('Agg')  # Set to use Agg so DISPLAY is not required
import matplotlib.pyplot as plt  # @IgnorePep8
import numpy as np  # @IgnorePep8
from recipnet.exceptions import RecipNetDimensionError  # @IgnorePep8
from recipnet.utils.logging import logger  # @IgnorePep8

# Fixed ids and no timestamp so identical scenes render to identical files
matplotlib.rcParams['svg.hashsalt'] = 'recipnet'


def plot_scene(sample, predictions=None, save=None, dims=(6, 6),
               title=None):
    """
    Draws the agents of a scene

    Parameters
    ----------
    sample : SceneSample
        The scene (observed and future positions)
    predictions : np.ndarray | list(np.ndarray) | None
        Predicted positions shaped (T_pred, N, 2), or a list of them
    save : str | None
        Path of the SVG file to write
    dims : tuple(float, float)
        Figure size in inches

    Returns
    -------
    fig : matplotlib.figure.Figure
    """
    if predictions is None:
        predictions = []
    elif isinstance(predictions, np.ndarray) and predictions.ndim == 3:
        predictions = [predictions]
    if title is None:
        title = 'Scene {} ({})'.format(sample.scene_id, sample.subset)
    fig, ax = plt.subplots(figsize=dims)
    for i in range(sample.num_agents):
        colour = 'C{}'.format(i % 10)
        obs = sample.observed[:, i]
        future = np.concatenate((obs[-1:], sample.future[:, i]))
        ax.plot(obs[:, 0], obs[:, 1], '-o', color=colour, markersize=2,
                label='observed' if i == 0 else None)
        ax.plot(future[:, 0], future[:, 1], '--', color=colour,
                label='ground truth' if i == 0 else None)
        for j, pred in enumerate(predictions):
            pred = np.asarray(pred)
            if pred.shape[1:] != (sample.num_agents, 2):
                raise RecipNetDimensionError(
                    "Prediction does not match the agents of the scene",
                    pred.shape, (None, sample.num_agents, 2))
            path = np.concatenate((obs[-1:], pred[:, i]))
            ax.plot(path[:, 0], path[:, 1], ':', color=colour,
                    alpha=0.8, label='predicted' if i == 0 and j == 0
                    else None)
    ax.set_aspect('equal', adjustable='datalim')
    ax.set_xlabel('x (m)')
    ax.set_ylabel('y (m)')
    ax.set_title(title, fontsize=12)
    ax.legend(loc='best', fontsize=8)
    if save is not None:
        fig.savefig(save, format='svg', metadata={'Date': None})
        logger.info("Saved figure of scene {} to '{}'".format(
            sample.scene_id, save))
    plt.close(fig)
    return fig
