import numpy as np


def linear_predict(observed, t_pred):
    """
    Least-squares constant-velocity fit to each agent's observed positions,
    extrapolated ``t_pred`` steps

    Parameters
    ----------
    observed : np.ndarray, shape (T_o, A, 2)
        Observed positions
    t_pred : int
        Number of steps to predict

    Returns
    -------
    prediction : np.ndarray, shape (t_pred, A, 2)
    """
    observed = np.asarray(observed, dtype=np.float64)
    t_obs, num_agents = observed.shape[:2]
    if t_obs == 1:
        return np.repeat(observed, t_pred, axis=0)
    times = np.arange(t_obs, dtype=np.float64)
    slope, intercept = np.polyfit(times, observed.reshape(t_obs, -1), 1)
    future = np.arange(t_obs, t_obs + t_pred, dtype=np.float64)
    prediction = intercept + np.outer(future, slope)
    return prediction.reshape(t_pred, num_agents, 2)
