"""
Synthetic crowd scenes from a social-force model: every agent is attracted
towards its goal at its preferred speed and repelled by the other agents
with a force that decays exponentially with their distance.
"""
from collections import OrderedDict
import numpy as np
from recipnet.utils.config import Config
from recipnet.utils.logging import logger
from .trajectories import SceneSample, DT, T_OBS, T_PRED, MAX_AGENTS


class SocialForceConfig(Config):
    """
    Parameters of the synthetic scene generator

    Parameters
    ----------
    n_scenes : int
        Number of scenes to generate
    agents_per_scene : int
        Number of agents in each scene (at most 32)
    seed : int
        Seed of the random number generator
    arena_size : float
        Diameter (m) of the circle the agents start on. Goals lie on the
        opposite side so paths cross near the centre
    goal_gain : float
        Relaxation rate (1/s) towards the preferred velocity
    repulsion : float
        Magnitude (m/s^2) of the pairwise repulsion at zero distance
    repulsion_range : float
        Decay length (m) of the repulsion
    max_speed : float
        Cap on the speed of every agent (m/s)
    mean_speed, speed_std : float
        Distribution of the preferred speeds (m/s)
    substeps : int
        Integration steps per sampled frame
    context_dim : int
        Length of the per-scene context vector attached to the samples
    """

    defaults = OrderedDict([
        ('n_scenes', 500),
        ('agents_per_scene', 4),
        ('seed', 0),
        ('arena_size', 10.0),
        ('goal_gain', 1.0),
        ('repulsion', 2.0),
        ('repulsion_range', 0.5),
        ('max_speed', 2.0),
        ('mean_speed', 1.3),
        ('speed_std', 0.2),
        ('start_jitter', 1.0),
        ('substeps', 4),
        ('t_obs', T_OBS),
        ('t_pred', T_PRED),
        ('context_dim', 4)])

    def validate(self):
        self._check(self.n_scenes >= 1, "n_scenes must be positive ({})",
                    self.n_scenes)
        self._check(1 <= self.agents_per_scene <= MAX_AGENTS,
                    "agents_per_scene must be between 1 and {} ({})",
                    MAX_AGENTS, self.agents_per_scene)
        self._check(0 <= self.seed < 2 ** 32,
                    "seed must be in [0, 2^32) ({})", self.seed)
        self._check(self.arena_size > 0.0, "arena_size must be positive")
        self._check(self.goal_gain >= 0.0, "goal_gain must be non-negative")
        self._check(self.repulsion >= 0.0, "repulsion must be non-negative")
        self._check(self.repulsion_range > 0.0,
                    "repulsion_range must be positive")
        self._check(self.max_speed > 0.0, "max_speed must be positive")
        self._check(0.0 < self.mean_speed <= self.max_speed,
                    "mean_speed must be in (0, max_speed]")
        self._check(self.speed_std >= 0.0, "speed_std must be non-negative")
        self._check(self.substeps >= 1, "substeps must be positive")
        self._check(self.t_obs >= 1 and self.t_pred >= 1,
                    "t_obs and t_pred must be positive")
        self._check(self.context_dim >= 0, "context_dim must be non-negative")


def social_forces(positions, velocities, goals, speeds, config):
    """
    Accelerations of all agents

    Parameters
    ----------
    positions, velocities, goals : np.ndarray, shape (N, 2)
    speeds : np.ndarray, shape (N,)
        Preferred speeds
    """
    to_goal = goals - positions
    dist_goal = np.linalg.norm(to_goal, axis=-1, keepdims=True)
    e_goal = to_goal / np.where(dist_goal > 0.0, dist_goal, 1.0)
    force = config.goal_gain * (speeds[:, np.newaxis] * e_goal - velocities)
    if config.repulsion and len(positions) > 1:
        diff = positions[:, np.newaxis, :] - positions[np.newaxis, :, :]
        dist = np.linalg.norm(diff, axis=-1)
        direction = diff / np.where(dist > 0.0, dist, 1.0)[..., np.newaxis]
        magnitude = config.repulsion * np.exp(-dist / config.repulsion_range)
        np.fill_diagonal(magnitude, 0.0)
        force = force + np.sum(magnitude[..., np.newaxis] * direction, axis=1)
    return force


def capped(velocities, max_speed):
    speeds = np.linalg.norm(velocities, axis=-1, keepdims=True)
    factor = np.minimum(1.0, max_speed / np.where(speeds > 0.0, speeds, 1.0))
    return velocities * factor


def simulate_agents(starts, goals, speeds, config, num_frames=None):
    """
    Integrates the social-force dynamics from the given initial conditions,
    each agent starting at its preferred velocity towards its goal

    Returns
    -------
    positions : np.ndarray, shape (num_frames, N, 2)
        Positions sampled every DT seconds, starting with ``starts``
    """
    if num_frames is None:
        num_frames = config.t_obs + config.t_pred
    x = np.array(starts, dtype=np.float64)
    goals = np.asarray(goals, dtype=np.float64)
    speeds = np.minimum(np.asarray(speeds, dtype=np.float64),
                        config.max_speed)
    to_goal = goals - x
    norm = np.linalg.norm(to_goal, axis=-1, keepdims=True)
    v = speeds[:, np.newaxis] * to_goal / np.where(norm > 0.0, norm, 1.0)
    h = DT / config.substeps
    frames = [x.copy()]
    for _ in range(num_frames - 1):
        for _ in range(config.substeps):
            v = capped(v + h * social_forces(x, v, goals, speeds, config),
                       config.max_speed)
            x = x + h * v
        frames.append(x.copy())
    return np.array(frames)


def scene_context(config, speeds):
    features = np.array([config.arena_size / 10.0,
                         len(speeds) / float(MAX_AGENTS),
                         float(np.mean(speeds)),
                         config.repulsion])
    context = np.zeros(config.context_dim)
    n = min(len(features), config.context_dim)
    context[:n] = features[:n]
    return context


def generate_social_force(config, subset='synthetic', first_scene_id=0):
    """
    Generates ``config.n_scenes`` scenes, each a single window of
    t_obs + t_pred frames. Output is a deterministic function of the config.

    Returns
    -------
    samples : list(SceneSample)
    """
    rng = np.random.RandomState(config.seed)
    radius = config.arena_size / 2.0
    n = config.agents_per_scene
    samples = []
    for i in range(config.n_scenes):
        angles = rng.uniform(0.0, 2.0 * np.pi, size=n)
        unit = np.stack((np.cos(angles), np.sin(angles)), axis=-1)
        starts = (radius * unit +
                  rng.uniform(-config.start_jitter, config.start_jitter,
                              size=(n, 2)))
        # Goals well beyond the far side so agents don't reach them in-window
        goals = (-2.0 * radius * unit +
                 rng.uniform(-config.start_jitter, config.start_jitter,
                             size=(n, 2)))
        speeds = np.clip(
            rng.normal(config.mean_speed, config.speed_std, size=n),
            0.1 * config.mean_speed, config.max_speed)
        positions = simulate_agents(starts, goals, speeds, config)
        context = (scene_context(config, speeds)
                   if config.context_dim else None)
        samples.append(SceneSample(
            positions[:config.t_obs], positions[config.t_obs:],
            context=context, scene_id=first_scene_id + i, subset=subset))
    logger.info("Generated {} social-force scenes with {} agents each "
                "(seed {})".format(config.n_scenes, n, config.seed))
    return samples
