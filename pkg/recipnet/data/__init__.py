from .trajectories import (
    Trajectory, SceneSample, BackwardSample, time_reverse, NormalizationSpec,
    NormalizedSample, normalize, denormalize, DT, T_OBS, T_PRED, MAX_AGENTS)
from .eth_ucy import load_eth_ucy, extract_windows, Record
from .social_force import SocialForceConfig, generate_social_force
from .store import (
    SampleSet, save_samples, load_samples, assign_split, TRAIN, TEST)
from .batch import SceneBatch, PoolingIndex, iterate_batches, num_batches
