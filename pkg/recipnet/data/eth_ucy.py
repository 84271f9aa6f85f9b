"""
Reader for trajectory files in the ETH/UCY text format (one
``frame_id agent_id x y`` record per line, whitespace separated, meters) and
sliding-window extraction of scene samples from them.
"""
import collections
from itertools import groupby
import numpy as np
from recipnet.exceptions import RecipNetDataFormatError, RecipNetUsageError
from recipnet.utils.logging import logger
from .trajectories import SceneSample, T_OBS, T_PRED, MAX_AGENTS

ENCODING = 'utf-8'

Record = collections.namedtuple('Record', 'frame agent pos')


def _parse_id(token):
    value = float(token)
    if value != int(value):
        raise ValueError(token)
    return int(value)


def load_eth_ucy(path):
    """
    Reads an ETH/UCY trajectory file

    Parameters
    ----------
    path : str
        Path to the text file

    Returns
    -------
    records : list(Record)
        Records sorted by frame and then agent id
    """
    records = []
    seen = set()
    last_frame = None
    with open(path, 'rb') as f:
        for line_number, raw in enumerate(f, start=1):
            try:
                line = raw.decode(ENCODING)
            except UnicodeDecodeError as e:
                raise RecipNetDataFormatError(
                    "Record is not valid {} text ({})".format(ENCODING, e),
                    line_number, path)
            tokens = line.split()
            if not tokens or tokens[0].startswith('#'):
                continue
            if len(tokens) != 4:
                raise RecipNetDataFormatError(
                    "Expected 4 fields (frame_id agent_id x y), found {}"
                    .format(len(tokens)), line_number, path)
            try:
                frame = _parse_id(tokens[0])
                agent = _parse_id(tokens[1])
                pos = (float(tokens[2]), float(tokens[3]))
            except (ValueError, OverflowError):
                raise RecipNetDataFormatError(
                    "Could not parse record '{}'".format(line.strip()),
                    line_number, path)
            if not np.all(np.isfinite(pos)):
                raise RecipNetDataFormatError(
                    "Non-finite position in record '{}'".format(line.strip()),
                    line_number, path)
            if last_frame is not None and frame < last_frame:
                raise RecipNetDataFormatError(
                    "Frame id {} follows frame id {} (frame ids must be "
                    "non-decreasing)".format(frame, last_frame),
                    line_number, path)
            if (frame, agent) in seen:
                raise RecipNetDataFormatError(
                    "Duplicate record for agent {} in frame {}".format(
                        agent, frame), line_number, path)
            seen.add((frame, agent))
            last_frame = frame
            records.append(Record(frame, agent, pos))
    records.sort(key=lambda r: (r.frame, r.agent))
    logger.debug("Loaded {} records from '{}'".format(len(records), path))
    return records


def group_by_frame(records):
    "Maps each frame id to an ordered dict of agent id -> position"
    frames = collections.OrderedDict()
    for frame, recs in groupby(records, key=lambda r: r.frame):
        agents = frames[frame] = collections.OrderedDict()
        for r in recs:
            if r.agent in agents:
                raise RecipNetDataFormatError(
                    "Duplicate record for agent {} in frame {}".format(
                        r.agent, frame))
            agents[r.agent] = r.pos
    return frames


def extract_windows(records, t_obs=T_OBS, t_pred=T_PRED, stride=1,
                    subset='', first_scene_id=0):
    """
    Cuts the frame sequence into windows of t_obs + t_pred consecutive frames.
    Only agents present in every frame of a window are included; windows
    without any such agent are dropped.

    Parameters
    ----------
    records : list(Record)
        Records as returned by ``load_eth_ucy``
    t_obs : int
        Number of observed frames
    t_pred : int
        Number of predicted frames
    stride : int
        Number of frames between the starts of consecutive windows
    subset : str
        Sub-dataset name given to the extracted samples

    Returns
    -------
    samples : list(SceneSample)
    """
    if stride < 1:
        raise RecipNetUsageError(
            "Window stride must be positive ({})".format(stride))
    frames = group_by_frame(records)
    frame_ids = list(frames)
    length = t_obs + t_pred
    samples = []
    for start in range(0, len(frame_ids) - length + 1, stride):
        window = [frames[f] for f in frame_ids[start:start + length]]
        agents = sorted(set.intersection(*(set(w) for w in window)))
        if not agents:
            continue
        if len(agents) > MAX_AGENTS:
            logger.warning(
                "Window starting at frame {} has {} complete agents, keeping "
                "the first {} by id".format(frame_ids[start], len(agents),
                                            MAX_AGENTS))
            agents = agents[:MAX_AGENTS]
        positions = np.array([[w[a] for a in agents] for w in window])
        samples.append(SceneSample(
            positions[:t_obs], positions[t_obs:], agent_ids=agents,
            scene_id=first_scene_id + len(samples), subset=subset))
    return samples
