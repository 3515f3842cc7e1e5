"""Synthetic stream generator for studying the memory-state dynamics.

Drives the fast-weight state with random unit keys and random values along a
seeded random-walk trajectory, so forgetting and the adaptive learning-rate
weight can be inspected without any real data.
"""

from __future__ import annotations

import numpy as np

from .frame_scoring import GrayImage, ScoreConfig, score_frame
from .geometry import Pose, Quaternion, quat_normalize
from .state_update import (MemoryState, Observation, apply_update,
                           associative_gradient, recall_error)


def simulate_stream(frames: int, state_dim: int, seed: int,
                    policy: str = "adaptive",
                    cfg: ScoreConfig = ScoreConfig()) -> list[tuple[int, float, float, float]]:
    """Run a seeded synthetic stream and return per-step rows
    (step, beta, recall_first, recall_latest)."""
    constant_beta = None
    if policy.startswith("constant:"):
        constant_beta = float(policy.split(":", 1)[1])
    elif policy != "adaptive":
        raise ValueError(f"unknown policy {policy!r}")

    rng = np.random.default_rng(seed)
    state = MemoryState.zeros(state_dim, state_dim)
    first_obs = None
    prev_pose = None
    position = np.zeros(3)
    rows = []
    for step in range(frames):
        key = rng.standard_normal(state_dim)
        key /= np.linalg.norm(key)
        value = rng.standard_normal(state_dim)
        obs = Observation(key, value)
        if first_obs is None:
            first_obs = obs

        position = position + rng.normal(0.0, 0.1, size=3)
        q = quat_normalize(Quaternion(1.0, *rng.normal(0.0, 0.05, size=3)))
        pose = Pose(np.array(position, copy=True), q, step / 30.0)

        if constant_beta is not None:
            beta = constant_beta
        else:
            img = GrayImage(rng.uniform(size=(16, 16)))
            beta = score_frame(prev_pose, pose, img, cfg)
        state = apply_update(state, associative_gradient(state, obs), beta)
        prev_pose = pose

        rows.append((step, beta,
                     recall_error(state, [first_obs]),
                     recall_error(state, [obs])))
    return rows
