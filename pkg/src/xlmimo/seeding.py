"""Deterministic per-trial random streams."""

import numpy as np


def seed_stream(master_seed: int, trial: int) -> np.random.Generator:
    """Collision-free sub-stream for one trial, identical across platforms."""
    return np.random.default_rng(
        np.random.SeedSequence(master_seed, spawn_key=(trial,)))
