"""Deterministic seed derivation.

A single master seed drives the whole pipeline; each stage derives its own
seed by hashing (master, stage name), so stages stay independent and the
run is one-number reproducible.
"""

import hashlib

import numpy as np


def derive_seed(master_seed: int, stage: str) -> int:
    digest = hashlib.sha256(f"{master_seed}:{stage}".encode()).digest()
    return int.from_bytes(digest[:8], "little") & 0x7FFFFFFFFFFFFFFF


def rng_for(master_seed: int, stage: str) -> np.random.Generator:
    return np.random.default_rng(derive_seed(master_seed, stage))
