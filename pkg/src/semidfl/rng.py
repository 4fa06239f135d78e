"""Deterministic random-stream derivation.

Every random decision in the simulator draws from a stream keyed by
(master_seed, client, round, purpose), so per-client work can be evaluated
in any order without perturbing results.
"""
from __future__ import annotations

import zlib

import numpy as np

_MASK64 = (1 << 64) - 1


def _key_to_int(key: int | str) -> int:
    if isinstance(key, str):
        return zlib.crc32(key.encode("utf-8"))
    return int(key) & _MASK64


def substream(master_seed: int, *keys: int | str) -> np.random.Generator:
    """Return an independent generator for the given key path."""
    entropy = [int(master_seed) & _MASK64] + [_key_to_int(k) for k in keys]
    return np.random.default_rng(np.random.SeedSequence(entropy))


def subseed(master_seed: int, *keys: int | str) -> int:
    """Return a 64-bit integer seed derived from the key path."""
    entropy = [int(master_seed) & _MASK64] + [_key_to_int(k) for k in keys]
    return int(np.random.SeedSequence(entropy).generate_state(1, np.uint64)[0])
