"""Reproducible random streams.

Two layers share one keying scheme:

* array-level sampling uses numpy ``Generator`` objects backed by the
  counter-based Philox bit generator, keyed by a derived 64-bit value;
* tight algorithm loops (numba kernels) use a splitmix64 stream seeded
  with the same derived value.

Streams are derived as ``mix64(master_seed, index)``, so trial ``i`` of a
batch gets the same stream no matter in which order (or in how many
processes) the trials run.
"""

from __future__ import annotations

import numpy as np
from numba import njit

_MASK64 = np.uint64(0xFFFFFFFFFFFFFFFF)
_GOLDEN = np.uint64(0x9E3779B97F4A7C15)


@njit(cache=True)
def mix64(a, b):
    """Combine two integers into one well-mixed uint64 (splitmix64 finalizer)."""
    z = (np.uint64(a) + _GOLDEN * (np.uint64(b) + np.uint64(1))) & _MASK64
    z = ((z ^ (z >> np.uint64(30))) * np.uint64(0xBF58476D1CE4E5B9)) & _MASK64
    z = ((z ^ (z >> np.uint64(27))) * np.uint64(0x94D049BB133111EB)) & _MASK64
    return z ^ (z >> np.uint64(31))


@njit(cache=True)
def sm64_next(state):
    """Advance a splitmix64 stream; returns (output, new_state)."""
    state = (state + _GOLDEN) & _MASK64
    z = state
    z = ((z ^ (z >> np.uint64(30))) * np.uint64(0xBF58476D1CE4E5B9)) & _MASK64
    z = ((z ^ (z >> np.uint64(27))) * np.uint64(0x94D049BB133111EB)) & _MASK64
    return z ^ (z >> np.uint64(31)), state


@njit(cache=True)
def sm64_below(state, bound):
    """Uniform int in [0, bound) from a splitmix64 stream; returns (value, state).

    Uses the modulo reduction: with 64-bit outputs the bias is < bound/2**64,
    far below anything our statistical tests can resolve.
    """
    z, state = sm64_next(state)
    return np.int64(z % np.uint64(bound)), state


@njit(cache=True)
def sm64_unit(state):
    """Uniform float in [0, 1) from a splitmix64 stream; returns (value, state)."""
    z, state = sm64_next(state)
    return (z >> np.uint64(11)) * (1.0 / 9007199254740992.0), state


def stream(seed: int, *path: int) -> np.random.Generator:
    """Philox-backed Generator for the stream keyed by (seed, *path)."""
    return np.random.Generator(np.random.Philox(key=derive(seed, *path)))


def derive(seed: int, *path: int) -> np.uint64:
    """Derived 64-bit stream key for (seed, *path), e.g. to seed a kernel."""
    # numba hands uint64 results back as plain ints; re-wrap before the
    # next call so values >= 2**63 don't overflow the int64 unboxing
    key = np.uint64(int(seed) & 0xFFFFFFFFFFFFFFFF)
    for p in path:
        key = np.uint64(mix64(key, np.uint64(int(p) & 0xFFFFFFFFFFFFFFFF)))
    return key
