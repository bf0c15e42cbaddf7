"""Counter-based deterministic random streams.

Every draw is a pure function of (seed, row, col, channel), so matrices can
be filled in any order (or in parallel over disjoint row ranges) and still
come out bit-for-bit identical.  The mixing function is splitmix64; quality
is adequate for Monte Carlo at the tolerances used here.
"""

from __future__ import annotations

import numpy as np

_MASK = (1 << 64) - 1
_GOLDEN = 0x9E3779B97F4A7C15
_MIX1 = 0xBF58476D1CE4E5B9
_MIX2 = 0x94D049BB133111EB
_ROW_SALT = 0xD1342543DE82EF95
_COL_SALT = 0xAF251AF3B0F025B5
_CHAN_SALT = 0x9E6C63D0876A9A43


def splitmix64(x: int) -> int:
    """Scalar splitmix64 finalizer on a 64-bit state."""
    x = (x + _GOLDEN) & _MASK
    z = x
    z = ((z ^ (z >> 30)) * _MIX1) & _MASK
    z = ((z ^ (z >> 27)) * _MIX2) & _MASK
    return z ^ (z >> 31)


def _sm64_array(x: np.ndarray) -> np.ndarray:
    # vectorized copy of splitmix64; uint64 arithmetic wraps mod 2**64
    x = (x + np.uint64(_GOLDEN)).astype(np.uint64)
    z = x
    z = (z ^ (z >> np.uint64(30))) * np.uint64(_MIX1)
    z = (z ^ (z >> np.uint64(27))) * np.uint64(_MIX2)
    return z ^ (z >> np.uint64(31))


def mix(seed: int, index: int) -> int:
    """Derive a child seed from (seed, index); used for per-trial streams."""
    return splitmix64(splitmix64(seed & _MASK) ^ ((index & _MASK) * _GOLDEN & _MASK))


def counter_bits(seed: int, rows: np.ndarray, cols: np.ndarray, channel: int = 0) -> np.ndarray:
    """uint64 grid of hash bits for the (row, col) index arrays (broadcast)."""
    key = splitmix64((seed & _MASK) ^ ((channel & _MASK) * _CHAN_SALT & _MASK))
    r = rows.astype(np.uint64) * np.uint64(_ROW_SALT)
    c = cols.astype(np.uint64) * np.uint64(_COL_SALT)
    h = _sm64_array(np.uint64(key) + r)
    return _sm64_array(h ^ c)


def counter_uniform(seed: int, rows: np.ndarray, cols: np.ndarray, channel: int = 0) -> np.ndarray:
    """Uniform draws in the open interval (0, 1), one per (row, col) pair."""
    bits = counter_bits(seed, rows, cols, channel)
    return ((bits >> np.uint64(11)).astype(np.float64) + 0.5) * 2.0 ** -53


def uniform_block(seed: int, n_rows: int, n_cols: int, channel: int = 0,
                  row_offset: int = 0) -> np.ndarray:
    """(n_rows, n_cols) block of uniforms for rows [row_offset, row_offset+n_rows)."""
    rows = np.arange(row_offset, row_offset + n_rows, dtype=np.uint64).reshape(-1, 1)
    cols = np.arange(n_cols, dtype=np.uint64).reshape(1, -1)
    return counter_uniform(seed, rows, cols, channel)


def standard_normal(seed: int, n_rows: int, n_cols: int, channel_pair: int = 0,
                    row_offset: int = 0) -> np.ndarray:
    """Box-Muller normals from two uniform channels (2*channel_pair, +1)."""
    u1 = uniform_block(seed, n_rows, n_cols, 2 * channel_pair, row_offset)
    u2 = uniform_block(seed, n_rows, n_cols, 2 * channel_pair + 1, row_offset)
    return np.sqrt(-2.0 * np.log(u1)) * np.cos(2.0 * np.pi * u2)


def unit_sphere(seed: int, count: int, dim: int, channel_pair: int = 0) -> np.ndarray:
    """(count, dim) rows drawn uniformly from the Euclidean unit sphere."""
    g = standard_normal(seed, count, dim, channel_pair)
    norms = np.sqrt((g * g).sum(axis=1))
    # a zero draw has probability zero; resample rows deterministically if hit
    bad = norms == 0.0
    while bad.any():
        idx = np.nonzero(bad)[0]
        g[idx] = standard_normal(splitmix64(seed), len(idx), dim, channel_pair)
        norms = np.sqrt((g * g).sum(axis=1))
        bad = norms == 0.0
    return g / norms[:, None]
