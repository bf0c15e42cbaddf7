"""Norms and convex bodies: top-k Euclidean norms, Montgomery-Smith style
block norms, the cube-cap intersection body and its boundary sampler.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import rng
from .errors import DomainError, SizeError
from .linalg import as_vector

MS_BRUTE_MAX_N = 12


def k_norm(a, k: int) -> float:
    """Euclidean norm of the k largest entries in absolute value."""
    v = as_vector(a)
    if not (1 <= k <= v.size):
        raise DomainError("k must lie in [1, len(a)]")
    mags = np.abs(v)
    if k == v.size:  # summation order matches the plain 2-norm exactly
        return float(np.sqrt((mags * mags).sum()))
    top = np.partition(mags, v.size - k)[v.size - k:]
    return float(np.sqrt((top * top).sum()))


@dataclass(frozen=True)
class PartitionCertificate:
    blocks: tuple  # tuple of tuples of 0-based indices, disjoint, covering [n]
    value: float

    def check_partition(self, n: int) -> bool:
        seen = sorted(i for b in self.blocks for i in b)
        return seen == list(range(n))


def _submask_table(n: int):
    """subs[t] = int64 array of all submasks of t (including 0 and t)."""
    table = [None] * (1 << n)
    table[0] = np.zeros(1, dtype=np.int64)
    for t in range(1, 1 << n):
        low = t & (-t)
        rest = table[t ^ low]
        table[t] = np.concatenate([rest, rest | low])
    return table


def ms_norm_brute(z, m: int):
    """Exact maximum over partitions of [n] into at most m nonempty blocks of
    the summed blockwise Euclidean norms, with a maximizing certificate.

    Dynamic programming over subsets; exponential in n, guarded at n <= 12.
    """
    v = as_vector(z)
    n = v.size
    if n > MS_BRUTE_MAX_N:
        raise SizeError(f"brute-force partition search capped at n <= {MS_BRUTE_MAX_N}")
    if m < 1:
        raise DomainError("need at least one block")
    if m >= n:
        # singletons dominate: sqrt is subadditive, so splitting never loses
        blocks = tuple((i,) for i in range(n))
        return float(np.abs(v).sum()), PartitionCertificate(blocks, float(np.abs(v).sum()))
    w = v * v
    full = (1 << n) - 1
    normsq = np.zeros(1 << n)
    for s in range(1, 1 << n):
        low = s & (-s)
        normsq[s] = normsq[s ^ low] + w[low.bit_length() - 1]
    norm = np.sqrt(normsq)
    subs_of = _submask_table(n)

    f_prev = norm.copy()      # one block: the whole subset
    choices = [None]          # choices[j][s] = block used at level j+1 blocks
    for level in range(1, m):
        f_cur = f_prev.copy()
        choice = np.zeros(1 << n, dtype=np.int64)
        for s in range(1, 1 << n):
            low = s & (-s)
            t = s ^ low
            subs = subs_of[t]
            blocks = subs | low
            cand = norm[blocks] + f_prev[t ^ subs]
            best = int(np.argmax(cand))
            if cand[best] > f_cur[s]:
                f_cur[s] = cand[best]
                choice[s] = blocks[best]
        choices.append(choice)
        f_prev = f_cur
    value = float(f_prev[full])

    blocks = []
    s = full
    level = m - 1
    while s:
        blk = 0
        while level >= 1:
            blk = int(choices[level][s])
            if blk:
                break
            level -= 1
        if level < 1 or blk == 0:
            blocks.append(s)  # remaining set is one block
            break
        blocks.append(blk)
        s ^= blk
        level -= 1
    idx_blocks = tuple(tuple(i for i in range(n) if b >> i & 1) for b in blocks)
    cert = PartitionCertificate(idx_blocks, value)
    return value, cert


def ms_norm_heuristic(z, m: int):
    """Greedy balanced partition: largest squared entry into the lightest block.

    Always a valid partition, hence a lower bound on the exact block norm.
    """
    v = as_vector(z)
    n = v.size
    if m < 1:
        raise DomainError("need at least one block")
    order = np.argsort(-np.abs(v))
    k = min(m, n)
    sums = np.zeros(k)
    members = [[] for _ in range(k)]
    for i in order:
        j = int(np.argmin(sums))
        sums[j] += v[i] * v[i]
        members[j].append(int(i))
    value = float(np.sqrt(sums).sum())
    blocks = tuple(tuple(sorted(b)) for b in members if b)
    return value, PartitionCertificate(blocks, value)


def ms_block_partition(y, x) -> PartitionCertificate:
    """Constructive partition that witnesses <x, y> <= sum of block norms.

    Singleton blocks where y_k^2 >= 1/2, then greedy prefix cuts whose partial
    sums of the remaining squares stay below 1/2 (plus the cut element).  The
    certificate value sum_B ||x_B||_2 dominates <x, y> because every block
    carries y-mass at most one.
    """
    yv = as_vector(y)
    xv = as_vector(x)
    n = yv.size
    if xv.size != n:
        raise DomainError("x and y must share a dimension")
    if np.abs(yv).max() > 1.0 + 1e-9:
        raise DomainError("witness y must satisfy ||y||_inf <= 1")
    singles = set(int(i) for i in np.nonzero(yv * yv >= 0.5)[0])
    z2 = np.where(yv * yv < 0.5, yv * yv, 0.0)
    blocks = [(i,) for i in sorted(singles)]
    pos = 0
    while pos < n:
        acc = 0.0
        end = pos
        while end < n - 1 and acc + z2[end] <= 0.5:
            acc += z2[end]
            end += 1
        interval = [i for i in range(pos, end + 1) if i not in singles]
        if interval:
            blocks.append(tuple(interval))
        pos = end + 1
    value = 0.0
    for b in blocks:
        seg = xv[list(b)]
        value += float(np.sqrt((seg * seg).sum()))
    return PartitionCertificate(tuple(blocks), value)


_INV_PHI = (math.sqrt(5.0) - 1.0) / 2.0


def support_cube_cap(z, alpha: float) -> float:
    """Support function of the cube-ball intersection B_inf^n ∩ alpha B_2^n.

    Uses the soft-threshold form of the infimal convolution
    min_tau sum(|z_i| - tau)_+ + alpha * sqrt(sum min(|z_i|, tau)^2),
    which is unimodal in tau; minimized by golden section plus the endpoints.
    """
    if alpha < 1.0:
        raise DomainError("alpha must be at least 1")
    a = np.abs(as_vector(z))
    zmax = float(a.max())
    if zmax == 0.0:
        return 0.0

    def g(tau: float) -> float:
        clipped = np.minimum(a, tau)
        return float(np.clip(a - tau, 0.0, None).sum()
                     + alpha * math.sqrt(float((clipped * clipped).sum())))

    lo, hi = 0.0, zmax
    x1 = hi - _INV_PHI * (hi - lo)
    x2 = lo + _INV_PHI * (hi - lo)
    g1, g2 = g(x1), g(x2)
    for _ in range(120):
        if g1 <= g2:
            hi, x2, g2 = x2, x1, g1
            x1 = hi - _INV_PHI * (hi - lo)
            g1 = g(x1)
        else:
            lo, x1, g1 = x1, x2, g2
            x2 = lo + _INV_PHI * (hi - lo)
            g2 = g(x2)
    return min(g(0.0), g(zmax), g1, g2, g(0.5 * (lo + hi)))


@dataclass(frozen=True)
class IntersectionBody:
    """L = c * (B_inf^n ∩ alpha B_2^n) with its provenance constants."""
    dim: int
    c: float
    alpha: float
    beta: float
    C_v: float

    def __post_init__(self):
        if self.dim < 1:
            raise DomainError("dimension must be positive")
        if not (0.0 < self.c <= 1.0):
            raise DomainError("scale c must lie in (0, 1]")
        if self.alpha < 1.0:
            raise DomainError("radius alpha must be at least 1")
        if not (0.0 < self.beta < 1.0):
            raise DomainError("beta must lie in (0, 1)")
        if self.C_v <= 0.0:
            raise DomainError("C_v must be positive")


def h_L(body: IntersectionBody, z) -> float:
    """Support function of L; equals the gauge of the polar body."""
    return body.c * support_cube_cap(z, body.alpha)


def sample_boundary_L_polar(body: IntersectionBody, count: int, seed: int) -> np.ndarray:
    """Points on the boundary of L's polar, normalized so h_L(z) = 1.

    The raw directions mix sparse sign patterns (l1 extremes of the polar),
    uniform sphere directions (l2 extremes) and convex combinations of both.
    """
    if count < 1:
        raise DomainError("need at least one sample")
    n = body.dim
    u_fam = rng.uniform_block(seed, count, 1, channel=10).ravel()
    u_k = rng.uniform_block(seed, count, 1, channel=11).ravel()
    u_lam = rng.uniform_block(seed, count, 1, channel=12).ravel()
    signs = np.where(rng.uniform_block(seed, count, n, channel=13) < 0.5, -1.0, 1.0)
    perm_keys = rng.uniform_block(seed, count, n, channel=14)
    sphere = rng.unit_sphere(seed, count, n, channel_pair=8)

    out = np.empty((count, n))
    for i in range(count):
        support = np.argsort(perm_keys[i])[: (1 if u_k[i] < 0.5 else min(2, n))]
        sparse = np.zeros(n)
        sparse[support] = signs[i, support]
        sparse /= np.abs(sparse).sum()
        if u_fam[i] < 0.4:
            z = sparse
        elif u_fam[i] < 0.8:
            z = sphere[i]
        else:
            lam = u_lam[i]
            z = lam * sparse + (1.0 - lam) * sphere[i]
        h = h_L(body, z)
        attempt = 0
        while h == 0.0:  # zero draw has probability zero; resample
            attempt += 1
            z = rng.unit_sphere(rng.mix(seed, 1000 + i + attempt), 1, n, 9)[0]
            h = h_L(body, z)
        out[i] = z / h
    return out


def mixed_norm_kkr(y, n_rows: int) -> float:
    """max(||y||_2, sqrt(ln(eN/n)) ||y||_inf), the noise-blind sensing norm."""
    v = as_vector(y)
    if n_rows < v.size:
        raise DomainError("need N >= n")
    scale = math.sqrt(math.log(math.e * n_rows / v.size))
    return float(max(np.sqrt((v * v).sum()), scale * np.abs(v).max()))
