"""The random polytope K_N spanned by matrix rows: support/gauge oracles by
linear programming, quotient and inclusion checks, Monte Carlo volume and
mean-width estimators.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import rng
from .errors import DomainError, SizeError
from .linalg import as_matrix, as_vector, hs_norm, operator_norm
from .norms import IntersectionBody, mixed_norm_kkr, sample_boundary_L_polar
from .simplex import l1_min

MEMBER_TOL = 1e-9
VOLUME_MAX_DIM = 12
SANTALO_MAX_DIM = 4


@dataclass(frozen=True)
class Polytope:
    """K = absolute convex hull of the generator's rows (= Gamma* B_1^N)."""
    generator: np.ndarray

    def __post_init__(self):
        g = as_matrix(self.generator)
        if g.shape[0] < g.shape[1]:
            raise DomainError("generator must be tall: N >= n")
        object.__setattr__(self, "generator", g)

    @property
    def n(self) -> int:
        return self.generator.shape[1]

    @property
    def n_rows(self) -> int:
        return self.generator.shape[0]


@dataclass(frozen=True)
class GeometryEstimate:
    point_estimate: float
    std_error: float
    samples: int
    method: str

    def __post_init__(self):
        if self.samples < 1:
            raise DomainError("estimate needs at least one sample")
        if not (self.std_error >= 0.0 or math.isnan(self.std_error)):
            raise DomainError("std_error must be nonnegative")


def support_KN(p: Polytope, z) -> float:
    """h_K(z) = max_j |<row_j, z>| = ||Gamma z||_inf."""
    v = as_vector(z)
    if v.size != p.n:
        raise DomainError("direction dimension mismatch")
    return float(np.abs(p.generator @ v).max())


def gauge_KN(p: Polytope, y):
    """Minkowski functional of K at y with an l1 certificate.

    Solves min ||x||_1 s.t. Gamma^T x = y; infeasible iff y is outside the
    span of the rows.  Returns (value, x, status).
    """
    v = np.asarray(y, dtype=np.float64)
    if v.shape != (p.n,):
        raise DomainError("point dimension mismatch")
    if not v.any():
        return 0.0, np.zeros(p.n_rows), "optimal"
    value, x, status = l1_min(p.generator.T, v)
    return value, x, status


def member_KN(p: Polytope, y, t: float) -> bool:
    value, _, status = gauge_KN(p, y)
    if status != "optimal":
        return False
    return value <= t + MEMBER_TOL


def _kkr_directions(n: int, n_rows: int, count: int, seed: int) -> np.ndarray:
    """Directions with mixed_norm_kkr == 1: half sphere-like, half cube-vertex."""
    sphere = rng.unit_sphere(seed, count, n, channel_pair=2)
    cube = np.where(rng.uniform_block(seed, count, n, channel=6) < 0.5, -1.0, 1.0)
    pick = rng.uniform_block(seed, count, 1, channel=7).ravel() < 0.5
    raw = np.where(pick[:, None], sphere, cube)
    out = np.empty_like(raw)
    for i in range(count):
        out[i] = raw[i] / mixed_norm_kkr(raw[i], n_rows)
    return out


def quotient_check(p: Polytope, k_target: float, samples: int, seed: int) -> dict:
    """Empirical l1-quotient constant over norm-one directions.

    ratio_i = gauge(y_i) / sqrt(n / ln(eN/n)) with ||y_i|| normalized in the
    mixed sensing norm; pass iff the max ratio stays below k_target.
    """
    if samples < 1:
        raise DomainError("need at least one sample")
    n, n_rows = p.n, p.n_rows
    denom = math.sqrt(n / math.log(math.e * n_rows / n))
    ys = _kkr_directions(n, n_rows, samples, seed)
    ratios = []
    infeasible = 0
    for y in ys:
        value, _, status = gauge_KN(p, y)
        if status != "optimal":
            infeasible += 1
            continue
        ratios.append(value / denom)
    arr = np.array(ratios) if ratios else np.array([np.nan])
    report = {
        "samples": samples,
        "infeasible": infeasible,
        "max_ratio": float(arr.max()),
        "q50_ratio": float(np.percentile(arr, 50)),
        "q95_ratio": float(np.percentile(arr, 95)),
        "k_target": k_target,
        "pass": bool(infeasible == 0 and arr.max() <= k_target),
    }
    return report


def _cap_boundary_directions(n: int, alpha: float, count: int, seed: int) -> np.ndarray:
    """Points on the boundary of B_inf^n ∩ alpha B_2^n (gauge normalized)."""
    sphere = rng.unit_sphere(seed, count, n, channel_pair=4)
    cube = np.where(rng.uniform_block(seed, count, n, channel=16) < 0.5, -1.0, 1.0)
    lam = rng.uniform_block(seed, count, 1, channel=17).ravel()
    raw = lam[:, None] * cube + (1.0 - lam)[:, None] * sphere
    out = np.empty_like(raw)
    for i in range(count):
        g = max(np.abs(raw[i]).max(), float(np.sqrt((raw[i] ** 2).sum())) / alpha)
        out[i] = raw[i] / g
    return out


def inclusion_check(p: Polytope, body: IntersectionBody, samples: int, seed: int) -> dict:
    """Dual and primal evidence for K ⊇ C (B_inf ∩ alpha B_2).

    Dual: the smallest sampled support value on the polar boundary of the
    scaled body, against the 1/4 small-ball threshold.  Primal: the largest C
    such that all sampled boundary points of C (B_inf ∩ alpha B_2) belong to
    K; since membership at scale C means gauge <= 1/C, the largest C equals
    the reciprocal of the worst sampled gauge.
    """
    if samples < 1:
        raise DomainError("need at least one sample")
    if body.dim != p.n:
        raise DomainError("body dimension mismatch")
    zs = sample_boundary_L_polar(body, samples, seed)
    support_vals = np.abs(p.generator @ zs.T).max(axis=0)
    dual_min = float(support_vals.min())

    ws = _cap_boundary_directions(p.n, body.alpha, samples, rng.mix(seed, 1))
    gauges = []
    infeasible = 0
    for w in ws:
        value, _, status = gauge_KN(p, w)
        if status != "optimal":
            infeasible += 1
            continue
        gauges.append(value)
    worst = max(gauges) if gauges else float("nan")
    return {
        "samples": samples,
        "dual_min_support": dual_min,
        "dual_event": bool(dual_min < 0.25),
        "largest_C": (1.0 / worst) if worst and not math.isnan(worst) else float("nan"),
        "worst_gauge": worst,
        "infeasible": infeasible,
    }


def ball_volume(n: int) -> float:
    """Volume of the Euclidean unit ball, via log-gamma."""
    if n < 1:
        raise DomainError("dimension must be positive")
    return math.exp(0.5 * n * math.log(math.pi) - math.lgamma(0.5 * n + 1.0))


def expected_gauss_norm(n: int) -> float:
    """E ||G||_2 for a standard Gaussian vector: sqrt(2) Gamma((n+1)/2)/Gamma(n/2)."""
    return math.sqrt(2.0) * math.exp(math.lgamma(0.5 * (n + 1)) - math.lgamma(0.5 * n))


def volume_mc(p: Polytope, samples: int, seed: int) -> GeometryEstimate:
    """Monte Carlo estimate of |K|^(1/n) by rejection in the coordinate box."""
    n = p.n
    if n > VOLUME_MAX_DIM:
        raise SizeError(f"volume_mc guarded at n <= {VOLUME_MAX_DIM}")
    if samples < 1:
        raise DomainError("need at least one sample")
    b = np.abs(p.generator).max(axis=0)
    if not b.all():
        # a zero column means K is flat: volume zero
        return GeometryEstimate(0.0, 0.0, samples, "volume_mc:degenerate")
    box_log_vol = float(np.log(2.0 * b).sum())
    u = rng.uniform_block(seed, samples, n, channel=20)
    pts = (2.0 * u - 1.0) * b
    hits = 0
    for i in range(samples):
        if member_KN(p, pts[i], 1.0):
            hits += 1
    if hits == 0:
        return GeometryEstimate(0.0, float("nan"), samples, "volume_mc:no-hits")
    p_hat = hits / samples
    est = math.exp((math.log(p_hat) + box_log_vol) / n)
    sigma_p = math.sqrt(p_hat * (1.0 - p_hat) / samples)
    se = est * sigma_p / (n * p_hat)
    return GeometryEstimate(est, se, samples, "volume_mc")


def _hull_2d(points: np.ndarray) -> np.ndarray:
    """Andrew monotone chain; returns hull vertices counterclockwise."""
    pts = sorted(map(tuple, points))
    if len(pts) <= 2:
        return np.array(pts)

    def half(seq):
        out = []
        for q in seq:
            while len(out) >= 2:
                ox, oy = out[-2]
                ax, ay = out[-1]
                if (ax - ox) * (q[1] - oy) - (ay - oy) * (q[0] - ox) <= 0:
                    out.pop()
                else:
                    break
            out.append(q)
        return out

    lower = half(pts)
    upper = half(reversed(pts))
    return np.array(lower[:-1] + upper[:-1])


def volume_exact_2d(p: Polytope) -> float:
    """Exact planar area of the hull of +-rows by the shoelace formula."""
    if p.n != 2:
        raise DomainError("exact area is planar only")
    pts = np.vstack([p.generator, -p.generator])
    hull = _hull_2d(pts)
    if hull.shape[0] < 3:
        return 0.0
    x, y = hull[:, 0], hull[:, 1]
    return 0.5 * abs(float(np.dot(x, np.roll(y, -1)) - np.dot(y, np.roll(x, -1))))


def mean_width_M(p: Polytope, samples: int, seed: int) -> GeometryEstimate:
    """Half mean width M(K): Gaussian Monte Carlo of the gauge, scaled exactly."""
    if samples < 1:
        raise DomainError("need at least one sample")
    g = rng.standard_normal(seed, samples, p.n, channel_pair=6)
    vals = []
    for i in range(samples):
        value, _, status = gauge_KN(p, g[i])
        if status == "optimal":
            vals.append(value)
    if not vals:
        return GeometryEstimate(float("nan"), float("nan"), samples, "mean_width_M:degenerate")
    arr = np.array(vals)
    scale = expected_gauss_norm(p.n)
    est = float(arr.mean()) / scale
    se = float(arr.std(ddof=1)) / math.sqrt(len(vals)) / scale if len(vals) > 1 else float("nan")
    return GeometryEstimate(est, se, len(vals), "mean_width_M")


def mean_width_polar(p: Polytope, samples: int, seed: int) -> GeometryEstimate:
    """Half mean width M(K polar) = spherical average of the support function."""
    if samples < 1:
        raise DomainError("need at least one sample")
    g = rng.standard_normal(seed, samples, p.n, channel_pair=7)
    vals = np.abs(p.generator @ g.T).max(axis=0)
    scale = expected_gauss_norm(p.n)
    est = float(vals.mean()) / scale
    se = float(vals.std(ddof=1)) / math.sqrt(samples) / scale if samples > 1 else float("nan")
    return GeometryEstimate(est, se, samples, "mean_width_polar")


def polar_volume_mc(p: Polytope, samples: int, seed: int) -> GeometryEstimate:
    """|K polar|^(1/n) by rejection; membership is the cheap support test."""
    n = p.n
    if n > SANTALO_MAX_DIM:
        raise SizeError(f"polar volume guarded at n <= {SANTALO_MAX_DIM}")
    bounds = np.empty(n)
    for i in range(n):
        e = np.zeros(n)
        e[i] = 1.0
        value, _, status = gauge_KN(p, e)
        if status != "optimal" or value <= 0.0:
            raise DomainError("polar body is unbounded (rows do not span)")
        bounds[i] = value  # h_{K polar}(e_i) = gauge_K(e_i)
    box_log_vol = float(np.log(2.0 * bounds).sum())
    u = rng.uniform_block(seed, samples, n, channel=21)
    pts = (2.0 * u - 1.0) * bounds
    inside = np.abs(pts @ p.generator.T).max(axis=1) <= 1.0 + MEMBER_TOL
    hits = int(inside.sum())
    if hits == 0:
        return GeometryEstimate(0.0, float("nan"), samples, "polar_volume_mc:no-hits")
    p_hat = hits / samples
    est = math.exp((math.log(p_hat) + box_log_vol) / n)
    sigma_p = math.sqrt(p_hat * (1.0 - p_hat) / samples)
    se = est * sigma_p / (n * p_hat)
    return GeometryEstimate(est, se, samples, "polar_volume_mc")


def santalo_check(p: Polytope, samples: int, seed: int) -> dict:
    """Volume product |K||K polar| / |B_2|^2 with Monte Carlo error bars."""
    n = p.n
    if n > SANTALO_MAX_DIM:
        raise SizeError(f"santalo_check guarded at n <= {SANTALO_MAX_DIM}")
    vol = volume_mc(p, samples, seed)
    pol = polar_volume_mc(p, samples, rng.mix(seed, 1))
    bn = ball_volume(n)
    prod = (vol.point_estimate ** n) * (pol.point_estimate ** n) / (bn * bn)
    # relative errors of the n-th powers combine in quadrature
    rel = math.nan
    if vol.point_estimate > 0 and pol.point_estimate > 0:
        rel = math.sqrt((n * vol.std_error / vol.point_estimate) ** 2
                        + (n * pol.std_error / pol.point_estimate) ** 2)
    sigma = prod * rel if not math.isnan(rel) else float("nan")
    return {
        "ratio": prod,
        "sigma": sigma,
        "volume": vol.point_estimate,
        "polar_volume": pol.point_estimate,
        "samples": samples,
        "upper_santalo_ok": bool(math.isnan(sigma) or prod <= 1.0 + 3.0 * sigma),
    }


def check_conditions(g, lam: float, mu: float):
    """Row-norm, Hilbert-Schmidt and operator-norm regularity indicators.

    True means the corresponding bad event does NOT occur on this matrix,
    in order: max row norm <= lam sqrt(n); HS norm >= sqrt(Nn)/2;
    operator norm <= mu sqrt(N).
    """
    m = as_matrix(g)
    n_rows, n = m.shape
    max_row = float(np.sqrt((m * m).sum(axis=1)).max())
    row_ok = max_row <= lam * math.sqrt(n)
    hs_ok = hs_norm(m) >= math.sqrt(n_rows * n) / 2.0
    op_ok = operator_norm(m) <= mu * math.sqrt(n_rows)
    return row_ok, hs_ok, op_ok
