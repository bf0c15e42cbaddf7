"""Random matrix ensembles: symmetric, unit-variance, small-ball certified.

Every built-in kind declares the pair (u, v) with u fixed at 0.5 and v the
exact concentration of one entry in a window of half-width 0.5, rounded up
to two decimals.  Sampling is counter-based (see rng), so a matrix is a pure
function of (ensemble, N, n, seed) and rows can be produced independently.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import rng
from .errors import DomainError

_KINDS = ("rademacher", "gaussian", "uniform", "sym_pareto", "sym_two_point",
          "per_row_mixture")
_MIX_SALT = 0x52AFE1DA7C0FFEE5

DECLARED_U = 0.5


@dataclass(frozen=True)
class Ensemble:
    kind: str
    params: dict = field(default_factory=dict)
    u: float = DECLARED_U
    v: float = 0.5
    norm_const: float = 1.0

    def spec(self) -> dict:
        """Config snippet this ensemble parses from."""
        out = {"kind": self.kind}
        if self.kind == "sym_pareto":
            out["alpha"] = self.params["alpha"]
        elif self.kind == "sym_two_point":
            out["p"] = self.params["p"]
        elif self.kind == "per_row_mixture":
            out["kinds"] = [k.spec() for k in self.params["kinds"]]
        return out


@dataclass(frozen=True)
class SmallBallConstants:
    u: float
    v: float
    c: float
    c_uv: float
    C_v: float
    gamma1: float
    gamma2: float


def small_ball_constants(u: float, v: float, c: float = 1.0) -> SmallBallConstants:
    """Derived constants c_uv, C_v and the gamma pair of the tall-matrix bound."""
    if not (0.0 < u < 1.0 and 0.0 < v < 1.0):
        raise DomainError("u and v must lie in (0, 1)")
    if not (0.0 < c <= 1.0):
        raise DomainError("c must lie in (0, 1]")
    c_uv = c * u * v * math.sqrt(1.0 - v)
    cv = 5.0 * math.log(2.0 / (1.0 - v))
    if v >= 0.5:
        g1 = math.sqrt(math.log(2.0))
        g2 = math.log(2.0 / (1.0 + v))
    else:
        g1 = math.sqrt(math.log(1.0 / v))
        g2 = math.log(1.0 / (2.0 * v - v * v))
    return SmallBallConstants(u, v, c, c_uv, cv, g1, g2)


def _atom_window_sup(atoms, width: float) -> float:
    """Largest total mass of a closed window of given width over point masses."""
    pos = sorted(p for p, _ in atoms)
    best = 0.0
    for lam in pos:
        mass = sum(m for p, m in atoms if lam - 1e-15 <= p <= lam + width + 1e-15)
        best = max(best, mass)
    return best


def _pareto_cdf(x: float, alpha: float) -> float:
    # symmetrized Lomax with density (alpha/2)(1+|t|)^(-alpha-1) on the line
    if x >= 0.0:
        return 1.0 - 0.5 * (1.0 + x) ** (-alpha)
    return 0.5 * (1.0 - x) ** (-alpha)


def _pareto_scale(alpha: float) -> float:
    # raw |xi| is Lomax(alpha): E|xi|^2 = 2/((alpha-1)(alpha-2)), so dividing
    # by sqrt of that makes the symmetrized entry exactly unit variance
    return 1.0 / math.sqrt(2.0 / ((alpha - 1.0) * (alpha - 2.0)))


def concentration_at(kind: str, params: dict, u: float) -> float:
    """Exact Levy concentration Q(xi, u) of the normalized entry distribution."""
    if kind == "rademacher":
        return _atom_window_sup([(-1.0, 0.5), (1.0, 0.5)], 2.0 * u)
    if kind == "sym_two_point":
        p = params["p"]
        a = 1.0 / math.sqrt(p)
        return _atom_window_sup([(-a, p / 2), (0.0, 1.0 - p), (a, p / 2)], 2.0 * u)
    if kind == "gaussian":
        return math.erf(u / math.sqrt(2.0))
    if kind == "uniform":
        return min(1.0, u / math.sqrt(3.0))
    if kind == "sym_pareto":
        alpha = params["alpha"]
        s = _pareto_scale(alpha)
        w = 2.0 * u / s  # window width on the un-normalized scale
        # the density is symmetric and strictly unimodal at 0, so the centered
        # window is optimal; a scan over positions backs this up
        best = _pareto_cdf(w / 2.0, alpha) - _pareto_cdf(-w / 2.0, alpha)
        for lam in np.linspace(-w, 0.0, 2001):
            best = max(best, _pareto_cdf(lam + w, alpha) - _pareto_cdf(lam, alpha))
        return best
    if kind == "per_row_mixture":
        return max(concentration_at(k.kind, k.params, u) for k in params["kinds"])
    raise DomainError(f"unknown ensemble kind {kind!r}")


def make_ensemble(kind: str, **params) -> Ensemble:
    """Build a unit-variance symmetric ensemble with its declared (u, v)."""
    if kind not in _KINDS:
        raise DomainError(f"unknown ensemble kind {kind!r}")
    norm = 1.0
    if kind == "sym_pareto":
        alpha = float(params.get("alpha", 3.0))
        if alpha <= 2.0:
            raise DomainError("sym_pareto needs tail index alpha > 2 for unit variance")
        params = {"alpha": alpha}
        norm = _pareto_scale(alpha)
    elif kind == "sym_two_point":
        p = float(params.get("p", 0.25))
        if not (0.0 < p <= 1.0):
            raise DomainError("sym_two_point needs p in (0, 1]")
        params = {"p": p}
        norm = 1.0 / math.sqrt(p)  # atoms at +-1/sqrt(p), variance p*(1/p) = 1
    elif kind == "uniform":
        params = {}
        norm = math.sqrt(3.0)  # raw U(-1, 1) has variance 1/3
    elif kind == "per_row_mixture":
        kinds = params.get("kinds")
        if not kinds:
            raise DomainError("per_row_mixture needs a non-empty kinds list")
        comps = []
        for k in kinds:
            if isinstance(k, Ensemble):
                comps.append(k)
            elif isinstance(k, str):
                comps.append(make_ensemble(k))
            else:
                comps.append(parse_ensemble(k))
        if any(c.kind == "per_row_mixture" for c in comps):
            raise DomainError("mixtures do not nest")
        params = {"kinds": tuple(comps)}
    else:
        params = {}
    q = concentration_at(kind, params, DECLARED_U)
    v = math.ceil(q * 100.0 - 1e-12) / 100.0
    if not (0.0 < v < 1.0):
        raise DomainError(f"declared concentration v={v} outside (0, 1)")
    return Ensemble(kind=kind, params=params, u=DECLARED_U, v=v, norm_const=norm)


def parse_ensemble(spec: dict) -> Ensemble:
    """Parse a config snippet such as {"kind": "sym_pareto", "alpha": 3.0}."""
    if not isinstance(spec, dict) or "kind" not in spec:
        raise DomainError("ensemble spec must be a dict with a 'kind' key")
    args = {k: v for k, v in spec.items() if k != "kind"}
    return make_ensemble(spec["kind"], **args)


def _fill(kind: str, params: dict, norm: float, seed: int,
          n_rows: int, n_cols: int, row_offset: int) -> np.ndarray:
    if kind == "gaussian":
        return rng.standard_normal(seed, n_rows, n_cols, 0, row_offset)
    if kind == "rademacher":
        u = rng.uniform_block(seed, n_rows, n_cols, 0, row_offset)
        return np.where(u < 0.5, -1.0, 1.0)
    if kind == "uniform":
        u = rng.uniform_block(seed, n_rows, n_cols, 0, row_offset)
        return norm * (2.0 * u - 1.0)
    if kind == "sym_pareto":
        alpha = params["alpha"]
        u1 = rng.uniform_block(seed, n_rows, n_cols, 0, row_offset)
        u2 = rng.uniform_block(seed, n_rows, n_cols, 1, row_offset)
        mag = u1 ** (-1.0 / alpha) - 1.0  # inverse CDF of the Lomax tail
        return norm * np.where(u2 < 0.5, -mag, mag)
    if kind == "sym_two_point":
        p = params["p"]
        u = rng.uniform_block(seed, n_rows, n_cols, 0, row_offset)
        out = np.zeros((n_rows, n_cols))
        out[u >= 1.0 - p / 2] = norm
        out[(u >= 1.0 - p) & (u < 1.0 - p / 2)] = -norm
        return out
    raise DomainError(f"cannot sample kind {kind!r}")


def mixture_row_kinds(e: Ensemble, n_rows: int, seed: int) -> np.ndarray:
    """Deterministic per-row component index of a mixture ensemble."""
    k = len(e.params["kinds"])
    base = rng.splitmix64(seed ^ _MIX_SALT)
    return np.array([rng.mix(base, i) % k for i in range(n_rows)], dtype=int)


def sample_matrix(e: Ensemble, n_rows: int, n_cols: int, seed: int) -> np.ndarray:
    """Draw the N x n matrix; identical arguments give identical bits."""
    if n_cols < 1 or n_rows < n_cols:
        raise DomainError("need N >= n >= 1")
    if e.kind != "per_row_mixture":
        return _fill(e.kind, e.params, e.norm_const, seed, n_rows, n_cols, 0)
    out = np.empty((n_rows, n_cols))
    idx = mixture_row_kinds(e, n_rows, seed)
    for ci, comp in enumerate(e.params["kinds"]):
        rows = np.nonzero(idx == ci)[0]
        for i in rows:
            out[i] = _fill(comp.kind, comp.params, comp.norm_const, seed,
                           1, n_cols, int(i))
    return out


def sample_entries(e: Ensemble, count: int, seed: int) -> np.ndarray:
    """1-D sample of the entry distribution (a single tall column)."""
    return sample_matrix(e, count, 1, seed).ravel()


def concentration_fn(samples, t: float) -> float:
    """Empirical Levy concentration: max window mass at half-width t.

    The sweep anchors windows at sample points, which is exact for the
    empirical measure: any optimal window can be slid left onto a sample.
    """
    x = np.sort(np.asarray(samples, dtype=np.float64))
    if x.ndim != 1 or x.size < 2:
        raise DomainError("need at least two samples")
    if not np.isfinite(x).all():
        raise DomainError("samples must be finite")
    if t <= 0.0:
        raise DomainError("window half-width t must be positive")
    hi = np.searchsorted(x, x + 2.0 * t, side="right")
    counts = hi - np.arange(x.size)
    return float(counts.max()) / x.size
