"""Deterministic covering constructions: the cardinality function F, cube
covers of the Euclidean ball, sparse sphere covers, the dyadic diagonal
family with its determinant-bounded subfamily, a realizable diagonal
surrogate, and net bundles with randomized validation.

All cardinalities are tracked in log space; bounds involving exp(delta N)
are compared as logs.
"""

from __future__ import annotations

import json
import math
import os
from dataclasses import dataclass
from itertools import combinations

import numpy as np

from . import rng
from .errors import DomainError, SizeError
from .linalg import as_matrix
from .norms import IntersectionBody, h_L, sample_boundary_L_polar

_LN2 = math.log(2.0)
COVER_LOG_GUARD = 24.0
DEFAULT_CELL_CAP = 2_000_000


@dataclass(frozen=True)
class LogCount:
    """A cardinality kept in log form, with the float value when it fits."""
    log_value: float

    @property
    def value(self) -> float:
        return math.exp(self.log_value) if self.log_value < 709.0 else math.inf


def cardinality_F(delta: float, n: int, n_rows: int) -> LogCount:
    """The two-branch net-cardinality function F(delta, n, N)."""
    if not (0.0 <= delta <= 1.0):
        raise DomainError("delta must lie in [0, 1]")
    if not (1 <= n <= n_rows):
        raise DomainError("need 1 <= n <= N")
    if delta == 0.0:
        return LogCount(0.0)
    if delta >= n / (2.0 * n_rows):
        return LogCount(n * math.log(32.0 * delta * n_rows / n))
    return LogCount(4.0 * delta * n_rows * math.log(math.e * n / (delta * n_rows)))


# ---------------------------------------------------------------------------
# covers of the euclidean ball by sup-norm boxes


def _grid_cover_ball(m: int, eps: float, cap: int):
    """Side-2eps grid cover of B_2^m with representatives inside the ball.

    Cells whose center lies in the ball use the center; boundary cells are
    split into 2^m half-cells whose minimum-norm corner point serves instead,
    so every point of the ball is within eps (sup-norm) of a representative.
    """
    kmax = int(math.floor((1.0 + eps) / (2.0 * eps))) + 1
    reps = {}
    cells = [0]

    def region_nonempty(ks) -> bool:
        # region is half-open toward the origin on every nonzero index
        lo = np.array([2.0 * eps * k - eps for k in ks])
        hi = lo + 2.0 * eps
        p = np.clip(0.0, lo, hi)
        nsq = float((p * p).sum())
        if nsq > 1.0 + 1e-12:
            return False
        if nsq < 1.0 - 1e-12:
            return True
        return all(k == 0 for k in ks)

    def add_rep(point) -> None:
        reps[tuple(float(x) for x in point)] = None

    def visit(ks) -> None:
        cells[0] += 1
        if cells[0] > cap:
            raise SizeError("cell enumeration cap exceeded")
        g = np.array([2.0 * eps * k for k in ks])
        if float((g * g).sum()) <= 1.0:
            add_rep(g)
            return
        lo0 = g - eps
        for corner in range(1 << m):
            lo = lo0 + eps * np.array([(corner >> j) & 1 for j in range(m)])
            hi = lo + eps
            q = np.clip(0.0, lo, hi)
            if float((q * q).sum()) <= 1.0:
                add_rep(q)

    def rec(coord, partial, ks) -> None:
        if partial > 1.0 + 1e-12:
            return
        if coord == m:
            if region_nonempty(ks):
                visit(ks)
            return
        for k in range(-kmax, kmax + 1):
            lo = 2.0 * eps * k - eps
            hi = lo + 2.0 * eps
            d = 0.0 if lo <= 0.0 <= hi else min(abs(lo), abs(hi))
            rec(coord + 1, partial + d * d, ks + (k,))

    rec(0, 0.0, ())
    return np.array(list(reps.keys()))


def cover_ball_inf(m: int, eps: float, cap: int = DEFAULT_CELL_CAP) -> np.ndarray:
    """eps-net of B_2^m with respect to the sup-norm ball.

    Dense grid for eps <= 1/sqrt(m); for larger eps the sparse-support
    construction: cover every coordinate sphere of dimension floor(1/eps^2).
    """
    if m < 1:
        raise DomainError("dimension must be positive")
    if not (0.0 < eps <= 1.0):
        raise DomainError("eps must lie in (0, 1]")
    log_bound = cover_ball_log_bound(m, eps)
    if log_bound > COVER_LOG_GUARD:
        raise SizeError("stated covering bound exceeds the feasibility guard")
    if eps <= 1.0 / math.sqrt(m) + 1e-15:
        return _grid_cover_ball(m, eps, cap)
    s = max(1, int(math.floor(1.0 / (eps * eps))))
    sub = _grid_cover_ball(s, eps, cap)
    reps = {}
    for support in combinations(range(m), s):
        for p in sub:
            v = np.zeros(m)
            v[list(support)] = p
            reps[tuple(v)] = None
            if len(reps) > cap:
                raise SizeError("cover size cap exceeded")
    return np.array(list(reps.keys()))


def cover_ball_log_bound(m: int, eps: float) -> float:
    """Log of the stated covering bound for N(B_2^m, eps B_inf^m)."""
    if eps <= 1.0 / math.sqrt(m) + 1e-15:
        return m * math.log(7.0 / (eps * math.sqrt(m)))
    return (1.0 / (eps * eps)) * math.log(17.0 * eps * eps * m)


def _sphere_net(k: int, eps: float, cap: int) -> np.ndarray:
    """eps-net (euclidean) of S^(k-1): fine cover pruned to eps/2 separation."""
    if k == 1:
        return np.array([[1.0], [-1.0]])
    fine = _grid_cover_ball(k, eps / (4.0 * math.sqrt(k)), cap)
    norms = np.sqrt((fine * fine).sum(axis=1))
    keep = norms > 0.25
    cand = fine[keep] / norms[keep][:, None]
    kept = []
    for c in cand:
        ok = True
        for q in kept:
            d = c - q
            if float((d * d).sum()) < (eps / 2.0) ** 2:
                ok = False
                break
        if ok:
            kept.append(c)
    return np.array(kept)


def cover_sparse_sphere(m: int, k: int, eps: float, cap: int = DEFAULT_CELL_CAP) -> np.ndarray:
    """Union over all k-element supports of eps-nets of the support sphere.

    Every unit vector with support size k has a net point in the same support
    within eps in euclidean norm.
    """
    if not (1 <= k <= m):
        raise DomainError("need 1 <= k <= m")
    if not (0.0 < eps < 1.0):
        raise DomainError("eps must lie in (0, 1)")
    log_bound = k * math.log(3.0 / eps) + k * math.log(math.e * m / k)
    if log_bound > COVER_LOG_GUARD:
        raise SizeError("stated covering bound exceeds the feasibility guard")
    base = _sphere_net(k, eps, cap)
    out = []
    for support in combinations(range(m), k):
        block = np.zeros((base.shape[0], m))
        block[:, list(support)] = base
        out.append(block)
        if sum(b.shape[0] for b in out) > cap:
            raise SizeError("cover size cap exceeded")
    return np.vstack(out)


# ---------------------------------------------------------------------------
# dyadic diagonals


@dataclass(frozen=True)
class DyadicDiagonal:
    """Diagonal with entries in {1} ∪ {2^(-2^k)}, stored as exponent codes.

    Code 0 decodes to 1; code k+1 decodes to 2^(-2^k).
    """
    codes: tuple

    def __post_init__(self):
        if not self.codes or any(c < 0 for c in self.codes):
            raise DomainError("codes must be a non-empty tuple of nonnegative ints")

    @staticmethod
    def decode(code: int) -> float:
        return 1.0 if code == 0 else 2.0 ** (-(2.0 ** (code - 1)))

    def values(self) -> np.ndarray:
        return np.array([self.decode(c) for c in self.codes])

    def neg_log_det(self) -> float:
        return sum((2.0 ** (c - 1)) * _LN2 for c in self.codes if c > 0)

    def det(self) -> float:
        return math.exp(-self.neg_log_det())


def enumerate_Q(delta: float, n: int, n_rows: int, cap: int = 2_000_000):
    """All dyadic diagonals with det >= exp(-delta N), i.e. the family Q.

    The weight of code c >= 1 is 2^(c-1) units of ln 2, so the budget is
    floor(delta N / ln 2) in integer units.
    """
    if not (0.0 < delta <= 1.0):
        raise DomainError("delta must lie in (0, 1]")
    if n < 1 or n_rows < n:
        raise DomainError("need 1 <= n <= N")
    budget = int(math.floor(delta * n_rows / _LN2 + 1e-12))
    out = []

    def rec(prefix, left):
        if len(prefix) == n:
            out.append(DyadicDiagonal(tuple(prefix)))
            if len(out) > cap:
                raise SizeError("diagonal enumeration cap exceeded")
            return
        rec(prefix + [0], left)
        c = 1
        while (1 << (c - 1)) <= left:
            rec(prefix + [c], left - (1 << (c - 1)))
            c += 1

    rec([], budget)
    return out


def compute_D_gamma(g, delta: float, c0: float = 1.0) -> DyadicDiagonal:
    """Realized diagonal: per column, the largest dyadic value that tames the
    column maximum to c0/sqrt(delta).

    Depends only on entry magnitudes; every row of G D then has euclidean
    norm at most c0 sqrt(n/delta), deterministically.
    """
    m = as_matrix(g)
    if not (0.0 < delta <= 1.0):
        raise DomainError("delta must lie in (0, 1]")
    thr = c0 / math.sqrt(delta)
    codes = []
    for j in range(m.shape[1]):
        top = float(np.abs(m[:, j]).max())
        if top <= thr:
            codes.append(0)
            continue
        k = 0
        while DyadicDiagonal.decode(k + 1) * top > thr:
            k += 1
        codes.append(k + 1)
    return DyadicDiagonal(tuple(codes))


# ---------------------------------------------------------------------------
# net bundles


@dataclass(frozen=True)
class TSpec:
    """Covered set: unit sphere, unit ball, or the polar boundary of a body."""
    kind: str  # sphere | ball | boundary_L_polar
    dim: int
    body: IntersectionBody | None = None

    def __post_init__(self):
        if self.kind not in ("sphere", "ball", "boundary_L_polar"):
            raise DomainError(f"unknown T spec {self.kind!r}")
        if self.kind == "boundary_L_polar" and self.body is None:
            raise DomainError("boundary_L_polar needs a body")

    def gauge(self, z: np.ndarray) -> float:
        if self.kind == "boundary_L_polar":
            return h_L(self.body, z)
        return float(np.sqrt((z * z).sum()))

    def gauge_lower_scale(self) -> float:
        # gauge(z) >= scale * ||z||_2 for coordinate pruning
        return self.body.c if self.kind == "boundary_L_polar" else 1.0

    def is_boundary(self) -> bool:
        return self.kind != "ball"

    def sample(self, count: int, seed: int) -> np.ndarray:
        if self.kind == "boundary_L_polar":
            return sample_boundary_L_polar(self.body, count, seed)
        pts = rng.unit_sphere(seed, count, self.dim, channel_pair=12)
        if self.kind == "ball":
            u = rng.uniform_block(seed, count, 1, channel=26).ravel()
            pts = pts * (u ** (1.0 / self.dim))[:, None]
        return pts


@dataclass
class NetBundle:
    points: np.ndarray                 # net points, one per row
    boxes: list                        # (center, DyadicDiagonal, eps) triples
    params: dict
    log_cardinality_bound: float
    m_cover_log: float                 # log of the plain sup-norm cover count

    def save(self, directory: str) -> None:
        os.makedirs(directory, exist_ok=True)
        meta = dict(self.params)
        meta["log_cardinality_bound"] = self.log_cardinality_bound
        meta["m_cover_log"] = self.m_cover_log
        meta["n_points"] = int(self.points.shape[0])
        meta["n_boxes"] = len(self.boxes)
        with open(os.path.join(directory, "meta.json"), "w") as fh:
            json.dump(meta, fh, indent=2, sort_keys=True)
        np.savetxt(os.path.join(directory, "points.csv"), self.points,
                   fmt="%.17g", delimiter=",")
        n = self.points.shape[1] if self.points.size else self.params["n"]
        rows = []
        for center, diag, eps in self.boxes:
            rows.append(list(center) + list(diag.codes) + [eps])
        np.savetxt(os.path.join(directory, "boxes.csv"),
                   np.array(rows).reshape(-1, 2 * n + 1),
                   fmt="%.17g", delimiter=",")

    @staticmethod
    def load(directory: str) -> "NetBundle":
        with open(os.path.join(directory, "meta.json")) as fh:
            meta = json.load(fh)
        points = np.loadtxt(os.path.join(directory, "points.csv"),
                            delimiter=",", ndmin=2)
        n = meta["n"]
        raw = np.loadtxt(os.path.join(directory, "boxes.csv"),
                         delimiter=",", ndmin=2)
        boxes = []
        for row in raw:
            center = row[:n]
            codes = tuple(int(c) for c in row[n:2 * n])
            boxes.append((center, DyadicDiagonal(codes), float(row[2 * n])))
        log_bound = meta.pop("log_cardinality_bound")
        m_log = meta.pop("m_cover_log")
        meta.pop("n_points", None)
        meta.pop("n_boxes", None)
        return NetBundle(points, boxes, meta, log_bound, m_log)


def _aniso_cover(tspec: TSpec, sides: np.ndarray, cap: int) -> np.ndarray:
    """Cover T with axis boxes of the given full side lengths; reps lie in T.

    Tiles [k s, (k+1) s) per coordinate; a tile is kept when T meets its
    closure, witnessed through the monotone gauge: the coordinatewise closest
    point to the origin has gauge <= 1 and (for boundary sets) the farthest
    corner has gauge >= 1.  Boundary representatives are located by bisection
    along the segment between those two points.
    """
    n = tspec.dim
    scale = tspec.gauge_lower_scale()
    r_out = 1.0 / scale
    counts = [0]
    reps = []

    def rep_for(lo, hi):
        p_min = np.clip(0.0, lo, hi)
        g_min = tspec.gauge(p_min)
        if g_min > 1.0 + 1e-12:
            return None
        corner = np.where(np.abs(lo) >= np.abs(hi), lo, hi)
        if not tspec.is_boundary():
            return p_min
        g_max = tspec.gauge(corner)
        if g_max < 1.0 - 1e-12:
            return None
        a, b = 0.0, 1.0
        for _ in range(70):
            mid = 0.5 * (a + b)
            pt = p_min + mid * (corner - p_min)
            if tspec.gauge(pt) <= 1.0:
                a = mid
            else:
                b = mid
        pt = p_min + a * (corner - p_min)
        if tspec.kind == "sphere":
            norm = float(np.sqrt((pt * pt).sum()))
            if norm > 0:
                pt = pt / norm
        return pt

    def rec(coord, partial, lo_acc):
        if math.sqrt(partial) * scale > 1.0 + 1e-12:
            return
        if coord == n:
            counts[0] += 1
            if counts[0] > cap:
                raise SizeError("anisotropic cover cap exceeded")
            lo = np.array(lo_acc)
            hi = lo + sides
            r = rep_for(lo, hi)
            if r is not None:
                reps.append(r)
            return
        s = sides[coord]
        kmax = int(math.floor(r_out / s)) + 1
        for k in range(-kmax - 1, kmax + 1):
            lo = k * s
            hi = lo + s
            d = 0.0 if lo <= 0.0 <= hi else min(abs(lo), abs(hi))
            rec(coord + 1, partial + d * d, lo_acc + (lo,))

    rec(0, 0.0, ())
    if not reps:
        return np.zeros((0, n))
    return np.array(reps)


def build_net(tspec: TSpec, eps: float, delta: float, k: int, n: int, n_rows: int,
              mode: str, matrix=None, c0: float = 1.0,
              cap: int = DEFAULT_CELL_CAP) -> NetBundle:
    """Assemble the net/box bundle for T.

    exhaustive mode materializes a net for every determinant-bounded dyadic
    diagonal; realized mode uses the single diagonal computed from a concrete
    matrix, which is the object the approximation argument actually applies.
    """
    if mode not in ("exhaustive", "realized"):
        raise DomainError("mode must be exhaustive or realized")
    if not (0.0 < eps <= 1.0):
        raise DomainError("eps must lie in (0, 1]")
    if tspec.dim != n:
        raise DomainError("T dimension mismatch")
    if not (1 <= k <= n_rows):
        raise DomainError("need 1 <= k <= N")

    m_cover = _aniso_cover(tspec, np.full(n, eps), cap)
    m_log = math.log(max(1, m_cover.shape[0]))
    log_f = cardinality_F(delta, n, n_rows).log_value
    log_bound = m_log + log_f + delta * n_rows

    if mode == "exhaustive":
        diags = enumerate_Q(delta, n, n_rows, cap)
    else:
        if matrix is None:
            raise DomainError("realized mode needs a matrix")
        diags = [compute_D_gamma(matrix, delta, c0)]

    points = []
    boxes = []
    for diag in diags:
        sides = eps * diag.values()
        net_d = _aniso_cover(tspec, sides, cap)
        for row in net_d:
            points.append(row)
            boxes.append((row.copy(), diag, eps))
        if len(points) > cap:
            raise SizeError("net size cap exceeded")
    pts = np.array(points) if points else np.zeros((0, n))
    params = {
        "t_kind": tspec.kind,
        "eps": eps,
        "delta": delta,
        "k": k,
        "n": n,
        "N": n_rows,
        "mode": mode,
        "c0": c0,
        "diag_count": len(diags),
        "realized_neg_log_det": diags[0].neg_log_det() if mode == "realized" else None,
    }
    return NetBundle(pts, boxes, params, log_bound, m_log)


def validate_net(g, bundle: NetBundle, k: int, radius: float, trials: int,
                 seed: int) -> dict:
    """Sample T and measure nearest-net residuals in the image top-k norm."""
    m = as_matrix(g)
    n_rows, n = m.shape
    if bundle.params["n"] != n or bundle.params["N"] != n_rows:
        raise DomainError("bundle built for different dimensions")
    tspec = TSpec(bundle.params["t_kind"], n)
    if bundle.params["t_kind"] == "boundary_L_polar":
        raise DomainError("re-attach the body via TSpec to validate this bundle")
    pts = bundle.points
    if pts.shape[0] == 0:
        raise DomainError("empty net")
    images = pts @ m.T
    xs = tspec.sample(trials, seed)
    residuals = np.empty(trials)
    for i in range(trials):
        diff = images - (m @ xs[i])[None, :]
        if k == n_rows:
            dist = np.sqrt((diff * diff).sum(axis=1))
        else:
            mags = np.abs(diff)
            part = np.partition(mags, n_rows - k, axis=1)[:, n_rows - k:]
            dist = np.sqrt((part * part).sum(axis=1))
        residuals[i] = dist.min()
    return {
        "trials": trials,
        "radius": radius,
        "max_residual": float(residuals.max()),
        "mean_residual": float(residuals.mean()),
        "pass_fraction": float((residuals <= radius).mean()),
    }
