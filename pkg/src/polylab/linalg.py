"""Dense real linear algebra: rearrangements, Jacobi spectra, matrix I/O.

Singular values are computed from the n x n Gram matrix by cyclic Jacobi
rotations.  At desk scale (n <= 500) this is the simplest method whose
smallest eigenvalues are trustworthy after sweeping to a 1e-14 threshold.
"""

from __future__ import annotations

import struct

import numpy as np

from .errors import DomainError, NumericalError

# 16-byte magic header: the tag padded with zero bytes
BIN_MAGIC = b"PLABMAT1" + b"\x00" * 8


def as_matrix(a) -> np.ndarray:
    """Validate and return a float64 2-D array with finite entries."""
    m = np.asarray(a, dtype=np.float64)
    if m.ndim != 2 or m.size == 0:
        raise DomainError("matrix must be 2-D and non-empty")
    if not np.isfinite(m).all():
        raise DomainError("matrix entries must be finite")
    return m


def as_vector(a) -> np.ndarray:
    v = np.asarray(a, dtype=np.float64)
    if v.ndim != 1 or v.size == 0:
        raise DomainError("vector must be 1-D and non-empty")
    if not np.isfinite(v).all():
        raise DomainError("vector entries must be finite")
    return v


def decreasing_rearrangement(a) -> np.ndarray:
    """Absolute values of a, sorted in non-increasing order."""
    v = as_vector(a)
    return np.sort(np.abs(v))[::-1]


def jacobi_eigh(s: np.ndarray, rel_tol: float = 1e-14, max_sweeps: int = 100,
                vectors: bool = True):
    """Eigen-decomposition of a symmetric matrix by cyclic Jacobi rotations.

    Returns (w, V) with eigenvalues w in non-increasing order and V's columns
    the matching eigenvectors (V is None when vectors=False).  Entries below
    rel_tol * ||S||_F / n are not rotated; a sweep without rotations ends the
    iteration, which caps every residual at rel_tol * ||S||_F.
    """
    a = np.array(s, dtype=np.float64, copy=True)
    n = a.shape[0]
    if a.shape != (n, n):
        raise DomainError("jacobi_eigh needs a square matrix")
    v = np.eye(n) if vectors else None
    if n == 1:
        return a[0, 0].reshape(1), v
    total = float(np.sqrt((a * a).sum()))
    if total == 0.0:
        return np.zeros(n), v
    skip = rel_tol * total / n
    for _ in range(max_sweeps):
        rotated = False
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                if abs(apq) <= skip:
                    continue
                rotated = True
                diff = a[q, q] - a[p, p]
                if abs(diff) > 1e150 * abs(apq):  # rotation angle ~ apq/diff
                    t = apq / diff
                else:
                    theta = diff / (2.0 * apq)
                    t = (1.0 if theta >= 0 else -1.0) / (
                        abs(theta) + np.sqrt(theta * theta + 1.0))
                c = 1.0 / np.sqrt(t * t + 1.0)
                sn = t * c
                app, aqq = a[p, p], a[q, q]
                rp = a[p, :].copy()
                rq = a[q, :]
                tmp_p = c * rp - sn * rq
                tmp_q = sn * rp + c * rq
                a[p, :] = tmp_p
                a[q, :] = tmp_q
                a[:, p] = tmp_p
                a[:, q] = tmp_q
                a[p, p] = app - t * apq
                a[q, q] = aqq + t * apq
                a[p, q] = 0.0
                a[q, p] = 0.0
                if vectors:
                    vp = v[:, p].copy()
                    vq = v[:, q]
                    v[:, p] = c * vp - sn * vq
                    v[:, q] = sn * vp + c * vq
        if not rotated:
            break
    else:
        raise NumericalError("jacobi sweep cap exceeded")
    w = np.diag(a).copy()
    order = np.argsort(w)[::-1]
    return w[order], (v[:, order] if vectors else None)


def singular_values(g) -> np.ndarray:
    """Singular values of G (non-increasing), via Jacobi on the Gram matrix."""
    m = as_matrix(g)
    gram = m.T @ m if m.shape[0] >= m.shape[1] else m @ m.T
    w, _ = jacobi_eigh(gram, vectors=False)
    return np.sqrt(np.clip(w, 0.0, None))


def smallest_singular_value(g) -> float:
    return float(singular_values(g)[-1])


def operator_norm(g) -> float:
    return float(singular_values(g)[0])


def hs_norm(g) -> float:
    """Hilbert-Schmidt (Frobenius) norm."""
    m = as_matrix(g)
    return float(np.sqrt((m * m).sum()))


def save_matrix_csv(g, path) -> None:
    """One row per line, '.'-decimal, comma separated, no header."""
    m = as_matrix(g)
    np.savetxt(path, m, fmt="%.17g", delimiter=",")


def load_matrix_csv(path) -> np.ndarray:
    m = np.loadtxt(path, delimiter=",", ndmin=2)
    return as_matrix(m)


def save_matrix_bin(g, path) -> None:
    """Binary container: magic "PLABMAT1", little-endian u64 rows/cols, f64 entries."""
    m = as_matrix(g)
    with open(path, "wb") as fh:
        fh.write(BIN_MAGIC)
        fh.write(struct.pack("<QQ", m.shape[0], m.shape[1]))
        fh.write(m.astype("<f8").tobytes(order="C"))


def load_matrix_bin(path) -> np.ndarray:
    with open(path, "rb") as fh:
        magic = fh.read(16)
        if magic != BIN_MAGIC:
            raise DomainError("bad magic header, not a PLABMAT1 file")
        rows, cols = struct.unpack("<QQ", fh.read(16))
        data = np.frombuffer(fh.read(rows * cols * 8), dtype="<f8")
    if data.size != rows * cols:
        raise DomainError("truncated PLABMAT1 file")
    return as_matrix(data.reshape(rows, cols).astype(np.float64))
