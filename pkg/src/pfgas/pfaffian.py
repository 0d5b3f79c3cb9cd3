"""Pfaffians of complex skew-symmetric matrices."""

from __future__ import annotations

import math

import numpy as np

from .errors import ShapeError, ValidationError
from .scaledcx import ONE, ZERO, ScaledComplex, sc_make, sc_mul

MAX_DIM = 512
NAIVE_MAX_DIM = 8


class SkewMatrix:
    """Even-dimensional complex matrix with ``M = -M^T`` enforced exactly.

    Construction checks skew-symmetry to ``tol`` relative to the largest
    entry and then replaces the input by its exact antisymmetric part.
    """

    def __init__(self, entries, tol: float = 1e-12):
        m = np.array(entries, dtype=complex)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise ShapeError(f"expected a square matrix, got shape {m.shape}")
        n = m.shape[0]
        if n == 0 or n % 2:
            raise ShapeError(f"Pfaffian needs an even positive dimension, got {n}")
        scale = np.max(np.abs(m)) if m.size else 0.0
        if np.max(np.abs(m + m.T)) > tol * max(scale, np.finfo(float).tiny):
            raise ValidationError("matrix is not skew-symmetric within tolerance")
        self.entries = 0.5 * (m - m.T)

    @property
    def dim(self) -> int:
        return self.entries.shape[0]


def _as_skew(m) -> SkewMatrix:
    return m if isinstance(m, SkewMatrix) else SkewMatrix(m)


def pfaffian(m) -> ScaledComplex:
    """Pfaffian by Parlett-Reid elimination with partial pivoting.

    The pivot product is accumulated in scaled form.  A pivot column that is
    zero to 1e-300 relative to the matrix scale gives an exact zero.
    """
    a = _as_skew(m).entries.copy()
    n = a.shape[0]
    if n > MAX_DIM:
        raise ShapeError(f"dimension {n} exceeds {MAX_DIM}")
    scale = float(np.max(np.abs(a)))
    if scale == 0.0:
        return ZERO
    result = ONE
    for k in range(0, n - 1, 2):
        col = np.abs(a[k + 1:, k])
        kp = k + 1 + int(np.argmax(col))
        if kp != k + 1:
            a[[k + 1, kp], k:] = a[[kp, k + 1], k:]
            a[k:, [k + 1, kp]] = a[k:, [kp, k + 1]]
            result = -result
        if col.max() <= 1e-300 * scale:
            return ZERO
        piv = a[k, k + 1]
        result = sc_mul(result, sc_make(piv))
        if k + 2 < n:
            tau = a[k, k + 2:] / piv
            v = a[k + 2:, k + 1]
            a[k + 2:, k + 2:] += np.outer(tau, v) - np.outer(v, tau)
    return result


def pfaffian_naive(m) -> complex:
    """Pfaffian by recursive expansion along the first row (test oracle)."""
    a = _as_skew(m).entries
    n = a.shape[0]
    if n > NAIVE_MAX_DIM:
        raise ShapeError(f"naive Pfaffian limited to dimension {NAIVE_MAX_DIM}")
    return _expand(a, tuple(range(n)))


def _expand(a: np.ndarray, idx: tuple) -> complex:
    if not idx:
        return 1.0 + 0j
    first, rest = idx[0], idx[1:]
    total = 0j
    for pos, j in enumerate(rest):
        if a[first, j] == 0:
            continue
        sign = -1.0 if pos % 2 else 1.0
        total += sign * a[first, j] * _expand(a, rest[:pos] + rest[pos + 1:])
    return total


def log_abs_pfaffian(m) -> float:
    """ln |Pf(m)|; ``-inf`` for a vanishing Pfaffian."""
    pf = pfaffian(m)
    return pf.log_abs if not pf.zero else -math.inf
