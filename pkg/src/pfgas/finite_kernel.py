"""Finite-N pre-kernels, rescaled correlation functions, the
Christoffel-Darboux identity and edge diagnostics.

Notation: ``A = a_N N`` and ``B = b_N N``; ``mu = sqrt(A/2) zeta`` and
``nu = sqrt(A/2) eta``.  All sums are carried as complex logarithms and
combined with :func:`log_sum_exp`, so no intermediate ever overflows.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np
from scipy.special import gammaln

from .errors import DomainError, NumericError, ShapeError
from .model import ModelParams
from .pfaffian import SkewMatrix, pfaffian
from .scaledcx import (ScaledComplex, log_cumsum_exp, log_sum_exp, principal_log,
                       sc_add, sc_from_log, sc_make, sc_mul)

MAX_N = 400
MAX_K = 8
_LOG_SQRT_PI = 0.5 * math.log(math.pi)


@dataclass(frozen=True)
class RescaledPoint:
    """Microscopic coordinate z and its macroscopic image e^{i theta}(1 + gamma_N z)."""

    z: complex
    theta: float
    zeta: complex


def rescale(p: ModelParams, theta: float, z: complex) -> RescaledPoint:
    z = complex(z)
    return RescaledPoint(z, theta, cmath.exp(1j * theta) * (1.0 + p.gamma_n * z))


def _check(p: ModelParams, *args: complex) -> None:
    if p.n > MAX_N:
        raise ShapeError(f"N={p.n} exceeds the supported maximum {MAX_N}")
    for a in args:
        if a == 0:
            raise DomainError("pre-kernel arguments must be nonzero")


def _log_scaled(p: ModelParams, zeta: complex) -> complex:
    """Principal log of sqrt(A/2) * zeta."""
    return 0.5 * math.log(p.a_n_n / 2.0) + principal_log(zeta)


def _outer_logs(p: ModelParams, lmu: complex) -> np.ndarray:
    k = np.arange(p.n)
    return (2 * k + 1 + p.b_n_n) * lmu - gammaln(k + 1.5 + p.b_n_n / 2.0)


def _inner_logs(p: ModelParams, lnu: complex) -> np.ndarray:
    l = np.arange(p.n)
    return (2 * l + p.b_n_n) * lnu - gammaln(l + 1.0 + p.b_n_n / 2.0)


def g_hat(p: ModelParams, zeta: complex, eta: complex) -> ScaledComplex:
    """Normalized double sum G_hat_N(zeta, eta) with principal-branch powers."""
    zeta, eta = complex(zeta), complex(eta)
    _check(p, zeta, eta)
    outer = _outer_logs(p, _log_scaled(p, zeta))
    partial = log_cumsum_exp(_inner_logs(p, _log_scaled(p, eta)))
    return sc_from_log(_LOG_SQRT_PI + log_sum_exp(outer + partial).log())


def prekernel_hat(p: ModelParams, zeta: complex, eta: complex) -> ScaledComplex:
    return sc_add(g_hat(p, zeta, eta), -g_hat(p, eta, zeta))


def prekernel_tilde(p: ModelParams, zeta: complex, eta: complex) -> ScaledComplex:
    """exp(-A zeta eta) * (G_hat(zeta, eta) - G_hat(eta, zeta))."""
    zeta, eta = complex(zeta), complex(eta)
    return sc_mul(prekernel_hat(p, zeta, eta), sc_from_log(-p.a_n_n * (zeta * eta)))


# ---------------------------------------------------------------- correlations

def _block_weights(p: ModelParams, theta: float, zj: complex, zl: complex) -> tuple:
    """Exponents of the four block weights of the rescaled Pfaffian identity."""
    e2 = cmath.exp(2j * theta)
    s = math.sqrt(2.0 * p.a_n_n)
    base = abs(zj) ** 2 + abs(zl) ** 2
    w11 = -(base - 2 * e2 * zj * zl + (1 - e2) * p.a_n_n + s * (zj + zl) * (1 - e2))
    w12 = -(base - 2 * zj * zl.conjugate())
    w21 = -(base - 2 * zj.conjugate() * zl)
    e2c = e2.conjugate()
    w22 = -(base - 2 * e2c * zj.conjugate() * zl.conjugate() + (1 - e2c) * p.a_n_n
            + s * (zj.conjugate() + zl.conjugate()) * (1 - e2c))
    return w11, w12, w21, w22


def _entry(kt: ScaledComplex, logw: complex) -> complex:
    v = sc_mul(kt, sc_from_log(logw)).to_complex()
    if not (math.isfinite(v.real) and math.isfinite(v.imag)):
        raise NumericError("kernel entry overflowed after weighting", log_weight=logw)
    return v


def _pfaffian_times(matrix: np.ndarray, prefactor: complex) -> complex:
    pf = pfaffian(SkewMatrix(matrix))
    return sc_mul(pf, sc_make(prefactor)).to_complex()


def _finish(value: complex, scale: float, what: str) -> float:
    tol = 1e-8 * max(abs(value.real), scale * 1e-6)
    if abs(value.imag) > tol and abs(value.imag) > 1e-300:
        raise NumericError(f"{what} has a non-negligible imaginary part",
                           real=value.real, imag=value.imag)
    return value.real


def corr_finite(p: ModelParams, theta: float, points: Sequence[complex],
                cocycle: Callable[[complex], complex] | None = None,
                return_complex: bool = False):
    """Rescaled k-point function gamma_N^{2k} R_{N,k}(p + p gamma_N z_j).

    Builds the 2k x 2k weighted matrix of tilde-kappa values, with the
    exponential weights merged entrywise in scaled form.  ``cocycle`` is an
    optional g(zeta) multiplying every pre-kernel entry as g(x) g(y); the
    result must not depend on it.
    """
    zs = [complex(z) for z in points]
    k = len(zs)
    if not 1 <= k <= MAX_K:
        raise ShapeError(f"k must be in 1..{MAX_K}, got {k}")
    pts = [rescale(p, theta, z) for z in zs]
    if any(pt.zeta.imag == 0 for pt in pts):
        return 0j if return_complex else 0.0
    _check(p, *(pt.zeta for pt in pts))
    g = cocycle or (lambda _: 1.0)
    m = np.zeros((2 * k, 2 * k), dtype=complex)
    for j in range(k):
        for l in range(j, k):
            zj, zl = pts[j].zeta, pts[l].zeta
            w11, w12, w21, w22 = _block_weights(p, theta, zs[j], zs[l])
            pairs = [(0, 0, zj, zl, w11), (0, 1, zj, zl.conjugate(), w12),
                     (1, 0, zj.conjugate(), zl, w21), (1, 1, zj.conjugate(), zl.conjugate(), w22)]
            for a, b, x, y, w in pairs:
                r, c = 2 * j + a, 2 * l + b
                if r >= c:
                    continue
                val = _entry(prekernel_tilde(p, x, y), w) * g(x) * g(y)
                m[r, c] = val
                m[c, r] = -val
    pref = 1.0 + 0j
    for pt in pts:
        pref *= (pt.zeta.conjugate() - pt.zeta) / p.gamma_n
    value = _pfaffian_times(m, pref)
    if return_complex:
        return value
    scale = abs(pref) * float(np.max(np.abs(m))) ** k
    return _finish(value, scale, "finite correlation")


def g_unnormalized(p: ModelParams, zeta: complex, eta: complex) -> ScaledComplex:
    """G_N(zeta, eta) with integer powers only (no branch choice)."""
    zeta, eta = complex(zeta), complex(eta)
    _check(p, zeta, eta)
    outer = _outer_logs(p, _log_scaled(p, zeta)) - p.b_n_n * _log_scaled(p, zeta)
    inner = _inner_logs(p, _log_scaled(p, eta)) - p.b_n_n * _log_scaled(p, eta)
    pre = _LOG_SQRT_PI + (p.b_n_n + 1.5) * math.log(p.a_n_n / 2.0)
    return sc_from_log(pre + log_sum_exp(outer + log_cumsum_exp(inner)).log())


def corr_finite_direct(p: ModelParams, theta: float, points: Sequence[complex]) -> float:
    """Same quantity as :func:`corr_finite` from the unnormalized pre-kernel
    and the weights e^{-N Q_N/2}; independent of branches and of the
    rescaled weight algebra.
    """
    zs = [complex(z) for z in points]
    k = len(zs)
    pts = [rescale(p, theta, z).zeta for z in zs]
    if any(z.imag == 0 for z in pts):
        return 0.0

    def half_q(x: complex) -> float:
        r = abs(x)
        return -0.5 * p.a_n_n * r * r + p.b_n_n * math.log(r)

    args = []
    for z in pts:
        args.extend([z, z.conjugate()])
    m = np.zeros((2 * k, 2 * k), dtype=complex)
    for r in range(2 * k):
        for c in range(r + 1, 2 * k):
            x, y = args[r], args[c]
            kap = sc_add(g_unnormalized(p, x, y), -g_unnormalized(p, y, x))
            val = sc_mul(kap, sc_from_log(half_q(x) + half_q(y))).to_complex()
            m[r, c] = val
            m[c, r] = -val
    pref = 1.0 + 0j
    for z in pts:
        pref *= (z.conjugate() - z) * p.gamma_n ** 2
    value = _pfaffian_times(m, pref)
    return _finish(value, abs(pref) * float(np.max(np.abs(m))) ** k, "finite correlation")


# ---------------------------------------------------------------- Christoffel-Darboux

def _log_gamma_steps(base: float, count: int) -> np.ndarray:
    """ln Gamma(base + j) - ln Gamma(base) for j = 0..count-1, as cumulative logs."""
    steps = np.log(base + np.arange(count - 1, dtype=float)) if count > 1 else np.empty(0)
    return np.concatenate([[0.0], np.cumsum(steps)])


def cd_sides(p: ModelParams, theta: float, z: complex, w: complex) -> tuple[ScaledComplex, ScaledComplex]:
    """Both sides of the Christoffel-Darboux identity for tilde-kappa.

    LHS is sqrt(2/A) d/dzeta tilde-kappa from term-wise differentiation of
    the double sums.  RHS is
    2(mu - nu) tilde-kappa + 2[Q(2N+B, 2 mu nu) - Q(B, 2 mu nu)] - T3 - T4,
    with every Q difference replaced by its finite sum.

    Every term carries the common factor
    exp(B (ln mu + ln nu) - ln Gamma(c+1) - ln Gamma(c+3/2) - 2 mu nu), c = B/2,
    which is split off exactly (the Gamma(B+1) of the middle term via the
    duplication formula).  Only order-N logarithms are then compared, so the
    residual is not limited by the ulp of exponents near 10^5.
    """
    zeta = rescale(p, theta, z).zeta
    eta = rescale(p, theta, w).zeta
    _check(p, zeta, eta)
    B, N = p.b_n_n, p.n
    c = B / 2.0
    lmu, lnu = _log_scaled(p, zeta), _log_scaled(p, eta)
    mu, nu = cmath.exp(lmu), cmath.exp(lnu)
    kk = np.arange(N)
    g1 = _log_gamma_steps(c + 1.0, N)        # ln Gamma(c+1+l) - ln Gamma(c+1)
    g32 = _log_gamma_steps(c + 1.5, N)       # ln Gamma(c+3/2+k) - ln Gamma(c+3/2)
    gb = _log_gamma_steps(B + 1.0, 2 * N)    # ln Gamma(B+1+k) - ln Gamma(B+1)

    def outer(lx):
        return (2 * kk + 1) * lx - g32

    def inner(lx):
        return 2 * kk * lx - g1

    lsp = _LOG_SQRT_PI
    # reduced G_hat(zeta, eta), G_hat(eta, zeta) and their zeta-derivatives (times sqrt(2/A))
    ga = sc_from_log(lsp + log_sum_exp(outer(lmu) + log_cumsum_exp(inner(lnu))).log())
    gb_ = sc_from_log(lsp + log_sum_exp(outer(lnu) + log_cumsum_exp(inner(lmu))).log())
    khat = ga - gb_
    d1 = log_sum_exp(np.log((2 * kk + 1 + B).astype(complex)) + outer(lmu) - lmu
                     + log_cumsum_exp(inner(lnu)))
    with np.errstate(divide="ignore"):
        dl = np.log((2 * kk + B).astype(complex)) + inner(lmu) - lmu
    d2 = log_sum_exp(outer(lnu) + log_cumsum_exp(dl))
    dhat = sc_from_log(lsp + d1.log()) - sc_from_log(lsp + d2.log())
    lhs = dhat - sc_mul(sc_make(2 * nu), khat)

    t1 = sc_mul(sc_make(2 * (mu - nu)), khat)
    k2 = np.arange(2 * N)
    # B ln 2 - ln Gamma(B+1) + ln Gamma(c+1) + ln Gamma(c+3/2) = ln(c+1/2) + ln sqrt(pi)
    t2 = sc_from_log(math.log(2.0) + math.log(c + 0.5) + lsp
                     + log_sum_exp(k2 * (math.log(2.0) + lmu + lnu) - gb).log())
    t3 = sc_from_log(math.log(2.0) + lsp + 2 * N * lmu - g32[N - 1]
                     + log_sum_exp(inner(lnu)).log())
    rhs = t1 + t2 - t3
    if c > 0:
        # 1/Gamma(c) = c/Gamma(c+1); vanishes at B = 0
        t4 = sc_from_log(math.log(2.0) + lsp + math.log(c) - lmu
                         + log_sum_exp(outer(lnu)).log())
        rhs = rhs - t4
    common = sc_from_log(B * (lmu + lnu) - math.lgamma(c + 1.0) - math.lgamma(c + 1.5) - 2 * mu * nu)
    return sc_mul(lhs, common), sc_mul(rhs, common)


def cd_residual(p: ModelParams, theta: float, z: complex, w: complex, floor: float = 1e-300) -> float:
    """Relative residual |LHS - RHS| / max(|LHS|, |RHS|, floor) of the
    Christoffel-Darboux identity at microscopic points (z, w)."""
    lhs, rhs = cd_sides(p, theta, z, w)
    diff = lhs - rhs
    if diff.zero:
        return 0.0
    top = max(lhs.log_abs, rhs.log_abs, math.log(floor))
    return math.exp(diff.log_abs - top)


# ---------------------------------------------------------------- edge diagnostics

def edge_kernels(p: ModelParams, theta: float, z: complex, w: complex) -> tuple[complex, complex]:
    """(K_N(z, w), e_N(z, w)) for a base angle away from the real axis."""
    if abs(math.sin(theta)) < 1e-12:
        raise DomainError("edge kernels need sin(theta) != 0")
    z, w = complex(z), complex(w)
    A = p.a_n_n
    zeta = rescale(p, theta, z).zeta
    eta = rescale(p, theta, w).zeta
    front = math.sqrt(2 * A) * math.sin(theta) / 1j
    kn = sc_mul(prekernel_tilde(p, zeta, eta.conjugate()), sc_from_log(2 * z * w.conjugate()))
    e2 = cmath.exp(2j * theta)
    expo = (e2 - 1) * (A + math.sqrt(2 * A) * (z + w)) + 2 * e2 * z * w
    en = sc_mul(prekernel_tilde(p, zeta, eta), sc_from_log(expo))
    return front * kn.to_complex(), front * en.to_complex()
