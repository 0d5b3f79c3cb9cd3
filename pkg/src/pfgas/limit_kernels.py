"""Limiting kernels and correlation functions in the thin-annulus scaling.

Two regimes appear as N grows: away from the real axis the correlations are
determinantal with kernel ``K^C``; near it they stay Pfaffian with the skew
pre-kernel ``kappa^R``.  The module also carries the wide-annulus limit
``kappa^W``, the chiral sine kernel for the thin-annulus limit and a few
reference kernels.

Every weighted quantity such as ``exp(-|z|^2 - |w|^2) kappa^R(z, w)`` is
evaluated with the Gaussian factors merged into ``log erfc`` exponents, so
points with imaginary part near 10 cause no overflow.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np
from scipy.integrate import quad_vec

from .errors import DomainError, NumericError, RegionError, ShapeError
from .pfaffian import SkewMatrix, pfaffian
from .scaledcx import sc_make, sc_mul
from .special import erfc_c, log_erfc

KC_REGION = 6.0
KAPPA_REGION = 20.0
QUAD_TOL = 1e-12
ROUTES = ("wronskian", "boundary")
_SQRT2 = math.sqrt(2.0)
_SQRT_PI = math.sqrt(math.pi)


@dataclass(frozen=True)
class BulkParams:
    """Annulus width parameter rho, its half-width ``a = rho / (2 sqrt 2)`` and
    the vertical offset t used near the real axis."""

    rho: float
    a: float
    t: float = 0.0


def bulk_params(rho: float, t: float = 0.0) -> BulkParams:
    rho = float(rho)
    if not (rho > 0 and math.isfinite(rho)):
        raise DomainError(f"rho must be positive, got {rho}")
    if not math.isfinite(t):
        raise DomainError("t must be finite")
    return BulkParams(rho, rho / (2.0 * _SQRT2), float(t))


def _region(limit: float, *pts: complex) -> None:
    for z in pts:
        if abs(z) > limit:
            raise RegionError(f"|{z}| exceeds the supported radius {limit}")


def _quad(f, lo: float, hi: float) -> complex:
    val, err = quad_vec(f, lo, hi, epsabs=1e-300, epsrel=QUAD_TOL, limit=2000)
    val = complex(val)
    if not math.isfinite(abs(val)) or err > 1e-8 * max(abs(val), 1e-300) + 1e-14:
        raise NumericError("quadrature did not converge", value=val, error=err)
    return val


def f_profile(z: complex, u: float) -> complex:
    """1/2 erfc(sqrt 2 (z - u))."""
    return 0.5 * erfc_c(_SQRT2 * (complex(z) - u))


# ---------------------------------------------------------------- K^C

def _kc_weighted(bp: BulkParams, z: complex, w: complex, expo: complex) -> complex:
    s = z + w.conjugate()
    e = expo + 2 * z * w.conjugate()
    lo = np.exp(e + log_erfc(s - 2 * bp.a))
    hi = np.exp(e + log_erfc(s + 2 * bp.a))
    return complex(0.5 * (lo - hi))


def k_c(bp: BulkParams, z: complex, w: complex) -> complex:
    """K^C(z, w) = e^{2 z conj(w)}/2 (erfc(z + conj(w) - 2a) - erfc(z + conj(w) + 2a))."""
    z, w = complex(z), complex(w)
    _region(KC_REGION, z, w)
    return _kc_weighted(bp, z, w, 0j)


def k_c_weighted(bp: BulkParams, z: complex, w: complex) -> complex:
    """exp(-|z|^2 - |w|^2) K^C(z, w)."""
    z, w = complex(z), complex(w)
    _region(KC_REGION, z, w)
    return _kc_weighted(bp, z, w, -abs(z) ** 2 - abs(w) ** 2)


# ---------------------------------------------------------------- kappa^R

def _wronskian_integrand(z: complex, w: complex, expo: complex):
    """sqrt(pi) W(f_w, f_z)(u) times e^{expo}, with Gaussians merged into logs."""

    def f(u):
        a = np.exp(expo - 2 * (z - u) ** 2 + log_erfc(_SQRT2 * (w - u)))
        b = np.exp(expo - 2 * (w - u) ** 2 + log_erfc(_SQRT2 * (z - u)))
        return (a - b) / _SQRT2

    return f


def _boundary_terms(bp: BulkParams, z: complex, w: complex, expo: complex) -> complex:
    """e^{expo} F_2(z, w), the closed erfc-product part."""
    a = bp.a
    plus = expo + log_erfc(_SQRT2 * (z + a)) + log_erfc(_SQRT2 * (w - a))
    minus = expo + log_erfc(_SQRT2 * (z - a)) + log_erfc(_SQRT2 * (w + a))
    return _SQRT_PI / 4.0 * complex(np.exp(plus) - np.exp(minus))


def _f1_derivative(bp: BulkParams, w: complex, expo: complex):
    """s -> e^{expo} dF_1(s, w)/ds in closed form (vectorized in s)."""
    a = bp.a
    la = log_erfc(_SQRT2 * (w - a))
    lb = log_erfc(_SQRT2 * (w + a))

    def f(s):
        s = np.asarray(s, dtype=complex)
        g = expo - (s - w) ** 2
        out = np.exp(g + log_erfc(s + w - 2 * a)) - np.exp(g + log_erfc(s + w + 2 * a))
        out -= (np.exp(expo - 2 * (s - a) ** 2 + la) - np.exp(expo - 2 * (s + a) ** 2 + lb)) / _SQRT2
        return out

    return f


def _kappa_scaled(bp: BulkParams, z: complex, w: complex, expo: complex, route: str) -> complex:
    """e^{expo} (F_1 + F_2)(z, w); with expo = z^2 + w^2 this is kappa^R."""
    if route not in ROUTES:
        raise DomainError(f"route must be one of {ROUTES}, got {route!r}")
    if z == w:
        return 0j
    if route == "wronskian":
        f1 = _quad(_wronskian_integrand(z, w, expo), -bp.a, bp.a)
    else:
        # F_1(w, w) = 0, so F_1(z, w) is the integral of its z-derivative from w to z
        d = _f1_derivative(bp, w, expo)
        f1 = _quad(lambda s: d(w + s * (z - w)) * (z - w), 0.0, 1.0)
    return f1 + _boundary_terms(bp, z, w, expo)


def kappa_r(bp: BulkParams, z: complex, w: complex, route: str = "wronskian") -> complex:
    """Skew pre-kernel kappa^R(z, w) (no t-offset applied)."""
    z, w = complex(z), complex(w)
    _region(KAPPA_REGION, z, w)
    return _kappa_scaled(bp, z, w, z * z + w * w, route)


def kappa_r_weighted(bp: BulkParams, z: complex, w: complex, route: str = "wronskian") -> complex:
    """exp(-|z|^2 - |w|^2) kappa^R(z, w)."""
    z, w = complex(z), complex(w)
    _region(KAPPA_REGION, z, w)
    return _kappa_scaled(bp, z, w, z * z + w * w - abs(z) ** 2 - abs(w) ** 2, route)


def kappa_w(z: complex, w: complex) -> complex:
    """Wide-annulus pre-kernel: sqrt(pi) e^{z^2+w^2} times the Wronskian over R."""
    z, w = complex(z), complex(w)
    _region(KAPPA_REGION, z, w)
    if z == w:
        return 0j
    cut = max(abs(z.real), abs(w.real)) + 7.0
    return _quad(_wronskian_integrand(z, w, z * z + w * w), -cut, cut)


# ---------------------------------------------------------------- correlations

def _finish(value: complex, scale: float, what: str) -> float:
    if abs(value.imag) > 1e-8 * max(abs(value.real), 1e-6 * scale) and abs(value.imag) > 1e-300:
        raise NumericError(f"{what} has a non-negligible imaginary part",
                           real=value.real, imag=value.imag)
    return value.real


def corr_limit_c(bp: BulkParams, points: Sequence[complex]) -> float:
    """det[exp(-|z_j|^2 - |z_l|^2) K^C(z_j, z_l)]."""
    zs = [complex(z) for z in points]
    if not 1 <= len(zs) <= 8:
        raise ShapeError(f"k must be in 1..8, got {len(zs)}")
    m = np.array([[k_c_weighted(bp, x, y) for y in zs] for x in zs])
    value = complex(np.linalg.det(m))
    return _finish(value, float(np.max(np.abs(m))) ** len(zs), "determinantal correlation")


def _pf_matrix(kernel, zs: Sequence[complex]) -> np.ndarray:
    args = []
    for z in zs:
        args.extend([z, z.conjugate()])
    n = len(args)
    m = np.zeros((n, n), dtype=complex)
    for r in range(n):
        for c in range(r + 1, n):
            v = kernel(args[r], args[c])
            m[r, c] = v
            m[c, r] = -v
    return m


def corr_limit_r(bp: BulkParams, points: Sequence[complex], route: str = "wronskian") -> float:
    """Pfaffian k-point function at z_j + i t, times prod (conj(z_j) - z_j)."""
    zs = [complex(z) + 1j * bp.t for z in points]
    if not 1 <= len(zs) <= 6:
        raise ShapeError(f"k must be in 1..6, got {len(zs)}")
    if any(z.imag == 0 for z in zs):
        return 0.0
    m = _pf_matrix(lambda x, y: kappa_r_weighted(bp, x, y, route), zs)
    pref = 1.0 + 0j
    for z in zs:
        pref *= z.conjugate() - z
    value = sc_mul(pfaffian(SkewMatrix(m)), sc_make(pref)).to_complex()
    return _finish(value, abs(pref) * float(np.max(np.abs(m))) ** len(zs), "Pfaffian correlation")


def corr_limit_w(points: Sequence[complex]) -> float:
    """Pfaffian k-point function built from kappa^W."""
    zs = [complex(z) for z in points]
    if any(z.imag == 0 for z in zs):
        return 0.0
    m = _pf_matrix(lambda x, y: kappa_w(x, y) * math.exp(-abs(x) ** 2 - abs(y) ** 2), zs)
    pref = 1.0 + 0j
    for z in zs:
        pref *= z.conjugate() - z
    value = sc_mul(pfaffian(SkewMatrix(m)), sc_make(pref)).to_complex()
    return _finish(value, abs(pref) * float(np.max(np.abs(m))) ** len(zs), "Pfaffian correlation")


# ---------------------------------------------------------------- reference kernels

def reference_kernel(name: str, x, y) -> complex:
    """Chiral sine, sine and exponential (Ginibre) kernels."""
    if name == "chiral":
        x, y = float(x), float(y)
        # sin(4d)/(2d) = 2 sinc(4d/pi); numpy's sinc is exact at 0 and cancellation free nearby
        return 2.0 * float(np.sinc(4 * (x - y) / math.pi) - np.sinc(4 * (x + y) / math.pi))
    if name == "sine":
        return float(np.sinc(float(x) - float(y)))
    if name == "exp":
        x, y = complex(x), complex(y)
        return cmath.exp(x * y.conjugate() - (abs(x) ** 2 + abs(y) ** 2) / 2)
    raise DomainError(f"unknown reference kernel {name!r}")


# ---------------------------------------------------------------- diagnostics

def kappa_tilde(bp: BulkParams, z: complex, w: complex, route: str = "wronskian") -> complex:
    """e^{-2 z_t w_t} kappa^R(z_t, w_t) with z_t = z + i t."""
    zt, wt = complex(z) + 1j * bp.t, complex(w) + 1j * bp.t
    _region(KAPPA_REGION, zt, wt)
    return _kappa_scaled(bp, zt, wt, (zt - wt) ** 2, route)


def holomorphic_derivative(f, z: complex, radius: float = 0.25, nodes: int = 32) -> complex:
    """f'(z) by the trapezoid rule on a circle (Cauchy's formula)."""
    phis = 2 * np.pi * np.arange(nodes) / nodes
    circ = np.exp(1j * phis)
    vals = np.array([f(z + radius * c) for c in circ])
    return complex(np.sum(vals / circ) / (nodes * radius))


def ode_rhs(bp: BulkParams, z: complex, w: complex, value: complex) -> complex:
    """Right-hand side of the first-order ODE in z satisfied by kappa_tilde."""
    zt, wt = complex(z) + 1j * bp.t, complex(w) + 1j * bp.t
    r = bp.rho
    c = erfc_c(zt + wt - r / _SQRT2) - erfc_c(zt + wt + r / _SQRT2)
    gauss = cmath.exp((zt - wt) ** 2 - (_SQRT2 * zt - r / 2) ** 2) \
        + cmath.exp((zt - wt) ** 2 - (_SQRT2 * zt + r / 2) ** 2)
    tail = erfc_c(_SQRT2 * wt - r / 2) - erfc_c(_SQRT2 * wt + r / 2)
    return 2 * (zt - wt) * value + c - gauss * tail / _SQRT2


def ode_residual_limit(bp: BulkParams, z: complex, w: complex, route: str = "wronskian") -> complex:
    """d/dz kappa_tilde minus the ODE right-hand side at (z, w)."""
    z, w = complex(z), complex(w)
    deriv = holomorphic_derivative(lambda s: kappa_tilde(bp, s, w, route), z)
    return deriv - ode_rhs(bp, z, w, kappa_tilde(bp, z, w, route))


def chiral_rescaled_density(bp: BulkParams, z: complex) -> float:
    """(1/a^2) R_1^R(z/a) at t = 0, the thin-annulus rescaling."""
    if bp.a > 0.3:
        raise DomainError("thin-annulus rescaling needs a <= 0.3")
    if bp.t != 0:
        raise DomainError("thin-annulus rescaling is defined at t = 0")
    return corr_limit_r(bp, [complex(z) / bp.a]) / bp.a ** 2


def chiral_test_integral(bp: BulkParams, y: float, sigma: float = 0.05, half_width: float = 0.3) -> float:
    """int g(x) (1/a^2) R_1^R((x + i y)/a) dx over |x| <= half_width, with the
    Gaussian g(x) = exp(-x^2/sigma^2) / (sigma sqrt(pi))."""

    def f(x):
        return math.exp(-(x / sigma) ** 2) / (sigma * _SQRT_PI) * chiral_rescaled_density(bp, x + 1j * y)

    val = _quad(lambda x: complex(f(float(x))), -half_width, half_width)
    return val.real


def transition_gap(rho: float, t: float, radius: float = 1.0, count: int = 9) -> float:
    """sup over a grid in |z| <= radius of |R_1^R(z + i t) - R_1^C(z)|."""
    bp = bulk_params(rho, t)
    xs = np.linspace(-radius, radius, count)
    worst = 0.0
    for x in xs:
        for y in xs:
            z = complex(x, y)
            if abs(z) > radius:
                continue
            worst = max(worst, abs(corr_limit_r(bp, [z]) - corr_limit_c(bp, [z])))
    return worst
