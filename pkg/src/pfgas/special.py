"""Special functions: complex erfc, log-gamma, regularized incomplete gamma
for very large parameters, and three asymptotic expansions of Q(a, x).
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np
from numpy.polynomial import Polynomial
from scipy import special as _sp

from .errors import DomainError, RegionError
from .scaledcx import ScaledComplex, principal_log, sc_from_log

ERFC_REGION = 30.0

# Stirling coefficients gamma_0..gamma_2 of the Temme expansion, produced by
# sympy from their derivative definition (see tests/test_special.py).
STIRLING_GAMMA = (1.0, -1.0 / 12.0, 1.0 / 288.0)


# ---------------------------------------------------------------- erfc

def _check_erfc_region(z: complex) -> None:
    if abs(z.real) > ERFC_REGION or abs(z.imag) > ERFC_REGION:
        raise RegionError(f"erfc argument {z} outside |Re|,|Im| <= {ERFC_REGION}")


def erfc_c(z: complex) -> complex:
    """Complementary error function of a complex argument."""
    z = complex(z)
    _check_erfc_region(z)
    if z.real >= 0:
        return complex(_sp.erfcx(z)) * cmath.exp(-z * z)
    return 2.0 - complex(_sp.erfcx(-z)) * cmath.exp(-z * z)


def erfcx_c(z: complex) -> complex:
    """Scaled complementary error function ``exp(z^2) erfc(z)``."""
    z = complex(z)
    _check_erfc_region(z)
    return complex(_sp.erfcx(z))


def log_erfc(z):
    """Complex logarithm of erfc(z), finite wherever erfc is nonzero.

    Only the real part and the phase modulo 2*pi are meaningful; callers
    exponentiate sums of such logarithms.  Accepts arrays.
    """
    z = np.asarray(z, dtype=complex)
    if np.any(np.abs(z.real) > ERFC_REGION) or np.any(np.abs(z.imag) > ERFC_REGION):
        raise RegionError(f"erfc argument outside |Re|,|Im| <= {ERFC_REGION}")
    out = np.empty(z.shape, dtype=complex)
    pos = z.real >= 0
    zp = z[pos]
    out[pos] = np.log(_sp.erfcx(zp)) - zp * zp
    zn = z[~pos]
    # erfc(z) = 2 - exp(-z^2) erfcx(-z); the second term dominates once it is large
    tail_log = np.log(_sp.erfcx(-zn)) - zn * zn
    small = tail_log.real < 40.0
    res = np.empty(zn.shape, dtype=complex)
    res[small] = np.log(2.0 - np.exp(tail_log[small]))
    big = ~small
    res[big] = tail_log[big] + np.log(-1.0 + 2.0 * np.exp(-tail_log[big]))
    out[~pos] = res
    return out if out.ndim else complex(out)


def erfc_times_exp(z, e):
    """``exp(e) * erfc(z)`` without forming either factor alone."""
    return np.exp(np.asarray(e, dtype=complex) + log_erfc(z))


# ---------------------------------------------------------------- gamma

def ln_gamma(x: float) -> float:
    """ln Gamma(x) for x > 0."""
    if not x > 0:
        raise DomainError(f"ln_gamma requires x > 0, got {x}")
    return math.lgamma(x)


def rgamma(x: float) -> float:
    """1/Gamma(x); exactly 0 at the poles (used for b_N N = 0)."""
    return float(_sp.rgamma(x))


def reg_gamma_pq(a, x):
    """Regularized incomplete gamma pair ``(P, Q)`` for arrays.

    Both tails come from scipy directly (never as ``1 - other``), so each keeps
    relative accuracy where it is small.
    """
    a, x = np.broadcast_arrays(np.asarray(a, dtype=float), np.asarray(x, dtype=float))
    a = a.astype(float).ravel()
    x = x.astype(float).ravel()
    if np.any(~(a > 0)) or np.any(a > 1e7):
        raise DomainError("reg_gamma requires 0 < a <= 1e7")
    if np.any(~(x >= 0)):
        raise DomainError("reg_gamma requires x >= 0")
    return _sp.gammainc(a, x), _sp.gammaincc(a, x)


def reg_gamma_q(a: float, x: float) -> float:
    """Q(a, x) = Gamma(a, x) / Gamma(a)."""
    return float(reg_gamma_pq(a, x)[1][0])


def reg_gamma_p(a: float, x: float) -> float:
    """P(a, x) = 1 - Q(a, x), with the small side computed directly."""
    return float(reg_gamma_pq(a, x)[0][0])


# ---------------------------------------------------------------- Temme

@dataclass(frozen=True)
class TemmeMap:
    """Pair (lambda, eta) with eta^2/2 = lambda - 1 - ln(lambda)."""

    lam: float
    eta: float

    @classmethod
    def from_lambda(cls, lam: float) -> TemmeMap:
        return cls(lam, temme_eta(lam))


def temme_eta(lam: float) -> float:
    """eta(lambda) with sign(eta) = sign(lambda - 1)."""
    if not lam > 0:
        raise DomainError(f"temme_eta requires lambda > 0, got {lam}")
    d = lam - 1.0
    if abs(d) < 1e-3:
        # eta = d (1 - d/3 + 7 d^2/36 - 73 d^3/540 + ...)
        return d * (1.0 - d / 3.0 + 7.0 * d * d / 36.0 - 73.0 * d ** 3 / 540.0)
    dev = d - math.log1p(d) if abs(d) < 0.5 else d - math.log(lam)
    return math.copysign(math.sqrt(2.0 * dev), d)


# Taylor coefficients of c_j(eta) about eta = 0, from sympy.
_C_SERIES = (
    (-1 / 3, 1 / 12, -2 / 135, 1 / 864, 1 / 2835, -139 / 777600, 1 / 25515,
     -571 / 261273600, -281 / 151559100),
    (-1 / 540, -1 / 288, 1 / 378, -77 / 77760, 1 / 4860, -1 / 2488320,
     -2743 / 151559100, 41969 / 5486745600),
    (25 / 6048, -139 / 51840, 1 / 1296, 1 / 497664, -6199 / 57736800,
     5531 / 104509440, -1219 / 95528160),
)
_C_SERIES_RADIUS = 0.1


def temme_coefficients(eta: float, lam: float, order: int) -> list[float]:
    """c_0..c_order of the Temme remainder series."""
    if abs(eta) < _C_SERIES_RADIUS:
        return [float(np.polynomial.polynomial.polyval(eta, _C_SERIES[j])) for j in range(order + 1)]
    d = lam - 1.0
    c = [1.0 / d - 1.0 / eta]
    if order >= 1:
        # c_1 = c_0'(eta)/eta + gamma_1/d with dlam/deta = lam*eta/d
        c.append(1.0 / eta ** 3 - 1.0 / d ** 3 - 1.0 / d ** 2 + STIRLING_GAMMA[1] / d)
    if order >= 2:
        inner = 3.0 / d ** 4 + 2.0 / d ** 3 - STIRLING_GAMMA[1] / d ** 2
        c.append(-3.0 / eta ** 5 + lam / d * inner + STIRLING_GAMMA[2] / d)
    return c


def temme_q(a: float, lam: float, order: int = 1, upper: bool = False) -> float:
    """Uniform expansion of P(a, a*lam) truncated after c_order.

    With ``upper=True`` returns the complementary Q(a, a*lam) directly,
    which keeps relative accuracy in the right tail.
    """
    if a < 20:
        raise RegionError("temme_q requires a >= 20")
    if not lam > 0:
        raise DomainError("temme_q requires lambda > 0")
    if not 0 <= order <= 2:
        raise DomainError("temme_q supports order 0, 1, 2")
    eta = temme_eta(lam)
    c = temme_coefficients(eta, lam, order)
    series = sum(cj / a ** j for j, cj in enumerate(c))
    rem = math.exp(-0.5 * a * eta * eta) / math.sqrt(2.0 * math.pi * a) * series
    if upper:
        return 0.5 * math.erfc(eta * math.sqrt(a / 2.0)) + rem
    return 0.5 * math.erfc(-eta * math.sqrt(a / 2.0)) - rem


def q_center(s: float, z: float) -> float:
    """Two-term expansion of Q(s+1, s + sqrt(2s) z)."""
    if s < 100:
        raise RegionError("q_center requires s >= 100")
    return 0.5 * math.erfc(z) + math.sqrt(2.0 / math.pi) / 3.0 * (1.0 + z * z) * math.exp(-z * z) / math.sqrt(s)


# ---------------------------------------------------------------- Szego region

def szego_b_polynomials(count: int) -> list[Polynomial]:
    """b_0..b_{count-1} from b_k = z(1-z) b_{k-1}' + (2k-1) z b_{k-1}."""
    z = Polynomial([0.0, 1.0])
    out = [Polynomial([1.0])]
    for k in range(1, count):
        prev = out[-1]
        out.append(z * (1 - z) * prev.deriv() + (2 * k - 1) * z * prev)
    return out


def in_szego_exterior(z: complex, margin: float = 1e-9) -> bool:
    z = complex(z)
    return abs(z) > 1.0 + margin or abs(z * cmath.exp(1.0 - z)) > 1.0 + margin


def szego_q_expansion(a: float, z: complex, terms: int = 3) -> ScaledComplex:
    """Large-a expansion of Q(a, a z) outside the Szego curve.

    Q ~ a^{a-1}/Gamma(a) e^{-az} z^a sum_k (-1)^k b_k(z) / ((z-1)^{2k+1} a^k),
    summed for k < terms.
    """
    z = complex(z)
    if a < 50:
        raise RegionError("szego_q_expansion requires a >= 50")
    if not 1 <= terms <= 3:
        raise DomainError("szego_q_expansion supports 1 to 3 terms")
    if abs(z - 1.0) < 0.2 or not in_szego_exterior(z):
        raise RegionError(f"z={z} is not in the Szego exterior region away from 1")
    bs = szego_b_polynomials(terms)
    u = z - 1.0
    total = sum((-1) ** k * complex(bs[k](z)) / (u ** (2 * k) * a ** k) for k in range(terms))
    logpre = ((a - 1.0) * math.log(a) - math.lgamma(a) - a * z + a * principal_log(z)
              - principal_log(u) + cmath.log(total))
    return sc_from_log(logpre)
