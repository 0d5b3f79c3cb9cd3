"""Complex numbers stored as ``mantissa * exp(logmag)``.

Kernel sums in this package carry factors such as ``(N^2/rho^2)^(N^2/rho^2)``
whose logarithms reach 10^5 before the Gaussian weights bring them back to
order one.  Every such quantity travels as a :class:`ScaledComplex` until the
very last multiplication.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError

_LN2 = math.log(2.0)


@dataclass(frozen=True)
class ScaledComplex:
    """Value ``mantissa * exp(logmag)`` with ``1/2 <= |mantissa| < 2``.

    ``zero`` marks an exact zero; the other fields are then ignored.
    """

    mantissa: complex
    logmag: float
    zero: bool = False

    def to_complex(self) -> complex:
        """Convert to a plain complex number (may overflow to inf or underflow to 0)."""
        if self.zero:
            return 0j
        if not math.isfinite(self.logmag):
            return self.mantissa * math.exp(self.logmag) if not math.isnan(self.logmag) \
                else complex(math.nan, math.nan)
        # split logmag = k ln 2 + r; logmags produced by normalization are
        # (sums of) multiples of ln 2 up to rounding, which snaps back to r = 0
        k = round(self.logmag / _LN2)
        r = self.logmag - k * _LN2
        if abs(r) <= 4.0 * math.ulp(self.logmag):
            r = 0.0
        m = self.mantissa * math.exp(r)
        if k > 1100:
            return complex(math.copysign(math.inf, m.real) if m.real else 0.0,
                           math.copysign(math.inf, m.imag) if m.imag else 0.0)
        if k < -1200:
            return 0j
        try:
            return complex(math.ldexp(m.real, k), math.ldexp(m.imag, k))
        except OverflowError:
            return complex(math.copysign(math.inf, m.real) if m.real else 0.0,
                           math.copysign(math.inf, m.imag) if m.imag else 0.0)

    def log(self) -> complex:
        """Principal complex logarithm; ``-inf`` real part for zero."""
        if self.zero:
            return complex(-math.inf, 0.0)
        return self.logmag + cmath.log(self.mantissa)

    @property
    def log_abs(self) -> float:
        if self.zero:
            return -math.inf
        return self.logmag + math.log(abs(self.mantissa))

    def __neg__(self) -> ScaledComplex:
        return ScaledComplex(-self.mantissa, self.logmag, self.zero)

    def conjugate(self) -> ScaledComplex:
        return ScaledComplex(self.mantissa.conjugate(), self.logmag, self.zero)

    def __add__(self, other: ScaledComplex) -> ScaledComplex:
        return sc_add(self, other)

    def __sub__(self, other: ScaledComplex) -> ScaledComplex:
        return sc_add(self, -other)

    def __mul__(self, other: ScaledComplex) -> ScaledComplex:
        return sc_mul(self, other)


ZERO = ScaledComplex(0j, 0.0, True)
ONE = ScaledComplex(1 + 0j, 0.0, False)


def _normalize(m: complex, logmag: float) -> ScaledComplex:
    if m == 0:
        return ZERO
    r = abs(m)
    if not math.isfinite(r):
        if math.isnan(r):
            return ScaledComplex(complex(math.nan, math.nan), math.nan)
        # inf mantissa: fold the magnitude into logmag through the phase
        return ScaledComplex(cmath.exp(1j * cmath.phase(m)), math.inf)
    _, e = math.frexp(r)
    # frexp gives r = f * 2**e with f in [1/2, 1); power-of-two scaling is exact
    return ScaledComplex(m * math.ldexp(1.0, -e), logmag + e * _LN2)


def sc_make(c: complex) -> ScaledComplex:
    """Wrap a complex number."""
    return _normalize(complex(c), 0.0)


def sc_from_log(logval: complex) -> ScaledComplex:
    """Return ``exp(logval)`` for a complex logarithm ``logval``."""
    logval = complex(logval)
    if logval.real == -math.inf:
        return ZERO
    return _normalize(cmath.exp(1j * logval.imag), logval.real)


def sc_add(a: ScaledComplex, b: ScaledComplex) -> ScaledComplex:
    """Sum aligned to the larger exponent."""
    if a.zero:
        return b
    if b.zero:
        return a
    if a.logmag < b.logmag:
        a, b = b, a
    d = b.logmag - a.logmag
    # exp(d) underflows to 0 exactly when b is far below a's last bit
    return _normalize(a.mantissa + b.mantissa * math.exp(d), a.logmag)


def sc_mul(a: ScaledComplex, b: ScaledComplex) -> ScaledComplex:
    """Product: mantissas multiply, exponents add."""
    if a.zero or b.zero:
        return ZERO
    return _normalize(a.mantissa * b.mantissa, a.logmag + b.logmag)


def sc_div(a: ScaledComplex, b: ScaledComplex) -> ScaledComplex:
    if b.zero:
        raise DomainError("division by zero")
    if a.zero:
        return ZERO
    return _normalize(a.mantissa / b.mantissa, a.logmag - b.logmag)


def sc_pow(base: complex, exponent: float) -> ScaledComplex:
    """Principal-branch power ``exp(exponent * Log(base))``, Arg in (-pi, pi]."""
    base = complex(base)
    if base == 0:
        if exponent <= 0:
            raise DomainError("zero base requires a positive exponent")
        return ZERO
    return sc_from_log(exponent * principal_log(base))


def principal_log(z: complex) -> complex:
    """Log with Arg in (-pi, pi]; a signed zero imaginary part never flips the branch."""
    z = complex(z)
    lg = cmath.log(z)
    if z.imag == 0 and z.real < 0:
        return complex(lg.real, math.pi)
    return lg


def log_sum_exp(logs) -> ScaledComplex:
    """Sum of ``exp(logs)`` for complex logarithms, with exactly rounded accumulation."""
    logs = np.asarray(logs, dtype=complex).ravel()
    if logs.size == 0:
        return ZERO
    if np.isnan(logs).any():
        return ScaledComplex(complex(math.nan, math.nan), math.nan)
    top = float(np.max(logs.real))
    if top == -math.inf:
        return ZERO
    terms = np.exp(logs - top)
    total = complex(math.fsum(terms.real), math.fsum(terms.imag))
    return _normalize(total, top)


def log_cumsum_exp(logs) -> np.ndarray:
    """Complex logarithms of the partial sums of ``exp(logs)``.

    Running rescaled sum with Neumaier compensation on both components; each
    rescale multiplies sum and compensation by the same factor.
    """
    logs = np.asarray(logs, dtype=complex).ravel()
    out = np.empty(logs.size, dtype=complex)
    top = -math.inf
    sr = si = cr = ci = 0.0
    for i, lg in enumerate(logs.tolist()):
        re = lg.real
        if re == -math.inf:
            out[i] = out[i - 1] if i else complex(-math.inf, 0.0)
            continue
        if re > top:
            f = math.exp(top - re) if top > -math.inf else 0.0
            sr *= f
            si *= f
            cr *= f
            ci *= f
            top = re
        x = cmath.exp(lg - top)
        t = sr + x.real
        cr += (sr - t) + x.real if abs(sr) >= abs(x.real) else (x.real - t) + sr
        sr = t
        t = si + x.imag
        ci += (si - t) + x.imag if abs(si) >= abs(x.imag) else (x.imag - t) + si
        si = t
        s = complex(sr + cr, si + ci)
        out[i] = top + cmath.log(s) if s != 0 else complex(-math.inf, 0.0)
    return out
