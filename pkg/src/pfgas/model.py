"""Ensemble parameters, potential, moments, skew norms and skew-orthogonal
polynomials of the symplectic point process with an induced charge at the origin,
in the scaling where its droplet is an annulus of width O(1/N).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import brentq

from .errors import DomainError, NumericError, ParameterError
from .scaledcx import ScaledComplex, log_sum_exp, principal_log


@dataclass(frozen=True)
class ModelParams:
    """N, rho and the constants derived from them.

    ``a_n = N/rho^2`` and ``b_n = a_n - 1`` define the potential
    ``a_n |z|^2 - 2 b_n ln|z|``; ``gamma_n`` is the microscopic length and
    ``r1 < 1 < r2`` bound the annular droplet.
    """

    n: int
    rho: float
    a_n: float
    b_n: float
    a_n_n: float
    b_n_n: float
    gamma_n: float
    r1: float
    r2: float

    def to_dict(self) -> dict:
        return {k: getattr(self, k) for k in self.__dataclass_fields__}


def make_params(n: int, rho: float) -> ModelParams:
    """Build :class:`ModelParams`; requires ``n >= rho^2`` so that b_N >= 0."""
    if isinstance(n, bool) or int(n) != n or n < 1:
        raise ParameterError(f"n must be a positive integer, got {n}")
    n = int(n)
    rho = float(rho)
    if not (rho > 0 and math.isfinite(rho)):
        raise ParameterError(f"rho must be positive, got {rho}")
    if n < rho * rho:
        raise ParameterError(f"n={n} < rho^2={rho * rho}: negative b_N is unsupported")
    a_n = n / (rho * rho)
    b_n = a_n - 1.0
    return ModelParams(
        n=n,
        rho=rho,
        a_n=a_n,
        b_n=b_n,
        a_n_n=a_n * n,
        b_n_n=b_n * n,
        gamma_n=math.sqrt(2.0) * rho / n,
        r1=math.sqrt(b_n / a_n),
        r2=math.sqrt((2.0 + b_n) / a_n),
    )


def potential(p: ModelParams, zeta: complex) -> float:
    """a_N |zeta|^2 - 2 b_N ln|zeta|."""
    r = abs(complex(zeta))
    if r == 0:
        if p.b_n > 0:
            raise DomainError("potential is singular at zeta = 0 when b_N > 0")
        return 0.0
    return p.a_n * r * r - 2.0 * p.b_n * math.log(r)


def log_moment_h(p: ModelParams, k: int) -> float:
    """ln h_k, where h_k = int |zeta|^{2k} e^{-N Q_N} dA."""
    if k < 0:
        raise DomainError("moment index must be >= 0")
    s = 1.0 + k + p.b_n_n
    return math.lgamma(s) - s * math.log(p.a_n_n)


def log_skew_norm(p: ModelParams, k: int) -> float:
    """ln r_k = ln(2 h_{2k+1}), cross-checked against the duplication form."""
    if k < 0:
        raise DomainError("skew norm index must be >= 0")
    s = 2.0 + 2 * k + p.b_n_n
    direct = math.log(2.0) + math.lgamma(s) - s * math.log(p.a_n_n)
    half = k + p.b_n_n / 2.0
    dup = (-0.5 * math.log(math.pi) + s * math.log(2.0 / p.a_n_n)
           + math.lgamma(half + 1.0) + math.lgamma(half + 1.5))
    if abs(direct - dup) > 1e-12 * max(1.0, abs(direct)):
        raise NumericError("skew norm routes disagree", direct=direct, duplication=dup)
    return direct


def log_partition(p: ModelParams) -> float:
    """ln Z_N (the density carries 1/(N! Z_N)); equals the sum of ln r_k."""
    return math.fsum(log_skew_norm(p, k) for k in range(p.n))


def skew_poly_log_coefficients(p: ModelParams, degree: int) -> np.ndarray:
    """Log-coefficients of q_degree in powers of zeta (``-inf`` for absent powers)."""
    if degree < 0:
        raise DomainError("degree must be >= 0")
    out = np.full(degree + 1, -np.inf)
    if degree % 2:
        out[degree] = 0.0
        return out
    k = degree // 2
    c = p.b_n_n / 2.0
    l = np.arange(k + 1)
    out[2 * l] = ((k - l) * math.log(2.0 / p.a_n_n)
                  + math.lgamma(k + c + 1.0) - np.array([math.lgamma(j + c + 1.0) for j in l]))
    return out


def skew_poly(p: ModelParams, degree: int, zeta: complex) -> ScaledComplex:
    """Monic skew-orthogonal polynomial q_degree evaluated at zeta."""
    logc = skew_poly_log_coefficients(p, degree)
    powers = np.flatnonzero(np.isfinite(logc))
    zeta = complex(zeta)
    if zeta == 0:
        return log_sum_exp(logc[:1]) if 0 in powers else log_sum_exp([])
    lz = principal_log(zeta)
    return log_sum_exp(logc[powers] + powers * lz)


def _radial_window(p: ModelParams, power: float, drop: float) -> tuple[float, float]:
    """Interval where r^power e^{-a_N N r^2} is within e^{-drop} of its peak."""
    A = p.a_n_n
    peak = math.sqrt(power / (2.0 * A)) if power > 0 else 0.0

    def f(r):
        lr = power * math.log(r) if r > 0 else (-math.inf if power > 0 else 0.0)
        lp = power * math.log(peak) if peak > 0 else 0.0
        return lr - A * r * r - (lp - A * peak * peak) + drop

    hi = max(peak, 1.0)
    while f(hi) > 0:
        hi *= 1.5
    r_hi = brentq(f, peak, hi) if peak < hi else hi
    if peak == 0 or f(0.0) > 0:
        r_lo = 0.0
    else:
        r_lo = brentq(f, 0.0, peak)
    return r_lo, r_hi


def skew_form(p: ModelParams, f_degree: int, g_degree: int,
              radial_nodes: int = 64, panels: int = 8, angular_nodes: int = 128) -> complex:
    """<q_f, q_g>_s by polar quadrature of the defining double integral.

    The radial window covers the region where the integrand's radial weight
    exceeds 1e-18 of its maximum and always contains the panel
    ``[max(0, r1 - 5 gamma_N), r2 + 5 gamma_N]``.
    """
    if p.n > 8 or max(f_degree, g_degree) > 12:
        raise DomainError("skew_form is a quadrature oracle for N <= 8, degrees <= 12")
    power = 2.0 * p.b_n_n + f_degree + g_degree + 2.0
    lo, hi = _radial_window(p, power, math.log(1e18) + 5.0)
    lo = min(lo, max(0.0, p.r1 - 5 * p.gamma_n))
    hi = max(hi, p.r2 + 5 * p.gamma_n)
    x, w = np.polynomial.legendre.leggauss(radial_nodes)
    edges = np.linspace(lo, hi, panels + 1)
    r = np.concatenate([0.5 * (b - a) * x + 0.5 * (b + a) for a, b in zip(edges[:-1], edges[1:])])
    wr = np.concatenate([0.5 * (b - a) * w for a, b in zip(edges[:-1], edges[1:])])
    phi = 2.0 * np.pi * np.arange(angular_nodes) / angular_nodes
    R, PHI = np.meshgrid(r, phi, indexing="ij")
    zeta = R * np.exp(1j * PHI)

    def poly(deg, z):
        logc = skew_poly_log_coefficients(p, deg)
        coef = np.where(np.isfinite(logc), np.exp(logc), 0.0)
        return np.polynomial.polynomial.polyval(z, coef)

    zc = zeta.conj()
    body = (poly(f_degree, zeta) * poly(g_degree, zc) - poly(g_degree, zeta) * poly(f_degree, zc)) * (zeta - zc)
    with np.errstate(divide="ignore"):
        logw = 2.0 * p.b_n_n * np.log(R) - p.a_n_n * R * R + np.log(R)
    shift = float(np.max(logw))
    integrand = body * np.exp(logw - shift)
    # dA = r dr dphi / pi, trapezoid in phi has weight 2 pi / M
    total = np.sum(integrand * wr[:, None]) * (2.0 * np.pi / angular_nodes) / np.pi
    return complex(total * math.exp(shift))
