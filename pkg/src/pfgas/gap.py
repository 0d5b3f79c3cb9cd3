"""Semi-large gap probabilities: exact finite-N values and their
two-term asymptotics.

Three holes are supported: the inner disc ``|zeta| < r1`` (``inner``), the
exterior ``|zeta| > r2`` (``outer``) and both at once (``both``).  Each
log-probability is a sum over j < N of logs of regularized incomplete gamma
values with first argument ``2 + 2j + B``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.integrate import quad
from scipy.special import erf, erfc

from .errors import DomainError, NumericError, PrecisionError
from .model import ModelParams, make_params
from .special import reg_gamma_pq

REGIONS = ("inner", "outer", "both")
MAX_N = 10_000
# sign of C0 in the order-one term of each region
_O1_SIGN = {"inner": -1.0, "outer": 1.0, "both": 0.0}


@dataclass(frozen=True)
class GapResult:
    log_p: float
    region: str
    n: int
    rho: float
    term_count: int


def _summands(p: ModelParams, region: str) -> np.ndarray:
    j = np.arange(p.n, dtype=float)
    a = 2.0 + 2.0 * j + p.b_n_n
    if region in ("inner", "both"):
        # x = B < a_j: the lower tail P is the small one
        p_inner = reg_gamma_pq(a, np.full_like(a, p.b_n_n))[0]
    if region in ("outer", "both"):
        # x = B + 2N >= a_j: the upper tail Q is the small one
        q_outer = reg_gamma_pq(a, np.full_like(a, p.b_n_n + 2.0 * p.n))[1]
    if region == "inner":
        lost = p_inner
    elif region == "outer":
        lost = q_outer
    else:
        lost = p_inner + q_outer
    bad = np.flatnonzero(~(lost < 1.0))
    if bad.size:
        raise PrecisionError(f"{region} summand is not positive", j=int(bad[0]), lost=float(lost[bad[0]]))
    return np.log1p(-lost)


def log_gap(p: ModelParams, region: str) -> GapResult:
    """Natural log of the probability that the hole of type ``region`` is empty."""
    if region not in REGIONS:
        raise DomainError(f"region must be one of {REGIONS}, got {region!r}")
    if p.n > MAX_N:
        raise DomainError(f"N={p.n} exceeds {MAX_N}")
    terms = _summands(p, region)
    return GapResult(math.fsum(terms), region, p.n, p.rho, int(terms.size))


def _integrate(f, what: str) -> float:
    val, err = quad(f, 0.0, 1.0, epsabs=1e-13, epsrel=1e-12, limit=200)
    if err > 1e-11:
        raise NumericError(f"{what} quadrature did not converge", value=val, error=err)
    return val


def gap_constants(rho: float) -> tuple[float, float, float]:
    """(C1, C1_tilde, C0) for the given rho in (0, 10]."""
    rho = float(rho)
    if not 0 < rho <= 10:
        raise DomainError(f"rho must lie in (0, 10], got {rho}")
    s = math.sqrt(2.0) * rho
    c1 = _integrate(lambda x: math.log1p(-0.5 * erfc(s * x)), "C1")
    # 1/2 erfc(s(x-1)) - 1/2 erfc(s x) rewritten without the cancelling constant
    c1t = _integrate(lambda x: math.log(0.5 * (erf(s * x) + erf(s * (1.0 - x)))), "C1_tilde")
    body = _integrate(
        lambda x: math.exp(-2 * rho * rho * x * x) * (5 + 3 * rho * rho * x - 2 * rho * rho * x * x)
        / (1.0 - 0.5 * erfc(s * x)), "C0")
    c0 = 0.5 * math.log(2.0 - erfc(s)) - rho / (3.0 * math.sqrt(2.0 * math.pi)) * body
    return c1, c1t, c0


def gap_table(n: int, rhos) -> list[dict]:
    """Rows comparing exact log-probabilities with N C + (order-one term)."""
    rows = []
    for rho in rhos:
        p = make_params(n, rho)
        c1, c1t, c0 = gap_constants(rho)
        for region in REGIONS:
            lp = log_gap(p, region).log_p
            nc = n * (c1t if region == "both" else c1)
            o1 = _O1_SIGN[region] * c0
            rows.append({"rho": float(rho), "region": region, "n": n, "log_p": lp,
                         "n_times_c": nc, "o1_pred": o1, "residual": lp - nc - o1})
    return rows
