import cmath
import math

import numpy as np
import pytest

from pfgas.errors import DomainError
from pfgas.scaledcx import (ONE, ZERO, ScaledComplex, log_cumsum_exp, log_sum_exp, principal_log,
                            sc_add, sc_div, sc_from_log, sc_make, sc_mul, sc_pow)


def value(x: ScaledComplex) -> complex:
    return x.to_complex()


def test_make_identity_and_zero():
    one = sc_make(1)
    assert 0.5 <= abs(one.mantissa) < 2
    assert value(one) == 1
    assert sc_make(0).zero


def test_make_normalizes_magnitude():
    x = sc_make(3 + 4j)
    assert 0.5 <= abs(x.mantissa) < 2
    assert value(x) == pytest.approx(3 + 4j, rel=1e-15)


def test_normalization_is_idempotent():
    x = sc_make(123.456 - 7j)
    y = sc_mul(x, ONE)
    assert (y.mantissa, y.logmag) == (x.mantissa, x.logmag)


def test_nan_propagates():
    x = sc_make(complex(math.nan, 0))
    assert math.isnan(value(x).real)


def test_add_large_equal_terms():
    a = ScaledComplex(1 + 0j, 1000.0)
    s = sc_add(a, a)
    assert s.log_abs == pytest.approx(1000 + math.log(2), abs=1e-12)
    assert abs(cmath.phase(s.mantissa)) < 1e-15


def test_add_zero_and_cancellation():
    a = ScaledComplex(1 + 0j, 1000.0)
    assert sc_add(a, ZERO) == a
    assert sc_add(a, ScaledComplex(-1 + 0j, 1000.0)).zero


def test_mul_examples():
    p = sc_mul(ScaledComplex(1j, 500.0), ScaledComplex(1j, 700.0))
    assert p.log_abs == pytest.approx(1200.0, abs=1e-12)
    assert p.mantissa / abs(p.mantissa) == pytest.approx(-1)
    assert value(sc_mul(sc_make(2), sc_make(3))) == 6
    x = sc_make(0.3 - 2j)
    assert value(sc_mul(x, ONE)) == value(x)


def test_pow_examples():
    x = sc_pow(cmath.exp(1j * math.pi / 4), 3)
    assert x.log_abs == pytest.approx(0, abs=1e-15)
    assert x.mantissa / abs(x.mantissa) == pytest.approx(cmath.exp(3j * math.pi / 4), abs=1e-15)
    assert sc_pow(2, 10000).log_abs == pytest.approx(10000 * math.log(2), rel=1e-15)
    assert value(sc_pow(-1, 0.5)) == pytest.approx(1j, abs=1e-15)


def test_pow_zero_base():
    with pytest.raises(DomainError):
        sc_pow(0, 0)
    with pytest.raises(DomainError):
        sc_pow(0, -1.5)
    assert sc_pow(0, 2).zero


def test_principal_log_on_negative_axis():
    assert principal_log(complex(-2.0, -0.0)).imag == pytest.approx(math.pi)
    assert principal_log(-2.0).imag == pytest.approx(math.pi)


def test_round_trip():
    rng = np.random.default_rng(0)
    for _ in range(200):
        c = complex(*rng.standard_normal(2)) * math.exp(rng.uniform(-690, 690))
        back = value(sc_make(c))
        assert abs(back - c) <= 4 * np.finfo(float).eps * abs(c)


def test_add_associativity_same_sign():
    rng = np.random.default_rng(1)
    for _ in range(200):
        xs = [ScaledComplex(complex(rng.uniform(0.5, 2)), rng.uniform(-5, 5)) for _ in range(3)]
        left = sc_add(sc_add(xs[0], xs[1]), xs[2])
        right = sc_add(xs[0], sc_add(xs[1], xs[2]))
        assert abs(math.exp(left.log_abs - right.log_abs) - 1) <= 2 * np.finfo(float).eps * 2


def test_pow_exponent_additivity():
    rng = np.random.default_rng(2)
    for _ in range(100):
        b = complex(*rng.uniform(-3, 3, 2))
        if b.real < 0 and abs(b.imag) < 1e-3:
            continue
        m, n = rng.uniform(-50, 5000, 2)
        lhs = sc_pow(b, m + n)
        rhs = sc_mul(sc_pow(b, m), sc_pow(b, n))
        diff = sc_add(lhs, -rhs)
        assert diff.zero or diff.log_abs - lhs.log_abs < math.log(1e-13 * max(1.0, abs(m + n) / 100))


def test_division_inverts_multiplication():
    a, b = sc_make(3 - 1j), sc_pow(1.7 + 0.2j, 900)
    assert value(sc_div(sc_mul(a, b), b)) == pytest.approx(3 - 1j, rel=1e-13)
    with pytest.raises(DomainError):
        sc_div(a, ZERO)


def test_overflowing_value_converts_to_inf():
    assert math.isinf(value(ScaledComplex(1 + 0j, 800.0)).real)
    assert value(ScaledComplex(1 + 0j, -800.0)) == 0


def test_log_sum_exp_matches_direct_sum():
    rng = np.random.default_rng(3)
    logs = rng.uniform(-5, 5, 50) + 1j * rng.uniform(-3, 3, 50)
    assert value(log_sum_exp(logs)) == pytest.approx(np.exp(logs).sum(), rel=1e-13)
    shifted = log_sum_exp(logs + 5000)
    assert shifted.log_abs - 5000 == pytest.approx(abs(np.exp(logs).sum()) and math.log(abs(np.exp(logs).sum())), abs=1e-12)
    assert log_sum_exp([]).zero
    assert log_sum_exp([-math.inf]).zero


def test_log_cumsum_exp_partial_sums():
    rng = np.random.default_rng(4)
    logs = rng.uniform(-3, 3, 30) + 1j * rng.uniform(-3, 3, 30)
    logs[5] = -math.inf
    out = np.exp(log_cumsum_exp(logs))
    ref = np.cumsum(np.exp(logs))
    assert np.allclose(out, ref, rtol=1e-13, atol=0)


def test_sc_from_log_phase():
    x = sc_from_log(10.0 + 1j * math.pi / 2)
    assert x.log_abs == pytest.approx(10.0, abs=1e-14)
    assert x.mantissa / abs(x.mantissa) == pytest.approx(1j, abs=1e-15)
