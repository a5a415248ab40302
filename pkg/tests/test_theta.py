from __future__ import annotations

import cmath
import math

import mpmath as mp
import numpy as np
import pytest
from hypothesis import assume, given
from hypothesis import strategies as st

from torusblocks.analytic.theta import (
    E_shifted,
    EllipticContext,
    LatticePoleError,
    rho,
    rho_prime,
    sigma_lambda,
    sigma_shifted,
    theta1,
    theta1_prime,
    theta1_second,
    theta1_third,
    theta_level,
    weierstrass_E,
)

TAUS = [1j, 0.3 + 1j, -0.45 + 0.8j, 0.1 + 2.5j]
coord = st.floats(-1.5, 1.5, allow_nan=False)
points = st.builds(complex, coord, st.floats(-0.6, 0.6))
taus = st.sampled_from(TAUS)


def mp_theta1(t, tau, deriv=0):
    nome = mp.exp(1j * mp.pi * mp.mpc(tau))
    return complex(mp.jtheta(1, mp.pi * mp.mpc(t), nome, deriv) * mp.pi**deriv)


@pytest.mark.parametrize("tau", TAUS)
def test_theta1_against_mpmath(tau):
    e = EllipticContext(tau)
    for t in [0.1, 0.37 + 0.2j, -0.8 + 0.5j, 1e-6, 0.5 * tau + 0.1]:
        ref = mp_theta1(t, tau)
        assert abs(complex(theta1(t, e)) - ref) < 1e-13 * max(1, abs(ref))
        for d, fn in ((1, theta1_prime), (2, theta1_second), (3, theta1_third)):
            ref = mp_theta1(t, tau, d)
            assert abs(complex(fn(t, e)) - ref) < 1e-11 * max(1, abs(ref))


def test_theta1_odd_and_zero():
    e = EllipticContext(1j)
    assert theta1(0.0, e) == 0
    assert abs(complex(theta1(-0.3, e)) + complex(theta1(0.3, e))) < 1e-15


@given(points, taus)
def test_theta1_T(t, tau):
    lhs = complex(theta1(t, EllipticContext(tau + 1)))
    rhs = cmath.exp(1j * math.pi / 4) * complex(theta1(t, EllipticContext(tau)))
    assert abs(lhs - rhs) < 1e-12 * max(1, abs(rhs))


@given(points, taus)
def test_theta1_S(t, tau):
    lhs = complex(theta1(t / tau, EllipticContext(-1 / tau)))
    rhs = cmath.sqrt(-1j * tau) / 1j * cmath.exp(1j * math.pi * t * t / tau) * complex(theta1(t, EllipticContext(tau)))
    assert abs(lhs - rhs) < 1e-10 * max(1, abs(rhs))


@given(points, taus)
def test_E_quasi_periodicity(t, tau):
    e = EllipticContext(tau)
    E = complex(weierstrass_E(t, e))
    assert abs(complex(weierstrass_E(t + 1, e)) + E) < 1e-12 * max(1, abs(E))
    shifted = -cmath.exp(-1j * math.pi * tau - 2j * math.pi * t) * E
    assert abs(complex(weierstrass_E(t + tau, e)) - shifted) < 1e-11 * max(1, abs(shifted))


@given(points, taus, st.integers(-2, 2), st.integers(-2, 2))
def test_E_shifted_matches_direct(x, tau, m, n):
    e = EllipticContext(tau)
    direct = complex(weierstrass_E(m + n * tau + x, e))
    shifted = complex(E_shifted(m, n, x, e))
    # the quasi-periodicity factor sets the size of E near m + n tau
    scale = abs(cmath.exp(-1j * math.pi * n * n * tau - 2j * math.pi * n * x))
    assert abs(shifted - direct) < 1e-12 * max(1, scale)


@pytest.mark.parametrize("tau", TAUS)
def test_theta1_far_from_strip(tau):
    # lattice zeros and the mpmath reference several periods away
    e = EllipticContext(tau)
    for n in (-3, 2, 3):
        assert abs(complex(theta1(n * tau + 1, e))) < 1e-12 * abs(cmath.exp(-1j * math.pi * n * n * tau))
        t = n * tau + 0.3 + 0.1j
        ref = mp_theta1(t, tau)
        assert abs(complex(theta1(t, e)) - ref) < 1e-12 * abs(ref)
        for d, fn in ((1, theta1_prime), (2, theta1_second), (3, theta1_third)):
            ref = mp_theta1(t, tau, d)
            assert abs(complex(fn(t, e)) - ref) < 1e-11 * abs(ref)


def test_E_small_argument():
    e = EllipticContext(1j)
    assert abs(complex(weierstrass_E(1e-4, e)) / 1e-4 - 1) < 1e-7


def _off_lattice(z, tau, eps=0.05):
    n = round(z.imag / tau.imag)
    x = z - n * tau
    return abs(x - round(x.real)) > eps


@given(points, points, taus)
def test_sigma_quasi_periodicity(lam, t, tau):
    assume(_off_lattice(lam, tau) and _off_lattice(t, tau) and _off_lattice(lam - t, tau))
    e = EllipticContext(tau)
    s = complex(sigma_lambda(lam, t, e))
    shifted = complex(sigma_lambda(lam, t + tau, e))
    expected = cmath.exp(2j * math.pi * lam) * s
    assert abs(shifted - expected) < 1e-12 * max(1, abs(expected), abs(shifted))
    assert abs(complex(sigma_lambda(lam, t + 1, e)) - s) < 1e-12 * max(1, abs(s))
    direct = complex(sigma_shifted(lam, 1, 1, t, e))
    assert abs(direct - shifted) < 1e-10 * max(1, abs(shifted))


def test_sigma_pole():
    with pytest.raises(LatticePoleError):
        sigma_lambda(0.3, 0.0, EllipticContext(1j))


def test_rho_is_log_derivative():
    e = EllipticContext(0.3 + 1j)
    t, h = 0.21 + 0.13j, 1e-5
    num = (np.log(complex(theta1(t + h, e))) - np.log(complex(theta1(t - h, e)))) / (2 * h)
    assert abs(complex(rho(t, e)) - num) < 1e-8
    drho = (complex(rho(t + h, e)) - complex(rho(t - h, e))) / (2 * h)
    assert abs(complex(rho_prime(t, e)) - drho) < 1e-6


@given(st.integers(2, 9), st.integers(-12, 12), points, taus)
def test_theta_level_laws(kappa, n, t, tau):
    e = EllipticContext(tau)
    base = complex(theta_level(kappa, n, t, e))
    scale = max(1, abs(base))
    assert abs(complex(theta_level(kappa, n + 2 * kappa, t, e)) - base) < 1e-14 * scale
    assert abs(complex(theta_level(kappa, -n, -t, e)) - base) < 1e-14 * scale
    assert abs(complex(theta_level(kappa, n, t + 1, e)) - cmath.exp(1j * math.pi * n) * base) < 1e-12 * scale


def test_theta_level_against_series():
    kappa, n, t, tau = 5, 3, 0.2 + 0.1j, 0.3 + 1j
    ref = mp.fsum(
        mp.exp(2j * mp.pi * kappa * ((j + mp.mpf(n) / (2 * kappa)) ** 2 * tau + (j + mp.mpf(n) / (2 * kappa)) * t))
        for j in range(-30, 31)
    )
    assert abs(complex(theta_level(kappa, n, t, EllipticContext(tau))) - complex(ref)) < 1e-14


@pytest.mark.parametrize("tau", [1j, 0.3 + 1j])
@pytest.mark.parametrize("kappa", [4, 5])
def test_theta_level_S(kappa, tau):
    e, es = EllipticContext(tau), EllipticContext(-1 / tau)
    rng = np.random.default_rng(3)
    for _ in range(10):
        t = complex(*rng.uniform(-0.5, 0.5, 2))
        for n in range(2 * kappa):
            lhs = complex(theta_level(kappa, n, t / tau, es))
            q = cmath.exp(1j * math.pi / kappa)
            total = sum(q ** (-m * n) * complex(theta_level(kappa, m, t, e)) for m in range(2 * kappa))
            rhs = cmath.sqrt(-1j * tau / (2 * kappa)) * cmath.exp(1j * math.pi * kappa * t * t / (2 * tau)) * total
            assert abs(lhs - rhs) < 1e-8 * max(1, abs(rhs))


def test_context_terms_and_tail():
    e = EllipticContext(0.3 + 1j)
    assert e.tail_bound() < 1e-16
    assert e.with_tau(2j).tau == 2j
    with pytest.raises(ValueError):
        EllipticContext(0.3 - 1j)
