from __future__ import annotations

import cmath

import numpy as np
import pytest

from torusblocks.analytic import (
    BlockValue,
    EllipticContext,
    IntegralSpec,
    NonConvergenceError,
    PoleError,
    j_integral,
    theta_level,
    u_block,
    u_value,
)
from torusblocks.analytic import blocks

from oracle_mp import u_p1_oracle

LAM = 0.31 + 0.07j

# u^{[k]}_{kappa,n}(lambda, i) from the mpmath finite-part oracle at 40 digits
FROZEN = [
    ((4, 2, 1, LAM), 2.475671299979872 + 0.7529144827528612j),
    ((5, 2, 0, LAM), 1.9860051886640966 - 0.6906149796868651j),
    ((5, 3, 1, LAM), 0.9609638202934593 + 0.2983951372602926j),
    ((6, 3, 0, 0.2 + 0j), 0.6942137272323703 - 0.4008044822927424j),
    ((6, 4, 1, -0.45 + 0.1j), -0.3272745358976593 - 0.005348867362179726j),
]


@pytest.mark.parametrize("params,expected", FROZEN)
def test_frozen_oracle_values(params, expected):
    kappa, n, k, lam = params
    val = u_value(IntegralSpec(kappa, 1, k, n, lam), 1j)
    assert abs(val - expected) < 1e-10 * abs(expected)


def test_live_oracle():
    val = u_value(IntegralSpec(5, 1, 1, 2, LAM), 1j)
    ref = u_p1_oracle(5, 2, LAM, 1)
    assert abs(val - ref) < 1e-10 * abs(ref)


@pytest.mark.parametrize("p,k,kappa", [(1, 0, 5), (1, 1, 4), (2, 0, 8), (2, 1, 8), (2, 2, 9)])
def test_level_convergence(p, k, kappa):
    spec = IntegralSpec(kappa, p, k, p + 1, LAM)
    a = u_value(spec, 1j, 3)
    b = u_value(spec, 1j, 4)
    assert abs(a - b) < 1e-9 * max(abs(a), 1e-3)


@pytest.mark.parametrize("p", [0, 1, 2])
def test_parity_by_construction(p):
    kappa = 2 * p + 3
    spec = IntegralSpec(kappa, p, p, p + 1, LAM)
    assert u_value(spec, 0.3 + 1j) == (-1) ** (p + 1) * u_value(spec.replace(lam=-LAM), 0.3 + 1j)


def test_p0_is_theta_combination():
    e = EllipticContext(0.3 + 1j)
    val = u_value(IntegralSpec(4, 0, 0, 2, LAM), e)
    ref = complex(theta_level(4, 2, LAM, e)) - complex(theta_level(4, 2, -LAM, e))
    assert abs(val - ref) < 1e-15 * abs(ref)


def test_spec_validation():
    with pytest.raises(ValueError):
        IntegralSpec(5, 2, 0, 3, LAM)  # kappa < 2p+2
    with pytest.raises(ValueError):
        IntegralSpec(8, 1, 2, 3, LAM)  # k > p
    with pytest.raises(ValueError):
        IntegralSpec(10, 3, 0, 4, LAM)  # p > 2
    with pytest.raises(ValueError):
        IntegralSpec(8, 1, 0, 3, LAM, level=99)
    assert IntegralSpec(8, 2, 1, 3, LAM).domain == "square"
    assert IntegralSpec(8, 2, 0, 3, LAM).domain == "simplex"


def test_integer_vertex_exponent_is_a_pole():
    # p = 2, kappa = 6: the apex exponent -6/kappa = -1 is a pole of the continuation
    with pytest.raises(PoleError):
        u_value(IntegralSpec(6, 2, 0, 3, LAM), 1j)


def test_block_error_estimate_and_nonconvergence():
    spec = IntegralSpec(5, 1, 1, 2, LAM, level=3)
    bv = u_block(spec, 1j)
    assert isinstance(bv, BlockValue) and bv.error < 1e-9 * abs(bv.value) and bv.nodes > 0
    with pytest.raises(NonConvergenceError):
        u_block(spec.replace(level=1), 1j, tol=1e-14)


def test_bit_reproducible():
    spec = IntegralSpec(8, 2, 1, 3, LAM)
    a = u_value(spec, 0.3 + 1j)
    blocks._nodes.cache_clear()
    assert u_value(spec, 0.3 + 1j) == a


def test_tau_continuation_is_consistent_with_T():
    # the branch reached at tau + 1 equals the T-phase times the value at tau
    kappa, n = 5, 2
    spec = IntegralSpec(kappa, 1, 1, n, LAM)
    a = u_value(spec, 0.3 + 1j)
    b = u_value(spec, 1.3 + 1j)
    assert abs(b - cmath.exp(1j * np.pi * n * n / (2 * kappa)) * a) < 1e-11 * abs(a)


def test_j_integral_accepts_complex_tau():
    val = j_integral(5, 1, 0, 2, LAM, 0.2 + 1.1j)
    assert np.isfinite(val)
