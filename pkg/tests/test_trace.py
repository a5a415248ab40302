from __future__ import annotations

import cmath
import math

import pytest
from hypothesis import assume, given
from hypothesis import strategies as st

from torusblocks.modular import admissible_m
from torusblocks.qcore import QContext
from torusblocks.trace import (
    PoleError,
    TraceArgs,
    calibrate_convention,
    macdonald_trace_identity,
    phi21_terminating,
    psi,
    psi_renormalized,
    psi_renormalized_limit,
    shift_identity,
    trace_f_identity,
    verma_trace_oracle,
)

Q, NU, MU = 0.9, -2.3, 1.7


def test_level_zero_closed_form_float():
    # single j = 0 term: q^{nu mu} q^{nu} / (q^nu - q^-nu) = q^{nu mu} / (1 - q^{-2 nu})
    val = psi(TraceArgs(0, NU, MU, Q))
    assert cmath.isclose(val, Q ** (NU * MU + NU) / (Q**NU - Q**-NU), rel_tol=1e-14)
    assert cmath.isclose(val, Q ** (NU * MU) / (1 - Q ** (-2 * NU)), rel_tol=1e-14)


def test_level_zero_closed_form_exact():
    ctx = QContext(7)
    for nu in (1, 2, 3):
        for mu in (-2, 0, 5):
            expected = ctx.qpow(nu * mu + nu) / (ctx.qpow(nu) - ctx.qpow(-nu))
            assert psi(TraceArgs(0, nu, mu, ctx.q)) == expected


def test_pole_at_nu_zero():
    with pytest.raises(PoleError):
        psi(TraceArgs(1, 0, MU, Q))
    with pytest.raises(PoleError):
        psi(TraceArgs(0, 0, 3, QContext(6).q))


def test_renormalized_level_zero_is_psi():
    assert psi_renormalized(TraceArgs(0, NU, MU, Q)) == pytest.approx(psi(TraceArgs(0, NU, MU, Q)), rel=1e-14)


@pytest.mark.parametrize("k", [0, 1, 2, 3])
def test_verma_oracle(k):
    val = psi(TraceArgs(k, NU, MU, Q))
    orc = verma_trace_oracle(k, NU, MU, Q, 300)
    assert abs(val - orc) < 1e-10 * abs(val)


def test_verma_oracle_level_zero_geometric():
    J = 300
    expected = Q ** (NU * MU) * (1 - Q ** (-2 * NU * (J + 1))) / (1 - Q ** (-2 * NU))
    assert cmath.isclose(verma_trace_oracle(0, NU, MU, Q, J), expected, rel_tol=1e-13)


@pytest.mark.parametrize("k", [1, 2])
def test_verma_depth_stability(k):
    a = verma_trace_oracle(k, NU, MU, Q, 300)
    b = verma_trace_oracle(k, NU, MU, Q, 350)
    assert abs(a - b) < 1e-12 * abs(a)


def test_calibration_is_trivial_and_shared():
    cal = calibrate_convention([0, 1, 2, 3], NU, MU, Q, 300)
    assert abs(cal.c) < 1e-8
    assert all(abs(e - cal.c) < 1e-8 for e in cal.exponents.values())


@given(st.integers(4, 9), st.integers(0, 3), st.integers(-12, 12), st.integers(-12, 12))
def test_exact_and_float_agree(kappa, k, nu, mu):
    ctx = QContext(kappa)
    try:
        exact = psi(TraceArgs(k, nu, mu, ctx.q))
    except ZeroDivisionError:
        assume(False)
    flt = psi(TraceArgs(k, nu, mu, cmath.exp(1j * math.pi / kappa)))
    assert abs(exact.embed() - flt) < 1e-9 * max(1.0, abs(flt))


@given(st.integers(0, 2), st.integers(-10, 10), st.integers(-20, 20))
def test_shift_property(k, nu, mu):
    ctx = QContext(8, 3)
    assume((ctx.qpow(nu) - ctx.qpow(-nu)) != 0)
    try:
        ok = shift_identity(ctx, k, nu, mu)
    except PoleError:
        assume(False)
    assert ok


def test_trace_f_grid_kappa8_p2():
    ctx = QContext(8, 2)
    for k in range(3):
        for m in admissible_m(ctx, k):
            for n in range(-8, 9):
                assert trace_f_identity(ctx, k, m, n)


def test_macdonald_trace_bridge_kappa8_p2():
    ctx = QContext(8, 2)
    for k in range(3):
        for m in range(-2 + 2 * k + 1, 6):
            for n in range(k + 1, 9):
                assert macdonald_trace_identity(ctx, k, m, n)


def test_phi21_examples():
    ctx = QContext(8, 2)
    total, closed = phi21_terminating(ctx, 2, 2, 4)
    assert total == 1 and closed == 1
    total, closed = phi21_terminating(ctx, 1, 0, 3)
    assert total == closed
    for k in range(3):
        for j in range(k + 1):
            for m in range(-2 + 2 * k + 1, 6):
                total, closed = phi21_terminating(ctx, k, j, m)
                assert total == closed


def test_degenerate_points_match_limit():
    ctx = QContext(8, 3)
    # mu = l mod kappa with l < k: cancelling poles in the unrenormalized trace
    for k, m, mu in [(1, 1, 0), (2, 2, 8), (2, 3, 1), (1, 4, -8)]:
        args = TraceArgs(k, -m - 3 + k, mu, ctx.qpow(-1))
        exact = psi_renormalized(args).embed()
        assert abs(exact - psi_renormalized_limit(args)) < 1e-8 * max(1.0, abs(exact))
