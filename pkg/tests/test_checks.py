from __future__ import annotations

import json

import pytest

from torusblocks.analytic import (
    IntegralSpec,
    basis_scale,
    kzb_check,
    leading_mode_check,
    parity_check,
    periodicity_check,
    proportionality_check,
    quasi_periodicity_check,
    s_transform_check,
    stokes_check,
    t_transform_check,
    theta_identities,
    vanishing_band,
    vanishing_check,
    vanishing_order_check,
)

LAM = 0.31 + 0.07j


def test_periodicity_example():
    rep = periodicity_check(IntegralSpec(4, 1, 1, 2, LAM), 1j, tol=1e-8)
    assert rep.passed, rep.residual


@pytest.mark.parametrize("tau", [1j, 0.3 + 1j])
def test_properties(tau):
    spec = IntegralSpec(5, 1, 0, 3, LAM)
    assert quasi_periodicity_check(spec, tau, tol=1e-6).passed
    assert parity_check(spec, tau).passed
    assert vanishing_order_check(spec, tau).passed


def test_vanishing_example():
    assert vanishing_band(5, 1, 1) == [-1, 0, 1, 4, 5, 6]
    rep = vanishing_check(5, 1, 1, LAM, 1j, tol=1e-8)
    assert rep.passed, rep.residual
    assert basis_scale(5, 1, LAM, 1j) > 0.1


@pytest.mark.parametrize(
    "kappa,p,k,n,tau,tol",
    [(4, 1, 1, 2, 1j, 1e-5), (5, 1, 0, 2, 0.3 + 1j, 1e-4), (5, 0, 0, 2, 1j, 1e-8), (6, 0, 0, 1, 0.3 + 1j, 1e-8)],
)
def test_kzb(kappa, p, k, n, tau, tol):
    rep = kzb_check(IntegralSpec(kappa, p, k, n, LAM), tau, tol=tol)
    assert rep.passed, rep.residual


def test_stokes_examples():
    assert stokes_check(IntegralSpec(5, 1, 0, 2, 0.31), 1j, tol=1e-6).passed
    # n = -1: u^[0]_{-1}, u^[1]_{-1} and u^[1]_{1} all lie in their vanishing bands
    rep = stokes_check(IntegralSpec(5, 1, 0, -1, 0.31), 1j, tol=1e-6)
    assert rep.passed
    assert abs(rep.values["lhs"]) < 1e-8 and abs(rep.values["rhs"]) < 1e-8


def test_stokes_p2():
    rep = stokes_check(IntegralSpec(8, 2, 1, 3, 0.31), 1j, tol=1e-4)
    assert rep.passed, rep.residual


def test_modular_checks():
    assert s_transform_check(4, 1, 2, 0.2, 1j, tol=1e-4).passed
    assert t_transform_check(4, 1, 2, LAM, 1j, tol=1e-8).passed


def test_proportionality():
    rep = proportionality_check(1, 1j, points=20, tol=1e-6)
    assert rep.passed, rep.residual


def test_leading_mode():
    rep = leading_mode_check(5, 2)
    assert rep.passed, rep.residual


@pytest.mark.parametrize("tau", [1j, 0.3 + 1j])
def test_theta_identities(tau):
    reps = theta_identities(tau)
    assert len(reps) >= 10
    assert all(r.passed for r in reps), [(r.name, r.residual) for r in reps if not r.passed]


def test_report_json():
    rep = t_transform_check(4, 1, 2, LAM, 1j)
    js = rep.to_json()
    assert set(js) >= {"check", "params", "values", "residual", "tolerance", "anchor", "pass"}
    json.dumps(js)
