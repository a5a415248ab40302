"""Floating-point theta functions, the master function and elliptic hypergeometric blocks."""

from __future__ import annotations

from .blocks import BlockValue, IntegralSpec, NonConvergenceError, j_integral, u_block, u_value
from .branch import BranchError, phi_master, track_arguments
from .checks import (
    CheckReport,
    basis_scale,
    kzb_check,
    kzb_residual,
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
from .quadrature import PoleError, finite_part, product_rule
from .selberg import selberg
from .theta import (
    EllipticContext,
    LatticePoleError,
    rho,
    rho_prime,
    sigma_lambda,
    theta1,
    theta1_prime,
    theta_level,
    weierstrass_E,
)

__all__ = [
    "BlockValue", "IntegralSpec", "NonConvergenceError", "j_integral", "u_block", "u_value",
    "BranchError", "phi_master", "track_arguments",
    "CheckReport", "basis_scale", "kzb_check", "kzb_residual", "leading_mode_check", "parity_check",
    "periodicity_check", "proportionality_check", "quasi_periodicity_check", "s_transform_check",
    "stokes_check", "t_transform_check", "theta_identities", "vanishing_band", "vanishing_check", "vanishing_order_check",
    "PoleError", "finite_part", "product_rule", "selberg",
    "EllipticContext", "LatticePoleError", "rho", "rho_prime", "sigma_lambda", "theta1",
    "theta1_prime", "theta_level", "weierstrass_E",
]
