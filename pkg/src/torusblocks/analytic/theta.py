"""Jacobi theta functions, the Weierstrass-type functions E and sigma_lambda, and
level-kappa theta functions.

theta1 is summed in its sine form

    theta1(t, tau) = 2 sum_{j>=0} (-1)^j e^{pi i tau (j+1/2)^2} sin((2j+1) pi t),

which equals the bilateral series after pairing j with -j-1 and keeps full
relative accuracy as t -> 0.  Arguments that sit close to a lattice point
omega = m + n tau are passed as (m, n, x) with x = t - omega small, and the
quasi-periodicity laws move the evaluation back to x.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

__all__ = [
    "EllipticContext",
    "LatticePoleError",
    "theta1",
    "theta1_prime",
    "theta1_second",
    "theta1_third",
    "rho",
    "rho_prime",
    "weierstrass_E",
    "sigma_lambda",
    "theta_level",
    "E_shifted",
    "sigma_shifted",
]


class LatticePoleError(ZeroDivisionError):
    """Evaluation at a lattice point where the function has a pole."""


def _terms_needed(imtau: float, tol: float = 1e-18) -> int:
    # e^{-pi Im(tau) (J + 1/2)^2} < tol
    return int(math.ceil(math.sqrt(-math.log(tol) / (math.pi * imtau)) - 0.5)) + 1


@dataclass(frozen=True)
class EllipticContext:
    """Modular parameter tau with Im tau > 0 and the theta-series cutoff.

    Parameters
    ----------
    tau : complex
        Point of the upper half plane.
    jtheta : int, optional
        Number of terms kept in theta series; chosen from the tail bound
        e^{-pi Im(tau)(J+1/2)^2} < 1e-18 when omitted, plus a safety margin
        for moderately complex arguments.
    branch : str
        Branch convention tag for multivalued powers.
    """

    tau: complex
    jtheta: int = 0
    branch: str = "tau-path-from-i"

    def __post_init__(self):
        tau = complex(self.tau)
        if tau.imag <= 0:
            raise ValueError("tau must lie in the upper half plane")
        object.__setattr__(self, "tau", tau)
        if self.jtheta <= 0:
            object.__setattr__(self, "jtheta", _terms_needed(tau.imag) + 4)

    def tail_bound(self) -> float:
        return math.exp(-math.pi * self.tau.imag * (self.jtheta + 0.5) ** 2)

    def with_tau(self, tau: complex) -> "EllipticContext":
        return EllipticContext(tau, 0, self.branch)


def _ctx(ectx) -> EllipticContext:
    if isinstance(ectx, EllipticContext):
        return ectx
    return EllipticContext(complex(ectx))


def _coeffs(ectx: EllipticContext):
    j = np.arange(ectx.jtheta + 1)
    odd = 2 * j + 1
    amp = (-1.0) ** j * np.exp(1j * math.pi * ectx.tau * (j + 0.5) ** 2)
    return odd, amp


def _series(x: np.ndarray, ectx: EllipticContext, d: int) -> np.ndarray:
    """d-th derivative of the sine series, accurate for |Im x| <= Im(tau)/2."""
    odd, amp = _coeffs(ectx)
    arg = np.multiply.outer(x, odd * math.pi)
    trig = np.sin(arg) if d % 2 == 0 else np.cos(arg)
    sign = -1 if d % 4 in (2, 3) else 1
    return 2 * sign * np.sum(amp * (odd * math.pi) ** d * trig, axis=-1)


def _theta1_derivative(t, ectx, d: int) -> np.ndarray:
    """d-th derivative of theta1 after reducing t = x + n tau to the strip |Im x| <= Im(tau)/2.

    theta1(x + n tau) = (-1)^n e^{-pi i n^2 tau - 2 pi i n x} theta1(x); the
    derivatives follow from the Leibniz rule.
    """
    ectx = _ctx(ectx)
    t = np.asarray(t, dtype=complex)
    tau = ectx.tau
    n = np.rint(t.imag / tau.imag)
    x = t - n * tau
    factor = np.where(n % 2 == 0, 1.0, -1.0) * np.exp(-1j * math.pi * n * n * tau - 2j * math.pi * n * x)
    out = np.zeros_like(x)
    for r in range(d + 1):
        out = out + math.comb(d, r) * (-2j * math.pi * n) ** (d - r) * _series(x, ectx, r)
    return factor * out


def theta1(t, ectx) -> np.ndarray:
    """First Jacobi theta function theta1(t, tau)."""
    return _theta1_derivative(t, ectx, 0)


def theta1_prime(t, ectx) -> np.ndarray:
    """Derivative of theta1 in t."""
    return _theta1_derivative(t, ectx, 1)


def theta1_second(t, ectx) -> np.ndarray:
    return _theta1_derivative(t, ectx, 2)


def theta1_third(t, ectx) -> np.ndarray:
    return _theta1_derivative(t, ectx, 3)


def _check_pole(val, what):
    if np.any(np.abs(val) == 0):
        raise LatticePoleError(f"{what} at a lattice point")


def rho(t, ectx) -> np.ndarray:
    """Logarithmic derivative theta1'/theta1."""
    th = theta1(t, ectx)
    _check_pole(th, "rho")
    return theta1_prime(t, ectx) / th


def rho_prime(t, ectx) -> np.ndarray:
    """Derivative of rho: (theta1'' theta1 - theta1'^2) / theta1^2."""
    th = theta1(t, ectx)
    _check_pole(th, "rho'")
    d1 = theta1_prime(t, ectx)
    return (theta1_second(t, ectx) * th - d1 * d1) / (th * th)


def _theta1_prime0(ectx: EllipticContext) -> complex:
    return complex(theta1_prime(0.0, ectx))


def weierstrass_E(t, ectx) -> np.ndarray:
    """E(t, tau) = theta1(t, tau) / theta1'(0, tau)."""
    ectx = _ctx(ectx)
    return theta1(t, ectx) / _theta1_prime0(ectx)


def sigma_lambda(lam, t, ectx) -> np.ndarray:
    """sigma_lambda(t, tau) = theta1(lambda - t) theta1'(0) / (theta1(lambda) theta1(t))."""
    ectx = _ctx(ectx)
    t = np.asarray(t, dtype=complex)
    lam = np.asarray(lam, dtype=complex)
    den = theta1(lam, ectx) * theta1(t, ectx)
    _check_pole(den, "sigma_lambda")
    return theta1(lam - t, ectx) * _theta1_prime0(ectx) / den


def E_shifted(m, n, x, ectx) -> np.ndarray:
    """E(m + n tau + x, tau) = (-1)^{m+n} e^{-pi i n^2 tau - 2 pi i n x} E(x, tau)."""
    ectx = _ctx(ectx)
    m = np.asarray(m)
    n = np.asarray(n)
    x = np.asarray(x, dtype=complex)
    sign = np.where((m + n) % 2 == 0, 1.0, -1.0)
    return sign * np.exp(-1j * math.pi * n * n * ectx.tau - 2j * math.pi * n * x) * weierstrass_E(x, ectx)


def sigma_shifted(lam, m, n, x, ectx) -> np.ndarray:
    """sigma_lambda(m + n tau + x, tau) = e^{2 pi i n lambda} sigma_lambda(x, tau)."""
    n = np.asarray(n)
    lam_arr = np.asarray(lam, dtype=complex)
    return np.exp(2j * math.pi * n * lam_arr) * sigma_lambda(lam, x, ectx)


def theta_level(kappa: int, n, t, ectx) -> np.ndarray:
    """theta_{kappa,n}(t, tau) = sum_j e^{2 pi i kappa (j + n/2kappa)^2 tau + 2 pi i kappa (j + n/2kappa) t}."""
    ectx = _ctx(ectx)
    t = np.asarray(t, dtype=complex)
    n = int(n) % (2 * kappa)
    # terms decay like e^{-2 pi kappa Im(tau) j^2}; widen for complex t
    jmax = ectx.jtheta + int(np.max(np.abs(t.imag), initial=0.0) / max(ectx.tau.imag, 1e-300)) + 2
    j = np.arange(-jmax, jmax + 1)
    a = j + n / (2 * kappa)
    expo = 2j * math.pi * kappa * (a * a * ectx.tau + np.multiply.outer(t, a))
    return np.sum(np.exp(expo), axis=-1)
