"""Selberg integral in closed Gamma-product form."""

from __future__ import annotations

import cmath
import math

import numpy as np
from scipy.special import loggamma

from .quadrature import PoleError

__all__ = ["selberg"]


def _at_pole(x: float) -> bool:
    return x <= 0 and abs(x - round(x)) < 1e-12


def _lg(x: float) -> complex:
    if _at_pole(x):
        raise PoleError(f"Gamma has a pole at {x}")
    # complex loggamma carries the sign of Gamma for negative arguments
    return complex(loggamma(complex(x)))


def selberg(p: int, alpha: float, beta: float, gamma: float) -> float:
    """B_p(alpha, beta, gamma) = (1/p!) prod_{j<p} G(1+g+jg) G(a+jg) G(b+jg) / (G(1+g) G(a+b+(p+j-1)g)).

    Parameters
    ----------
    p : int
        Dimension, p >= 0.
    alpha, beta, gamma : float
        Real parameters.

    Returns
    -------
    float
        The value, computed through log-Gamma; 0 when a denominator Gamma
        sits at a pole.

    Raises
    ------
    PoleError
        If a numerator Gamma argument is a non-positive integer.
    """
    if p < 0:
        raise ValueError("p must be non-negative")
    acc = -math.lgamma(p + 1) + 0j
    vanishes = False
    for j in range(p):
        acc += _lg(1 + gamma + j * gamma) + _lg(alpha + j * gamma) + _lg(beta + j * gamma)
        for x in (1 + gamma, alpha + beta + (p + j - 1) * gamma):
            if _at_pole(x):
                vanishes = True
            else:
                acc -= _lg(x)
    if vanishes:
        return 0.0
    val = cmath.exp(acc)
    # the product of real Gammas is real; the imaginary part is rounding
    return float(np.real(val))
