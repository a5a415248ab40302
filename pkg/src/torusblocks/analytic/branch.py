"""Branch control for the master function by continuation in tau.

Arguments of the E factors are fixed at tau = i and then followed along the
straight segment from i to the target tau, which stays in the upper half
plane.  Each step accepts an increment only if no factor's argument jumps
by pi/2 or more; otherwise the step is halved.
"""

from __future__ import annotations

import math
from typing import Callable

import numpy as np

from .theta import EllipticContext, weierstrass_E

__all__ = ["BranchError", "TAU0", "track_arguments", "phi_master"]

TAU0 = 1j


class BranchError(RuntimeError):
    """Argument tracking failed: the step size fell below its minimum."""


def track_arguments(
    evaluate: Callable[[complex], np.ndarray],
    tau: complex,
    *,
    initial_step: float = 1 / 16,
    min_step: float = 1e-6,
    max_jump: float = math.pi / 2,
) -> tuple[np.ndarray, np.ndarray]:
    """Continue principal arguments at tau = i to the target tau.

    Parameters
    ----------
    evaluate : callable
        Maps a modular parameter to an array of nonzero complex values.
    tau : complex
        Target point in the upper half plane.

    Returns
    -------
    values, args : ndarray
        Values at the target and their continuously tracked arguments.
    """
    tau = complex(tau)
    cur = np.asarray(evaluate(TAU0))
    args = np.angle(cur)
    if tau == TAU0:
        return cur, args
    s, ds = 0.0, initial_step
    while s < 1.0:
        s1 = min(1.0, s + ds)
        new = np.asarray(evaluate(TAU0 + s1 * (tau - TAU0)))
        jump = np.angle(new / cur)
        if np.max(np.abs(jump), initial=0.0) >= max_jump:
            ds /= 2
            if ds < min_step:
                raise BranchError(f"argument tracking failed near tau={TAU0 + s * (tau - TAU0)}")
            continue
        args = args + jump
        cur, s = new, s1
        ds = min(2 * ds, 0.25)
    return cur, args


def phi_master(t, kappa: int, k: int, ectx) -> np.ndarray:
    """Master function prod E(t_j)^{-2p/kappa} prod_{i<j} E(t_i - t_j)^{2/kappa}.

    Parameters
    ----------
    t : array_like, shape (..., p)
        Points with (t_1..t_k) real in the simplex and (t_{k+1}..t_p) on the
        tau-scaled simplex.
    kappa : int
        Level.
    k : int
        Number of real variables.
    ectx : EllipticContext or complex
        Target modular parameter.

    Returns
    -------
    ndarray
        Values with the branch fixed at tau = i and continued along the path.
    """
    ectx = ectx if isinstance(ectx, EllipticContext) else EllipticContext(ectx)
    tau = ectx.tau
    t = np.asarray(t, dtype=complex)
    if t.ndim == 1:
        t = t[None, :]
    p = t.shape[-1]
    flat = t.reshape(-1, p)
    a = np.where(np.arange(p) < k, flat.real, 0.0)
    b = np.where(np.arange(p) < k, 0.0, (flat / tau).real)
    forms, expo = [], []
    for j in range(p):
        forms.append((a[:, j], b[:, j]))
        expo.append(-2 * p / kappa)
    for i in range(p):
        for j in range(i + 1, p):
            forms.append((a[:, i] - a[:, j], b[:, i] - b[:, j]))
            expo.append(2 / kappa)

    def evaluate(tt):
        e = EllipticContext(tt)
        return np.stack([weierstrass_E(fa + fb * tt, e) for fa, fb in forms])

    vals, args = track_arguments(evaluate, tau)
    ex = np.array(expo)[:, None]
    out = np.prod(np.abs(vals) ** ex * np.exp(1j * ex * args), axis=0)
    return out.reshape(t.shape[:-1])
