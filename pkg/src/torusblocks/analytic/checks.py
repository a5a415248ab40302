"""Numerical verification of the KZB-heat equation and the integral identities.

Every check returns a CheckReport carrying the measured discrepancy, the
tolerance it was judged against and an anchor naming the identity.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field

import numpy as np

from .blocks import IntegralSpec, u_value
from .theta import EllipticContext, rho_prime, theta1

__all__ = [
    "CheckReport",
    "kzb_residual",
    "kzb_check",
    "stokes_check",
    "vanishing_check",
    "s_transform_check",
    "t_transform_check",
    "periodicity_check",
    "quasi_periodicity_check",
    "parity_check",
    "vanishing_order_check",
    "proportionality_check",
    "leading_mode_check",
    "basis_scale",
    "vanishing_band",
    "theta_identities",
]


@dataclass
class CheckReport:
    """Outcome of a numerical identity check."""

    name: str
    params: dict
    residual: float
    tolerance: float
    anchor: str
    values: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return bool(self.residual < self.tolerance)

    def to_json(self) -> dict:
        return {
            "check": self.name,
            "params": self.params,
            "values": {k: _jsonable(v) for k, v in self.values.items()},
            "residual": self.residual,
            "tolerance": self.tolerance,
            "anchor": self.anchor,
            "pass": self.passed,
        }


def _jsonable(v):
    if isinstance(v, complex):
        return [v.real, v.imag]
    if isinstance(v, (list, tuple)):
        return [_jsonable(x) for x in v]
    return v


def _ectx(ectx) -> EllipticContext:
    return ectx if isinstance(ectx, EllipticContext) else EllipticContext(ectx)


def _u(spec: IntegralSpec, lam=None, tau=None, n=None, k=None) -> complex:
    s = spec.replace(**{key: v for key, v in dict(lam=lam, n=n, k=k).items() if v is not None})
    return u_value(s, EllipticContext(tau))


def _qf(kappa: int, e) -> complex:
    return cmath.exp(1j * math.pi * e / kappa)


def _qint(kappa: int, n: int) -> complex:
    return (_qf(kappa, n) - _qf(kappa, -n)) / (_qf(kappa, 1) - _qf(kappa, -1))


def kzb_residual(spec: IntegralSpec, ectx, h_lambda: float = 1e-3, h_tau: float = 1e-3) -> float:
    """Relative residual of 2 pi i kappa u_tau - u_lambda_lambda - p(p+1) rho' u.

    Central differences at steps h and h/2 are combined by one Richardson
    step; the scale is the largest |u| on the stencil.
    """
    return kzb_check(spec, ectx, h_lambda, h_tau).residual


def kzb_check(spec: IntegralSpec, ectx, h_lambda: float = 1e-3, h_tau: float = 1e-3, tol: float = 1e-4) -> CheckReport:
    ectx = _ectx(ectx)
    lam, tau = spec.lam, ectx.tau
    u0 = _u(spec, tau=tau)
    stencil = [abs(u0)]

    def d2(h):
        up, um = _u(spec, lam=lam + h, tau=tau), _u(spec, lam=lam - h, tau=tau)
        stencil.extend([abs(up), abs(um)])
        return (up - 2 * u0 + um) / (h * h)

    def dt(h):
        up, um = _u(spec, tau=tau + h), _u(spec, tau=tau - h)
        stencil.extend([abs(up), abs(um)])
        return (up - um) / (2 * h)

    ull = (4 * d2(h_lambda / 2) - d2(h_lambda)) / 3
    ut = (4 * dt(h_tau / 2) - dt(h_tau)) / 3
    pot = spec.p * (spec.p + 1) * complex(rho_prime(lam, ectx)) * u0
    res = abs(2j * math.pi * spec.kappa * ut - ull - pot) / max(stencil)
    return CheckReport(
        "kzb",
        _params(spec, tau),
        res,
        tol,
        "KZB-heat equation 2 pi i kappa du/dtau = d2u/dlambda2 + p(p+1) rho' u",
        {"u": u0, "u_tau": ut, "u_lambda_lambda": ull},
    )


def _params(spec: IntegralSpec, tau) -> dict:
    return {
        "kappa": spec.kappa,
        "p": spec.p,
        "k": spec.k,
        "n": spec.n,
        "lambda": [spec.lam.real, spec.lam.imag],
        "tau": [complex(tau).real, complex(tau).imag],
        "level": spec.level,
    }


def stokes_check(spec: IntegralSpec, ectx, tol: float = 1e-6, abs_floor: float = 1e-8) -> CheckReport:
    """[p-k](q^{n+p-k} - q^{-n-p+k}) u^{[k]}_n = q^{-n-k-1}[k+1](q^{-2(k+1)} u^{[k+1]}_{n+2} - u^{[k+1]}_n).

    The residual is relative to the larger side, or absolute when both
    sides are below abs_floor (vanishing band).
    """
    ectx = _ectx(ectx)
    kappa, p, k, n = spec.kappa, spec.p, spec.k, spec.n
    if not 0 <= k <= p - 1:
        raise ValueError("need 0 <= k <= p - 1")
    tau = ectx.tau
    lhs = _qint(kappa, p - k) * (_qf(kappa, n + p - k) - _qf(kappa, -n - p + k)) * _u(spec, tau=tau)
    up2 = _u(spec, tau=tau, k=k + 1, n=n + 2)
    up0 = _u(spec, tau=tau, k=k + 1, n=n)
    rhs = _qf(kappa, -n - k - 1) * _qint(kappa, k + 1) * (_qf(kappa, -2 * (k + 1)) * up2 - up0)
    scale = max(abs(lhs), abs(rhs))
    res = abs(lhs - rhs) / scale if scale > abs_floor else abs(lhs - rhs)
    return CheckReport(
        "stokes",
        _params(spec, tau),
        res,
        tol if scale > abs_floor else abs_floor,
        "Stokes relation between u^[k]_n and u^[k+1]_n, u^[k+1]_{n+2}",
        {"lhs": lhs, "rhs": rhs},
    )


def basis_scale(kappa: int, p: int, lam: complex, ectx, level: int = 3) -> float:
    """Largest |u^{[p]}_m| over the basis range p+1 <= m <= kappa-p-1."""
    ectx = _ectx(ectx)
    return max(abs(u_value(IntegralSpec(kappa, p, p, m, lam, level), ectx)) for m in range(p + 1, kappa - p))


def vanishing_band(kappa: int, p: int, k: int) -> list[int]:
    lo = list(range(-p, -p + 2 * k + 1))
    return lo + [kappa + n for n in lo]


def vanishing_check(kappa: int, p: int, k: int, lam: complex, ectx, level: int = 3, tol: float = 1e-8) -> CheckReport:
    """u^{[k]}_n = 0 on the vanishing band, relative to the basis scale."""
    ectx = _ectx(ectx)
    scale = basis_scale(kappa, p, lam, ectx, level)
    vals = {n: u_value(IntegralSpec(kappa, p, k, n, lam, level), ectx) for n in vanishing_band(kappa, p, k)}
    res = max(abs(v) for v in vals.values()) / scale
    return CheckReport(
        "vanishing",
        {"kappa": kappa, "p": p, "k": k, "lambda": [complex(lam).real, complex(lam).imag],
         "tau": [ectx.tau.real, ectx.tau.imag], "level": level},
        res,
        tol,
        "vanishing of u^[k]_n for n in {-p..-p+2k} and {kappa-p..kappa-p+2k}",
        {"basis_scale": scale, "max_abs": max(abs(v) for v in vals.values())},
    )


def _s_matrix_float(kappa: int, p: int) -> np.ndarray:
    from ..modular import embed_matrix, s_matrix
    from ..qcore import QContext

    return embed_matrix(s_matrix(QContext(kappa, p)).S)


def s_transform_check(kappa: int, p: int, n: int, lam: complex, ectx, level: int = 3, tol: float = 1e-4) -> CheckReport:
    """Compare S u^{[p]}_n with sum_m s_{m,n} u^{[p]}_m and with the u^{[0]} expansion.

    S u(lambda, tau) = e^{-pi i kappa lambda^2 / 2 tau} tau^{-1/2 - p(p+1)/kappa} u(lambda/tau, -1/tau)
    with arg tau in (0, pi).
    """
    ectx = _ectx(ectx)
    tau, lam = ectx.tau, complex(lam)
    tau_s = -1 / tau
    spec = IntegralSpec(kappa, p, p, n, lam / tau, level)
    direct = (
        cmath.exp(-1j * math.pi * kappa * lam * lam / (2 * tau))
        * cmath.exp((-0.5 - p * (p + 1) / kappa) * cmath.log(tau))
        * u_value(spec, EllipticContext(tau_s))
    )
    labels = list(range(p + 1, kappa - p))
    s = _s_matrix_float(kappa, p)
    basis = [u_value(IntegralSpec(kappa, p, p, m, lam, level), ectx) for m in labels]
    col = labels.index(n) if n in labels else None
    if col is None:
        raise ValueError("n must be a basis label")
    via_s = sum(s[i, col] * basis[i] for i in range(len(labels)))
    via_u0 = (
        cmath.exp(-1j * math.pi / 4)
        / math.sqrt(2 * kappa)
        * sum(_qf(kappa, -m * n) * u_value(IntegralSpec(kappa, p, 0, m, lam, level), ectx) for m in range(2 * kappa))
    )
    scale = max(abs(direct), abs(via_s))
    res = max(abs(direct - via_s), abs(direct - via_u0)) / scale
    return CheckReport(
        "stransform",
        {"kappa": kappa, "p": p, "n": n, "lambda": [lam.real, lam.imag], "tau": [tau.real, tau.imag], "level": level},
        res,
        tol,
        "S action on u^[p]_n versus the S-matrix column and the u^[0] expansion",
        {"direct": direct, "via_s_matrix": via_s, "via_u0": via_u0},
    )


def t_transform_check(kappa: int, p: int, n: int, lam: complex, ectx, level: int = 3, tol: float = 1e-8) -> CheckReport:
    """u^{[p]}_n(lambda, tau + 1) = q^{n^2/2} u^{[p]}_n(lambda, tau)."""
    ectx = _ectx(ectx)
    spec = IntegralSpec(kappa, p, p, n, lam, level)
    a = u_value(spec, ectx)
    b = u_value(spec, EllipticContext(ectx.tau + 1))
    expect = _qf(kappa, n * n / 2) * a
    res = abs(b - expect) / max(abs(a), 1e-300)
    return CheckReport(
        "ttransform",
        _params(spec, ectx.tau),
        res,
        tol,
        "T action u(lambda, tau+1) = q^{n^2/2} u(lambda, tau)",
        {"u_tau": a, "u_tau_plus_1": b},
    )


def periodicity_check(spec: IntegralSpec, ectx, tol: float = 1e-8) -> CheckReport:
    """Property (i): u(lambda + 2, tau) = u(lambda, tau)."""
    ectx = _ectx(ectx)
    a = u_value(spec, ectx)
    b = u_value(spec.replace(lam=spec.lam + 2), ectx)
    return CheckReport("periodicity", _params(spec, ectx.tau), abs(a - b) / abs(a), tol,
                       "property (i) u(lambda+2) = u(lambda)", {"u": a, "u_shifted": b})


def quasi_periodicity_check(spec: IntegralSpec, ectx, tol: float = 1e-6) -> CheckReport:
    """Property (ii): u(lambda + 2 tau, tau) e^{2 pi i kappa (lambda + tau)} = u(lambda, tau)."""
    ectx = _ectx(ectx)
    a = u_value(spec, ectx)
    b = u_value(spec.replace(lam=spec.lam + 2 * ectx.tau), ectx)
    b = b * cmath.exp(2j * math.pi * spec.kappa * (spec.lam + ectx.tau))
    return CheckReport("quasi_periodicity", _params(spec, ectx.tau), abs(a - b) / abs(a), tol,
                       "property (ii) u(lambda+2tau) = e^{-2 pi i kappa(lambda+tau)} u(lambda)", {"u": a, "u_shifted": b})


def parity_check(spec: IntegralSpec, ectx, tol: float = 1e-12) -> CheckReport:
    """Property (iii): u(-lambda) = (-1)^{p+1} u(lambda), integrating at -lambda independently."""
    ectx = _ectx(ectx)
    a = u_value(spec, ectx)
    b = u_value(spec.replace(lam=-spec.lam), ectx)
    res = abs(b - (-1) ** (spec.p + 1) * a) / abs(a)
    return CheckReport("parity", _params(spec, ectx.tau), res, tol,
                       "property (iii) u(-lambda) = (-1)^{p+1} u(lambda)", {"u": a, "u_neg": b})


def vanishing_order_check(spec: IntegralSpec, ectx, direction: complex = 1 + 0.3j, tol: float = 0.05) -> CheckReport:
    """Property (iv): |u(lambda)| / |lambda|^{p+1} stabilises along lambda = 10^{-1..-3} direction."""
    ectx = _ectx(ectx)
    direction = direction / abs(direction)
    ratios = []
    for e in (1, 2, 3):
        lam = direction * 10.0 ** (-e)
        ratios.append(abs(u_value(spec.replace(lam=lam), ectx)) / abs(lam) ** (spec.p + 1))
    res = abs(ratios[-1] - ratios[-2]) / ratios[-1]
    return CheckReport("vanishing_order", _params(spec, ectx.tau), res, tol,
                       "property (iv) u = O(lambda^{p+1}) near lattice points", {"ratios": ratios})


def proportionality_check(p: int, ectx, points: int = 20, level: int = 3, tol: float = 1e-6) -> CheckReport:
    """At kappa = 2p+2 the single block u^{[p]}_{p+1} is a multiple of theta1^{p+1}."""
    ectx = _ectx(ectx)
    kappa = 2 * p + 2
    rng = np.random.default_rng(2024)
    lams = rng.uniform(0.05, 0.95, points) + 1j * rng.uniform(-0.2, 0.2, points)
    ratios = np.array([
        u_value(IntegralSpec(kappa, p, p, p + 1, lam, level), ectx) / complex(theta1(lam, ectx)) ** (p + 1)
        for lam in lams
    ])
    mean = ratios.mean()
    res = float(np.max(np.abs(ratios - mean)) / abs(mean))
    return CheckReport("proportionality", {"kappa": kappa, "p": p, "points": points, "level": level,
                       "tau": [ectx.tau.real, ectx.tau.imag]}, res, tol,
                       "single block at kappa = 2p+2 is a multiple of theta1^{p+1}", {"ratio": complex(mean)})


def leading_mode_check(kappa: int, n: int, imtau: float = 8.0, level: int = 3, samples: int = 64,
                       tol: float = 0.1) -> CheckReport:
    """p = 1: the top Fourier mode of u e^{-pi i n^2 tau/2kappa} sin(pi lambda) dominates as Im tau grows.

    The normalised block is sampled on a real lambda grid and expanded in
    sin(pi j lambda); the residual is the largest non-top mode relative to
    the sin(pi lambda (n+1)) coefficient.
    """
    p = 1
    tau = 1j * imtau
    ectx = EllipticContext(tau)
    lams = (np.arange(samples) + 0.5) / samples * 2
    vals = np.array([
        u_value(IntegralSpec(kappa, p, p, n, lam, level), ectx)
        * cmath.exp(-1j * math.pi * n * n * tau / (2 * kappa))
        * math.sin(math.pi * lam)
        for lam in lams
    ])
    modes = {j: abs(np.mean(vals * np.sin(math.pi * j * lams))) * 2 for j in range(1, samples // 2)}
    top = modes[n + p]
    others = max(v for j, v in modes.items() if j > n + p) if any(j > n + p for j in modes) else 0.0
    res = others / top
    return CheckReport("leading_mode", {"kappa": kappa, "p": p, "n": n, "imtau": imtau}, res, tol,
                       "leading term dominated by sin(pi lambda (n+p))", {"top": top, "higher": others})


def theta_identities(ectx, kappa: int = 5, samples: int = 50, seed: int = 7) -> list[CheckReport]:
    """Quasi-periodicity and modular laws of theta1, E, sigma_lambda and theta_{kappa,n}.

    Random points t, lambda in a box around the fundamental domain; each law
    is reported with the largest relative deviation over the samples.
    """
    from .theta import sigma_lambda, theta_level, weierstrass_E

    ectx = _ectx(ectx)
    tau = ectx.tau
    rng = np.random.default_rng(seed)
    t = rng.uniform(-0.9, 0.9, samples) + 1j * rng.uniform(-0.4, 0.4, samples) * tau.imag
    lam = rng.uniform(-0.9, 0.9, samples) + 1j * rng.uniform(-0.4, 0.4, samples) * tau.imag
    ns = rng.integers(-2 * kappa, 2 * kappa, samples)
    e1 = ectx.with_tau(tau + 1)
    es = ectx.with_tau(-1 / tau)
    sq = cmath.sqrt(-1j * tau)  # principal branch, |arg(-i tau)| < pi/2

    def rel(a, b):
        a, b = np.asarray(a), np.asarray(b)
        return float(np.max(np.abs(a - b) / np.maximum(np.abs(b), 1e-300)))

    th = lambda x, e=ectx: theta1(x, e)  # noqa: E731
    E = lambda x, e=ectx: weierstrass_E(x, e)  # noqa: E731
    sg = lambda l, x, e=ectx: sigma_lambda(l, x, e)  # noqa: E731
    tl = lambda n, x, e=ectx: np.array([complex(theta_level(kappa, int(nn), xx, e)) for nn, xx in zip(np.broadcast_to(n, x.shape), x)])  # noqa: E731
    q = lambda e: np.exp(1j * math.pi * np.asarray(e) / kappa)  # noqa: E731
    laws = [
        ("theta1_T", rel(th(t, e1), cmath.exp(1j * math.pi / 4) * th(t)), 1e-12),
        ("theta1_S", rel(th(t / tau, es), sq / 1j * np.exp(1j * math.pi * t * t / tau) * th(t)), 1e-10),
        ("E_shift_1", rel(E(t + 1), -E(t)), 1e-12),
        ("E_shift_tau", rel(E(t + tau), -np.exp(-1j * math.pi * tau - 2j * math.pi * t) * E(t)), 1e-12),
        ("E_T", rel(E(t, e1), E(t)), 1e-12),
        ("E_S", rel(E(t / tau, es), np.exp(1j * math.pi * t * t / tau) * E(t) / tau), 1e-8),
        ("sigma_shift_1", rel(sg(lam, t + 1), sg(lam, t)), 1e-12),
        ("sigma_shift_tau", rel(sg(lam, t + tau), np.exp(2j * math.pi * lam) * sg(lam, t)), 1e-12),
        ("sigma_T", rel(sg(lam, t, e1), sg(lam, t)), 1e-12),
        ("sigma_S", rel(sg(lam / tau, t / tau, es), tau * np.exp(-2j * math.pi * t * lam / tau) * sg(lam, t)), 1e-8),
        ("theta_level_period", rel(tl(ns + 2 * kappa, t), tl(ns, t)), 1e-14),
        ("theta_level_reflect", rel(tl(ns, -t), tl(-ns, t)), 1e-14),
        ("theta_level_shift", rel(tl(ns, t + 2 / kappa), q(2 * ns) * tl(ns, t)), 1e-12),
        ("theta_level_shift_tau",
         rel(tl(ns, t + 2 * tau / kappa), np.exp(-2j * math.pi * t - 2j * math.pi * tau / kappa) * tl(ns + 2, t)), 1e-12),
        ("theta_level_T", rel(tl(ns, t, e1), q(ns * ns / 2) * tl(ns, t)), 1e-12),
    ]
    full = np.array([tl(m, t) for m in range(2 * kappa)])
    rhs = np.array([
        cmath.sqrt(-1j * tau / (2 * kappa)) * np.exp(1j * math.pi * kappa * t[i] ** 2 / (2 * tau))
        * np.sum(q(-np.arange(2 * kappa) * ns[i]) * full[:, i])
        for i in range(samples)
    ])
    laws.append(("theta_level_S", rel(tl(ns, t / tau, es), rhs), 1e-8))
    params = {"tau": [tau.real, tau.imag], "kappa": kappa, "samples": samples}
    return [CheckReport(name, params, res, tol, f"theta law {name}") for name, res, tol in laws]
