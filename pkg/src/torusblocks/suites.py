"""Grid-wide verification suites shared by the CLI report and the acceptance tests.

Each suite enumerates one identity over a parameter grid and returns a
SuiteResult with the number of instances checked and the failures found.
"""

from __future__ import annotations

import math
import random
import time
from dataclasses import dataclass, field

from .macdonald import inner_product, macdonald_gram_schmidt, macdonald_via_shift
from .modular import (
    admissible_m,
    f_coeff,
    f_recursion,
    f_reflection,
    gauss_product,
    kirillov_compare,
    macdonald_f_identity,
    verify_relations,
)
from .qcore import QContext
from .trace import (
    TraceArgs,
    calibrate_convention,
    macdonald_trace_identity,
    phi21_terminating,
    psi_renormalized,
    psi_renormalized_limit,
    trace_f_identity,
)

__all__ = [
    "SuiteResult",
    "grid",
    "relations_suite",
    "kirillov_suite",
    "macdonald_f_suite",
    "f_symmetry_suite",
    "trace_f_suite",
    "gauss_suite",
    "macdonald_oracle_suite",
    "verma_suite",
    "degenerate_suite",
    "numeric_suite",
    "p2_spot_suite",
]


@dataclass
class SuiteResult:
    """Outcome of one suite: instance count, failures and wall time."""

    name: str
    anchor: str
    count: int = 0
    failures: list = field(default_factory=list)
    elapsed: float = 0.0
    details: dict = field(default_factory=dict)
    provenance: str = "exact"

    @property
    def passed(self) -> bool:
        return self.count > 0 and not self.failures

    def to_json(self) -> dict:
        return {
            "name": self.name,
            "anchor": self.anchor,
            "provenance": self.provenance,
            "count": self.count,
            "failures": [list(f) if isinstance(f, tuple) else f for f in self.failures[:50]],
            "details": self.details,
            "pass": self.passed,
        }


class _Timer:
    def __init__(self, result: SuiteResult):
        self.result = result

    def __enter__(self):
        self.t0 = time.perf_counter()
        return self.result

    def __exit__(self, *exc):
        # elapsed time is reported to callers but kept out of JSON for determinism
        self.result.elapsed = time.perf_counter() - self.t0
        return False


def grid(kappas, pmax: int | None = None):
    """All (kappa, p) with 0 <= p <= (kappa-2)/2, optionally capped at pmax."""
    for kap in kappas:
        top = (kap - 2) // 2
        if pmax is not None:
            top = min(top, pmax)
        for p in range(top + 1):
            yield kap, p


def relations_suite(kappas=range(4, 13)) -> SuiteResult:
    res = SuiteResult("relations", "S'^2 and ((S'T)^3)^2 exact; S^2 = (ST)^3 = (-1)^p i q^{-p(p+1)} I in floats")
    with _Timer(res):
        for kap, p in grid(kappas):
            rep = verify_relations(QContext(kap, p))
            res.count += 1
            if not rep.passed:
                res.failures.append((kap, p))
    return res


def kirillov_suite(kappas=range(4, 13)) -> SuiteResult:
    res = SuiteResult("kirillov", "T = e^{pi i/4} D^-1 T~ D and S = e^{-3 pi i/4} D^-1 S~ D")
    with _Timer(res):
        for kap, p in grid(kappas):
            rep = kirillov_compare(QContext(kap, p))
            res.count += 1
            if not rep.passed:
                res.failures.append((kap, p))
    return res


def macdonald_f_suite(kappas=range(4, 11), pmax: int = 3) -> SuiteResult:
    res = SuiteResult("macdonald_f", "f^(k)_{m,n} equals the Macdonald polynomial expression")
    with _Timer(res):
        for kap, p in grid(kappas, pmax):
            ctx = QContext(kap, p)
            for k in range(p + 1):
                for m in range(-p + 2 * k + 1, kap - p):
                    for n in range(k + 1, kap + 1):
                        res.count += 1
                        if not macdonald_f_identity(ctx, k, m, n):
                            res.failures.append((kap, p, k, m, n))
    return res


def f_symmetry_suite(kappas=range(4, 11), pmax: int = 4) -> SuiteResult:
    res = SuiteResult("f_symmetry", "reflection and Stokes recursion of f^(k)_{m,n}")
    with _Timer(res):
        for kap, p in grid(kappas, pmax):
            ctx = QContext(kap, p)
            for k in range(p + 1):
                for m in admissible_m(ctx, k):
                    for n in range(-kap, kap + 1, 3):
                        res.count += 1
                        if f_coeff(ctx, k, m, n) != f_reflection(ctx, k, m, n):
                            res.failures.append(("reflection", kap, p, k, m, n))
                        if k < p and m in admissible_m(ctx, k + 1):
                            if f_coeff(ctx, k + 1, m, n) != f_recursion(ctx, k, m, n):
                                res.failures.append(("recursion", kap, p, k, m, n))
    return res


def trace_f_suite(kappas=range(4, 11), pmax: int = 3) -> SuiteResult:
    res = SuiteResult(
        "trace_f",
        "f^(k)_{m,n} equals the renormalized trace; Macdonald-trace corollary; terminating 2phi1",
    )
    counts = {"trace_f": 0, "corollary": 0, "phi21": 0}
    with _Timer(res):
        for kap, p in grid(kappas, pmax):
            ctx = QContext(kap, p)
            for k in range(p + 1):
                for m in admissible_m(ctx, k):
                    for n in range(-kap, kap + 1):
                        counts["trace_f"] += 1
                        if not trace_f_identity(ctx, k, m, n):
                            res.failures.append(("trace_f", kap, p, k, m, n))
                for m in range(-p + 2 * k + 1, kap - p):
                    for n in range(k + 1, kap + 1):
                        counts["corollary"] += 1
                        if not macdonald_trace_identity(ctx, k, m, n):
                            res.failures.append(("corollary", kap, p, k, m, n))
                for j in range(k + 1):
                    for m in range(-p + 2 * k + 1, kap - p):
                        counts["phi21"] += 1
                        total, closed = phi21_terminating(ctx, k, j, m)
                        if total != closed:
                            res.failures.append(("phi21", kap, p, k, j, m))
    res.count = sum(counts.values())
    res.details = counts
    return res


def gauss_suite(pmax: int = 5) -> SuiteResult:
    res = SuiteResult("gauss_product", "(prod_j (q^j + q^-j))^2 = p+1 at kappa = 2p+2, positive root")
    with _Timer(res):
        for p in range(pmax + 1):
            g = gauss_product(p)
            res.count += 1
            val = g.embed()
            ok = g * g == g.from_rational(g.order, p + 1) and abs(val - math.sqrt(p + 1)) < 1e-12
            if not ok:
                res.failures.append((p,))
    return res


def macdonald_oracle_suite(nmax: int = 8, kmax: int = 4, orth_max: int = 6) -> SuiteResult:
    res = SuiteResult("macdonald_oracle", "shift-operator construction equals Gram-Schmidt; orthogonality")
    with _Timer(res):
        for k in range(kmax + 1):
            for n in range(nmax + 1):
                res.count += 1
                if macdonald_via_shift(n, k) != macdonald_gram_schmidt(n, k):
                    res.failures.append(("shift_vs_gs", n, k))
            for m in range(orth_max + 1):
                for n in range(m + 1, orth_max + 1):
                    res.count += 1
                    ip = inner_product(macdonald_via_shift(m, k), macdonald_via_shift(n, k), k)
                    if ip != 0:
                        res.failures.append(("orthogonality", m, n, k))
    return res


def verma_suite(q: float = 0.9, nu: float = -2.3, mu: float = 1.7, depth: int = 300, tol: float = 1e-10) -> SuiteResult:
    res = SuiteResult("verma_oracle", "truncated Verma trace equals psi^(k) up to q^{c nu}", provenance="float")
    with _Timer(res):
        ks = [0, 1, 2, 3]
        cal = calibrate_convention(ks, nu, mu, q, depth)
        res.count = len(ks)
        c0 = cal.c
        for k in ks:
            if cal.residuals[k] > tol or abs(cal.exponents[k] - c0) > 1e-8:
                res.failures.append((k, cal.residuals[k]))
        res.details = {
            "c": [c0.real, c0.imag],
            "residuals": {str(k): v for k, v in cal.residuals.items()},
        }
    return res


def degenerate_suite(kappa: int = 8, points: int = 20, seed: int = 0, tol: float = 1e-8) -> SuiteResult:
    """Pole-free Psi at integer points versus the symmetric epsilon limit.

    Points are (k, nu, mu) with k <= 2, nu = -m-p+k for admissible m and
    integer mu; half of them have mu = l mod kappa with l < k, where the
    unrenormalized trace has cancelling poles.
    """
    res = SuiteResult("psi_degenerate", "pole-free Psi equals its epsilon-perturbation limit", provenance="float")
    p = (kappa - 2) // 2
    ctx = QContext(kappa, p)
    rng = random.Random(seed)
    worst = 0.0
    with _Timer(res):
        for i in range(points):
            k = rng.randint(1, 2) if i % 2 == 0 else rng.randint(0, 2)
            m = rng.choice(admissible_m(ctx, k))
            nu = -m - p + k
            if i % 2 == 0:
                mu = rng.randrange(k) + kappa * rng.randint(-3, 3)
            else:
                mu = rng.randint(-3 * kappa, 3 * kappa)
            args = TraceArgs(k, nu, mu, ctx.qpow(-1))
            exact = psi_renormalized(args).embed()
            lim = psi_renormalized_limit(args)
            err = abs(exact - lim) / max(abs(exact), 1.0)
            worst = max(worst, err)
            res.count += 1
            if err > tol:
                res.failures.append((k, nu, mu, err))
    res.details = {"worst": worst}
    return res


def numeric_suite(kappas=(4, 5), taus=(1j, 0.3 + 1j), lam: complex = 0.31 + 0.07j, level: int = 3) -> SuiteResult:
    """p = 1 numerical checks: KZB, properties (i)-(iii), vanishing, Stokes, S and T, proportionality."""
    from .analytic import (
        IntegralSpec,
        kzb_check,
        parity_check,
        periodicity_check,
        proportionality_check,
        quasi_periodicity_check,
        s_transform_check,
        stokes_check,
        t_transform_check,
        vanishing_check,
    )

    res = SuiteResult("numeric_p1", "KZB-heat equation and integral identities for p = 1", provenance="float")
    reports = []
    with _Timer(res):
        for tau in taus:
            kzb_tol = 1e-5 if complex(tau).real == 0 else 1e-4
            for kap in kappas:
                for k in (0, 1):
                    reports.append(kzb_check(IntegralSpec(kap, 1, k, 2, lam, level), tau, tol=kzb_tol))
                spec = IntegralSpec(kap, 1, 1, 2, lam, level)
                reports.append(periodicity_check(spec, tau, tol=1e-6))
                reports.append(quasi_periodicity_check(spec, tau, tol=1e-6))
                reports.append(parity_check(spec, tau, tol=1e-6))
                for k in (0, 1):
                    reports.append(vanishing_check(kap, 1, k, lam, tau, level, tol=1e-8))
                for n in range(-1, kap + 1):
                    reports.append(stokes_check(IntegralSpec(kap, 1, 0, n, 0.31, level), tau, tol=1e-6))
                reports.append(s_transform_check(kap, 1, 2, 0.2, tau, level, tol=1e-4))
                reports.append(t_transform_check(kap, 1, 2, lam, tau, level, tol=1e-8))
            reports.append(proportionality_check(1, tau, level=level, tol=1e-6))
    res.count = len(reports)
    res.failures = [r.to_json() for r in reports if not r.passed]
    res.details = {"worst": {name: max(r.residual for r in reports if r.name == name)
                             for name in sorted({r.name for r in reports})}}
    return res


def p2_spot_suite(kappa: int = 8, tau: complex = 1j, level: int = 3) -> SuiteResult:
    """Stokes identity for p = 2 at kappa = 8, both k = 0 and k = 1."""
    from .analytic import IntegralSpec, stokes_check

    res = SuiteResult("stokes_p2", "Stokes relation at p = 2", provenance="float")
    with _Timer(res):
        reps = [stokes_check(IntegralSpec(kappa, 2, k, n, 0.31, level), tau, tol=1e-4) for k in (0, 1) for n in (3, 4)]
    res.count = len(reps)
    res.failures = [r.to_json() for r in reps if not r.passed]
    res.details = {"worst": max(r.residual for r in reps)}
    return res
