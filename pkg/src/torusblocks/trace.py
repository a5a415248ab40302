"""Trace functions of U_q(sl2) and their identification with f^{(k)}_{m,n}.

psi^{(k)}(q, nu, mu) is the closed form of the weighted trace of an
intertwiner M_mu -> M_mu (x) U over a Verma module, with U the irreducible
module of highest weight 2k.  Psi^{(k)} multiplies it by a ratio of
q-numbers that cancels every pole in mu.

Three evaluation regimes are supported:

* exact, for integer nu and mu at q = e^{+-pi i/kappa} (CycloScalar values);
* complex floating point, for any q given through its logarithm;
* the truncated Verma-module trace at generic |q| < 1, used as an oracle.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from typing import Sequence, Union

import numpy as np

from .macdonald import evaluate, macdonald_at_root
from .modular import f_coeff, _binom_inv
from .qcore import CycloScalar, QContext, q_int, q_int_inv, q_pochhammer, q_pochhammer_inv

__all__ = [
    "TraceArgs",
    "PoleError",
    "ConvergenceError",
    "psi",
    "psi_renormalized",
    "psi_renormalized_limit",
    "trace_f_identity",
    "macdonald_trace_identity",
    "shift_identity",
    "phi21_terminating",
    "VermaModel",
    "verma_trace_oracle",
    "calibrate_convention",
]

Scalar = Union[complex, CycloScalar]


class PoleError(ZeroDivisionError):
    """A q-number in a denominator of the trace formula vanishes."""


class ConvergenceError(ArithmeticError):
    """The weighted Verma trace does not converge for these parameters."""


@dataclass(frozen=True)
class TraceArgs:
    """Arguments (k, nu, mu) and the deformation parameter q.

    ``q`` is either a complex number (principal logarithm is used for
    non-integer powers) or the CycloScalar q or q^{-1} of some QContext.
    """

    k: int
    nu: complex
    mu: complex
    q: Scalar

    def __post_init__(self):
        if self.k < 0:
            raise ValueError("k must be non-negative")


# ---------------------------------------------------------------------------
# scalar engines


class _ExactQ:
    """Powers and q-numbers of Q = q^sign, q = e^{pi i/kappa}, exactly."""

    exact = True

    def __init__(self, kappa: int, sign: int):
        self.ctx = QContext(kappa)
        self.sign = sign
        self.kappa = kappa

    def pw(self, e) -> CycloScalar:
        return self.ctx.qpow(self.sign * e)

    def qint(self, x: int) -> CycloScalar:
        # [x] is invariant under q -> q^{-1}
        return q_int(self.ctx, x)

    def is_zero(self, v: CycloScalar) -> bool:
        return v.is_zero()

    def inv(self, v: CycloScalar) -> CycloScalar:
        return v.inverse()

    def qint_inv(self, x: int) -> CycloScalar:
        return q_int_inv(self.ctx, x)

    @property
    def delta(self) -> CycloScalar:
        return self.pw(1) - self.pw(-1)

    def one(self) -> CycloScalar:
        return self.ctx.const(1)


class _FloatQ:
    """Same interface with Q = exp(logq) in complex floating point."""

    exact = False

    def __init__(self, logq: complex):
        self.logq = complex(logq)

    def pw(self, e) -> complex:
        return cmath.exp(e * self.logq)

    def qint(self, x) -> complex:
        return (self.pw(x) - self.pw(-x)) / (self.pw(1) - self.pw(-1))

    def is_zero(self, v: complex, scale: float = 1.0) -> bool:
        return abs(v) < 1e-14 * max(scale, 1.0)

    def inv(self, v: complex) -> complex:
        return 1 / v

    def qint_inv(self, x) -> complex:
        return 1 / self.qint(x)

    @property
    def delta(self) -> complex:
        return self.pw(1) - self.pw(-1)

    def one(self) -> complex:
        return 1 + 0j


def _is_int(x) -> bool:
    if isinstance(x, (int, np.integer)):
        return True
    if isinstance(x, complex):
        return x.imag == 0 and float(x.real).is_integer()
    if isinstance(x, float):
        return x.is_integer()
    return False


def _engine(args: TraceArgs):
    q = args.q
    if isinstance(q, CycloScalar):
        if q.order % 8:
            raise ValueError("q must live in a field of order 8 kappa")
        kappa = q.order // 8
        if q == CycloScalar.zeta(q.order, 4):
            sign = 1
        elif q == CycloScalar.zeta(q.order, -4):
            sign = -1
        else:
            raise ValueError("exact q must be e^{pi i/kappa} or its inverse")
        if _is_int(args.nu) and _is_int(args.mu):
            return _ExactQ(kappa, sign), int(_re(args.nu)), int(_re(args.mu))
        return _FloatQ(sign * 1j * math.pi / kappa), complex(args.nu), complex(args.mu)
    return _FloatQ(cmath.log(complex(q))), complex(args.nu), complex(args.mu)


def _re(x):
    return x.real if isinstance(x, complex) else x


def _central(eng, k: int, j: int):
    # [k+j]! / ([j]! [k-j]!)
    if eng.exact:
        return q_pochhammer(eng.ctx, k - j + 1, 2 * j) * q_pochhammer_inv(eng.ctx, 1, j)
    out = 1 + 0j
    for i in range(k - j + 1, k + j + 1):
        out *= eng.qint(i)
    for i in range(1, j + 1):
        out /= eng.qint(i)
    return out


def _pole_check(eng, val, what: str):
    if eng.exact:
        if val.is_zero():
            raise PoleError(f"{what} vanishes")
    elif abs(val) < 1e-300:
        raise PoleError(f"{what} vanishes")


# ---------------------------------------------------------------------------
# closed forms


def psi(args: TraceArgs) -> Scalar:
    """psi^{(k)}(q, nu, mu) by its closed finite sum.

    Raises
    ------
    PoleError
        If some [mu - l] (l < j) or [nu - l] (l <= j) of a contributing term
        vanishes.
    """
    eng, nu, mu = _engine(args)
    k = args.k
    acc = None
    delta = eng.delta
    dinv = eng.inv(delta)
    for j in range(k + 1):
        den = eng.one()
        for l in range(j):
            v = eng.qint(mu - l)
            _pole_check(eng, v, f"[mu-{l}]")
            den = den * v
        for l in range(j + 1):
            v = eng.qint(nu - l)
            _pole_check(eng, v, f"[nu-{l}]")
            den = den * v
        term = eng.pw(j * (j - 3) // 2) * dinv ** (j + 1) * _central(eng, k, j)
        term = term * eng.pw(-j * mu - (j - 1) * nu) * eng.inv(den)
        if j % 2:
            term = -term
        acc = term if acc is None else acc + term
    return eng.pw(nu * mu) * acc


def _prefactor(eng, k: int, nu, mu):
    num = eng.one()
    den = eng.one()
    for j in range(1, k + 1):
        num = num * (eng.pw(mu + 1 - j) - eng.pw(-mu - 1 + j))
        den = den * (eng.pw(nu + j) - eng.pw(-nu - j))
    _pole_check(eng, den, "prod (q^{nu+j} - q^{-nu-j})")
    return num * eng.inv(den)


def _psi_polefree(eng, k: int, nu, mu):
    """Psi^{(k)} as a finite sum that is manifestly entire in mu.

    Psi = q^{nu(mu+1)} / prod_{i=-k}^{k} [i-nu]
          * sum_j (-1)^{j+1} q^{j(j-1)/2 - j(nu+mu+1)} (q-q^{-1})^{-j-1}
            [k+j]!/([j]![k-j]!) prod_{l=j+1}^{k} [l-nu][l-mu-1]
    """
    den = eng.one()
    for i in range(-k, k + 1):
        den = den * eng.qint(i - nu)
    _pole_check(eng, den, "prod [i-nu]")
    dinv = eng.inv(eng.delta)
    acc = None
    for j in range(k + 1):
        prod = eng.one()
        for l in range(j + 1, k + 1):
            prod = prod * eng.qint(l - nu) * eng.qint(l - mu - 1)
        term = eng.pw(j * (j - 1) // 2 - j * (nu + mu + 1)) * dinv ** (j + 1)
        term = term * _central(eng, k, j) * prod
        if j % 2 == 0:
            term = -term
        acc = term if acc is None else acc + term
    return eng.pw(nu * (mu + 1)) * acc * eng.inv(den)


def _near_degenerate(eng, k: int, mu) -> bool:
    scale = max(abs(eng.pw(mu)), abs(eng.pw(-mu)), 1.0)
    return any(abs(eng.qint(mu - l)) * abs(eng.delta) < 1e-6 * scale for l in range(k))


def psi_renormalized(args: TraceArgs, method: str = "auto") -> Scalar:
    """Psi^{(k)} = prod_{j=1}^k (q^{mu+1-j}-q^{-mu-1+j})/(q^{nu+j}-q^{-nu-j}) psi^{(k)}.

    Parameters
    ----------
    method : {"auto", "direct", "polefree"}
        "direct" multiplies the prefactor into psi and fails at the poles of
        psi; "polefree" uses the rearranged finite sum that has no poles in
        mu.  "auto" uses the pole-free sum for exact integer arguments and for
        floating-point arguments close to a pole, and the direct product
        otherwise.
    """
    eng, nu, mu = _engine(args)
    k = args.k
    if method == "auto":
        method = "polefree" if eng.exact or _near_degenerate(eng, k, mu) else "direct"
    if method == "polefree":
        return _psi_polefree(eng, k, nu, mu)
    if method == "direct":
        return _prefactor(eng, k, nu, mu) * psi(args)
    raise ValueError(f"unknown method {method!r}")


def psi_renormalized_limit(args: TraceArgs, eps: float = 1e-5) -> complex:
    """Psi^{(k)} at (nu, mu) as the limit of direct evaluations at mu +- eps.

    Symmetric averages g(h) = (Psi(mu+h) + Psi(mu-h))/2 are combined by one
    Richardson step over h = eps, eps/2, removing the O(h^2) error.
    """
    eng, nu, mu = _engine(args)
    if eng.exact:
        eng = _FloatQ(eng.sign * 1j * math.pi / eng.kappa)
    nu = complex(nu)
    mu = complex(mu)

    def direct(m):
        return _prefactor(eng, args.k, nu, m) * _psi_float(eng, args.k, nu, m)

    def g(h):
        return 0.5 * (direct(mu + h) + direct(mu - h))

    return (4 * g(eps / 2) - g(eps)) / 3


def _psi_float(eng: _FloatQ, k: int, nu: complex, mu: complex) -> complex:
    acc = 0j
    dinv = 1 / eng.delta
    for j in range(k + 1):
        den = 1 + 0j
        for l in range(j):
            den *= eng.qint(mu - l)
        for l in range(j + 1):
            den *= eng.qint(nu - l)
        term = eng.pw(j * (j - 3) / 2) * dinv ** (j + 1) * _central(eng, k, j)
        term *= eng.pw(-j * mu - (j - 1) * nu) / den
        acc += -term if j % 2 else term
    return eng.pw(nu * mu) * acc


# ---------------------------------------------------------------------------
# identities at the root of unity


def _exact_psi_ren(ctx: QContext, k: int, nu: int, mu: int, sign: int = -1) -> CycloScalar:
    return _psi_polefree(_ExactQ(ctx.kappa, sign), k, nu, mu)


def _check_theorem_range(ctx: QContext, k: int, m: int):
    p, kap = ctx.p, ctx.kappa
    if not 0 <= k <= p:
        raise ValueError(f"need 0 <= k <= p, got k={k}")
    ok = -p + 2 * k + 1 <= m <= kap - p - 1 or kap - p + 2 * k + 1 <= m <= 2 * kap - p - 1
    if not ok:
        raise ValueError(f"m={m} outside the admissible ranges")


def trace_f_rhs(ctx: QContext, k: int, m: int, n: int) -> CycloScalar:
    """q^{pn-km-k(k+1)}(q^{m+p-k}-q^{-m-p+k})[p;k]^{-1} Psi^{(k)}(q^{-1}, -m-p+k, -n-1)."""
    p = ctx.p
    pref = ctx.qpow(p * n - k * m - k * (k + 1)) * (ctx.qpow(m + p - k) - ctx.qpow(-m - p + k))
    pref = pref * _binom_inv(ctx.kappa, p, k)
    return pref * _exact_psi_ren(ctx, k, -m - p + k, -n - 1)


def trace_f_identity(ctx: QContext, k: int, m: int, n: int) -> bool:
    """Exact check that f^{(k)}_{m,n} equals the renormalized trace expression."""
    _check_theorem_range(ctx, k, m)
    return f_coeff(ctx, k, m, n) == trace_f_rhs(ctx, k, m, n)


def macdonald_trace_identity(ctx: QContext, k: int, m: int, n: int) -> bool:
    """Psi(q^{-1},a,n-1) - Psi(q^{-1},a,-n-1) = P^{(k+1)}_{n-k-1}(m+p-k) prod_j (q^{-n+2j}-q^n),
    with a = -m-p+k, for k+1 <= n <= kappa and -p+2k+1 <= m <= kappa-p-1."""
    p, kap = ctx.p, ctx.kappa
    if kap < 2 * k + 2:
        raise ValueError("need kappa >= 2k+2")
    if not k + 1 <= n <= kap:
        raise ValueError(f"n={n} outside {k + 1}..{kap}")
    if not -p + 2 * k + 1 <= m <= kap - p - 1:
        raise ValueError(f"m={m} outside {-p + 2 * k + 1}..{kap - p - 1}")
    a = -m - p + k
    lhs = _exact_psi_ren(ctx, k, a, n - 1) - _exact_psi_ren(ctx, k, a, -n - 1)
    prod = ctx.const(1)
    for j in range(1, k + 1):
        prod = prod * (ctx.qpow(-n + 2 * j) - ctx.qpow(n))
    rhs = evaluate(macdonald_at_root(n - k - 1, k + 1, ctx), m + p - k, ctx) * prod
    return lhs == rhs


def shift_identity(ctx: QContext, k: int, nu: int, mu: int) -> bool:
    """D Psi^{(k)}(q^{-1}, nu, mu) = q^{-k-1} Psi^{(k+1)}(q^{-1}, nu, mu), D acting on nu.

    D g(nu) = (g(nu-1) - g(nu+1)) / (q^nu - q^{-nu}).
    """
    den = ctx.qpow(nu) - ctx.qpow(-nu)
    if den.is_zero():
        raise PoleError("q^nu - q^{-nu} vanishes")
    lhs = (_exact_psi_ren(ctx, k, nu - 1, mu) - _exact_psi_ren(ctx, k, nu + 1, mu)) * den.inverse()
    return lhs == ctx.qpow(-k - 1) * _exact_psi_ren(ctx, k + 1, nu, mu)


def phi21_terminating(ctx: QContext, k: int, j: int, m: int) -> tuple[CycloScalar, CycloScalar]:
    """Terminating 2phi1 sum and its closed form, returned as (sum, closed)."""
    if not 0 <= j <= k:
        raise ValueError("need 0 <= j <= k")
    a = m + ctx.p
    total = ctx.const(0)
    for i in range(k - j + 1):
        term = ctx.qpow(-i * (a - k - j - 1)) * q_pochhammer(ctx, k + 1, i) * q_pochhammer(ctx, j - k, i)
        term = term * q_pochhammer_inv(ctx, 1, i) * q_pochhammer_inv(ctx, a - k + 1, i)
        total = total + term
    closed = ctx.qpow((k - j) * (k + 1)) * q_pochhammer(ctx, a - 2 * k, k + 1)
    closed = closed * q_pochhammer_inv(ctx, a - k - j, k + 1)
    return total, closed


def s_column_via_trace(ctx: QContext, k: int, n: int) -> dict[int, CycloScalar]:
    """Coefficients of S' u^{[p]}_n over u^{[k]}_m written with Psi^{(k)}."""
    p = ctx.p
    out = {}
    for m in range(-p + 2 * k + 1, ctx.kappa - p):
        a = -m - p + k
        pref = ctx.qpow(p * n - k * m - k * (k + 1)) * _binom_inv(ctx.kappa, p, k)
        pref = pref * (ctx.qpow(-m - p + k) - ctx.qpow(m + p - k))
        diff = _exact_psi_ren(ctx, k, a, n - 1) - _exact_psi_ren(ctx, k, a, -n - 1)
        out[m] = pref * diff
    return out


# ---------------------------------------------------------------------------
# Verma-module oracle


@dataclass
class VermaModel:
    """Truncated Verma module M_mu and the (2k+1)-dimensional module U.

    Basis of M_mu: F^j v_mu, j = 0..J.  Basis of U: w_l of weight 2l,
    l = -k..k, with E w_l = e_l w_{l+1} and F w_l = c_l w_{l-1}; the c_l are
    fixed by EF - FE = [h].
    """

    mu: complex
    k: int
    depth: int
    logq: complex
    e_scale: Sequence[complex] | None = None
    c: dict[int, complex] = field(init=False)
    e: dict[int, complex] = field(init=False)

    def __post_init__(self):
        eng = _FloatQ(self.logq)
        k = self.k
        if self.e_scale is None:
            self.e = {l: 1 + 0j for l in range(-k, k)}
        else:
            self.e = {l: complex(self.e_scale[l + k]) for l in range(-k, k)}
        self.c = {}
        for l in range(-k + 1, k + 1):
            g = sum(eng.qint(2 * s) for s in range(l, k + 1))
            self.c[l] = g / self.e[l - 1]

    def _eng(self):
        return _FloatQ(self.logq)

    def matrices(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """E, F and q^h on the truncated Verma basis."""
        eng = self._eng()
        n = self.depth + 1
        E = np.zeros((n, n), dtype=complex)
        F = np.zeros((n, n), dtype=complex)
        K = np.zeros((n, n), dtype=complex)
        for j in range(n):
            K[j, j] = eng.pw(self.mu - 2 * j)
            if j + 1 < n:
                F[j + 1, j] = 1
            if j >= 1:
                E[j - 1, j] = eng.qint(j) * eng.qint(self.mu - j + 1)
        return E, F, K

    def u_matrices(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """E, F and q^h on U in the basis w_{-k}, ..., w_k."""
        eng = self._eng()
        k = self.k
        d = 2 * k + 1
        E = np.zeros((d, d), dtype=complex)
        F = np.zeros((d, d), dtype=complex)
        K = np.zeros((d, d), dtype=complex)
        for l in range(-k, k + 1):
            K[l + k, l + k] = eng.pw(2 * l)
            if l < k:
                E[l + k + 1, l + k] = self.e[l]
            if l > -k:
                F[l + k - 1, l + k] = self.c[l]
        return E, F, K

    def intertwiner_coefficients(self, verbatim: bool = False) -> list[complex]:
        """alpha_l with Phi v_mu = sum_l alpha_l F^l v_mu (x) w_l.

        Derived from Delta(E) Phi v_mu = 0 with Delta(E) = E (x) q^h + 1 (x) E:
        alpha_l [l][mu-l+1] q^{2l} + alpha_{l-1} e_{l-1} = 0, alpha_0 = 1.
        With ``verbatim`` the series sum_l F^l v (x) E^l u / ([l]!(-mu,q)_l)
        is used instead.
        """
        eng = self._eng()
        alpha = [1 + 0j]
        for l in range(1, self.k + 1):
            if verbatim:
                a = alpha[-1] * self.e[l - 1] / (eng.qint(l) * eng.qint(-self.mu + l - 1))
            else:
                a = -alpha[-1] * self.e[l - 1] / (eng.qint(l) * eng.qint(self.mu - l + 1) * eng.pw(2 * l))
            alpha.append(a)
        return alpha

    def intertwining_defect(self, verbatim: bool = False) -> float:
        """Max coefficient of Delta(E) Phi v_mu; zero for a genuine intertwiner."""
        eng = self._eng()
        alpha = self.intertwiner_coefficients(verbatim)
        worst = 0.0
        for l in range(1, self.k + 1):
            val = alpha[l] * eng.qint(l) * eng.qint(self.mu - l + 1) * eng.pw(2 * l)
            val += alpha[l - 1] * self.e[l - 1]
            worst = max(worst, abs(val))
        return worst


def verma_trace_oracle(
    k: int,
    nu: complex,
    mu: complex,
    q: complex,
    depth: int = 300,
    verbatim: bool = False,
    e_scale: Sequence[complex] | None = None,
    tail_tol: float = 1e-12,
) -> complex:
    """Truncated trace of Phi^u_mu q^{nu h} over M_mu, coefficient of u in U[0].

    Phi(F^i v_mu) = Delta(F)^i Phi(v_mu) with Delta(F) = F (x) 1 + q^{-h} (x) F;
    only the component along F^i v_mu (x) w_0 contributes to the trace.

    Raises
    ------
    ConvergenceError
        If |q^{-2 nu}| >= 1, or the last retained term exceeds ``tail_tol``
        relative to the sum.
    """
    logq = cmath.log(complex(q))
    eng = _FloatQ(logq)
    ratio = abs(eng.pw(-2 * nu))
    if ratio >= 1:
        raise ConvergenceError(f"|q^(-2 nu)| = {ratio:.3g} >= 1")
    model = VermaModel(complex(mu), k, depth, logq, e_scale)
    alpha = model.intertwiner_coefficients(verbatim)
    # state[l]: coefficient of F^{i+l} v (x) w_l in Phi(F^i v)
    state = np.zeros(2 * k + 1, dtype=complex)
    for l in range(k + 1):
        state[l + k] = alpha[l]
    c = np.array([model.c.get(l + 1, 0) if l < k else 0 for l in range(-k, k + 1)], dtype=complex)
    ls = np.arange(-k, k + 1)
    total = 0j
    last = 0j
    with np.errstate(over="ignore", invalid="ignore"):
        for i in range(depth + 1):
            last = eng.pw(nu * (mu - 2 * i)) * state[k]
            total += last
            shifted = np.zeros_like(state)
            shifted[:-1] = state[1:]
            factors = np.exp(logq * (-complex(mu) + 2 * (i + 1 + ls)))
            state = state + factors * c * shifted
    if not cmath.isfinite(total) or abs(last) > tail_tol * max(abs(total), 1e-300):
        raise ConvergenceError(f"truncated trace tail {abs(last):.3g} exceeds tolerance {tail_tol:g}")
    return total


@dataclass
class Calibration:
    exponents: dict[int, complex]
    residuals: dict[int, float]

    @property
    def c(self) -> complex:
        return self.exponents[0]


def calibrate_convention(
    ks: Sequence[int], nu: complex, mu: complex, q: complex, depth: int = 300, verbatim: bool = False
) -> Calibration:
    """Fit psi = q^{c nu} * oracle for each k; report c and the residual using c from k = 0."""
    logq = cmath.log(complex(q))
    exps = {}
    vals = {}
    for k in ks:
        ref = psi(TraceArgs(k, nu, mu, q))
        orc = verma_trace_oracle(k, nu, mu, q, depth, verbatim)
        vals[k] = (ref, orc)
        exps[k] = cmath.log(ref / orc) / (nu * logq)
    c0 = exps[ks[0]]
    res = {}
    for k, (ref, orc) in vals.items():
        res[k] = abs(ref - cmath.exp(c0 * nu * logq) * orc) / abs(ref)
    return Calibration(exps, res)
