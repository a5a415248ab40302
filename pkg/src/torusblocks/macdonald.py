"""A1 Macdonald polynomials, the constant-term inner product and the shift operator.

Polynomials are Laurent polynomials in X = q^x, stored as a map from the
exponent d to a scalar.  Two scalar backends are supported:

* :class:`FormalBackend`, rational functions of a formal variable q (sympy
  field elements).  Gram-Schmidt runs here, where no denominator can vanish.
* :class:`CycloBackend`, exact values at q = e^{pi i/kappa}.  Polynomials are
  built there with the shift operator, falling back to per-coefficient
  specialization of the formal result when a divisor of the chain vanishes.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Any, Callable, Iterable, Mapping

from sympy import QQ, sympify
from sympy.polys.fields import field as _sympy_field

from .qcore import CycloScalar, QContext

__all__ = [
    "FormalBackend",
    "CycloBackend",
    "FORMAL",
    "LaurentPolyX",
    "SymLaurentPoly",
    "NonDivisibleError",
    "VanishingDivisorError",
    "inner_product",
    "shift_apply",
    "macdonald_gram_schmidt",
    "macdonald_via_shift",
    "macdonald_at_root",
    "specialize",
    "evaluate",
]


class NonDivisibleError(ArithmeticError):
    """The shift-operator numerator is not divisible by q^x - q^{-x}."""


class VanishingDivisorError(ZeroDivisionError):
    """A normalizing factor q^{-m} - q^m of the shift chain is zero."""


class FormalBackend:
    """Scalars are elements of Q(q) with q a formal variable."""

    name = "formal"

    def __init__(self):
        self.field, self.q = _sympy_field("q", QQ)
        self.one = self.field.one
        self.zero = self.field.zero

    def qpow(self, e: int):
        return self.q**e

    def const(self, value):
        return self.field(QQ(Fraction(value).numerator, Fraction(value).denominator))

    def inv(self, c):
        if c == 0:
            raise VanishingDivisorError("division by zero rational function")
        return 1 / c


class CycloBackend:
    """Scalars are exact elements of Q(zeta_{8 kappa}) with q = e^{pi i/kappa}."""

    name = "cyclo"

    def __init__(self, ctx: QContext):
        self.ctx = ctx
        self.one = ctx.const(1)
        self.zero = ctx.const(0)

    def qpow(self, e: int) -> CycloScalar:
        return self.ctx.qpow(e)

    def const(self, value) -> CycloScalar:
        return self.ctx.const(value)

    def inv(self, c: CycloScalar) -> CycloScalar:
        if c == 0:
            raise VanishingDivisorError("division by zero at the root of unity")
        return c.inverse()


FORMAL = FormalBackend()


def _clean(coeffs: Mapping[int, Any]) -> dict[int, Any]:
    return {d: coeffs[d] for d in sorted(coeffs) if not coeffs[d] == 0}


@dataclass(frozen=True, eq=False)
class LaurentPolyX:
    """Finite sum of c_d (q^x)^d with no stored zero coefficients."""

    coeffs: Mapping[int, Any]

    def __post_init__(self):
        object.__setattr__(self, "coeffs", _clean(self.coeffs))

    @classmethod
    def monomial(cls, d: int, c) -> "LaurentPolyX":
        return cls({d: c})

    # -- shape -------------------------------------------------------------
    def is_zero(self) -> bool:
        return not self.coeffs

    @property
    def degree(self) -> int:
        """Largest exponent present (raises on the zero polynomial)."""
        if not self.coeffs:
            raise ValueError("zero polynomial has no degree")
        return max(self.coeffs)

    @property
    def low_degree(self) -> int:
        if not self.coeffs:
            raise ValueError("zero polynomial has no degree")
        return min(self.coeffs)

    def coefficient(self, d: int, zero=0):
        return self.coeffs.get(d, zero)

    def is_even(self) -> bool:
        return all(-d in self.coeffs and self.coeffs[-d] == c for d, c in self.coeffs.items())

    def constant_term(self, zero=0):
        return self.coeffs.get(0, zero)

    # -- arithmetic --------------------------------------------------------
    def __add__(self, other: "LaurentPolyX") -> "LaurentPolyX":
        out = dict(self.coeffs)
        for d, c in other.coeffs.items():
            out[d] = out[d] + c if d in out else c
        return LaurentPolyX(out)

    def __neg__(self) -> "LaurentPolyX":
        return LaurentPolyX({d: -c for d, c in self.coeffs.items()})

    def __sub__(self, other: "LaurentPolyX") -> "LaurentPolyX":
        return self + (-other)

    def __mul__(self, other: "LaurentPolyX") -> "LaurentPolyX":
        out: dict[int, Any] = {}
        for d1, c1 in self.coeffs.items():
            for d2, c2 in other.coeffs.items():
                d = d1 + d2
                out[d] = out[d] + c1 * c2 if d in out else c1 * c2
        return LaurentPolyX(out)

    def scale(self, c) -> "LaurentPolyX":
        return LaurentPolyX({d: v * c for d, v in self.coeffs.items()})

    def map_coeffs(self, fn: Callable[[Any], Any]) -> "LaurentPolyX":
        return LaurentPolyX({d: fn(c) for d, c in self.coeffs.items()})

    def __eq__(self, other):
        if not isinstance(other, LaurentPolyX):
            return NotImplemented
        if set(self.coeffs) != set(other.coeffs):
            return False
        return all(self.coeffs[d] == other.coeffs[d] for d in self.coeffs)

    def __hash__(self):
        return hash(tuple(self.coeffs))

    def evaluate_at(self, xpow: Callable[[int], Any], zero=0):
        """Sum of c_d * xpow(d)."""
        acc = zero
        for d, c in self.coeffs.items():
            acc = acc + c * xpow(d)
        return acc

    def __repr__(self):
        body = " + ".join(f"({c})*X^{d}" for d, c in self.coeffs.items()) or "0"
        return f"{type(self).__name__}({body})"


class SymLaurentPoly(LaurentPolyX):
    """An x-even Laurent polynomial, c_d = c_{-d} for all d."""

    def __post_init__(self):
        super().__post_init__()
        for d, c in self.coeffs.items():
            if -d not in self.coeffs or not self.coeffs[-d] == c:
                raise ValueError(f"coefficient of X^{d} does not match X^{-d}")

    @classmethod
    def from_even(cls, half: Mapping[int, Any]) -> "SymLaurentPoly":
        """Build sum_d c_d (X^d + X^{-d}) for d > 0 plus c_0 from a map on d >= 0."""
        out = {}
        for d, c in half.items():
            if d < 0:
                raise ValueError("use non-negative exponents")
            out[d] = c
            out[-d] = c
        return cls(out)

    @classmethod
    def of(cls, poly: LaurentPolyX) -> "SymLaurentPoly":
        return cls(dict(poly.coeffs))

    def half(self) -> dict[int, Any]:
        """Coefficients of the basis 1, X^d + X^{-d} (d > 0)."""
        return {d: c for d, c in self.coeffs.items() if d >= 0}

    def to_json(self) -> dict:
        return {
            "basis": "q^{dx}+q^{-dx}",
            "coeffs": {str(d): _scalar_json(c) for d, c in self.half().items()},
        }

    @classmethod
    def from_json(cls, data: Mapping[str, Any]) -> "SymLaurentPoly":
        """Inverse of :meth:`to_json` for both formal and exact coefficients."""
        if data.get("basis") != "q^{dx}+q^{-dx}":
            raise ValueError("unknown polynomial basis")
        return cls.from_even({int(d): _scalar_from_json(c) for d, c in data["coeffs"].items()})


def _scalar_from_json(c):
    if isinstance(c, Mapping):
        return CycloScalar.from_json(c)
    return FORMAL.field.from_expr(sympify(c))


def _scalar_json(c):
    if isinstance(c, CycloScalar):
        return c.to_json()
    return str(c.as_expr()) if hasattr(c, "as_expr") else str(c)


# ---------------------------------------------------------------------------
# inner product and shift operator


def _weight(k: int, backend) -> LaurentPolyX:
    w = LaurentPolyX({0: backend.one})
    for j in range(k):
        a = backend.qpow(2 * j)
        w = w * LaurentPolyX({0: backend.one, 2: -a}) * LaurentPolyX({0: backend.one, -2: -a})
    return w


def inner_product(f: LaurentPolyX, g: LaurentPolyX, k: int, backend=FORMAL):
    """Half the constant term of f g prod_{j<k} (1 - q^{2j} X^2)(1 - q^{2j} X^{-2})."""
    if k < 0:
        raise ValueError("k must be non-negative")
    ct = (f * g * _weight(k, backend)).constant_term(backend.zero)
    return ct * backend.const(Fraction(1, 2))


def shift_apply(f: LaurentPolyX, backend=FORMAL) -> LaurentPolyX:
    """Apply Df(x) = (f(x-1) - f(x+1)) / (q^x - q^{-x}).

    Raises
    ------
    NonDivisibleError
        If the numerator leaves a remainder, which only happens for inputs that
        are not x-even.
    """
    num = {d: c * (backend.qpow(-d) - backend.qpow(d)) for d, c in f.coeffs.items()}
    rem = _clean(num)
    if not rem:
        out = LaurentPolyX({})
        return SymLaurentPoly({}) if isinstance(f, SymLaurentPoly) else out
    lo = min(rem)
    quo: dict[int, Any] = {}
    # (X - X^{-1}) * c X^{D-1} = c X^D - c X^{D-2}
    while rem and max(rem) >= lo + 2:
        top = max(rem)
        c = rem.pop(top)
        quo[top - 1] = c
        d2 = top - 2
        rem[d2] = rem[d2] + c if d2 in rem else c
        if rem[d2] == 0:
            del rem[d2]
    if rem:
        raise NonDivisibleError("numerator is not divisible by q^x - q^{-x}")
    out = LaurentPolyX(quo)
    if isinstance(f, SymLaurentPoly):
        return SymLaurentPoly.of(out)
    return out


def _p0(n: int, backend) -> SymLaurentPoly:
    if n == 0:
        return SymLaurentPoly({0: backend.one})
    return SymLaurentPoly.from_even({n: backend.one})


# ---------------------------------------------------------------------------
# constructions


_GS_CACHE: dict[int, tuple[list[SymLaurentPoly], list[Any]]] = {}


def _gram_schmidt_family(k: int, nmax: int) -> list[SymLaurentPoly]:
    fam, norms = _GS_CACHE.setdefault(k, ([], []))
    for n in range(len(fam), nmax + 1):
        p = _p0(n, FORMAL)
        v = LaurentPolyX(dict(p.coeffs))
        for prev, nrm in zip(fam, norms):
            c = inner_product(p, prev, k) / nrm
            v = v - prev.scale(c)
        sp = SymLaurentPoly.of(v)
        fam.append(sp)
        norms.append(inner_product(sp, sp, k))
    return fam


def macdonald_gram_schmidt(n: int, k: int) -> SymLaurentPoly:
    """P_n^{(k)} at generic q by Gram-Schmidt on 1, X + X^{-1}, X^2 + X^{-2}, ..."""
    if n < 0 or k < 0:
        raise ValueError("n and k must be non-negative")
    return _gram_schmidt_family(k, n)[n]


def _via_shift(n: int, k: int, backend) -> SymLaurentPoly:
    poly = _p0(n + k, backend)
    for step in range(k):
        d = n + k - step
        divisor = backend.qpow(-d) - backend.qpow(d)
        if divisor == 0:
            raise VanishingDivisorError(f"q^{-d} - q^{d} vanishes in the shift chain")
        poly = shift_apply(poly, backend).scale(backend.inv(divisor))
    return SymLaurentPoly.of(poly)


@lru_cache(maxsize=None)
def _formal_via_shift(n: int, k: int) -> SymLaurentPoly:
    return _via_shift(n, k, FORMAL)


@lru_cache(maxsize=None)
def _cyclo_via_shift(n: int, k: int, kappa: int) -> SymLaurentPoly:
    return _via_shift(n, k, CycloBackend(QContext(kappa)))


def macdonald_via_shift(n: int, k: int, ctx: QContext | None = None) -> SymLaurentPoly:
    """P_n^{(k)} as D^k P_{n+k}^{(0)} divided by prod_{m=n+1}^{n+k} (q^{-m} - q^m).

    With ``ctx=None`` q is formal; otherwise q = e^{pi i/kappa}.

    Raises
    ------
    VanishingDivisorError
        At the root of unity when some n < m <= n + k is a multiple of kappa.
    """
    if n < 0 or k < 0:
        raise ValueError("n and k must be non-negative")
    if ctx is None:
        return _formal_via_shift(n, k)
    return _cyclo_via_shift(n, k, ctx.kappa)


def specialize(poly: LaurentPolyX, ctx: QContext) -> SymLaurentPoly | LaurentPolyX:
    """Substitute q = e^{pi i/kappa} into every formal coefficient."""

    def spec(c):
        num = _eval_poly(c.numer, ctx)
        den = _eval_poly(c.denom, ctx)
        if den == 0:
            raise VanishingDivisorError("coefficient has a pole at this root of unity")
        return num / den

    out = poly.map_coeffs(spec)
    return SymLaurentPoly.of(out) if isinstance(poly, SymLaurentPoly) else out


def _eval_poly(pe, ctx: QContext) -> CycloScalar:
    acc = ctx.const(0)
    for (e,), c in pe.terms():
        acc = acc + ctx.qpow(e) * Fraction(int(c.numerator), int(c.denominator))
    return acc


@lru_cache(maxsize=None)
def _at_root(n: int, k: int, kappa: int) -> SymLaurentPoly:
    ctx = QContext(kappa)
    try:
        return _cyclo_via_shift(n, k, kappa)
    except VanishingDivisorError:
        return specialize(_formal_via_shift(n, k), ctx)


def macdonald_at_root(n: int, k: int, ctx: QContext) -> SymLaurentPoly:
    """P_n^{(k)} at q = e^{pi i/kappa}, safe even where the shift chain degenerates."""
    return _at_root(n, k, ctx.kappa)


def evaluate(poly: LaurentPolyX, m: int, ctx: QContext) -> CycloScalar:
    """Value at x = m, i.e. sum of c_d q^{d m}."""
    coeffs = poly.coeffs
    if coeffs and not isinstance(next(iter(coeffs.values())), CycloScalar):
        poly = specialize(poly, ctx)
    return poly.evaluate_at(lambda d: ctx.qpow(d * m), ctx.const(0))


def basis_elements(n: int, backend=FORMAL) -> Iterable[SymLaurentPoly]:
    """The monomial basis 1, X + X^{-1}, ..., X^n + X^{-n}."""
    return [_p0(d, backend) for d in range(n + 1)]
