"""Exact arithmetic in cyclotomic fields and q-combinatorics at q = e^{pi i/kappa}.

Elements of Q(zeta_N) are stored as integer vectors of length phi(N) in the
power basis 1, zeta, ..., zeta^{phi(N)-1} together with one positive common
denominator.  The power basis is canonical once everything is reduced modulo
the cyclotomic polynomial Phi_N, so equality and the zero test are exact
comparisons of tuples.

Every value used by the modular and trace layers lives in the field of order
N = 8 kappa: it contains q = zeta^4, q^{1/2} = zeta^2, e^{-pi i/4} =
zeta^{-kappa}, i = zeta^{2 kappa} and, through a quadratic Gauss sum, the real
square root of 2 kappa.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from numbers import Rational

import numpy as np

__all__ = [
    "CycloScalar",
    "QContext",
    "QDivisionError",
    "cyclotomic_polynomial",
    "q_int",
    "q_factorial",
    "q_binomial",
    "q_pochhammer",
    "sqrt_cyclotomic",
]

_INT64_SAFE = 1 << 62


class QDivisionError(ZeroDivisionError):
    """Raised when an exact computation needs the inverse of zero."""


@lru_cache(maxsize=None)
def cyclotomic_polynomial(n: int) -> tuple[int, ...]:
    """Integer coefficients of Phi_n, lowest degree first.

    Computed by exact division of x^n - 1 by Phi_d for every proper divisor d.
    """
    if n < 1:
        raise ValueError("order must be positive")
    poly = [-1] + [0] * (n - 1) + [1]
    for d in range(1, n):
        if n % d == 0:
            poly = _exact_divide(poly, list(cyclotomic_polynomial(d)))
    return tuple(poly)


def _exact_divide(num: list[int], den: list[int]) -> list[int]:
    # den is monic; long division from the top
    num = list(num)
    dd = len(den) - 1
    out = [0] * (len(num) - dd)
    for i in range(len(num) - 1, dd - 1, -1):
        c = num[i]
        if c:
            out[i - dd] = c
            for j in range(dd + 1):
                num[i - dd + j] -= c * den[j]
    if any(num[:dd]):
        raise ArithmeticError("non-exact polynomial division")
    return out


@dataclass(frozen=True)
class _Field:
    order: int
    degree: int
    phi: tuple[int, ...]
    # row r holds x^(degree + r) reduced modulo Phi_N, for degree + r < N
    fold: tuple[tuple[int, ...], ...]
    fold_np: np.ndarray | None
    fold_bound: int
    monomials: tuple[tuple[int, ...], ...]


@lru_cache(maxsize=None)
def _field(order: int) -> _Field:
    phi = cyclotomic_polynomial(order)
    deg = len(phi) - 1
    monos = []
    cur = [0] * deg
    cur[0] = 1
    for _ in range(order):
        monos.append(tuple(cur))
        top = cur[-1]
        cur = [0] + cur[:-1]
        if top:
            for j in range(deg):
                cur[j] -= top * phi[j]
    rows = tuple(monos[deg:])
    head = rows[: max(deg - 1, 0)]
    bound = max((abs(c) for r in head for c in r), default=0)
    fold_np = np.array(head, dtype=np.int64) if head else None
    return _Field(order, deg, phi, rows, fold_np, bound, tuple(monos))


def _reduce_list(coeffs: list[int], fld: _Field) -> list[int]:
    """Reduce an integer vector of any length modulo Phi_N."""
    deg = fld.degree
    if len(coeffs) <= deg:
        return coeffs + [0] * (deg - len(coeffs))
    if len(coeffs) > fld.order:
        folded = [0] * fld.order
        for i, c in enumerate(coeffs):
            folded[i % fld.order] += c
        coeffs = folded
    low = list(coeffs[:deg])
    high = coeffs[deg:]
    for r, c in enumerate(high):
        if c:
            row = fld.fold[r]
            for j in range(deg):
                if row[j]:
                    low[j] += c * row[j]
    return low


def _convolve(a: tuple[int, ...], b: tuple[int, ...], fld: _Field) -> list[int]:
    ma = max(map(abs, a))
    mb = max(map(abs, b))
    deg = fld.degree
    if ma * mb * deg * (1 + fld.fold_bound * deg) < _INT64_SAFE and fld.fold_np is not None:
        prod = np.convolve(np.array(a, dtype=np.int64), np.array(b, dtype=np.int64))
        low = prod[:deg].copy()
        high = prod[deg:]
        if high.size:
            low += high @ fld.fold_np[: high.size]
        return low.tolist()
    out = [0] * (2 * deg - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                if y:
                    out[i + j] += x * y
    return _reduce_list(out, fld)


def _normalize(nums: list[int], den: int) -> tuple[tuple[int, ...], int]:
    if den < 0:
        nums = [-c for c in nums]
        den = -den
    g = math.gcd(den, *nums)
    if g > 1:
        nums = [c // g for c in nums]
        den //= g
    return tuple(nums), den


class CycloScalar:
    """Exact element of the cyclotomic field Q(zeta_N), zeta_N = e^{2 pi i/N}.

    Parameters
    ----------
    order : int
        The cyclotomic order N.
    coeffs : sequence
        Rational coefficients c_j of sum c_j zeta^j.  Any length is accepted;
        the vector is reduced modulo zeta^N = 1 and Phi_N on construction.
    """

    __slots__ = ("order", "_num", "_den", "_hash")

    def __init__(self, order: int, coeffs=()):
        fld = _field(order)
        fr = [Fraction(c) for c in coeffs]
        den = 1
        for c in fr:
            den = den * c.denominator // math.gcd(den, c.denominator)
        ints = [int(c * den) for c in fr]
        folded = [0] * order
        for i, c in enumerate(ints):
            folded[i % order] += c
        num, den = _normalize(_reduce_list(folded, fld), den)
        self.order = order
        self._num = num
        self._den = den
        self._hash = None

    @classmethod
    def _raw(cls, order: int, num: tuple[int, ...], den: int) -> "CycloScalar":
        obj = object.__new__(cls)
        obj.order = order
        obj._num = num
        obj._den = den
        obj._hash = None
        return obj

    @classmethod
    def from_rational(cls, order: int, value) -> "CycloScalar":
        fr = Fraction(value)
        deg = _field(order).degree
        return cls._raw(order, (fr.numerator,) + (0,) * (deg - 1), fr.denominator)

    @classmethod
    def zeta(cls, order: int, power: int = 1) -> "CycloScalar":
        """Return zeta_N^power."""
        fld = _field(order)
        return cls._raw(order, fld.monomials[power % order], 1)

    # -- structure ---------------------------------------------------------
    @property
    def degree(self) -> int:
        return len(self._num)

    @property
    def numerators(self) -> tuple[int, ...]:
        return self._num

    @property
    def denominator(self) -> int:
        return self._den

    def reduced_coeffs(self) -> list[Fraction]:
        """Canonical coefficients in the power basis 1, zeta, ..., zeta^{phi(N)-1}."""
        return [Fraction(c, self._den) for c in self._num]

    @property
    def coeffs(self) -> list[Fraction]:
        """Coefficient vector of length N (canonical representative, zero padded)."""
        out = self.reduced_coeffs()
        return out + [Fraction(0)] * (self.order - len(out))

    def is_zero(self) -> bool:
        return not any(self._num)

    def is_rational(self) -> bool:
        return not any(self._num[1:])

    def to_fraction(self) -> Fraction:
        if not self.is_rational():
            raise ValueError("element is not rational")
        return Fraction(self._num[0], self._den)

    # -- coercion ----------------------------------------------------------
    def _coerce(self, other) -> "CycloScalar | None":
        if isinstance(other, CycloScalar):
            if other.order != self.order:
                raise ValueError(f"order mismatch: {self.order} vs {other.order}")
            return other
        if isinstance(other, (int, Rational)):
            return CycloScalar.from_rational(self.order, other)
        return None

    # -- arithmetic --------------------------------------------------------
    def __add__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        if self._den == o._den:
            num = [a + b for a, b in zip(self._num, o._num)]
            return CycloScalar._raw(self.order, *_normalize(num, self._den))
        num = [a * o._den + b * self._den for a, b in zip(self._num, o._num)]
        return CycloScalar._raw(self.order, *_normalize(num, self._den * o._den))

    __radd__ = __add__

    def __neg__(self):
        return CycloScalar._raw(self.order, tuple(-c for c in self._num), self._den)

    def __pos__(self):
        return self

    def __sub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self + (-o)

    def __rsub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return o + (-self)

    def __mul__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        if self.is_zero() or o.is_zero():
            return CycloScalar._raw(self.order, (0,) * self.degree, 1)
        if o.is_rational():
            return CycloScalar._raw(
                self.order, *_normalize([c * o._num[0] for c in self._num], self._den * o._den)
            )
        if self.is_rational():
            return o * self
        num = _convolve(self._num, o._num, _field(self.order))
        return CycloScalar._raw(self.order, *_normalize(num, self._den * o._den))

    __rmul__ = __mul__

    def inverse(self) -> "CycloScalar":
        """Multiplicative inverse via the extended Euclidean algorithm mod Phi_N."""
        return _inverse(self)

    def __truediv__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self * o.inverse()

    def __rtruediv__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return o * self.inverse()

    def __pow__(self, e: int):
        if not isinstance(e, int):
            return NotImplemented
        base = self
        if e < 0:
            base = self.inverse()
            e = -e
        result = CycloScalar.from_rational(self.order, 1)
        while e:
            if e & 1:
                result = result * base
            e >>= 1
            if e:
                base = base * base
        return result

    # -- comparison --------------------------------------------------------
    def __eq__(self, other):
        if isinstance(other, CycloScalar):
            return self.order == other.order and self._num == other._num and self._den == other._den
        if isinstance(other, (int, Rational)):
            return self.is_rational() and Fraction(self._num[0], self._den) == other
        return NotImplemented

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.order, self._num, self._den))
        return self._hash

    def __bool__(self):
        return not self.is_zero()

    # -- embedding ---------------------------------------------------------
    def embed(self) -> complex:
        """Image under zeta -> e^{2 pi i/N} as a complex double."""
        w = cmath.exp(2j * math.pi / self.order)
        acc = 0j
        for c in reversed(self._num):
            acc = acc * w + c
        return acc / self._den

    def __complex__(self):
        return self.embed()

    def conjugate(self) -> "CycloScalar":
        """Complex conjugate, i.e. the automorphism zeta -> zeta^{-1}."""
        n = self.order
        out = [0] * n
        for j, c in enumerate(self._num):
            out[(-j) % n] += c
        fld = _field(n)
        return CycloScalar._raw(n, *_normalize(_reduce_list(out, fld), self._den))

    # -- serialization -----------------------------------------------------
    def to_json(self) -> dict:
        return {
            "order": self.order,
            "coeffs": [[c.numerator, c.denominator] for c in self.coeffs],
        }

    @classmethod
    def from_json(cls, data: dict) -> "CycloScalar":
        return cls(int(data["order"]), [Fraction(int(a), int(b)) for a, b in data["coeffs"]])

    def __repr__(self):
        terms = []
        for j, c in enumerate(self.reduced_coeffs()):
            if c:
                terms.append(f"{c}*z^{j}" if j else f"{c}")
        return f"CycloScalar(N={self.order}: {' + '.join(terms) or '0'})"


def _poly_trim(p: list[Fraction]) -> list[Fraction]:
    while p and p[-1] == 0:
        p.pop()
    return p


def _poly_divmod(a: list[Fraction], b: list[Fraction]):
    a = list(a)
    q = [Fraction(0)] * max(len(a) - len(b) + 1, 1)
    lead = b[-1]
    while len(a) >= len(b) and a:
        c = a[-1] / lead
        shift = len(a) - len(b)
        q[shift] = c
        for j, bj in enumerate(b):
            a[shift + j] -= c * bj
        a.pop()
        _poly_trim(a)
    return _poly_trim(q), a


def _poly_mul(a: list[Fraction], b: list[Fraction]) -> list[Fraction]:
    if not a or not b:
        return []
    out = [Fraction(0)] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                out[i + j] += x * y
    return out


def _poly_sub(a: list[Fraction], b: list[Fraction]) -> list[Fraction]:
    n = max(len(a), len(b))
    out = [(a[i] if i < len(a) else 0) - (b[i] if i < len(b) else 0) for i in range(n)]
    return _poly_trim([Fraction(c) for c in out])


@lru_cache(maxsize=65536)
def _inverse(x: CycloScalar) -> CycloScalar:
    if x.is_zero():
        raise QDivisionError("inverse of zero in cyclotomic field")
    n = x.order
    if x.is_rational():
        return CycloScalar.from_rational(n, 1 / x.to_fraction())
    # monomials zeta^j invert to zeta^{-j}
    nz = [j for j, c in enumerate(x._num) if c]
    if len(nz) == 1 and abs(x._num[nz[0]]) == 1:
        mono = CycloScalar.zeta(n, -nz[0])
        return mono * Fraction(x._den, x._num[nz[0]])
    fld = _field(n)
    r0 = [Fraction(c) for c in fld.phi]
    r1 = _poly_trim([Fraction(c) for c in x._num])
    s0: list[Fraction] = []
    s1 = [Fraction(1)]
    while len(r1) > 1:
        quo, rem = _poly_divmod(r0, r1)
        r0, r1 = r1, rem
        s0, s1 = s1, _poly_sub(s0, _poly_mul(quo, s1))
        if not r1:
            raise QDivisionError("element is not invertible")
    # r1 is a nonzero constant: s1 * x == r1 mod Phi_N
    c = r1[0]
    inv = [v / c * x._den for v in s1]
    return CycloScalar(n, inv)


def sqrt_cyclotomic(m: int, order: int) -> CycloScalar:
    """Positive square root of m inside Q(zeta_order), built from a Gauss sum.

    The quadratic Gauss sum g = sum_{j<4m} zeta_{4m}^{j^2} equals 2(1+i) sqrt(m),
    so g / (2(1+i)) is the positive real root of m.

    Raises
    ------
    ValueError
        If 4m does not divide the order.
    """
    if m < 1:
        raise ValueError("m must be positive")
    if order % (4 * m):
        raise ValueError(f"order {order} is not divisible by 4*{m}")
    step = order // (4 * m)
    exps = [0] * order
    for j in range(4 * m):
        exps[(step * j * j) % order] += 1
    g = CycloScalar(order, exps)
    one_plus_i = CycloScalar.zeta(order, order // 4) + 1
    return g / (one_plus_i * 2)


@dataclass(frozen=True)
class QContext:
    """Root-of-unity data q = e^{pi i/kappa} in the field of order 8 kappa.

    Parameters
    ----------
    kappa : int
        Level shift, at least 2.
    p : int
        Spin label; must satisfy kappa >= 2p + 2.
    """

    kappa: int
    p: int = 0
    order: int = field(init=False)

    def __post_init__(self):
        if self.kappa < 2:
            raise ValueError("kappa must be at least 2")
        if self.p < 0 or self.kappa < 2 * self.p + 2:
            raise ValueError(f"need kappa >= 2p+2, got kappa={self.kappa}, p={self.p}")
        object.__setattr__(self, "order", 8 * self.kappa)

    @property
    def q(self) -> CycloScalar:
        return CycloScalar.zeta(self.order, 4)

    def zeta(self, power: int = 1) -> CycloScalar:
        return CycloScalar.zeta(self.order, power)

    def qpow(self, e) -> CycloScalar:
        """q^e for e an integer or a fraction with denominator dividing 4."""
        fe = Fraction(e)
        z = fe * 4
        if z.denominator != 1:
            raise ValueError(f"q^{e} is not in the field of order {self.order}")
        return CycloScalar.zeta(self.order, int(z))

    def const(self, value) -> CycloScalar:
        return CycloScalar.from_rational(self.order, value)

    @property
    def i(self) -> CycloScalar:
        return CycloScalar.zeta(self.order, 2 * self.kappa)

    def eighth_root(self, j: int = 1) -> CycloScalar:
        """e^{j pi i/4}."""
        return CycloScalar.zeta(self.order, j * self.kappa)

    def sqrt_2kappa(self) -> CycloScalar:
        return _sqrt_cached(2 * self.kappa, self.order)

    def with_p(self, p: int) -> "QContext":
        return QContext(self.kappa, p)


@lru_cache(maxsize=None)
def _sqrt_cached(m: int, order: int) -> CycloScalar:
    return sqrt_cyclotomic(m, order)


@lru_cache(maxsize=None)
def _q_int_cached(kappa: int, n: int) -> CycloScalar:
    order = 8 * kappa
    n = n % (2 * kappa)
    # q^{n-1} + q^{n-3} + ... + q^{-(n-1)}, exponents of zeta are 4x
    exps = [0] * order
    for j in range(n):
        exps[(4 * (n - 1 - 2 * j)) % order] += 1
    return CycloScalar(order, exps)


def q_int(ctx: QContext, n: int) -> CycloScalar:
    """Quantum integer [n] = (q^n - q^{-n})/(q - q^{-1}).

    Uses the geometric expansion, so no division is needed and the result is
    defined for every integer n.  [n] is 2 kappa periodic because q^{2 kappa} = 1.
    """
    return _q_int_cached(ctx.kappa, n)


@lru_cache(maxsize=None)
def _q_int_inv_cached(kappa: int, n: int) -> CycloScalar:
    v = _q_int_cached(kappa, n)
    if v.is_zero():
        raise QDivisionError(f"[{n}] vanishes at kappa={kappa}")
    return v.inverse()


def q_int_inv(ctx: QContext, n: int) -> CycloScalar:
    """1/[n], cached per (kappa, n mod 2 kappa)."""
    return _q_int_inv_cached(ctx.kappa, n % (2 * ctx.kappa))


def q_factorial(ctx: QContext, n: int) -> CycloScalar:
    """[n]! = [1][2]...[n], with [0]! = 1."""
    if n < 0:
        raise ValueError("q_factorial needs n >= 0")
    return q_pochhammer(ctx, 1, n)


def q_pochhammer(ctx: QContext, n: int, j: int) -> CycloScalar:
    """(n, q)_j = [n][n+1]...[n+j-1]; the empty product (j = 0) is 1."""
    if j < 0:
        raise ValueError("q_pochhammer needs j >= 0")
    out = ctx.const(1)
    for i in range(j):
        out = out * q_int(ctx, n + i)
    return out


def q_pochhammer_inv(ctx: QContext, n: int, j: int) -> CycloScalar:
    """1/(n, q)_j from cached inverse quantum integers."""
    if j < 0:
        raise ValueError("q_pochhammer needs j >= 0")
    out = ctx.const(1)
    for i in range(j):
        out = out * q_int_inv(ctx, n + i)
    return out


def q_binomial(ctx: QContext, n: int, j: int) -> CycloScalar:
    """Gaussian binomial [n; j] = [n]!/([j]![n-j]!).

    Raises
    ------
    QDivisionError
        If [j]! or [n-j]! vanishes, which happens once an index reaches kappa.
    """
    if not 0 <= j <= n:
        raise ValueError(f"q_binomial needs 0 <= j <= n, got n={n}, j={j}")
    j = min(j, n - j)
    # [n; j] = (n-j+1, q)_j / [j]!
    return q_pochhammer(ctx, n - j + 1, j) * q_pochhammer_inv(ctx, 1, j)
