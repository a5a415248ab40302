from __future__ import annotations

import cmath
import math
from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from torusblocks.qcore import (
    CycloScalar,
    QContext,
    QDivisionError,
    cyclotomic_polynomial,
    q_binomial,
    q_factorial,
    q_int,
    q_pochhammer,
    sqrt_cyclotomic,
)

ORDER = 40  # kappa = 5

rationals = st.fractions(min_value=-5, max_value=5, max_denominator=7)
elements = st.lists(rationals, min_size=0, max_size=12).map(lambda cs: CycloScalar(ORDER, cs))


# ---------------------------------------------------------------- field axioms


@given(elements, elements, elements)
def test_ring_axioms(a, b, c):
    assert a + b == b + a
    assert a * b == b * a
    assert (a + b) + c == a + (b + c)
    assert (a * b) * c == a * (b * c)
    assert a * (b + c) == a * b + a * c
    assert a - a == 0
    assert a * 1 == a


@given(elements)
def test_inverse(a):
    if a == 0:
        with pytest.raises(QDivisionError):
            a.inverse()
    else:
        assert a * a.inverse() == 1
        assert a / a == 1


@given(elements, elements)
def test_embedding_is_homomorphism(a, b):
    scale = 1 + abs(a.embed()) * abs(b.embed())
    assert abs((a * b).embed() - a.embed() * b.embed()) < 1e-9 * scale
    assert abs((a + b).embed() - (a.embed() + b.embed())) < 1e-9 * (1 + abs(a.embed()) + abs(b.embed()))


@given(elements)
def test_conjugate_embeds_to_complex_conjugate(a):
    assert abs(a.conjugate().embed() - a.embed().conjugate()) < 1e-9 * (1 + abs(a.embed()))


@given(elements)
def test_json_roundtrip(a):
    assert CycloScalar.from_json(a.to_json()) == a


@given(elements)
def test_canonical_form_ignores_representation(a):
    # adding a multiple of Phi_N does not change the element
    phi = cyclotomic_polynomial(ORDER)
    coeffs = list(a.coeffs) + [0] * (len(phi) + 2)
    shifted = [c + 3 * (phi[i] if i < len(phi) else 0) for i, c in enumerate(coeffs)]
    assert CycloScalar(ORDER, shifted) == a
    assert hash(CycloScalar(ORDER, shifted)) == hash(a)


def test_zeta_has_order_n():
    z = CycloScalar.zeta(ORDER)
    assert z**ORDER == 1
    assert z ** (ORDER // 2) == -1
    assert cmath.isclose(z.embed(), cmath.exp(2j * math.pi / ORDER))


def test_cyclotomic_polynomial_degree():
    assert len(cyclotomic_polynomial(ORDER)) - 1 == 16  # phi(40)
    assert cyclotomic_polynomial(4) == (1, 0, 1)


# ---------------------------------------------------------------- q-numbers


def test_q_int_examples():
    ctx = QContext(5)
    assert q_int(ctx, 1) == 1
    assert q_int(ctx, 0) == 0
    assert q_int(ctx, 5) == 0  # q^kappa = -1
    assert q_int(ctx, 10) == 0
    assert q_int(ctx, 2) == ctx.q + ctx.qpow(-1)


@given(st.integers(2, 9), st.integers(-20, 20))
def test_q_int_vanishes_iff_kappa_divides(kappa, n):
    ctx = QContext(kappa)
    assert (q_int(ctx, n) == 0) == (n % kappa == 0)


@given(st.integers(2, 9), st.integers(-12, 12))
def test_q_int_embedding(kappa, n):
    val = q_int(QContext(kappa), n).embed()
    assert abs(val - math.sin(math.pi * n / kappa) / math.sin(math.pi / kappa)) < 1e-12


def test_q_pochhammer_and_binomial():
    ctx = QContext(7)
    assert q_pochhammer(ctx, 3, 0) == 1
    assert q_binomial(ctx, 5, 0) == 1
    # [4 choose 2] = [4]!/([2]![2]!) = [3][4]/[2]
    expected = q_int(ctx, 3) * q_int(ctx, 4) / q_int(ctx, 2)
    assert q_binomial(ctx, 4, 2) == expected
    assert q_factorial(ctx, 4) == q_int(ctx, 1) * q_int(ctx, 2) * q_int(ctx, 3) * q_int(ctx, 4)


def test_sqrt_cyclotomic_examples():
    r4 = sqrt_cyclotomic(4, 32)
    assert r4 * r4 == 4 and r4 == 2
    r8 = sqrt_cyclotomic(8, 32)
    assert r8 * r8 == 8
    assert abs(r8.embed() - 2.8284271247461903) < 1e-12
    r2 = sqrt_cyclotomic(2, 8)
    assert r2 * r2 == 2
    assert abs(r2.embed() - 1.4142135623730951) < 1e-12
    # quadratic Gauss sum over Z/8 by enumeration: 2 + 4 zeta + 2 zeta^4 = 2(1+i) sqrt(2)
    g = sum((CycloScalar.zeta(8, j * j) for j in range(8)), CycloScalar(8))
    assert g == 4 * CycloScalar.zeta(8)
    assert g == CycloScalar(8, [2, 0, 2]) * r2


def test_sqrt_requires_divisible_order():
    with pytest.raises(ValueError):
        sqrt_cyclotomic(3, 8)


def test_qcontext_validation():
    with pytest.raises(ValueError):
        QContext(1)
    with pytest.raises(ValueError):
        QContext(5, 2)
    ctx = QContext(6, 2)
    assert ctx.qpow(Fraction(1, 2)) ** 2 == ctx.q
    with pytest.raises(ValueError):
        ctx.qpow(Fraction(1, 3))
    assert ctx.sqrt_2kappa() ** 2 == 12
    assert ctx.i**2 == -1
