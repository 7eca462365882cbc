import cmath
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from gwtqft.scalar import (
    ConductorOverflow,
    Cyclotomic,
    DivisionByZero,
    approx_complex,
    conductor_limit,
    cyclotomic_polynomial,
    euler_phi,
    format_decimal,
    q_power,
    quantum_number,
    sqrt_int,
    to_fraction,
)

small_fracs = st.fractions(min_value=-3, max_value=3, max_denominator=24)


@st.composite
def cyclos(draw):
    n = draw(st.sampled_from([1, 3, 4, 5, 8, 12]))
    coeffs = draw(st.lists(st.fractions(min_value=-5, max_value=5, max_denominator=6),
                           min_size=euler_phi(n), max_size=euler_phi(n)))
    return Cyclotomic.from_coefficients(n, coeffs)


def test_basic_values():
    assert (q_power(1) + q_power(3)).is_zero()
    assert q_power(Fraction(1, 2)) * q_power(Fraction(1, 2)) == q_power(1)
    assert (q_power(2) + 1).is_zero()
    assert q_power(4) == Cyclotomic.one()


def test_rendering():
    assert format_decimal(q_power(1), 9) == "0.000000000 + 1.000000000i"
    assert format_decimal(q_power(Fraction(1, 2)), 6) == "0.707107 + 0.707107i"
    assert format_decimal(quantum_number(1), 6) == "1.000000"
    re, im = approx_complex(Cyclotomic.zero(), 4)
    assert str(re) == "0.0000" and str(im) == "0.0000"


def test_cyclotomic_polynomials():
    assert cyclotomic_polynomial(1) == (-1, 1)
    assert cyclotomic_polynomial(4) == (1, 0, 1)
    assert cyclotomic_polynomial(12) == (1, 0, -1, 0, 1)
    # independent oracle: product over all divisors is z^n - 1
    for n in (6, 10, 15, 24):
        prod = [1]
        for d in range(1, n + 1):
            if n % d == 0:
                c = cyclotomic_polynomial(d)
                out = [0] * (len(prod) + len(c) - 1)
                for i, a in enumerate(prod):
                    for j, b in enumerate(c):
                        out[i + j] += a * b
                prod = out
        assert prod == [-1] + [0] * (n - 1) + [1]


@settings(max_examples=1000, deadline=None)
@given(cyclos(), cyclos(), cyclos())
def test_field_axioms(a, b, c):
    assert (a + b) + c == a + (b + c)
    assert (a * b) * c == a * (b * c)
    assert a * (b + c) == a * b + a * c
    assert a + b == b + a and a * b == b * a
    if not a.is_zero():
        assert a * a.inverse() == Cyclotomic.one()


@settings(max_examples=200, deadline=None)
@given(small_fracs, small_fracs)
def test_q_power_additive(x, y):
    assert q_power(x) * q_power(y) == q_power(x + y)
    assert q_power(x).inverse() == q_power(-x)


@settings(max_examples=200, deadline=None)
@given(cyclos())
def test_promotion_is_lossless(a):
    m = a.conductor * 6
    b = a.promote(m)
    assert b == a
    assert b.demote(a.conductor).coefficients == a.coefficients


@settings(max_examples=200, deadline=None)
@given(cyclos())
def test_decimal_matches_complex_oracle(a):
    z = sum((Fraction(c) * cmath.exp(2j * cmath.pi * k / a.conductor) for k, c in enumerate(a.coefficients)), 0j)
    re, im = approx_complex(a, 12)
    assert abs(float(re) - z.real) < 1e-9 and abs(float(im) - z.imag) < 1e-9


def test_quantum_number_zeros():
    for den in range(1, 13):
        for num in range(-4 * den, 4 * den + 1):
            x = Fraction(num, den)
            assert quantum_number(x).is_zero() == (x.denominator == 1 and x.numerator % 2 == 0)


@pytest.mark.parametrize("d", [1, 2, 3, 5, 9, 12])
def test_sqrt_int(d):
    r = sqrt_int(d)
    assert r * r == d
    assert float(approx_complex(r, 12)[0]) > 0


def test_minimal_and_serialisation():
    a = (q_power(Fraction(1, 3)) + 2).promote(120)
    m = a.minimal()
    assert m == a and m.conductor == 12
    assert Cyclotomic.from_dict(m.to_dict()) == a
    assert Cyclotomic.from_rational(Fraction(9)).promote(1152).minimal().conductor == 1


def test_errors():
    with pytest.raises(DivisionByZero):
        Cyclotomic.zero().inverse()
    with pytest.raises((ValueError, ZeroDivisionError)):
        to_fraction("1/0")
    with pytest.raises(ConductorOverflow):
        with conductor_limit(100):
            q_power(Fraction(1, 700))
