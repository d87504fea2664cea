import math
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from padicops.errors import DivisionByZero, PrecisionExhausted
from padicops.scalars import (DEFAULT_PRECISION, Padic, ValuationBound,
                              binomial_padic, digit_sum, factorial_valuation,
                              norm_max, teichmuller, vandermonde_coefficients)

primes = st.sampled_from([2, 3, 5])
small_ints = st.integers(min_value=-10**9, max_value=10**9)


def test_from_int_normalizes_valuation():
    x = Padic.from_int(12, 3)
    assert x.valuation == 1 and x.unit == 4
    assert Padic.from_int(0, 3).is_zero
    assert Padic.from_int(-9, 3).valuation == 2


def test_certified_zero_bookkeeping():
    x = Padic.from_int(7, 5, 10)
    z = x - x
    assert z.is_zero and z.precision == 10
    assert z.vanishes_to(10) and not z.vanishes_to(11)
    with pytest.raises(PrecisionExhausted):
        Padic.zero(5, 0)


def test_from_fraction_residue():
    x = Padic.from_fraction(Fraction(5, 7), 3, 4)
    assert x.residue(4) == 47  # 5 * 7^(-1) mod 81
    y = Padic.from_fraction(Fraction(1, 3), 3)
    assert y.valuation == -1


@given(primes, small_ints, small_ints)
def test_ultrametric_inequality(p, a, b):
    x, y = Padic.from_int(a, p), Padic.from_int(b, p)
    s = x + y
    assert s.norm <= norm_max([x.norm, y.norm])
    if x.norm != y.norm:
        assert s.norm == norm_max([x.norm, y.norm])


@given(primes, small_ints, small_ints, small_ints)
def test_ring_laws_on_integers(p, a, b, c):
    x, y, z = (Padic.from_int(n, p) for n in (a, b, c))
    assert ((x + y) + z - (x + (y + z))).is_zero
    assert ((x * y) * z - (x * (y * z))).is_zero
    assert (x * (y + z) - (x * y + x * z)).is_zero
    assert (x * y - y * x).is_zero


@given(primes, small_ints, small_ints)
def test_division_inverts_multiplication(p, a, b):
    if b == 0:
        return
    x, y = Padic.from_int(a, p), Padic.from_int(b, p)
    assert (x / y * y - x).is_zero


def test_division_by_zero_raises():
    with pytest.raises(DivisionByZero):
        Padic.one(3) / Padic.zero(3)


@given(primes, small_ints)
def test_arithmetic_matches_integers(p, a):
    # the embedding of Z is a ring homomorphism on residues
    x = Padic.from_int(a, p)
    sq = x * x
    depth = 12
    if a != 0 and sq.valuation + sq.precision >= depth and a * a >= 0:
        assert sq.residue(depth) == (a * a) % p**depth


def test_power_matches_repeated_product():
    x = Padic.from_int(7, 3)
    acc = Padic.one(3)
    for _ in range(6):
        acc = acc * x
    assert (x**6 - acc).is_zero
    assert (x**0 - Padic.one(3)).is_zero


def test_negative_power_is_inverse():
    x = Padic.from_int(7, 3)
    assert ((x**-2) * x * x - Padic.one(3)).is_zero


def test_cap_absolute_folds_tail():
    x = Padic.from_int(1 + 3**5, 3, 40)
    capped = x.cap_absolute(5)
    assert capped.residue(5) == 1 and capped.absolute_precision == 5
    deep = Padic.from_int(3**7, 3, 40)
    assert deep.cap_absolute(5).is_zero


def test_valuation_bound_order():
    zero = ValuationBound.zero()
    assert zero < ValuationBound(3) < ValuationBound(1) < ValuationBound(0)
    assert ValuationBound(0) < ValuationBound(-2)
    assert str(ValuationBound(2)) == "p^-2"
    assert str(zero) == "0"
    assert ValuationBound(1) * ValuationBound(2) == ValuationBound(3)


def test_digit_sum_and_factorial_valuation():
    assert digit_sum(100, 3) == 4
    assert factorial_valuation(100, 3) == 48
    assert factorial_valuation(10, 2) == 8
    for p in (2, 3, 5, 7):
        for n in range(0, 200):
            legendre, q = 0, p
            while q <= n:
                legendre += n // q
                q *= p
            assert factorial_valuation(n, p) == legendre


@given(primes, st.integers(min_value=0, max_value=10**6), st.integers(min_value=0, max_value=12))
def test_binomial_is_integral(p, a, k):
    b = binomial_padic(Padic.from_int(a, p), k)
    assert b.is_integral


def test_binomial_matches_combinatorics():
    b = binomial_padic(Padic.from_int(7, 3), 3)
    assert (b - Padic.from_int(35, 3)).vanishes_to(30)
    assert (binomial_padic(Padic.from_int(9, 5), 0) - Padic.one(5)).is_zero


def test_vandermonde_frozen_tables():
    assert vandermonde_coefficients(1, 1) == {1: 1, 2: 2}
    assert vandermonde_coefficients(1, 2) == {2: 2, 3: 3}
    assert vandermonde_coefficients(0, 4) == {4: 1}
    # coefficient formula: l! / ((m+n-l)! (l-m)! (l-n)!)
    table = vandermonde_coefficients(3, 2)
    assert table == {l: math.factorial(l)
                     // (math.factorial(5 - l) * math.factorial(l - 3) * math.factorial(l - 2))
                     for l in range(3, 6)}


@settings(max_examples=25)
@given(st.integers(min_value=0, max_value=8), st.integers(min_value=0, max_value=8),
       st.integers(min_value=0, max_value=400))
def test_vandermonde_identity_pointwise(m, n, a):
    # binom(a,m) binom(a,n) = sum_l c_l binom(a,l) over plain integers
    lhs = math.comb(a, m) * math.comb(a, n)
    rhs = sum(c * math.comb(a, l) for l, c in vandermonde_coefficients(m, n).items())
    assert lhs == rhs


def test_teichmuller_values():
    t = teichmuller(Padic.from_int(2, 5))
    assert t.residue(1) == 2
    assert t.residue(2) == 7
    assert (t**4 - Padic.one(5)).vanishes_to(39)
    assert teichmuller(Padic.from_int(10, 5)).is_zero
    one = teichmuller(Padic.one(7))
    assert (one - Padic.one(7)).vanishes_to(39)


def test_default_precision_is_forty():
    assert DEFAULT_PRECISION == 40
    assert Padic.from_int(1, 3).precision == 40
