"""Exact p-adic scalars with valuation-based norms.

A value is stored as prime, valuation and unit digit string, never as a
float.  Arithmetic is exact modulo p^(valuation + precision); precision
is tracked per value so cancellation is visible to callers.  The zero
element has valuation +infinity, encoded as ``valuation is None``; a
zero produced by cancellation additionally remembers the absolute depth
to which the vanishing is certified.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

from .errors import DivisionByZero, NonIntegral, PrecisionExhausted

DEFAULT_PRECISION = 40


def _vp(n: int, p: int) -> int:
    """Valuation of a nonzero integer."""
    if n == 0:
        raise ValueError("valuation of 0 is infinite")
    v = 0
    while n % p == 0:
        n //= p
        v += 1
    return v


@dataclass(frozen=True, slots=True)
class ValuationBound:
    """The exact norm value p^(-exponent).

    ``exponent is None`` encodes the zero norm.  Comparisons follow the
    norm order, so a larger exponent means a smaller bound.
    """

    exponent: int | None

    @classmethod
    def zero(cls) -> "ValuationBound":
        return cls(None)

    @classmethod
    def one(cls) -> "ValuationBound":
        return cls(0)

    @property
    def is_zero(self) -> bool:
        return self.exponent is None

    def _key(self) -> tuple[int, int]:
        # (finite?, -exponent): zero norm sorts below everything
        if self.exponent is None:
            return (0, 0)
        return (1, -self.exponent)

    def __lt__(self, other: "ValuationBound") -> bool:
        return self._key() < other._key()

    def __le__(self, other: "ValuationBound") -> bool:
        return self._key() <= other._key()

    def __gt__(self, other: "ValuationBound") -> bool:
        return self._key() > other._key()

    def __ge__(self, other: "ValuationBound") -> bool:
        return self._key() >= other._key()

    def __mul__(self, other: "ValuationBound") -> "ValuationBound":
        if self.exponent is None or other.exponent is None:
            return ValuationBound(None)
        return ValuationBound(self.exponent + other.exponent)

    def __str__(self) -> str:
        return "0" if self.exponent is None else f"p^{-self.exponent}"


def norm_max(bounds) -> ValuationBound:
    out = ValuationBound.zero()
    for b in bounds:
        if b > out:
            out = b
    return out


@dataclass(frozen=True, slots=True)
class Padic:
    """One p-adic scalar.

    Nonzero: ``unit`` is coprime to ``prime``, ``0 < unit < p**precision``,
    and the value is p^valuation * unit, exact modulo
    p^(valuation + precision).

    Zero: ``valuation`` and ``unit`` are None.  ``precision`` then holds
    the absolute depth to which the vanishing is certified (None when
    the zero is exact by construction).
    """

    prime: int
    valuation: int | None
    unit: int | None
    precision: int | None

    # -- constructors -------------------------------------------------

    @classmethod
    def zero(cls, prime: int, certified: int | None = None) -> "Padic":
        if certified is not None and certified <= 0:
            raise PrecisionExhausted("zero with no certified digits")
        return cls(prime, None, None, certified)

    @classmethod
    def from_unit(cls, prime: int, valuation: int, unit: int, precision: int) -> "Padic":
        if precision <= 0:
            raise PrecisionExhausted("no significant digits left")
        mod = prime**precision
        unit %= mod
        if unit == 0:
            # all stored digits cancelled; vanishing certified to here
            return cls.zero(prime, valuation + precision)
        shift = _vp(unit, prime)
        if shift:
            # caller passed a non-unit; renormalize, precision shrinks
            if shift >= precision:
                return cls.zero(prime, valuation + precision)
            return cls(prime, valuation + shift, unit // prime**shift, precision - shift)
        return cls(prime, valuation, unit, precision)

    @classmethod
    def from_int(cls, n: int, prime: int, precision: int = DEFAULT_PRECISION) -> "Padic":
        if n == 0:
            return cls.zero(prime)
        v = _vp(n, prime)
        return cls.from_unit(prime, v, n // prime**v, precision)

    @classmethod
    def from_fraction(cls, q: Fraction | int, prime: int, precision: int = DEFAULT_PRECISION) -> "Padic":
        q = Fraction(q)
        if q == 0:
            return cls.zero(prime)
        vn = _vp(q.numerator, prime)
        vd = _vp(q.denominator, prime)
        mod = prime**precision
        num = q.numerator // prime**vn
        den = q.denominator // prime**vd
        unit = num * pow(den, -1, mod) % mod
        return cls(prime, vn - vd, unit, precision)

    @classmethod
    def one(cls, prime: int, precision: int = DEFAULT_PRECISION) -> "Padic":
        return cls(prime, 0, 1, precision)

    # -- predicates and views -----------------------------------------

    @property
    def is_zero(self) -> bool:
        return self.valuation is None

    @property
    def is_integral(self) -> bool:
        return self.is_zero or self.valuation >= 0

    @property
    def norm(self) -> ValuationBound:
        """Exact norm for nonzero values; for certified zeros this is
        the zero bound (the true value is below every tracked digit)."""
        return ValuationBound(self.valuation)

    def vanishes_to(self, depth: int) -> bool:
        """True when the value is certified to be 0 modulo p^depth."""
        if self.is_zero:
            return self.precision is None or self.precision >= depth
        return self.valuation >= depth

    @property
    def absolute_precision(self) -> int | None:
        """Depth to which digits are known; None means exact."""
        if self.is_zero:
            return self.precision
        return self.valuation + self.precision

    def residue(self, depth: int) -> int:
        """The integer value mod p^depth.  Requires valuation >= 0
        on the tracked digits and enough absolute precision."""
        if self.is_zero:
            if self.precision is not None and self.precision < depth:
                raise PrecisionExhausted(f"zero certified only to depth {self.precision}")
            return 0
        if self.valuation < 0:
            raise NonIntegral("negative valuation has no integer residue")
        if self.valuation + self.precision < depth:
            raise PrecisionExhausted("not enough digits for the requested residue")
        if self.valuation >= depth:
            return 0
        return self.unit * self.prime**self.valuation % self.prime**depth

    # -- arithmetic ----------------------------------------------------

    def _check(self, other: "Padic") -> None:
        if self.prime != other.prime:
            raise ValueError(f"mixed primes {self.prime} and {other.prime}")

    def __add__(self, other: "Padic") -> "Padic":
        self._check(other)
        p = self.prime
        ax = self.absolute_precision
        ay = other.absolute_precision
        bound = ax if ay is None else ay if ax is None else min(ax, ay)
        terms = [t for t in (self, other) if not t.is_zero]
        if not terms:
            return Padic.zero(p, bound)
        # a nonzero term always has finite absolute precision
        assert bound is not None
        base = min(t.valuation for t in terms)
        if bound <= base:
            # every known digit sits below the uncertainty horizon
            return Padic.zero(p, bound)
        window = bound - base
        # terms whose valuation clears the window vanish mod p^window;
        # skipping them keeps the shift exponents (and integers) small
        total = sum(t.unit * p ** (t.valuation - base) for t in terms
                    if t.valuation - base < window)
        return Padic.from_unit(p, base, total, window)

    def __neg__(self) -> "Padic":
        if self.is_zero:
            return self
        mod = self.prime**self.precision
        return Padic(self.prime, self.valuation, (-self.unit) % mod, self.precision)

    def __sub__(self, other: "Padic") -> "Padic":
        return self + (-other)

    def __mul__(self, other: "Padic") -> "Padic":
        self._check(other)
        p = self.prime
        if self.is_zero or other.is_zero:
            # exact zero dominates any factor
            if (self.is_zero and self.precision is None) or (other.is_zero and other.precision is None):
                return Padic.zero(p)
            certs = []
            for z, w in ((self, other), (other, self)):
                if z.is_zero:
                    shift = 0 if w.is_zero else w.valuation
                    certs.append(z.precision + shift)
            return Padic.zero(p, min(certs))
        prec = min(self.precision, other.precision)
        mod = p**prec
        return Padic.from_unit(p, self.valuation + other.valuation, self.unit * other.unit % mod, prec)

    def __truediv__(self, other: "Padic") -> "Padic":
        self._check(other)
        if other.is_zero:
            raise DivisionByZero("division by zero scalar")
        p = self.prime
        if self.is_zero:
            if self.precision is None:
                return Padic.zero(p)
            return Padic.zero(p, self.precision - other.valuation)
        prec = min(self.precision, other.precision)
        mod = p**prec
        unit = self.unit * pow(other.unit, -1, mod) % mod
        return Padic.from_unit(p, self.valuation - other.valuation, unit, prec)

    def __pow__(self, k: int) -> "Padic":
        width = DEFAULT_PRECISION if self.precision is None else self.precision
        if k < 0:
            return Padic.one(self.prime, width) / self ** (-k)
        out = Padic.one(self.prime, width)
        base = self
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    def scale_int(self, n: int) -> "Padic":
        width = DEFAULT_PRECISION if self.precision is None else self.precision
        return self * Padic.from_int(n, self.prime, width)

    def cap_absolute(self, depth: int) -> "Padic":
        """Forget digits past absolute depth (used to fold in error bounds)."""
        if self.is_zero:
            cert = depth if self.precision is None else min(self.precision, depth)
            return Padic.zero(self.prime, cert)
        if self.valuation >= depth:
            return Padic.zero(self.prime, depth)
        if self.valuation + self.precision <= depth:
            return self
        return Padic.from_unit(self.prime, self.valuation, self.unit, depth - self.valuation)

    def __str__(self) -> str:
        from .io import scalar_to_text

        return scalar_to_text(self)


def padic_arith(x: Padic, y: Padic, op: str) -> Padic:
    """Dispatcher over the four field operations, by name."""
    if op == "add":
        return x + y
    if op == "sub":
        return x - y
    if op == "mul":
        return x * y
    if op == "div":
        return x / y
    raise ValueError(f"unknown operation {op!r}")


# -- combinatorial helpers --------------------------------------------


def digit_sum(n: int, p: int) -> int:
    """Sum of the base-p digits of a nonnegative integer."""
    if n < 0:
        raise ValueError("digit_sum needs n >= 0")
    s = 0
    while n:
        n, r = divmod(n, p)
        s += r
    return s


def factorial_valuation(n: int, p: int) -> int:
    """v_p(n!) via the digit-sum form (n - s_p(n)) / (p - 1)."""
    if n < 0:
        raise ValueError("factorial_valuation needs n >= 0")
    q, r = divmod(n - digit_sum(n, p), p - 1)
    assert r == 0
    return q


def binomial_padic(x: Padic, k: int) -> Padic:
    """The binomial coefficient function x(x-1)...(x-k+1)/k! at x in Z_p.

    The result lies in Z_p; its guaranteed absolute precision drops by
    factorial_valuation(k) because of the division.
    """
    if k < 0:
        raise ValueError("binomial_padic needs k >= 0")
    if not x.is_integral:
        raise NonIntegral("binomial_padic needs |x| <= 1")
    p = x.prime
    width = DEFAULT_PRECISION if x.precision is None else x.precision
    acc = Padic.one(p, width)
    for j in range(k):
        acc = acc * (x - Padic.from_int(j, p, width))
    if k >= 2:
        acc = acc / Padic.from_int(math.factorial(k), p, width)
    return acc


def vandermonde_coefficients(m: int, n: int) -> dict[int, int]:
    """Integer coefficients expanding binom(x,m)binom(x,n) over binom(x,l).

    Returns {l: l! / ((m+n-l)! (l-m)! (l-n)!)} for max(m,n) <= l <= m+n.
    """
    if m < 0 or n < 0:
        raise ValueError("need m, n >= 0")
    out: dict[int, int] = {}
    for l in range(max(m, n), m + n + 1):
        num = math.factorial(l)
        den = math.factorial(m + n - l) * math.factorial(l - m) * math.factorial(l - n)
        q, r = divmod(num, den)
        assert r == 0
        out[l] = q
    return out


def teichmuller(x: Padic) -> Padic:
    """The Teichmuller representative of x in Z_p.

    Iterates x -> x^p to its fixed point; the limit is the unique root
    of unity congruent to x mod p, or exactly 0 when |x| < 1.
    """
    if not x.is_integral:
        raise NonIntegral("teichmuller needs |x| <= 1")
    if x.is_zero or x.valuation >= 1:
        return Padic.zero(x.prime)
    y = x
    for _ in range(max(2, y.precision + 1)):
        z = y**x.prime
        if z == y:
            return y
        y = z
    raise AssertionError("fixed point not reached within precision bound")
