"""Continuous Z_p -> Z_p functions as binomial-basis coefficient sequences.

A function is stored as finitely many coefficients T_0..T_M plus an
asserted bound on every coefficient past M.  Finite samples cannot
certify decay, so the tail bound is the caller's claim, not ours; it
defaults to an exactly-zero tail, which makes the stored data a
polynomial in the binomial basis.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from .errors import NonIntegral
from .scalars import Padic, ValuationBound, binomial_padic, norm_max


@dataclass(frozen=True)
class MahlerFunction:
    prime: int
    coefficients: tuple[Padic, ...]
    tail_bound: ValuationBound

    def __post_init__(self):
        for c in self.coefficients:
            if not c.is_integral:
                raise NonIntegral("coefficients must lie in Z_p")
        if self.tail_bound > ValuationBound.one():
            raise NonIntegral("tail bound must not exceed 1")


def mahler_expand(samples: Sequence[Padic], tail_bound: ValuationBound | None = None,
                  prime: int = 2) -> MahlerFunction:
    """Coefficients from the values f(0..M), by forward differences at 0.

    ``prime`` is consulted only for an empty sample list, which yields
    the zero function.
    """
    if tail_bound is None:
        tail_bound = ValuationBound.zero()
    if not samples:
        return MahlerFunction(prime, (), tail_bound)
    prime = samples[0].prime
    for s in samples:
        if not s.is_integral:
            raise NonIntegral("samples must lie in Z_p")
    coeffs: list[Padic] = []
    row = list(samples)
    while row:
        coeffs.append(row[0])
        row = [row[i + 1] - row[i] for i in range(len(row) - 1)]
    while coeffs and coeffs[-1].is_zero and coeffs[-1].precision is None:
        coeffs.pop()
    return MahlerFunction(prime, tuple(coeffs), tail_bound)


def mahler_eval(fn: MahlerFunction, x: Padic) -> Padic:
    if not x.is_integral:
        raise NonIntegral("evaluation points must lie in Z_p")
    total = Padic.zero(fn.prime)
    for n, t in enumerate(fn.coefficients):
        if t.is_zero:
            continue
        total = total + t * binomial_padic(x, n)
    if not fn.tail_bound.is_zero:
        # unseen coefficients contribute at most the tail bound
        total = total.cap_absolute(fn.tail_bound.exponent)
    return total


def mahler_sup_norm(fn: MahlerFunction) -> ValuationBound:
    return norm_max([c.norm for c in fn.coefficients] + [fn.tail_bound])
