"""Idempotent machinery: refinement, equivalence, splitting, rank,
sum-ring generators and lifting modulo compact operators.

Everything here certifies what it returns.  Norm preconditions are
exact valuation comparisons, final identities are re-checked at the
target depth, and searches fail loudly when their budget runs out
instead of returning a best guess.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

from .errors import (CertificationFailed, DependentBasis, NoConvergence,
                     PreconditionFailed, SearchExhausted)
from .io import exponent_str
from .operators import (FiniteMatrix, IndexMap, NormalForm, Operator,
                        Product, Sum, is_compact, nf_polynomial, normalize,
                        op_apply, op_norm)
from .polynomials import IntPolynomial
from .scalars import Padic, ValuationBound
from .vectors import PadicVector


def _minus(prime: int) -> Padic:
    return Padic.from_int(-1, prime)


def _nf_sub(a: NormalForm, b: NormalForm) -> NormalForm:
    return a.add(b.scale(_minus(a.prime)))


def _identity_nf(prime: int) -> NormalForm:
    return NormalForm(prime, Padic.one(prime), None, {})


def _zero_nf(prime: int) -> NormalForm:
    return NormalForm(prime, Padic.zero(prime), None, {})


# -- refinement polynomials ---------------------------------------------


def refinement_polynomial(m: int) -> IntPolynomial:
    """The unique polynomial of degree < 2m fixing 0 and 1 to order m.

    Coefficient of x^k (for m <= k <= 2m-1) is
    sum over i of (-1)^(i+1) C(m,i) C(m-1+k-i, k-i), i = k-m+1 .. m.
    The defining conditions are re-verified symbolically before return.
    """
    if m < 1:
        raise ValueError("m must be positive")
    coeffs = [0] * (2 * m)
    for k in range(m, 2 * m):
        total = 0
        for i in range(k - m + 1, m + 1):
            total += (-1) ** (i + 1) * math.comb(m, i) * math.comb(m - 1 + k - i, k - i)
        coeffs[k] = total
    poly = IntPolynomial(tuple(coeffs))
    assert poly.degree <= 2 * m - 1
    assert poly(0) == 0 and poly(1) == 1
    d = poly
    for _ in range(1, m):
        d = d.derivative()
        assert d(0) == 0 and d(1) == 0
    return poly


# -- refinement ----------------------------------------------------------


def idempotent_refine(a: Operator, target: int = 30, budget: int = 8) -> Operator:
    """Nearest idempotent to an almost-idempotent a.

    Requires ||a^2 - a|| < 1 / ||a||^2.  Iterates the refinement
    polynomials with doubling order until two successive values agree
    below p^(-target); the output e is checked to satisfy e^2 = e at the
    target depth and ||a - e|| < min(1/||a||, 1).
    """
    p = a.prime
    nf = normalize(a)
    norm_a = nf.norm()
    if norm_a < ValuationBound.one():
        # covers a = 0: anything of norm < 1 refines to the zero idempotent
        return FiniteMatrix(p, {})
    gap = _nf_sub(nf.mul(nf), nf).norm()
    limit = ValuationBound(-2 * norm_a.exponent)
    if not gap < limit:
        raise PreconditionFailed(
            f"defect norm exponent {exponent_str(gap)} must exceed "
            f"{limit.exponent} (norm of a: exponent {norm_a.exponent})")
    prev: NormalForm | None = None
    m = 1
    for _ in range(budget):
        coeffs = [Padic.from_int(c, p) for c in refinement_polynomial(m).coeffs]
        current = nf_polynomial(nf, coeffs)
        if prev is not None:
            diff = _nf_sub(current, prev)
            if diff.vanishes_to(target):
                idem_gap = _nf_sub(current.mul(current), current)
                if idem_gap.vanishes_to(target):
                    _check_refinement_distance(nf, current, norm_a)
                    return current.to_operator()
        prev = current
        m *= 2
    raise NoConvergence(budget, "refinement iterates never met the target depth")


def _check_refinement_distance(nf_a: NormalForm, nf_e: NormalForm,
                               norm_a: ValuationBound) -> None:
    dist = _nf_sub(nf_a, nf_e).norm()
    # min(1/||a||, 1) with ||a|| >= 1 on this path
    if not dist < ValuationBound(-norm_a.exponent):
        raise CertificationFailed(
            0, f"refined idempotent too far from input: exponent {exponent_str(dist)}")


# -- equivalence ---------------------------------------------------------


@dataclass(frozen=True)
class EquivalenceWitness:
    u: Operator
    u_inv: Operator
    e: Operator
    f: Operator


def idempotent_equivalence(e: Operator, f: Operator,
                           target: int = 30) -> EquivalenceWitness:
    """Invertible u with u e u^-1 = f, for idempotents at distance
    below 1/||e||.  u = 1 - f - e + 2fe; its inverse comes from the
    geometric series in 1 - u, which the distance bound makes converge."""
    p = e.prime
    nfe, nff = normalize(e), normalize(f)
    norm_e = nfe.norm()
    if norm_e.is_zero:
        raise PreconditionFailed("e must be a nonzero idempotent")
    for name, nf in (("e", nfe), ("f", nff)):
        if not _nf_sub(nf.mul(nf), nf).vanishes_to(target):
            raise PreconditionFailed(f"{name} is not idempotent at the target depth")
    dist = _nf_sub(nfe, nff).norm()
    if not dist < ValuationBound(-norm_e.exponent):
        raise PreconditionFailed(
            f"distance exponent {exponent_str(dist)} must exceed {-norm_e.exponent}")
    two = Padic.from_int(2, p)
    fe = nff.mul(nfe)
    nfu = _identity_nf(p).add(nff.scale(_minus(p))).add(nfe.scale(_minus(p))).add(fe.scale(two))
    w = _nf_sub(_identity_nf(p), nfu)
    if not w.norm() < ValuationBound.one():
        raise PreconditionFailed("1 - u fails to be a contraction; inputs are not close enough")
    inv = _geometric_inverse(w, target)
    for left, right in ((nfu, inv), (inv, nfu)):
        if not _nf_sub(left.mul(right), _identity_nf(p)).vanishes_to(target):
            raise CertificationFailed(target, "inverse verification failed")
    conj = nfu.mul(nfe).mul(inv)
    if not _nf_sub(conj, nff).vanishes_to(target):
        raise CertificationFailed(target, "conjugation does not carry e to f at the target depth")
    return EquivalenceWitness(nfu.to_operator(), inv.to_operator(), e, f)


def _geometric_inverse(w: NormalForm, target: int) -> NormalForm:
    """(1 - w)^-1 = sum of w^k, truncated once the terms drop below
    p^(-target)."""
    p = w.prime
    acc = _identity_nf(p)
    term = _identity_nf(p)
    for _ in range(target + 8):
        term = term.mul(w)
        if term.norm() <= ValuationBound(target):
            return acc
        acc = acc.add(term)
    raise NoConvergence(target + 8, "geometric series did not reach the target depth")


def near_idempotent_equivalence(e: Operator, a: Operator,
                                target: int = 30) -> tuple[Operator, EquivalenceWitness]:
    """Refine a to an idempotent and witness its equivalence with e.
    Requires ||e - a|| < 1/||e||^3, strictly."""
    nfe = normalize(e)
    norm_e = nfe.norm()
    if norm_e.is_zero:
        raise PreconditionFailed("e must be a nonzero idempotent")
    dist = _nf_sub(nfe, normalize(a)).norm()
    if not dist < ValuationBound(-3 * norm_e.exponent):
        raise PreconditionFailed(
            f"distance exponent {exponent_str(dist)} must exceed {-3 * norm_e.exponent}")
    e_a = idempotent_refine(a, target)
    return e_a, idempotent_equivalence(e, e_a, target)


# -- column projections and splitting ------------------------------------


def _max_norm_row(entries: dict[int, Padic]) -> int:
    best = ValuationBound.zero()
    for v in entries.values():
        if v.norm > best:
            best = v.norm
    return min(i for i, v in entries.items() if v.norm == best)


def column_projection(basis: list[PadicVector], ambient_idempotent: Operator,
                      target: int = 30) -> FiniteMatrix:
    """Contractive idempotent onto the span of the basis vectors.

    Column-reduces the basis to vectors v_k of norm 1 with pivot rows
    a_k satisfying v_i(a_k) = delta_ik, then returns sum of v_k (x) delta_{a_k}.
    """
    if not basis:
        raise DependentBasis("empty basis")
    p = basis[0].prime
    for v in basis:
        image_gap = op_apply(ambient_idempotent, v) - v
        if not all(x.vanishes_to(target) for x in image_gap.entries.values()):
            raise PreconditionFailed("basis vector is not fixed by the ambient idempotent")
    cols = [dict(v.entries) for v in basis]
    pivots: list[int] = []
    for k in range(len(cols)):
        col = {i: v for i, v in cols[k].items() if not v.is_zero}
        if not col:
            raise DependentBasis(f"column {k} reduced to zero")
        row = _max_norm_row(col)
        pivot = col[row]
        cols[k] = {i: v / pivot for i, v in col.items()}
        pivots.append(row)
        for j in range(len(cols)):
            if j == k or row not in cols[j]:
                continue
            factor = cols[j][row]
            for i, v in cols[k].items():
                cur = cols[j].get(i, Padic.zero(p)) - factor * v
                if cur.is_zero:
                    cols[j].pop(i, None)
                else:
                    cols[j][i] = cur
    entries: dict[tuple[int, int], Padic] = {}
    for k, row in enumerate(pivots):
        for i, v in cols[k].items():
            entries[(i, row)] = v
    return FiniteMatrix(p, entries)


@dataclass(frozen=True)
class SplitResult:
    f: Operator
    g: Operator


def idempotent_split(e: Operator, target: int = 30) -> SplitResult:
    """Split an idempotent as e = f + g with f finite-rank carrying all
    the non-integral columns and g a contractive idempotent, fg = gf = 0."""
    p = e.prime
    nfe = normalize(e)
    if not _nf_sub(nfe.mul(nfe), nfe).vanishes_to(target):
        raise PreconditionFailed("input is not idempotent at the target depth")
    exceptional = [j for (_, j), v in nfe.head.items() if not v.is_integral]
    if not exceptional:
        return _verified_split(nfe, _zero_nf(p), nfe, target)
    n = max(exceptional)
    basis = _independent_prefix([nfe.column(j) for j in range(n + 1)])
    if not basis:
        return _verified_split(nfe, _zero_nf(p), nfe, target)
    f_tilde = column_projection(basis, e, target)
    nff = normalize(f_tilde).mul(nfe)
    nfg = _nf_sub(nfe, nff)
    return _verified_split(nfe, nff, nfg, target)


def _independent_prefix(columns: list[PadicVector]) -> list[PadicVector]:
    kept: list[PadicVector] = []
    reduced: list[tuple[int, dict[int, Padic]]] = []
    for v in columns:
        cur = {i: x for i, x in v.entries.items() if not x.is_zero}
        for row, vec in reduced:
            if row in cur:
                factor = cur[row]
                for i, x in vec.items():
                    nxt = cur.get(i, Padic.zero(v.prime)) - factor * x
                    if nxt.is_zero:
                        cur.pop(i, None)
                    else:
                        cur[i] = nxt
        if not cur:
            continue
        row = _max_norm_row(cur)
        pivot = cur[row]
        reduced.append((row, {i: x / pivot for i, x in cur.items()}))
        kept.append(v)
    return kept


def _verified_split(nfe: NormalForm, nff: NormalForm, nfg: NormalForm,
                    target: int) -> SplitResult:
    checks = {
        "f idempotent": _nf_sub(nff.mul(nff), nff),
        "g idempotent": _nf_sub(nfg.mul(nfg), nfg),
        "fg zero": nff.mul(nfg),
        "gf zero": nfg.mul(nff),
        "ef = f": _nf_sub(nfe.mul(nff), nff),
        "fe = f": _nf_sub(nff.mul(nfe), nff),
    }
    for name, diff in checks.items():
        if not diff.vanishes_to(target):
            raise CertificationFailed(target, f"split verification failed: {name}")
    if not nfg.norm() <= ValuationBound.one():
        raise CertificationFailed(target, "contractive part has norm above 1")
    return SplitResult(nff.to_operator(), nfg.to_operator())


# -- rank ----------------------------------------------------------------


def matrix_rank(entries: dict[tuple[int, int], Padic]) -> int:
    """Rank over Q_p by exact column reduction with max-norm pivoting."""
    cols: dict[int, dict[int, Padic]] = {}
    for (i, j), v in entries.items():
        if not v.is_zero:
            cols.setdefault(j, {})[i] = v
    reduced: list[tuple[int, dict[int, Padic]]] = []
    for j in sorted(cols):
        cur = dict(cols[j])
        prime = next(iter(cur.values())).prime
        for row, vec in reduced:
            if row in cur:
                factor = cur[row]
                for i, x in vec.items():
                    nxt = cur.get(i, Padic.zero(prime)) - factor * x
                    if nxt.is_zero:
                        cur.pop(i, None)
                    else:
                        cur[i] = nxt
        if not cur:
            continue
        row = _max_norm_row(cur)
        pivot = cur[row]
        reduced.append((row, {i: x / pivot for i, x in cur.items()}))
    return len(reduced)


def finite_rank_reduce(f: Operator, target: int = 30) -> int:
    """K0 integer of a finite-rank idempotent: its rank over Q_p."""
    nf = normalize(f)
    if not nf.shift.is_zero:
        raise PreconditionFailed("operator has an identity component; not finite rank")
    head = dict(nf.head)
    if nf.tail is not None:
        if not nf.tail.default.is_zero:
            raise PreconditionFailed("structured tail with nonzero default; not finite rank")
        for j, c in nf.tail.coeff.items():
            d = nf.tail.dest(j)
            if d is not None and not c.is_zero:
                head[(d, j)] = head.get((d, j), Padic.zero(f.prime)) + c
    if not head:
        return 0
    refined = idempotent_refine(FiniteMatrix(f.prime, head), target)
    return matrix_rank(normalize(refined).head)


# -- sum-ring generators --------------------------------------------------


def cantor_pair(block: int, offset: int) -> int:
    s = block + offset
    return s * (s + 1) // 2 + offset


def cantor_unpair(x: int) -> tuple[int, int]:
    w = (math.isqrt(8 * x + 1) - 1) // 2
    offset = x - w * (w + 1) // 2
    return w - offset, offset


@dataclass(frozen=True)
class BlockScheme:
    """A bijection N <-> N x N presented as (block, offset) |-> index."""

    pair: Callable[[int, int], int] = cantor_pair
    unpair: Callable[[int], tuple[int, int]] = cantor_unpair

    def block_of(self, x: int) -> int:
        return self.unpair(x)[0]


@dataclass(frozen=True)
class SumRingGenerators:
    prime: int
    scheme: BlockScheme
    first_to_all: IndexMap   # kills every block but the zeroth, which it spreads over N
    all_to_first: IndexMap   # embeds N as the zeroth block
    up: IndexMap             # block n -> block n+1
    down: IndexMap           # block n -> block n-1, kills block 0


def sum_ring_generators(prime: int, scheme: BlockScheme | None = None) -> SumRingGenerators:
    """Four norm-1 index maps with first_to_all.all_to_first = down.up = 1
    and all_to_first.first_to_all + up.down = 1."""
    sch = scheme if scheme is not None else BlockScheme()
    pair, unpair = sch.pair, sch.unpair

    def fta_dest(x: int) -> int | None:
        n, i = unpair(x)
        return i if n == 0 else None

    def atf_dest(i: int) -> int:
        return pair(0, i)

    def up_dest(x: int) -> int:
        n, i = unpair(x)
        return pair(n + 1, i)

    def up_inv(x: int) -> int | None:
        n, i = unpair(x)
        return pair(n - 1, i) if n >= 1 else None

    first_to_all = IndexMap(prime, fta_dest, inv=atf_dest, infinite_domain=True)
    all_to_first = IndexMap(prime, atf_dest, inv=fta_dest, infinite_domain=True)
    up = IndexMap(prime, up_dest, inv=up_inv, infinite_domain=True)
    down = IndexMap(prime, up_inv, inv=up_dest, infinite_domain=True)
    return SumRingGenerators(prime, sch, first_to_all, all_to_first, up, down)


def infinite_sum(a: Operator, depth: int, gens: SumRingGenerators | None = None) -> Operator:
    """Partial sum of the block-diagonal spreading of a: copies of a on
    blocks 0..depth.  Finite inputs are materialized; structural ones
    stay lazy expression trees."""
    if gens is None:
        gens = sum_ring_generators(a.prime)
    if not op_norm(a) <= ValuationBound.one():
        raise PreconditionFailed("spreading requires norm <= 1")
    nf = normalize(a)
    if nf.tail is None and nf.shift.is_zero:
        entries: dict[tuple[int, int], Padic] = {}
        for n in range(depth + 1):
            for (i, j), v in nf.head.items():
                entries[(gens.scheme.pair(n, i), gens.scheme.pair(n, j))] = v
        return FiniteMatrix(a.prime, entries)
    terms: list[Operator] = []
    for n in range(depth + 1):
        factors: list[Operator] = [gens.up] * n
        factors += [gens.all_to_first, a, gens.first_to_all]
        factors += [gens.down] * n
        terms.append(Product(factors))
    return Sum(terms)


# -- trivialization -------------------------------------------------------


def k0_trivialize(e: Operator, target: int = 30, prefix: int = 16) -> dict:
    """Machine-checkable transcript that the class of e collapses:
    the finite-rank part is conjugate to a 0/1 diagonal, and the
    contractive part spreads into the sum ring where its class absorbs."""
    p = e.prime
    nfe = normalize(e)
    if nfe.shift.is_zero and nfe.tail is None and not nfe.head:
        return {
            "zero_input": True,
            "classes": {"finite_rank": 0, "contractive": 0},
        }
    split = idempotent_split(e, target)
    rank = finite_rank_reduce(split.f, target)
    gens = sum_ring_generators(p)
    relations = _relation_checks(gens, prefix)
    depth = max(gens.scheme.block_of(x) for x in range(prefix)) + 1
    g_inf = infinite_sum(split.g, depth, gens)
    repeat_ok = _repeat_equation_ok(split.g, g_inf, gens, prefix, depth, target)
    return {
        "zero_input": False,
        "split": {
            "finite_part_rank": rank,
            "contractive_part_norm_exponent": exponent_str(op_norm(split.g)),
        },
        "finite_part": {
            "rank": rank,
            "diagonal_form": [[k, k, "1"] for k in range(rank)],
        },
        "contractive_part": {
            "sum_ring_relations_on_prefix": relations,
            "spread_depth": depth,
            "repeat_equation_on_prefix": repeat_ok,
        },
        "classes": {"finite_rank": rank, "contractive": 0},
    }


def _relation_checks(gens: SumRingGenerators, prefix: int) -> dict[str, bool]:
    p = gens.prime
    out = {"left_inverse_first": True, "left_inverse_shift": True, "partition_of_identity": True}
    for x in range(prefix):
        delta = PadicVector.basis(p, x)
        if (op_apply(gens.first_to_all, op_apply(gens.all_to_first, delta)) - delta).entries:
            out["left_inverse_first"] = False
        if (op_apply(gens.down, op_apply(gens.up, delta)) - delta).entries:
            out["left_inverse_shift"] = False
        recombined = (op_apply(gens.all_to_first, op_apply(gens.first_to_all, delta))
                      + op_apply(gens.up, op_apply(gens.down, delta)))
        if (recombined - delta).entries:
            out["partition_of_identity"] = False
    return out


def _repeat_equation_ok(g: Operator, g_inf: Operator, gens: SumRingGenerators,
                        prefix: int, depth: int, target: int) -> bool:
    for x in range(prefix):
        if gens.scheme.block_of(x) >= depth:
            continue
        delta = PadicVector.basis(g.prime, x)
        lhs = (op_apply(gens.all_to_first, op_apply(g, op_apply(gens.first_to_all, delta)))
               + op_apply(gens.up, op_apply(g_inf, op_apply(gens.down, delta))))
        rhs = op_apply(g_inf, delta)
        gap = lhs - rhs
        if any(not v.vanishes_to(target) for v in gap.entries.values()):
            return False
    return True


# -- lifting modulo compacts ----------------------------------------------


def idempotent_lift(a: Operator, compact_defect: Operator | None = None,
                    target: int = 30, budget: int = 64) -> Operator:
    """Idempotent e with e - a compact, for a contraction a whose defect
    a^2 - a is compact.  Searches powers for ||a^m - a^n|| < 1 (gap-first
    breadth order), then refines a suitable power."""
    p = a.prime
    if not op_norm(a) <= ValuationBound.one():
        raise PreconditionFailed("lift input must be a contraction")
    defect = compact_defect
    if defect is None:
        defect = Product([a, a]) - a
    if not is_compact(defect):
        raise PreconditionFailed("defect a^2 - a is not certified compact")
    nf = normalize(a)
    powers: list[NormalForm] = [_identity_nf(p), nf]

    def power(k: int) -> NormalForm:
        while len(powers) <= k:
            powers.append(powers[-1].mul(nf))
        return powers[k]

    for gap in range(1, budget):
        for n in range(1, budget + 1 - gap):
            m = n + gap
            if not _nf_sub(power(m), power(n)).norm() < ValuationBound.one():
                continue
            k = n // gap + 1
            e = idempotent_refine(power(k * gap).to_operator(), target)
            lift_defect = e - a
            if not is_compact(lift_defect):
                raise CertificationFailed(target, "lifted idempotent does not agree with a modulo compacts")
            return e
    raise SearchExhausted(budget, "no power pair with ||a^m - a^n|| < 1 within the budget")
