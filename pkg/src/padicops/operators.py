"""Bounded operators on Q_p(X) for X = N, as immutable expression trees.

Leaves are FiniteMatrix, Diagonal, Identity and IndexMap; Sum, Product,
ScalarMul and Adjoint combine them.  Exact questions (norms, entries,
compactness) are answered through an internal normal form

    shift * I  +  structured tail  +  finite sparse head

which is closed under every combination the pipelines construct.  The
structured tail is an injective index map backed by callables and is
only trusted through its explicit certificates (inverse map, infinite
domain flag); nothing is ever decided by sampling.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

from .errors import NonIntegral, ParseError, StructureError, Undecidable
from .scalars import DEFAULT_PRECISION, Padic, ValuationBound, norm_max
from .vectors import PadicVector

Dest = Callable[[int], "int | None"]


# -- normal form -------------------------------------------------------


@dataclass
class _Tail:
    """Columns j -> coeff(j) * delta_{dest(j)} with finitely many
    coefficient overrides.  dest must be injective where defined."""

    dest: Dest
    inv: Dest | None
    coeff: dict[int, Padic]
    default: Padic
    infinite_domain: bool

    def coeff_at(self, j: int) -> Padic:
        return self.coeff.get(j, self.default)

    def scale(self, c: Padic) -> "_Tail":
        return _Tail(self.dest, self.inv, {j: v * c for j, v in self.coeff.items()},
                     self.default * c, self.infinite_domain)

    def preimage(self, i: int) -> int | None:
        if self.inv is None:
            raise StructureError("structured tail has no inverse certificate")
        j = self.inv(i)
        if j is not None and self.dest(j) != i:
            raise StructureError("inverse certificate disagrees with dest")
        return j


def _compose_tails(a: _Tail, b: _Tail) -> _Tail:
    """Tail of the product a.b (apply b first)."""

    def dest(j: int) -> int | None:
        d = b.dest(j)
        return None if d is None else a.dest(d)

    inv = None
    if a.inv is not None and b.inv is not None:
        a_inv, b_inv = a.inv, b.inv

        def inv(i: int) -> int | None:
            k = a_inv(i)
            return None if k is None else b_inv(k)

    keys = set(b.coeff)
    if a.coeff:
        if b.inv is None:
            raise StructureError("composition needs an inverse to pull back overrides")
        for k in a.coeff:
            j = b.inv(k)
            if j is not None and b.dest(j) == k:
                keys.add(j)
    overrides = {}
    for j in keys:
        d = b.dest(j)
        if d is None or a.dest(d) is None:
            continue
        overrides[j] = b.coeff_at(j) * a.coeff_at(d)
    return _Tail(dest, inv, overrides, a.default * b.default, False)


def _insert(head: dict, key: tuple[int, int], value: Padic) -> None:
    if key in head:
        value = head[key] + value
    if value.is_zero:
        head.pop(key, None)
    else:
        head[key] = value


@dataclass
class NormalForm:
    prime: int
    shift: Padic
    tail: _Tail | None
    head: dict[tuple[int, int], Padic]

    # entries ----------------------------------------------------------

    def entry(self, i: int, j: int) -> Padic:
        total = self.head.get((i, j), Padic.zero(self.prime))
        if i == j and not self.shift.is_zero:
            total = total + self.shift
        if self.tail is not None and self.tail.dest(j) == i:
            total = total + self.tail.coeff_at(j)
        return total

    def column(self, j: int) -> PadicVector:
        out: dict[int, Padic] = {}
        for (i, jj), v in self.head.items():
            if jj == j:
                out[i] = v
        if not self.shift.is_zero:
            _merge(out, j, self.shift)
        if self.tail is not None:
            d = self.tail.dest(j)
            if d is not None:
                _merge(out, d, self.tail.coeff_at(j))
        return PadicVector(self.prime, out)

    def apply(self, vec: PadicVector) -> PadicVector:
        acc: dict[int, Padic] = {}
        for j, x in vec.entries.items():
            for i, v in self.column(j).entries.items():
                _merge(acc, i, v * x)
        return PadicVector(self.prime, acc)

    # algebra ----------------------------------------------------------

    def add(self, other: "NormalForm") -> "NormalForm":
        if self.tail is not None and other.tail is not None:
            raise StructureError("sum of two structured tails has no normal form")
        head = dict(self.head)
        for key, v in other.head.items():
            _insert(head, key, v)
        return NormalForm(self.prime, self.shift + other.shift,
                          self.tail or other.tail, head)

    def scale(self, c: Padic) -> "NormalForm":
        if c.is_zero:
            return NormalForm(self.prime, Padic.zero(self.prime), None, {})
        head = {}
        for key, v in self.head.items():
            _insert(head, key, v * c)
        tail = self.tail.scale(c) if self.tail is not None else None
        return NormalForm(self.prime, self.shift * c, tail, head)

    def mul(self, other: "NormalForm") -> "NormalForm":
        a, b = self, other
        shift = a.shift * b.shift
        tail: _Tail | None = None
        if a.tail is not None and b.tail is not None:
            if not (a.shift.is_zero and b.shift.is_zero):
                raise StructureError("product of two shifted tailed forms has no normal form")
            tail = _compose_tails(a.tail, b.tail)
        elif b.tail is not None and not a.shift.is_zero:
            tail = b.tail.scale(a.shift)
        elif a.tail is not None and not b.shift.is_zero:
            tail = a.tail.scale(b.shift)
        head: dict[tuple[int, int], Padic] = {}
        acols: dict[int, list[tuple[int, Padic]]] = {}
        for (i, k), v in a.head.items():
            acols.setdefault(k, []).append((i, v))
        for (k, j), w in b.head.items():
            for i, v in acols.get(k, ()):
                _insert(head, (i, j), v * w)
        if not a.shift.is_zero:
            for key, w in b.head.items():
                _insert(head, key, a.shift * w)
        if not b.shift.is_zero:
            for key, v in a.head.items():
                _insert(head, key, v * b.shift)
        if a.tail is not None and b.head:
            for (k, j), w in b.head.items():
                d = a.tail.dest(k)
                if d is not None:
                    _insert(head, (d, j), a.tail.coeff_at(k) * w)
        if b.tail is not None and a.head:
            relevant: set[int] = set(b.tail.coeff)
            for k in acols:
                j = b.tail.preimage(k)
                if j is not None:
                    relevant.add(j)
            for j in relevant:
                d = b.tail.dest(j)
                if d is None:
                    continue
                c = b.tail.coeff_at(j)
                for i, v in acols.get(d, ()):
                    _insert(head, (i, j), v * c)
        return NormalForm(self.prime, shift, tail, head)

    def adjoint(self) -> "NormalForm":
        head = {(j, i): v for (i, j), v in self.head.items()}
        tail = None
        if self.tail is not None:
            if self.tail.inv is None:
                raise StructureError("adjoint of a structured tail needs an inverse certificate")
            overrides = {}
            for j, c in self.tail.coeff.items():
                d = self.tail.dest(j)
                if d is not None:
                    overrides[d] = c
            tail = _Tail(self.tail.inv, self.tail.dest, overrides,
                         self.tail.default, self.tail.infinite_domain)
        return NormalForm(self.prime, self.shift, tail, head)

    def divide_entries(self, c: Padic) -> "NormalForm":
        head = {}
        for key, v in self.head.items():
            _insert(head, key, v / c)
        tail = None
        if self.tail is not None:
            tail = _Tail(self.tail.dest, self.tail.inv,
                         {j: v / c for j, v in self.tail.coeff.items()},
                         self.tail.default / c, self.tail.infinite_domain)
        return NormalForm(self.prime, self.shift / c, tail, head)

    # exact queries ------------------------------------------------------

    def norm(self) -> ValuationBound:
        realized: list[ValuationBound] = []
        for (i, j), _ in self.head.items():
            total = self.entry(i, j)
            if not total.is_zero:
                realized.append(total.norm)
        if self.tail is not None:
            for j in self.tail.coeff:
                d = self.tail.dest(j)
                if d is None or (d, j) in self.head:
                    continue
                total = self.entry(d, j)
                if not total.is_zero:
                    realized.append(total.norm)
        s = self.shift.norm
        if self.tail is None or self.tail.default.is_zero:
            # beyond finitely many positions the matrix is shift * I
            if not self.shift.is_zero:
                realized.append(s)
            return norm_max(realized)
        d = self.tail.default.norm
        out = norm_max(realized)
        if not self.tail.infinite_domain:
            unknown = max(s, d)
            if out >= unknown:
                return out
            raise Undecidable("tail default norm matters but the domain size is uncertified")
        if self.shift.is_zero:
            realized.append(d)
            return norm_max(realized)
        if s != d:
            realized.append(max(s, d))
            return norm_max(realized)
        if out >= s:
            return out
        raise Undecidable("shift and tail default have equal norms; diagonal overlap unknown")

    def is_compact(self) -> bool:
        if not self.shift.is_zero:
            return False
        if self.tail is None or self.tail.default.is_zero:
            return True
        if self.tail.infinite_domain:
            return False
        raise Undecidable("tail has a nonzero default but no domain-size certificate")

    def vanishes_to(self, depth: int) -> bool:
        if not self.shift.vanishes_to(depth):
            return False
        if self.tail is not None:
            if not self.tail.default.vanishes_to(depth):
                return False
            if any(not c.vanishes_to(depth) for c in self.tail.coeff.values()):
                return False
        positions = set(self.head)
        if self.tail is not None:
            for j in self.tail.coeff:
                dd = self.tail.dest(j)
                if dd is not None:
                    positions.add((dd, j))
        return all(self.entry(i, j).vanishes_to(depth) for i, j in positions)

    def truncate_entries(self, size: int) -> dict[tuple[int, int], Padic]:
        out: dict[tuple[int, int], Padic] = {}
        for j in range(size):
            for i, v in self.column(j).entries.items():
                if i < size:
                    out[(i, j)] = v
        return out

    def to_operator(self) -> "Operator":
        if self.tail is not None:
            raise StructureError("callable-backed tails have no closed public form")
        if self.shift.is_zero:
            return FiniteMatrix(self.prime, dict(self.head))
        if all(i == j for i, j in self.head):
            entries = {i: self.entry(i, i) for (i, _) in self.head}
            return Diagonal(self.prime, entries, self.shift)
        return Sum([FiniteMatrix(self.prime, dict(self.head)),
                    Diagonal(self.prime, {}, self.shift)])


def _merge(acc: dict[int, Padic], i: int, v: Padic) -> None:
    if i in acc:
        v = acc[i] + v
    if v.is_zero:
        acc.pop(i, None)
    else:
        acc[i] = v


# -- public expression classes -----------------------------------------


class Operator:
    prime: int

    def __add__(self, other: "Operator") -> "Operator":
        return Sum([self, other])

    def __sub__(self, other: "Operator") -> "Operator":
        return Sum([self, ScalarMul(Padic.from_int(-1, self.prime), other)])

    def __mul__(self, other: "Operator") -> "Operator":
        return Product([self, other])

    def __neg__(self) -> "Operator":
        return ScalarMul(Padic.from_int(-1, self.prime), self)


@dataclass
class FiniteMatrix(Operator):
    prime: int
    entries: dict[tuple[int, int], Padic] = field(default_factory=dict)

    def __post_init__(self):
        self.entries = {k: v for k, v in self.entries.items() if not v.is_zero}
        for v in self.entries.values():
            if v.prime != self.prime:
                raise ValueError("entry prime mismatch")


@dataclass
class Diagonal(Operator):
    prime: int
    entries: dict[int, Padic] = field(default_factory=dict)
    default: Padic | None = None

    def __post_init__(self):
        if self.default is None:
            self.default = Padic.zero(self.prime)
        if not self.default.is_integral:
            raise NonIntegral("diagonal default must lie in Z_p")


@dataclass
class Identity(Operator):
    prime: int
    precision: int = DEFAULT_PRECISION


@dataclass
class IndexMap(Operator):
    """Columns j -> coeff(j) * delta_{dest(j)}.

    dest may be a finite dict or a callable on all of N returning None
    where undefined; callable-backed maps must be injective and should
    carry an inverse plus an infinite_domain certificate for exact
    norm and compactness answers.
    """

    prime: int
    dest: dict[int, int] | Dest = field(default_factory=dict)
    coeff: dict[int, Padic] = field(default_factory=dict)
    default_coeff: Padic | None = None
    inv: Dest | None = None
    infinite_domain: bool = False

    def __post_init__(self):
        if self.default_coeff is None:
            self.default_coeff = Padic.one(self.prime)
        for v in list(self.coeff.values()) + [self.default_coeff]:
            if not v.is_integral:
                raise NonIntegral("index map coefficients must lie in Z_p")

    def coeff_at(self, j: int) -> Padic:
        return self.coeff.get(j, self.default_coeff)


@dataclass
class Sum(Operator):
    terms: list[Operator]

    def __post_init__(self):
        if not self.terms:
            raise ValueError("empty sum")
        self.prime = self.terms[0].prime
        if any(t.prime != self.prime for t in self.terms):
            raise ValueError("mixed primes in sum")


@dataclass
class Product(Operator):
    factors: list[Operator]

    def __post_init__(self):
        if not self.factors:
            raise ValueError("empty product")
        self.prime = self.factors[0].prime
        if any(f.prime != self.prime for f in self.factors):
            raise ValueError("mixed primes in product")


@dataclass
class ScalarMul(Operator):
    scalar: Padic
    operand: Operator

    def __post_init__(self):
        if not self.scalar.is_integral:
            raise NonIntegral("operator scaling is a Z_p module structure")
        self.prime = self.operand.prime


@dataclass
class Adjoint(Operator):
    operand: Operator

    def __post_init__(self):
        self.prime = self.operand.prime


# -- normalization -----------------------------------------------------


def normalize(op: Operator) -> NormalForm:
    p = op.prime
    if isinstance(op, FiniteMatrix):
        return NormalForm(p, Padic.zero(p), None, dict(op.entries))
    if isinstance(op, Diagonal):
        head: dict[tuple[int, int], Padic] = {}
        for i, v in op.entries.items():
            _insert(head, (i, i), v - op.default)
        return NormalForm(p, op.default, None, head)
    if isinstance(op, Identity):
        return NormalForm(p, Padic.one(p, op.precision), None, {})
    if isinstance(op, IndexMap):
        if callable(op.dest):
            tail = _Tail(op.dest, op.inv, dict(op.coeff), op.default_coeff, op.infinite_domain)
            return NormalForm(p, Padic.zero(p), tail, {})
        head = {}
        for j, d in op.dest.items():
            _insert(head, (d, j), op.coeff_at(j))
        return NormalForm(p, Padic.zero(p), None, head)
    if isinstance(op, Sum):
        out = normalize(op.terms[0])
        for t in op.terms[1:]:
            out = out.add(normalize(t))
        return out
    if isinstance(op, Product):
        out = normalize(op.factors[0])
        for f in op.factors[1:]:
            out = out.mul(normalize(f))
        return out
    if isinstance(op, ScalarMul):
        return normalize(op.operand).scale(op.scalar)
    if isinstance(op, Adjoint):
        return normalize(op.operand).adjoint()
    raise TypeError(f"not an operator: {type(op).__name__}")


# -- public operations -------------------------------------------------


def op_apply(op: Operator, vec: PadicVector) -> PadicVector:
    try:
        return normalize(op).apply(vec)
    except StructureError:
        return _apply_tree(op, vec)


def _apply_tree(op: Operator, vec: PadicVector) -> PadicVector:
    if isinstance(op, Sum):
        out = _apply_tree(op.terms[0], vec)
        for t in op.terms[1:]:
            out = out + _apply_tree(t, vec)
        return out
    if isinstance(op, Product):
        for f in reversed(op.factors):
            vec = _apply_tree(f, vec)
        return vec
    if isinstance(op, ScalarMul):
        return _apply_tree(op.operand, vec).scale(op.scalar)
    if isinstance(op, Adjoint):
        return normalize(op.operand).adjoint().apply(vec)
    return normalize(op).apply(vec)


def op_column(op: Operator, j: int, precision: int = DEFAULT_PRECISION) -> PadicVector:
    return op_apply(op, PadicVector.basis(op.prime, j, precision))


def op_norm(op: Operator) -> ValuationBound:
    try:
        return normalize(op).norm()
    except StructureError as exc:
        raise Undecidable(f"expression has no closed structured form: {exc}") from exc


def op_adjoint(op: Operator) -> Operator:
    """Transpose at the representation level."""
    if isinstance(op, FiniteMatrix):
        return FiniteMatrix(op.prime, {(j, i): v for (i, j), v in op.entries.items()})
    if isinstance(op, (Diagonal, Identity)):
        return op
    if isinstance(op, IndexMap):
        if callable(op.dest):
            if op.inv is None:
                raise StructureError("adjoint of a callable index map needs its inverse")
            overrides = {}
            for j, c in op.coeff.items():
                d = op.dest(j)
                if d is not None:
                    overrides[d] = c
            return IndexMap(op.prime, op.inv, overrides, op.default_coeff,
                            inv=op.dest, infinite_domain=op.infinite_domain)
        values: dict[int, int] = {}
        injective = True
        for j, d in op.dest.items():
            if d in values:
                injective = False
                break
            values[d] = j
        if injective:
            coeff = {}
            for j, c in op.coeff.items():
                d = op.dest.get(j)
                if d is not None:
                    coeff[d] = c
            return IndexMap(op.prime, values, coeff, op.default_coeff)
        # non-injective dest: materialize the transpose on the active range
        head = {}
        for j, d in op.dest.items():
            _insert(head, (j, d), op.coeff_at(j))
        return FiniteMatrix(op.prime, head)
    if isinstance(op, Sum):
        return Sum([op_adjoint(t) for t in op.terms])
    if isinstance(op, Product):
        return Product([op_adjoint(f) for f in reversed(op.factors)])
    if isinstance(op, ScalarMul):
        return ScalarMul(op.scalar, op_adjoint(op.operand))
    if isinstance(op, Adjoint):
        return op.operand
    raise TypeError(f"not an operator: {type(op).__name__}")


def is_compact(op: Operator) -> bool:
    """Certificate-driven compactness decision."""
    try:
        return normalize(op).is_compact()
    except StructureError:
        pass
    if isinstance(op, Sum):
        flags = [is_compact(t) for t in op.terms]
        if all(flags):
            return True
        if sum(1 for f in flags if not f) == 1:
            # compacts form an ideal, so one non-compact term decides
            return False
        raise Undecidable("sum of several non-compact terms lacks a decay certificate")
    if isinstance(op, Product):
        if any(is_compact(f) for f in op.factors):
            return True
        raise Undecidable("product of non-compact factors lacks a decay certificate")
    if isinstance(op, ScalarMul):
        return op.scalar.is_zero or is_compact(op.operand)
    if isinstance(op, Adjoint):
        return is_compact(op.operand)
    raise Undecidable("representation lacks a decay certificate")


def truncate(op: Operator, size: int) -> FiniteMatrix:
    """Upper-left size x size minor as a FiniteMatrix."""
    out: dict[tuple[int, int], Padic] = {}
    for j in range(size):
        col = op_column(op, j)
        for i, v in col.entries.items():
            if i < size:
                out[(i, j)] = v
    return FiniteMatrix(op.prime, out)


def op_agree(a: Operator, b: Operator, depth: int) -> bool:
    """True when every entry of a - b is certified zero mod p^depth."""
    diff = normalize(a).add(normalize(b).scale(Padic.from_int(-1, a.prime)))
    return diff.vanishes_to(depth)


def to_dense(op: Operator, size: int) -> list[list[Padic]]:
    nf = normalize(op)
    return [[nf.entry(i, j) for j in range(size)] for i in range(size)]


def nf_polynomial(nf: NormalForm, coeffs) -> NormalForm:
    """Horner evaluation of a polynomial (constant term first) at the form."""
    acc = NormalForm(nf.prime, coeffs[-1], None, {})
    for c in reversed(coeffs[:-1]):
        acc = acc.mul(nf).add(NormalForm(nf.prime, c, None, {}))
    return acc


# -- admissibility -----------------------------------------------------


@dataclass(frozen=True)
class TailPattern:
    """A declared infinite pattern of a raw matrix: a constant row, a
    constant column, or a constant diagonal, from some start index on."""

    kind: str  # "constant-row" | "constant-col" | "diagonal"
    value: Padic
    index: int | None = None
    start: int = 0

    def __post_init__(self):
        if self.kind not in ("constant-row", "constant-col", "diagonal"):
            raise ParseError(f"unknown tail pattern {self.kind!r}")


@dataclass
class RawMatrix:
    prime: int
    entries: dict[tuple[int, int], Padic] = field(default_factory=dict)
    patterns: list[TailPattern] = field(default_factory=list)


@dataclass(frozen=True)
class AdmissibilityReport:
    admissible: bool
    violations: tuple[str, ...]


def admissibility_check(m: RawMatrix | Operator) -> AdmissibilityReport:
    """Decide membership in the admissible algebra: finitely many
    entries outside Z_p, and row/column entries converging to 0."""
    if isinstance(m, Operator):
        # structural representations enforce both conditions by construction
        return AdmissibilityReport(True, ())
    # finitely many explicit entries can never violate the integrality
    # condition, so only declared infinite patterns are examined
    violations: list[str] = []
    for pat in m.patterns:
        where = f"{pat.kind}[{pat.index}]" if pat.index is not None else pat.kind
        if not pat.value.is_integral:
            violations.append(f"{where}: infinitely many entries outside Z_p")
        if pat.value.is_zero:
            continue
        if pat.kind == "constant-row":
            violations.append(f"{where}: row entries do not converge to 0")
        elif pat.kind == "constant-col":
            violations.append(f"{where}: column entries do not converge to 0")
        # a constant diagonal keeps one entry per row and column: no decay violation
    return AdmissibilityReport(not violations, tuple(violations))


# -- benchmark constructor ----------------------------------------------


def weighted_shift_matrix(prime: int, size: int, precision: int = DEFAULT_PRECISION) -> FiniteMatrix:
    """Truncation of the operator sending delta_n to n delta_n + (n+1) delta_{n+1}.

    Entries live on i in {j, j+1}, so products of truncations agree with
    truncations of products on the full window.
    """
    entries: dict[tuple[int, int], Padic] = {}
    for n in range(size):
        if n > 0:
            entries[(n, n)] = Padic.from_int(n, prime, precision)
        if n + 1 < size:
            entries[(n + 1, n)] = Padic.from_int(n + 1, prime, precision)
    return FiniteMatrix(prime, entries)
