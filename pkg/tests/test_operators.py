from fractions import Fraction

import pytest

from padicops.errors import NonIntegral, ParseError, StructureError, Undecidable
from padicops.operators import (Adjoint, AdmissibilityReport, Diagonal,
                                FiniteMatrix, Identity, IndexMap, Product,
                                RawMatrix, ScalarMul, Sum, TailPattern,
                                admissibility_check, is_compact, nf_polynomial,
                                normalize, op_adjoint, op_agree, op_apply,
                                op_column, op_norm, to_dense, truncate,
                                weighted_shift_matrix)
from padicops.scalars import Padic, ValuationBound
from padicops.vectors import PadicVector, pairing


def fm(p, table):
    return FiniteMatrix(p, {k: Padic.from_int(v, p) for k, v in table.items()})


def up_shift(p):
    return IndexMap(p, lambda x: x + 1,
                    inv=lambda x: x - 1 if x > 0 else None, infinite_domain=True)


def test_finite_matrix_normal_form():
    a = fm(3, {(0, 1): 2, (2, 0): 9})
    nf = normalize(a)
    assert nf.entry(0, 1).residue(5) == 2
    assert nf.entry(2, 0).valuation == 2
    assert nf.entry(1, 1).is_zero
    assert nf.column(0).support == [2]


def test_diagonal_entries_and_norm():
    d = Diagonal(3, {1: Padic.from_int(3, 3)}, Padic.one(3))
    nf = normalize(d)
    assert nf.entry(0, 0).residue(5) == 1
    assert nf.entry(1, 1).residue(5) == 3
    assert nf.entry(7, 7).residue(5) == 1
    assert op_norm(d) == ValuationBound(0)
    loud = Diagonal(3, {0: Padic.one(3) / Padic.from_int(3, 3)}, Padic.one(3))
    assert op_norm(loud) == ValuationBound(-1)


def test_identity_norm_and_entries():
    i = Identity(5)
    assert op_norm(i) == ValuationBound(0)
    assert normalize(i).entry(11, 11).residue(3) == 1
    assert not is_compact(i)


def test_index_map_finite_dict():
    m = IndexMap(3, {0: 2, 1: 3}, {0: Padic.from_int(2, 3)})
    assert op_column(m, 0).entries == {2: Padic.from_int(2, 3)}
    assert op_column(m, 1).get(3).residue(4) == 1
    assert op_column(m, 5).entries == {}
    t = op_adjoint(m)
    assert isinstance(t, IndexMap)
    assert normalize(t).entry(0, 2).residue(4) == 2


def test_index_map_non_injective_adjoint():
    m = IndexMap(3, {0: 4, 1: 4})
    t = op_adjoint(m)
    assert isinstance(t, FiniteMatrix)
    assert normalize(t).entry(0, 4).residue(3) == 1
    assert normalize(t).entry(1, 4).residue(3) == 1


def test_sum_and_product_match_dense_oracle(rng):
    p, size = 5, 4
    for _ in range(10):
        at = {(rng.randrange(size), rng.randrange(size)): rng.randrange(-20, 20)
              for _ in range(6)}
        bt = {(rng.randrange(size), rng.randrange(size)): rng.randrange(-20, 20)
              for _ in range(6)}
        a, b = fm(p, at), fm(p, bt)
        prod = to_dense(Product([a, b]), size)
        tot = to_dense(Sum([a, b]), size)
        for i in range(size):
            for j in range(size):
                want_p = sum(at.get((i, k), 0) * bt.get((k, j), 0) for k in range(size))
                want_s = at.get((i, j), 0) + bt.get((i, j), 0)
                assert (prod[i][j] - Padic.from_int(want_p, p)).vanishes_to(30)
                assert (tot[i][j] - Padic.from_int(want_s, p)).vanishes_to(30)


def test_product_applies_right_factor_first():
    a = fm(3, {(0, 1): 1})
    b = fm(3, {(0, 0): 1})
    delta1 = PadicVector.basis(3, 1)
    assert op_apply(Product([b, a]), delta1).support == [0]
    assert op_apply(Product([a, b]), delta1).support == []


def test_operator_sugar():
    a = fm(3, {(0, 0): 2})
    diff = a - a
    assert op_agree(diff, fm(3, {}), 38)
    assert op_agree(a + a, fm(3, {(0, 0): 4}), 38)
    neg = -a
    assert normalize(neg).entry(0, 0).residue(4) == 81 - 2


def test_scalar_action_stays_integral():
    with pytest.raises(NonIntegral):
        ScalarMul(Padic.one(3) / Padic.from_int(3, 3), Identity(3))
    half = ScalarMul(Padic.from_fraction(Fraction(1, 2), 3), Identity(3))
    assert op_norm(half) == ValuationBound(0)


def test_adjoint_pairing_compatibility(rng):
    p = 3
    for _ in range(20):
        a = fm(p, {(rng.randrange(4), rng.randrange(4)): rng.randrange(-9, 9)
                   for _ in range(5)})
        xi = PadicVector(p, {i: Padic.from_fraction(
            Fraction(rng.choice([1, 2, 4, 5]), p**rng.randrange(3)), p)
            for i in rng.sample(range(4), 2)})
        eta = PadicVector(p, {i: Padic.from_fraction(
            Fraction(rng.choice([1, 2, 7]), p**rng.randrange(3)), p)
            for i in rng.sample(range(4), 2)})
        lhs = pairing(op_apply(a, xi), eta)
        assert lhs == pairing(xi, op_apply(op_adjoint(a), eta))
        assert lhs == pairing(xi, op_apply(Adjoint(a), eta))


def test_adjoint_involution():
    a = fm(3, {(0, 2): 5, (1, 1): 3})
    assert op_agree(op_adjoint(op_adjoint(a)), a, 38)
    assert op_agree(Adjoint(Adjoint(a)), a, 38)


def test_shift_head_cancellation():
    # identity minus its own (0,0) corner: entry certified zero, norm
    # still decided by the untouched off-window diagonal
    a = Sum([Identity(3), fm(3, {(0, 0): -1})])
    nf = normalize(a)
    assert nf.entry(0, 0).is_zero
    assert op_norm(a) == ValuationBound(0)
    assert not is_compact(a)


def test_callable_tail_certificates():
    u = up_shift(3)
    assert op_norm(u) == ValuationBound(0)
    assert not is_compact(u)
    bare = IndexMap(3, lambda x: x + 1)
    with pytest.raises(Undecidable):
        op_norm(bare)
    with pytest.raises(Undecidable):
        is_compact(bare)


def test_callable_tail_apply_and_adjoint():
    u = up_shift(3)
    assert op_apply(u, PadicVector.basis(3, 4)).support == [5]
    down = op_adjoint(u)
    assert op_apply(down, PadicVector.basis(3, 5)).support == [4]
    assert op_apply(down, PadicVector.basis(3, 0)).support == []
    # u* u = 1 but u u* kills delta_0
    for j in (0, 1, 7):
        got = op_apply(Product([down, u]), PadicVector.basis(3, j))
        assert (got - PadicVector.basis(3, j)).entries == {}
    assert op_apply(Product([u, down]), PadicVector.basis(3, 0)).support == []


def test_sum_of_two_tails_falls_back_to_tree_apply():
    u = up_shift(3)
    w = IndexMap(3, lambda x: x + 2,
                 inv=lambda x: x - 2 if x > 1 else None, infinite_domain=True)
    s = Sum([u, w])
    with pytest.raises(StructureError):
        normalize(s)
    got = op_apply(s, PadicVector.basis(3, 3))
    assert got.support == [4, 5]
    with pytest.raises(Undecidable):
        op_norm(s)


def test_empty_combinators_rejected():
    with pytest.raises(ValueError):
        Sum([])
    with pytest.raises(ValueError):
        Product([])


def test_compactness_decisions():
    p = 3
    assert is_compact(fm(p, {(0, 0): 1}))
    assert is_compact(Diagonal(p, {0: Padic.one(p)}))
    assert not is_compact(Diagonal(p, {}, Padic.from_int(3, p)))
    assert is_compact(ScalarMul(Padic.zero(p), Identity(p)))
    assert not is_compact(Sum([fm(p, {(0, 0): 1}), Identity(p)]))
    assert is_compact(Product([Identity(p), fm(p, {(1, 1): 1}), Identity(p)]))
    assert is_compact(Adjoint(fm(p, {(0, 1): 1})))


def test_truncate_window():
    a = weighted_shift_matrix(3, 6)
    t = truncate(a, 3)
    assert set(t.entries) == {(1, 1), (2, 2), (1, 0), (2, 1)}
    assert t.entries[(2, 1)].residue(4) == 2
    assert truncate(Identity(3), 2).entries[(0, 0)].residue(2) == 1


def test_weighted_shift_entries():
    a = weighted_shift_matrix(5, 4)
    dense = to_dense(a, 4)
    for n in range(4):
        for m in range(4):
            want = n if (m == n and n > 0) else (n + 1 if m == n + 1 else 0)
            assert (dense[m][n] - Padic.from_int(want, 5)).vanishes_to(35)


def test_op_agree_depth_sensitivity():
    a = fm(3, {(0, 0): 1})
    b = Sum([a, fm(3, {(0, 0): 3**35})])
    assert op_agree(a, b, 30)
    assert not op_agree(a, b, 36)


def test_nf_polynomial_matches_explicit_sum():
    p = 3
    a = weighted_shift_matrix(p, 4)
    coeffs = [Padic.from_int(2, p), Padic.from_int(-1, p), Padic.from_int(3, p)]
    got = nf_polynomial(normalize(a), coeffs)
    direct = Sum([ScalarMul(coeffs[0], Identity(p)),
                  ScalarMul(coeffs[1], a),
                  ScalarMul(coeffs[2], Product([a, a]))])
    want = normalize(direct)
    for i in range(5):
        for j in range(5):
            assert (got.entry(i, j) - want.entry(i, j)).vanishes_to(30)


def test_nf_polynomial_annihilates_idempotent():
    e = fm(3, {(0, 0): 1})
    out = nf_polynomial(normalize(e), [Padic.zero(3), Padic.from_int(-1, 3), Padic.one(3)])
    assert out.vanishes_to(38)


def test_admissibility_reports():
    assert admissibility_check(Identity(3)) == AdmissibilityReport(True, ())
    assert admissibility_check(RawMatrix(3)).admissible
    row = RawMatrix(3, patterns=[TailPattern("constant-row", Padic.one(3), index=0)])
    rep = admissibility_check(row)
    assert not rep.admissible and "converge" in rep.violations[0]
    col = RawMatrix(3, patterns=[TailPattern("constant-col", Padic.one(3), index=2)])
    assert not admissibility_check(col).admissible
    diag = RawMatrix(3, patterns=[TailPattern("diagonal", Padic.one(3))])
    assert admissibility_check(diag).admissible
    bad = RawMatrix(3, patterns=[TailPattern("diagonal", Padic.one(3) / Padic.from_int(3, 3))])
    rep = admissibility_check(bad)
    assert not rep.admissible and "Z_p" in rep.violations[0]
    dead = RawMatrix(3, patterns=[TailPattern("constant-row", Padic.zero(3), index=1)])
    assert admissibility_check(dead).admissible
    with pytest.raises(ParseError):
        TailPattern("constant-antidiagonal", Padic.one(3))


def test_to_operator_round_trip():
    d = Diagonal(3, {2: Padic.from_int(5, 3)}, Padic.one(3))
    back = normalize(d).to_operator()
    assert isinstance(back, Diagonal)
    assert op_agree(back, d, 38)
    f = fm(3, {(0, 1): 7})
    assert isinstance(normalize(f).to_operator(), FiniteMatrix)
    with pytest.raises(StructureError):
        normalize(up_shift(3)).to_operator()
