import pytest

from padicops.calculus import (ContractionCertificate, binom_operator,
                               binomial_series, certify_normal_contraction,
                               functional_calculus, teichmuller_idempotent,
                               zero_indicator_polynomial)
from padicops.errors import (CertificationFailed, NoConvergence,
                             PreconditionFailed)
from padicops.mahler import mahler_expand
from padicops.operators import (Diagonal, FiniteMatrix, Identity, Product,
                                normalize, op_agree, to_dense,
                                weighted_shift_matrix)
from padicops.scalars import (Padic, ValuationBound, binomial_padic,
                              factorial_valuation, teichmuller)


def diag(p, values):
    return Diagonal(p, {i: Padic.from_int(v, p) for i, v in enumerate(values)})


def test_certificate_weighted_shift():
    a = weighted_shift_matrix(3, 8)
    cert = certify_normal_contraction(a, 10)
    assert cert.depth == 10 and len(cert.checked) == 10
    assert cert.covers(10) and not cert.covers(11)
    assert not cert.structural
    for n, achieved in cert.checked:
        assert achieved <= ValuationBound(factorial_valuation(n, 3))


def test_certificate_structural_for_integral_diagonal():
    cert = certify_normal_contraction(diag(3, [1, 4, 9]), 2)
    assert cert.structural and cert.covers(10**6)


def test_certificate_frozen_exponents():
    # diag(28, 27) at p=3: valuations of the falling products
    a = diag(3, [28, 27])
    cert = certify_normal_contraction(a, 6)
    got = [(n, b.exponent) for n, b in cert.checked]
    assert got == [(1, 0), (2, 3), (3, 3), (4, 3), (5, 4), (6, 4)]


def test_certification_failure_reports_depth():
    bad = FiniteMatrix(3, {(0, 0): Padic.one(3) / Padic.from_int(3, 3)})
    with pytest.raises(CertificationFailed) as info:
        certify_normal_contraction(bad, 3)
    assert info.value.depth == 1


def test_binom_operator_diagonal_oracle():
    values = [0, 1, 5, 28]
    a = diag(3, values)
    cert = certify_normal_contraction(a, 6)
    for n in range(5):
        b = binom_operator(a, n, cert)
        nf = normalize(b)
        for i, v in enumerate(values):
            want = binomial_padic(Padic.from_int(v, 3), n)
            assert (nf.entry(i, i) - want).vanishes_to(30)
    with pytest.raises(PreconditionFailed):
        binom_operator(weighted_shift_matrix(3, 4), 7, certify_normal_contraction(
            weighted_shift_matrix(3, 4), 6))


def test_functional_calculus_matches_pointwise_values():
    # evaluating the square function at a diagonal squares each entry
    p = 3
    fn = mahler_expand([Padic.from_int(n * n, p) for n in range(5)])
    values = [0, 1, 2, 9, 13]
    a = diag(p, values)
    cert = certify_normal_contraction(a, len(fn.coefficients))
    out, err = functional_calculus(a, fn, cert)
    assert err.is_zero
    nf = normalize(out)
    for i, v in enumerate(values):
        assert (nf.entry(i, i) - Padic.from_int(v * v, p)).vanishes_to(30)


def test_functional_calculus_is_multiplicative_on_shift():
    p, size, depth = 3, 8, 12
    a = weighted_shift_matrix(p, size)
    cert = certify_normal_contraction(a, depth)

    def expand(f):
        return mahler_expand([Padic.from_int(f(n), p) for n in range(7)])

    f = lambda n: n * n + 1
    g = lambda n: 2 * n + 3
    pf, _ = functional_calculus(a, expand(f), cert)
    pg, _ = functional_calculus(a, expand(g), cert)
    pfg, _ = functional_calculus(a, expand(lambda n: f(n) * g(n)), cert)
    # truncation size keeps the product window exact: entries live on
    # i in {j, j+1}, so indices stay inside the head
    assert op_agree(Product([pf, pg]), pfg, 30)


def test_functional_calculus_needs_cover():
    a = weighted_shift_matrix(3, 4)
    cert = certify_normal_contraction(a, 2)
    fn = mahler_expand([Padic.from_int(n, 3) for n in range(6)])
    with pytest.raises(PreconditionFailed):
        functional_calculus(a, fn, cert)


def test_binomial_series_diagonal_oracle():
    p, depth = 3, 8
    values = [0, 1, 4, 10]
    a = diag(p, values)
    cert = certify_normal_contraction(a, depth)
    z = Padic.from_int(3, p)
    out, err = binomial_series(a, z, cert, depth)
    assert err == ValuationBound(depth + 1)
    nf = normalize(out)
    for i, v in enumerate(values):
        want = Padic.zero(p, 40)
        for n in range(depth + 1):
            want = want + z**n * binomial_padic(Padic.from_int(v - 1, p), n)
        assert (nf.entry(i, i) - want).vanishes_to(depth + 1)


def test_binomial_series_z_zero_is_identity():
    a = diag(3, [1, 4])
    cert = certify_normal_contraction(a, 4)
    out, err = binomial_series(a, Padic.zero(3), cert, 4)
    assert err.is_zero
    assert op_agree(out, Identity(3), 30)


def test_binomial_series_norm_gate():
    a = diag(3, [1, 4])
    cert = certify_normal_contraction(a, 4)
    with pytest.raises(PreconditionFailed):
        binomial_series(a, Padic.one(3), cert, 4)


def test_zero_indicator_polynomial():
    for p in (2, 3, 5):
        poly = zero_indicator_polynomial(p)
        assert poly.degree == p - 1
        assert (poly(Padic.zero(p)) - Padic.one(p)).vanishes_to(35)
        for i in range(1, p):
            t = teichmuller(Padic.from_int(i, p))
            assert poly(t).vanishes_to(35)
    # at p = 3 the roots are the fourth... the square roots of 1, so
    # the polynomial is 1 - X^2
    poly = zero_indicator_polynomial(3)
    assert (poly.coeffs[0] - Padic.one(3)).vanishes_to(35)
    assert poly.coeffs[1].vanishes_to(35)
    assert (poly.coeffs[2] + Padic.one(3)).vanishes_to(35)


def test_teichmuller_idempotent_diagonal():
    p = 5
    values = [1, 7, 5, 0, 25, 3]
    a = diag(p, values)
    cert = certify_normal_contraction(a, 1)
    e, trace = teichmuller_idempotent(a, cert, target=20)
    nf = normalize(e)
    # the limit indicates the topologically nilpotent coordinates
    for i, v in enumerate(values):
        want = 1 if v % p == 0 else 0
        assert (nf.entry(i, i) - Padic.from_int(want, p)).vanishes_to(20)
    assert op_agree(Product([e, e]), e, 20)
    # successive gaps shrink by one digit per squaring step
    gaps = [int(g) for _, g in trace if g != "inf"]
    assert gaps == sorted(gaps)
    assert len(gaps) >= 2


def test_teichmuller_idempotent_budget():
    a = diag(3, [28])
    cert = certify_normal_contraction(a, 1)
    with pytest.raises(NoConvergence) as info:
        teichmuller_idempotent(a, cert, target=30, budget=3)
    assert info.value.iterations == 3


def test_teichmuller_idempotent_needs_certificate():
    a = diag(3, [1])
    cert = ContractionCertificate(a, 0, ())
    with pytest.raises(PreconditionFailed):
        teichmuller_idempotent(a, cert)
