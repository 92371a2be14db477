from fractions import Fraction

import pytest
import sympy as sp
from hypothesis import given, settings
from hypothesis import strategies as st

from qmjac.algebra import Poly, is_prime
from qmjac.errors import QMError
from qmjac.family import FamilyParams
from qmjac.frobenius import l_polynomial_report
from qmjac.monodromy import (
    INCONCLUSIVE,
    NO_CANDIDATE,
    QUATERNION_ALGEBRA_OVER_Q,
    OmegaDatum,
    candidate_fields,
    center_certificate,
    endo_algebra_verdict,
    identify_connected_monodromy_field,
    is_irreducible_weil,
    omega_of_frobenius,
    real_subfield_polynomial,
    splits_completely,
)

G41 = Poly([1, -2, -30, -82, 1681])
G73 = Poly([1, 8, -2, 584, 5329])
G13 = Poly([1, -2, 0, 26, -169])
G17_6 = Poly([1, -2, -13, 44, -221, -578, 4913])
G41_6 = Poly([1, -14, 91, -540, 3731, -23534, 68921])
PRIMES_1MOD4 = [p for p in range(5, 1000) if is_prime(p) and p % 4 == 1]


def _name(ident):
    return ident.identified if isinstance(ident.identified, str) else ident.identified.name


def _data(mapping):
    return [OmegaDatum(p, w) for p, w in mapping.items()]


def test_omega_values():
    assert omega_of_frobenius(G41, 41, 4) == 1
    assert omega_of_frobenius(G73, 73, 4) == 1
    assert omega_of_frobenius(G13, 13, 4) == -1


def test_omega_preconditions():
    with pytest.raises(QMError) as exc:
        omega_of_frobenius(G41, 43, 4)
    assert exc.value.code == "PRECONDITION_FAILED"
    with pytest.raises(QMError) as exc:
        omega_of_frobenius(Poly([1, 0, 0, 0, 5]), 41, 4)
    assert exc.value.code == "WEIL_SHAPE_VIOLATED"


def test_candidates_for_2_3():
    assert [c.name for c in candidate_fields([2, 3])] == ["Q(zeta8)", "Q(i,sqrt(3))", "Q(i,sqrt(3i))"]


def test_candidates_for_2_5():
    assert [c.beta_tag for c in candidate_fields([2, 5])] == ["i", "5", "5i"]


def test_candidates_conjugation_invariant():
    for bad in ([2, 3], [2, 5], [2, 3, 13], [2, 7, 11]):
        for c in candidate_fields(bad):
            ratio = c.beta.conjugate() / c.beta
            # conj(beta) / beta must be a square in Q(i)
            a, b = sp.symbols("a b")
            sols = sp.solve([a**2 - b**2 - ratio.re, 2 * a * b - ratio.im], [a, b], dict=True)
            assert any(s[a].is_rational and s[b].is_rational for s in sols)


def _splits_oracle(p, beta):
    # min poly of sqrt(beta) over Q: x^2 - beta for rational beta, else
    # x^4 - 2 Re(beta) x^2 + |beta|^2; p = 1 mod 4 already splits Q(i)
    if beta.im == 0:
        coeffs = [int(-beta.re), 0, 1]
    else:
        coeffs = [int(beta.norm()), 0, int(-2 * beta.re), 0, 1]
    roots = sum(1 for x in range(p) if sum(c * pow(x, k, p) for k, c in enumerate(coeffs)) % p == 0)
    return roots == len(coeffs) - 1


@pytest.mark.parametrize("bad", [[2, 3], [2, 5], [2, 7]])
def test_splits_completely_matches_root_count(bad):
    for fld in candidate_fields(bad):
        for p in PRIMES_1MOD4[:60]:
            if p in fld.ramified_primes():
                continue
            assert splits_completely(p, fld) == _splits_oracle(p, fld.beta), (fld.name, p)


def test_zeta8_splitting_below_1000():
    zeta8 = candidate_fields([2, 3])[0]
    for p in range(3, 1000):
        if is_prime(p):
            assert splits_completely(p, zeta8) == (p % 8 == 1)


def test_ramified_prime_rejected():
    with pytest.raises(QMError) as exc:
        splits_completely(3, candidate_fields([2, 3])[1])
    assert exc.value.code == "RAMIFIED_PRIME"


def test_identification_zeta8():
    ident = identify_connected_monodromy_field(_data({13: -1, 41: 1, 73: 1}), candidate_fields([2, 3]))
    assert _name(ident) == "Q(zeta8)"
    assert ident.eliminations["Q(i,sqrt(3))"]["p"] == 13
    assert ident.eliminations["Q(i,sqrt(3i))"]["p"] == 41


def test_identification_other_sign_pattern():
    ident = identify_connected_monodromy_field(_data({41: -1, 13: -1, 73: 1}), candidate_fields([2, 3]))
    assert _name(ident) == "Q(i,sqrt(3i))"


def test_identification_no_candidate_and_inconclusive():
    cands = candidate_fields([2, 3])
    assert _name(identify_connected_monodromy_field(_data({13: 1, 41: -1, 73: -1}), cands)) == NO_CANDIDATE
    assert _name(identify_connected_monodromy_field(_data({73: 1}), cands)) == INCONCLUSIVE


@settings(max_examples=40, deadline=None)
@given(st.lists(st.sampled_from([p for p in PRIMES_1MOD4 if p != 5][:40]), min_size=1, max_size=8, unique=True))
def test_identification_monotone(primes):
    cands = candidate_fields([2, 3])
    truth = cands[0]
    data = [OmegaDatum(p, 1 if splits_completely(p, truth) else -1) for p in primes]
    previous = None
    for k in range(1, len(data) + 1):
        survivors = {c.name for c in identify_connected_monodromy_field(data[:k], cands).survivors}
        assert truth.name in survivors
        if previous is not None:
            assert survivors <= previous
        previous = survivors


def test_real_subfield_polynomials():
    assert real_subfield_polynomial(G41, 41) == Poly([-112, -2, 1])
    assert real_subfield_polynomial(G73, 73) == Poly([-148, 8, 1])


@pytest.mark.parametrize("g_p,p", [(G41, 41), (G73, 73), (G13, 13), (G17_6, 17), (G41_6, 41)])
def test_irreducibility_matches_sympy(g_p, p):
    T = sp.symbols("T")
    expr = sum(int(c) * T**k for k, c in enumerate(g_p.coeffs))
    assert is_irreducible_weil(g_p, p) == sp.Poly(expr, T).is_irreducible


def test_center_certificate_g4():
    cert = center_certificate(G41, 41, G73, 73)
    assert cert.verdict == "CertifiedTrivialCenter"
    assert cert.real_disc_kernels == (113, 41)


def test_center_certificate_symmetric():
    a = center_certificate(G41, 41, G73, 73)
    b = center_certificate(G73, 73, G41, 41)
    assert a.certified == b.certified
    assert b.real_disc_kernels == tuple(reversed(a.real_disc_kernels))
    assert b.imaginary_subfields == tuple(reversed(a.imaginary_subfields))


def test_center_certificate_same_field_inconclusive():
    assert center_certificate(G41, 41, G41, 41).verdict == "Inconclusive"


def test_center_certificate_rejects_reducible():
    reducible = Poly([1, -2, 41]) * Poly([1, 2, 41])
    with pytest.raises(QMError) as exc:
        center_certificate(reducible, 41, G73, 73)
    assert exc.value.code == "NOT_SIMPLE_INPUT"


def test_center_certificate_g6():
    cert = center_certificate(G17_6, 17, G41_6, 41)
    assert cert.certified
    assert cert.real_disc_kernels == (3859, 1882)


def test_endo_algebra_verdict():
    half = FamilyParams.from_a(4, [Fraction(1, 2)])
    reps = [l_polynomial_report(half, p) for p in (41, 73)]
    cert = center_certificate(reps[0].g_p, 41, reps[1].g_p, 73)
    assert endo_algebra_verdict(reps, cert).verdict == QUATERNION_ALGEBRA_OVER_Q
    assert endo_algebra_verdict(reps[:1], cert).verdict == INCONCLUSIVE
    same = center_certificate(reps[0].g_p, 41, reps[0].g_p, 41)
    assert endo_algebra_verdict([reps[0], reps[0]], same).verdict == INCONCLUSIVE


@pytest.mark.parametrize("g_p,p", [(G41, 41), (G73, 73), (G17_6, 17), (G41_6, 41), (Poly([1, 0, 0, 0, 1]), 1)])
def test_quadratic_exclusion_agrees_with_factoring(g_p, p):
    from qmjac.algebra import discriminant
    from qmjac.monodromy import _excludes_quadratic, _factors_over_quadratic, reversed_monic

    P = reversed_monic(g_p)
    disc = int(discriminant(P))
    for m in (-1, -2, -3, -6, -41, -82):
        if _excludes_quadratic(P, m, disc):
            assert not _factors_over_quadratic(P, m)
