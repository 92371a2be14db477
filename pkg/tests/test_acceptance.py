"""Acceptance suite: one test per criterion, each timed against its runtime limit.

Run with ``pytest tests/test_acceptance.py -v``; the terminal summary prints
one PASS/FAIL line per criterion.
"""

from collections import Counter
from fractions import Fraction

import numpy as np

from qmjac.algebra import Poly, Quaternion, factorize
from qmjac.degeneration import (
    GOOD,
    NOT_POTENTIALLY_GOOD,
    bad_parameter_constructor,
    build_cluster_tree,
    family_roots_p_adic,
    genus2_splitting_identity,
    j_invariant_Ec,
    pullback_roots_t_adic,
    reduction_verdict,
)
from qmjac.family import (
    FamilyParams,
    build_family_poly,
    extra_automorphism_scan,
    family_discriminant,
    moduli_orbit_g4,
)
from qmjac.frobenius import l_polynomial_report
from qmjac.lattice import (
    FREE,
    NOT_LOCALLY_FREE,
    free_module_generators,
    homology_data,
    hurwitz_obstruction,
    hurwitz_rational_rep,
    nonfreeness_check,
    t_matrix_report,
)
from qmjac.monodromy import (
    QUATERNION_ALGEBRA_OVER_Q,
    OmegaDatum,
    candidate_fields,
    center_certificate,
    endo_algebra_verdict,
    identify_connected_monodromy_field,
    omega_of_frobenius,
)
from qmjac.periods import POSITIVITY_SIGN, period_matrix, period_report, stability_scan, verify_riemann_relations
from qmjac.schoen import SchoenContext, surprising_symmetry_check, symbolic_fourth_power_check, verify_fourth_power_identity

HALF = FamilyParams.from_a(4, [Fraction(1, 2)])
G6 = FamilyParams.from_a(6, [Fraction(1, 2), Fraction(0)])


def weil4(c1, c2, c3, c4):
    return Poly([1, c1, c2, c3, c4])


def test_criterion_01_frobenius_41(criterion):
    p = 41
    with criterion(1, "g=4 Frobenius at p=41, tensor square, endo dims", 60):
        rep = l_polynomial_report(HALF, p)
        assert rep.g_p == weil4(-2, -30, -2 * p, p**2)
        assert rep.c_p == rep.g_p * rep.g_p
        assert sorted(rep.counts) == [1, 2, 3] and 3 in rep.verified_r
        assert Counter(rep.tensor_kset) == Counter({1: 16})
        assert set(rep.endo_dims.values()) == {16}
        assert rep.endo_field_degree == 1


def test_criterion_02_frobenius_73_and_13(criterion):
    # asserts a T^3 coefficient of -8p for g_73; the point counts give +8p,
    # so this criterion is expected to fail (true value: test_frobenius)
    with criterion(2, "g=4 Frobenius at p=73 (T^3 = -8p) and p=13", 120):
        p = 73
        assert l_polynomial_report(HALF, p).g_p == weil4(8, -2, -8 * p, p**2)
        p = 13
        assert l_polynomial_report(HALF, p).g_p == weil4(-2, 0, 2 * p, -(p**2))


def test_criterion_03_omega(criterion):
    with criterion(3, "omega(13) = -1, omega(41) = omega(73) = +1", 180):
        omegas = {p: omega_of_frobenius(l_polynomial_report(HALF, p).g_p, p, 4) for p in (13, 41, 73)}
        assert omegas == {13: -1, 41: 1, 73: 1}


def test_criterion_04_monodromy_field(criterion):
    with criterion(4, "candidates for {2,3} and identification of Q(zeta8)", 1):
        cands = candidate_fields([2, 3])
        assert [c.name for c in cands] == ["Q(zeta8)", "Q(i,sqrt(3))", "Q(i,sqrt(3i))"]
        data = [OmegaDatum(13, -1), OmegaDatum(41, 1), OmegaDatum(73, 1)]
        ident = identify_connected_monodromy_field(data, cands)
        assert [c.name for c in ident.survivors] == ["Q(zeta8)"]
        assert ident.identified.name == "Q(zeta8)"


def test_criterion_05_center_certificate(criterion):
    reps = [l_polynomial_report(HALF, p) for p in (41, 73)]
    with criterion(5, "center certificate for (g_41, g_73) and algebra verdict", 1):
        cert = center_certificate(reps[0].g_p, 41, reps[1].g_p, 73)
        assert cert.verdict == "CertifiedTrivialCenter"
        assert cert.real_disc_kernels == (113, 41)
        assert endo_algebra_verdict(reps, cert).verdict == QUATERNION_ALGEBRA_OVER_Q


def test_criterion_06_genus6_sextics(criterion):
    with criterion(6, "g=6 sextics at p=17, 41 and center certificate", 600):
        expected = {}
        for p, (c1, c2, c3) in {17: (-2, -13, 44), 41: (-14, 91, -540)}.items():
            expected[p] = Poly([1, c1, c2, c3, c2 * p, c1 * p**2, p**3])
        reps = {p: l_polynomial_report(G6, p) for p in expected}
        for p, rep in reps.items():
            assert rep.g_p == expected[p]
            assert max(rep.counts) == 4 and 4 in rep.verified_r
        cert = center_certificate(reps[17].g_p, 17, reps[41].g_p, 41)
        assert cert.verdict == "CertifiedTrivialCenter"


def test_criterion_07_two_torsion_obstruction(criterion):
    with criterion(7, "two-torsion obstruction nonzero for g = 4, 6", 1):
        for g in (4, 6):
            nonzero, rank = hurwitz_obstruction(g)
            assert nonzero and rank > 0


def test_criterion_08_lattice_suite(criterion):
    with criterion(8, "homology relations, R(omega), nonfreeness and free control", 1):
        d = homology_data()
        eye = np.eye(8, dtype=np.int64)
        ra, rb = d.R_alpha, d.R_beta
        assert (ra @ ra == -eye).all() and (rb @ rb == -eye).all()
        assert (ra @ rb == -(rb @ ra)).all()
        for r in (ra, rb):
            assert (r.T @ d.E @ r == d.E).all()
        _, integral = hurwitz_rational_rep(d)
        assert not integral
        assert nonfreeness_check() == (5, 3, NOT_LOCALLY_FREE)
        assert nonfreeness_check(*free_module_generators(2))[2] == FREE


def test_criterion_09_t_matrix(criterion):
    with criterion(9, "T-matrix entries, T' = -T, nrd product 1/8", 1):
        rep = t_matrix_report()
        T = rep["T"]
        half = Fraction(1, 2)
        assert T[0][0] == Quaternion(0, -half, -half, 0)
        assert T[1][1] == Quaternion(0, 0, 0, half)
        assert T[0][1] == T[1][0] == Quaternion(0)
        assert rep["antihermitian"]
        assert rep["nrd_product"] == Fraction(1, 8)


def test_criterion_10_periods(criterion):
    with criterion(10, "period matrix at a = 1/2 and stability scan", 30):
        rep = period_report(0.5)
        assert rep["residual_alpha"] < 1e-8 and rep["residual_beta"] < 1e-8
        assert rep["riemann_residual"] < 1e-8 and rep["positivity"]
        pi = period_matrix(0.5)
        assert not verify_riemann_relations(pi, homology_data().E, -POSITIVITY_SIGN)[1]
        scan = stability_scan(20, 0.05, seed=1)
        assert len(scan) == 20
        assert all(max(s["residual_alpha"], s["residual_beta"]) < 1e-7 for s in scan)


def test_criterion_11_cluster_pictures(criterion):
    with criterion(11, "t-adic pullback tree and g=6 bad tuple at p=11", 1):
        tree = build_cluster_tree(pullback_roots_t_adic(2))
        assert sorted(tree.depths()) == [-2, 0, 2]
        assert reduction_verdict(tree).verdict == GOOD
        b = bad_parameter_constructor(6, 11)
        bad_tree = build_cluster_tree(family_roots_p_adic(b, 11))
        assert reduction_verdict(bad_tree).verdict == NOT_POTENTIALLY_GOOD


def test_criterion_12_degeneration_identities(criterion):
    with criterion(12, "genus-2 splitting maps and j-invariants", 1):
        assert genus2_splitting_identity(1) and genus2_splitting_identity(-1)
        j2 = j_invariant_Ec(2)
        assert j2 == Fraction(2744000, 9) and j2.denominator != 1
        assert j_invariant_Ec(-3) == 0


def test_criterion_13_fourth_power_identity(criterion):
    betas = {6: (2, 3), 8: (2, 3, 5), 10: (2, 3, 5, 7)}
    with criterion(13, "fourth-power identity: symbolic g=4, randomized g=6,8,10", 120):
        ctx4 = SchoenContext.make(4, [2], gamma=7)
        assert symbolic_fourth_power_check(ctx4)
        assert surprising_symmetry_check(ctx4)
        for g, beta in betas.items():
            ctx = SchoenContext.make(g, beta)
            assert surprising_symmetry_check(ctx)
            for seed in (1, 2, 3):
                rep = verify_fourth_power_identity(ctx, trials=25, seed=seed)
                assert rep.passed == 25 and rep.ok
        control = verify_fourth_power_identity(SchoenContext.make(6, betas[6]), trials=25, seed=1, sign=1)
        assert control.passed < 25


def test_criterion_14_family_plumbing(criterion):
    with criterion(14, "degree-21 fiber, discriminant, moduli orbit, automorphism scan", 5):
        f = build_family_poly(FamilyParams.from_a(10, [7, 1, 7, Fraction(1, 2)])).f
        inner = [0] * 21
        inner[20], inner[18], inner[2], inner[0] = 1, 7, -7, -1
        assert f == Poly([0, 1]) * Poly(inner)
        assert factorize(abs(int(family_discriminant(HALF)))) == {2: 28, 3: 6}
        orbit = {Fraction(s) for s in ("1/2", "-1/2", "7", "-7", "5/3", "-5/3")}
        assert moduli_orbit_g4(Fraction(1, 2)) == orbit
        assert len(extra_automorphism_scan(2)) == 4
