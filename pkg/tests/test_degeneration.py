from functools import lru_cache
from fractions import Fraction

import pytest
from hypothesis import assume, given, settings
from hypothesis import strategies as st

from qmjac.algebra import GaussianRational
from qmjac.degeneration import (
    GOOD,
    NOT_POTENTIALLY_GOOD,
    POTENTIALLY_GOOD,
    bad_parameter_constructor,
    build_cluster_tree,
    family_roots_p_adic,
    genus2_splitting_identity,
    j_invariant_Ec,
    p_adic_points,
    pullback_roots_t_adic,
    reduction_verdict,
)
from qmjac.errors import QMError


def _depths(tree):
    return [str(d) for d in sorted(tree.depths())]


def test_t_adic_pullback_square():
    tree = build_cluster_tree(pullback_roots_t_adic(2))
    assert _depths(tree) == ["-2", "0", "2"]
    assert reduction_verdict(tree).verdict == GOOD


def test_t_adic_pullback_linear():
    tree = build_cluster_tree(pullback_roots_t_adic(1))
    assert _depths(tree) == ["-1", "0", "1"]
    verdict = reduction_verdict(tree)
    assert verdict.verdict == POTENTIALLY_GOOD
    assert any("not even" in r for r in verdict.reasons)


@pytest.mark.parametrize(
    "g,p,expected",
    [(6, 11, (2, 13)), (8, 13, (2, 15, 3)), (10, 17, (2, 19, 3, 4)), (6, 7, (2, 9))],
)
def test_bad_parameters_round_trip(g, p, expected):
    b = bad_parameter_constructor(g, p)
    assert b == tuple(Fraction(v) for v in expected)
    tree = build_cluster_tree(family_roots_p_adic(b, p))
    assert reduction_verdict(tree).verdict == NOT_POTENTIALLY_GOOD


@pytest.mark.parametrize("p", [3, 5])
def test_bad_parameter_search_exhausts(p):
    with pytest.raises(QMError) as exc:
        bad_parameter_constructor(6, p)
    assert exc.value.code == "SEARCH_EXHAUSTED"


def test_bad_parameter_preconditions():
    with pytest.raises(QMError):
        bad_parameter_constructor(4, 11)
    with pytest.raises(QMError):
        bad_parameter_constructor(6, 2)


def test_good_reduction_at_generic_prime():
    tree = build_cluster_tree(family_roots_p_adic([Fraction(2), Fraction(3)], 13))
    assert _depths(tree) == ["0"]
    assert reduction_verdict(tree).verdict == GOOD


def test_residue_characteristic_two_refused():
    with pytest.raises(QMError) as exc:
        family_roots_p_adic([Fraction(2)], 2)
    assert exc.value.code == "UNSUPPORTED"


@lru_cache(maxsize=None)
def _bad_roots(g, p):
    return tuple(family_roots_p_adic(bad_parameter_constructor(g, p), p))


@settings(max_examples=30, deadline=None)
@given(st.permutations(list(range(13))), st.sampled_from([(6, 11), (6, 7)]))
def test_cluster_tree_order_independent(perm, case):
    roots = _bad_roots(*case)
    shuffled = [roots[k] for k in perm]
    assert build_cluster_tree(shuffled).to_json() == build_cluster_tree(roots).to_json()


@settings(max_examples=60, deadline=None)
@given(st.lists(st.tuples(st.integers(-200, 200), st.integers(-200, 200)), min_size=3, max_size=3, unique=True))
def test_ultrametric(points):
    pts = p_adic_points({str(k): GaussianRational(*v) for k, v in enumerate(points)}, 5, branch=2)
    d = sorted(
        (x.distance_valuation(y) if x.distance_valuation(y) is not None else 10**9)
        for x, y in ((pts[0], pts[1]), (pts[0], pts[2]), (pts[1], pts[2]))
    )
    assert d[0] == d[1]


def test_genus2_splitting():
    assert genus2_splitting_identity(1)
    assert genus2_splitting_identity(-1)
    assert not genus2_splitting_identity(1, perturb=True)


def test_j_values():
    assert j_invariant_Ec(2) == Fraction(2744000, 9)
    assert j_invariant_Ec(-3) == 0
    for c in (1, -1):
        with pytest.raises(QMError) as exc:
            j_invariant_Ec(c)
        assert exc.value.code == "POLE"


@settings(max_examples=60, deadline=None)
@given(st.fractions(min_value=-50, max_value=50, max_denominator=30))
def test_j_inversion_symmetry(c):
    assume(c not in (0, 1, -1))
    assert j_invariant_Ec(c) == j_invariant_Ec(1 / c)


def test_j_inversion_symbolic():
    import sympy as sp

    c = sp.symbols("c")
    j = 1728 * (c + sp.Rational(1, 3)) ** 3 * (c + 3) ** 3 / ((c - 1) ** 4 * (c + 1) ** 2)
    assert sp.simplify(j - j.subs(c, 1 / c)) == 0
    assert j.subs(c, 2) == sp.Rational(j_invariant_Ec(2).numerator, j_invariant_Ec(2).denominator)
