import json
import math
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qmjac.algebra import FiniteField, Poly, legendre, quadratic_character
from qmjac.cache import CountCache, cache_ops
from qmjac.errors import QMError
from qmjac.family import FamilyParams, build_family_poly
from qmjac.frobenius import (
    GENERIC,
    SQUARE,
    count_points,
    count_points_raw,
    cyclotomic_factorization,
    endo_dimension_report,
    fit_l_polynomial,
    irreducible_modulus,
    is_weil_polynomial,
    l_polynomial_report,
    ordinarity_check,
    reduce_mod_p,
    tensor_square,
)

HALF = FamilyParams.from_a(4, [Fraction(1, 2)])
G41 = Poly([1, -2, -30, -82, 1681])
G73 = Poly([1, 8, -2, 584, 5329])
G13 = Poly([1, -2, 0, 26, -169])


def brute_count(params, p, r=1):
    """#C(F_q) by direct enumeration with the pure-Python field."""
    f = reduce_mod_p(build_family_poly(params).f, p)
    F = FiniteField.make(p, r)
    total = 1  # the point at infinity
    for n in range(F.order):
        x = F.element_from_index(n)
        y = F(0)
        for c in reversed(f):
            y = y * x + F(c)
        total += 1 + quadratic_character(y)
    return total


def legendre_count(params, p):
    f = reduce_mod_p(build_family_poly(params).f, p)
    return 1 + sum(1 + legendre(sum(c * pow(x, k, p) for k, c in enumerate(f)) % p, p) for x in range(p))


@pytest.mark.parametrize("p", [5, 13, 17, 29, 37, 41])
def test_count_matches_legendre_sum(p):
    assert count_points(HALF, p) == legendre_count(HALF, p)


@pytest.mark.parametrize("p,r", [(5, 2), (13, 2), (7, 3), (5, 3)])
def test_count_matches_brute_force_extension(p, r):
    assert count_points(HALF, p, r) == brute_count(HALF, p, r)


@settings(max_examples=20, deadline=None)
@given(st.sampled_from([5, 7, 11, 13, 17, 19]), st.integers(1, 2), st.integers(2, 30))
def test_backends_agree(p, r, b):
    try:
        params = FamilyParams.from_b(6, [Fraction(b), Fraction(b + 1)])
        f_mod = reduce_mod_p(build_family_poly(params).f, p)
    except QMError:
        return
    mod = irreducible_modulus(p, r)
    assert count_points_raw(f_mod, p, r, mod, backend="numpy") == count_points_raw(f_mod, p, r, mod, backend="cython")


def test_threads_do_not_change_counts():
    assert count_points(HALF, 41, 2, threads=3) == count_points(HALF, 41, 2)


def test_modulus_choice_does_not_change_counts():
    assert count_points(HALF, 13, 2, modulus_index=0) == count_points(HALF, 13, 2, modulus_index=1)


@pytest.mark.parametrize("p", [2, 3, 9])
def test_bad_primes_rejected(p):
    with pytest.raises(QMError) as exc:
        count_points(HALF, p)
    assert exc.value.code == "BAD_PRIME"


def test_budget_enforced():
    with pytest.raises(QMError) as exc:
        count_points(HALF, 41, 3, budget=1000)
    assert exc.value.code == "BUDGET_EXCEEDED"


@pytest.mark.parametrize("p,expected", [(41, G41), (73, G73), (13, G13)])
def test_square_fits(p, expected):
    rep = l_polynomial_report(HALF, p)
    assert rep.g_p == expected
    assert rep.c_p == expected * expected
    assert is_weil_polynomial(rep.g_p, p)


def test_generic_fit_agrees_with_square():
    counts = {r: count_points(HALF, 41, r) for r in range(1, 5)}
    generic = fit_l_polynomial(counts, 41, 4, GENERIC)
    square = fit_l_polynomial(counts, 41, 4, SQUARE)
    assert generic.c_p == square.c_p == G41 * G41


def test_square_ansatz_rejects_corrupt_surplus():
    counts = {r: count_points(HALF, 41, r) for r in range(1, 4)}
    counts[3] += 2
    with pytest.raises(QMError) as exc:
        fit_l_polynomial(counts, 41, 4, SQUARE)
    assert exc.value.code == "ANSATZ_VIOLATED"


def test_square_ansatz_needs_surplus_for_sign():
    # g_13 has zero middle coefficient, so the sign needs an r = 3 count
    counts = {r: count_points(HALF, 13, r) for r in range(1, 3)}
    with pytest.raises(QMError) as exc:
        fit_l_polynomial(counts, 13, 4, SQUARE)
    assert exc.value.code == "ANSATZ_UNDERDETERMINED"


def test_tensor_square_methods_agree():
    c = G41 * G41
    assert tensor_square(c, 4, "resultant") == tensor_square(c, 4, "power_sums")


def test_tensor_split_and_endo_dims_at_41():
    split = cyclotomic_factorization(tensor_square(G41 * G41, 4), 41)
    assert split.multiplicities() == {1: 16}
    dims, degree = endo_dimension_report(split.kset)
    assert set(dims.values()) == {16} and degree == 1


@settings(max_examples=30, deadline=None)
@given(st.lists(st.integers(1, 12), min_size=1, max_size=6))
def test_endo_dims_divisor_sum(ks):
    _, degree = endo_dimension_report(ks, 1)
    dims, _ = endo_dimension_report(ks, 2 * degree)
    full = max(dims.values())
    for r, d in dims.items():
        assert (d == full) == (r % degree == 0)
        for s in range(r, 2 * degree + 1, r):
            assert dims[s] >= d
    assert degree == math.lcm(*ks)


def test_ordinarity():
    assert ordinarity_check(G41, 41)
    assert not ordinarity_check(Poly([1, 0, 41 * 2, 0, 1681]), 41)


# ----------------------------------------------------------------------------
# cache


def test_cache_round_trip(tmp_path):
    path = tmp_path / "counts.jsonl"
    cache = CountCache(path)
    key = CountCache.make_key(4, "1/2", 41, 1, "x+1")
    assert cache_ops(cache, "get", key) is None
    cache_ops(cache, "put", key, 38)
    assert cache_ops(CountCache(path), "get", key) == 38


def test_cache_latest_wins(tmp_path):
    path = tmp_path / "counts.jsonl"
    key = CountCache.make_key(4, "1/2", 41, 1, "m")
    CountCache(path).put(key, 1)
    CountCache(path).put(key, 2)
    assert CountCache(path).get(key) == 2


def test_cache_corrupt_line_skipped(tmp_path, caplog):
    path = tmp_path / "counts.jsonl"
    key = CountCache.make_key(4, "1/2", 41, 1, "m")
    path.write_text("not json\n" + json.dumps({"key": list(key), "count": 5}) + "\n{\"key\": 1}\n")
    assert CountCache(path).get(key) == 5
    assert "corrupt" in caplog.text


def test_cache_hit_gives_same_report(tmp_path):
    cache = CountCache(tmp_path / "c.jsonl")
    cold = l_polynomial_report(HALF, 41, cache=cache).to_json()
    warm = l_polynomial_report(HALF, 41, cache=CountCache(tmp_path / "c.jsonl")).to_json()
    assert cold == warm
    assert len((tmp_path / "c.jsonl").read_text().splitlines()) == 3
