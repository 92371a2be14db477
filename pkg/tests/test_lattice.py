from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qmjac.algebra import Quaternion
from qmjac.lattice import (
    FREE,
    NOT_LOCALLY_FREE,
    TwoTorsionModule,
    f2_rank,
    free_module_generators,
    homology_data,
    hurwitz_obstruction,
    hurwitz_rational_rep,
    lipschitz_span_rank,
    nonfreeness_check,
    regular_representation,
    t_matrix,
    t_matrix_report,
    two_torsion_action,
)

HALF = Fraction(1, 2)
I8 = np.eye(8, dtype=np.int64)


def test_quaternion_relations_on_homology():
    d = homology_data()
    ra, rb = d.R_alpha, d.R_beta
    assert (ra @ ra == -I8).all() and (rb @ rb == -I8).all()
    assert (ra @ rb == -(rb @ ra)).all()


def test_intersection_form_preserved():
    d = homology_data()
    for r in (d.R_alpha, d.R_beta):
        assert (r.T @ d.E @ r == d.E).all()
    assert (d.E.T == -d.E).all() and round(abs(np.linalg.det(d.E))) == 1


def test_homology_self_check_runs():
    homology_data().check()


@pytest.mark.parametrize("g,rank", [(4, 1), (6, 2), (8, 3)])
def test_two_torsion_obstruction(g, rank):
    assert hurwitz_obstruction(g) == (True, rank)


@pytest.mark.parametrize("g", [4, 6, 8, 10, 12])
def test_two_torsion_actions_are_involutions_mod_2(g):
    ma, mb = two_torsion_action(g)
    n = ma.shape[0]
    assert n == 2 * g
    for m in (ma, mb, ma @ mb):
        assert ((m @ m) % 2 == np.eye(n, dtype=np.int64)).all()
    assert ((ma @ mb - mb @ ma) % 2 == 0).all()


def test_two_torsion_module_relation():
    mod = TwoTorsionModule.make(4)
    basis = np.array([mod.vector(lab) for lab in mod.basis_labels])
    assert f2_rank(basis) == 8
    assert (basis.sum(axis=0) % 2 == mod.vector("0")).all()


def test_identity_action_is_unobstructed():
    eye = np.eye(8, dtype=np.int64)
    assert hurwitz_obstruction(4, eye, eye) == (False, 0)


def test_span_and_hurwitz_rep():
    assert lipschitz_span_rank() == 4
    rw, integral = hurwitz_rational_rep()
    assert not integral
    cube = rw.dot(rw).dot(rw)
    assert all(cube[r][c] == (1 if r == c else 0) for r in range(8) for c in range(8))


def test_nonfreeness_suite():
    assert nonfreeness_check() == (5, 3, NOT_LOCALLY_FREE)
    assert nonfreeness_check(*free_module_generators(2)) == (6, 2, FREE)


@pytest.mark.parametrize("rank", [1, 2, 3])
def test_free_control_any_rank(rank):
    assert nonfreeness_check(*free_module_generators(rank))[2] == FREE


rationals = st.fractions(min_value=-9, max_value=9, max_denominator=4)


@settings(max_examples=40, deadline=None)
@given(st.tuples(rationals, rationals, rationals, rationals), st.tuples(rationals, rationals, rationals, rationals))
def test_homology_representation_is_multiplicative(u, v):
    d = homology_data()
    q1, q2 = Quaternion(*u), Quaternion(*v)
    lhs = d.R_of(q1 * q2)
    rhs = d.R_of(q1).dot(d.R_of(q2))
    alt = d.R_of(q2).dot(d.R_of(q1))
    # a right action composes in reverse; one of the two orders must hold exactly
    assert (lhs == rhs).all() or (lhs == alt).all()


def test_regular_representation():
    i, j = Quaternion(0, 1), Quaternion(0, 0, 1)
    assert (regular_representation(i) @ regular_representation(j) == regular_representation(i * j)).all()


def test_t_matrix_values():
    T = t_matrix()
    assert T[0][0] == Quaternion(0, -HALF, -HALF, 0)
    assert T[1][1] == Quaternion(0, 0, 0, HALF)
    assert T[0][1] == T[1][0] == Quaternion(0)
    rep = t_matrix_report()
    assert rep["antihermitian"] and rep["nrd_product"] == Fraction(1, 8)


def test_t_matrix_order_convention():
    assert t_matrix(k_order="ab")[1][1] == -t_matrix(k_order="ba")[1][1]
    assert t_matrix(k_order="ab")[0][0] == t_matrix(k_order="ba")[0][0]
