import random
from fractions import Fraction

import pytest
from hypothesis import assume, given, settings
from hypothesis import strategies as st

from qmjac.errors import QMError
from qmjac.schoen import (
    P0Point,
    SchoenContext,
    compute_c_coefficients,
    fhat_value,
    fourth_root_closed_form,
    is_rational_fourth_power,
    pair_factor_identity,
    random_point,
    restrict_fhat_to_P0,
    surprising_symmetry_check,
    symbolic_fourth_power_check,
    verify_fourth_power_identity,
)

BETAS = {4: (2,), 6: (2, 3), 8: (2, 3, 5), 10: (2, 3, 5, 7)}


def _ctx(g):
    return SchoenContext.make(g, BETAS[g])


def test_c_coefficients_g4():
    assert compute_c_coefficients(4, [2]) == [0, Fraction(-4, 5), 2, Fraction(-4, 5), 0]


def test_symmetry_detects_corruption():
    ctx = _ctx(4)
    assert surprising_symmetry_check(ctx)
    bad = list(ctx.c)
    bad[1] += Fraction(1, 7)
    assert not surprising_symmetry_check(ctx, bad)


admissible = st.fractions(min_value=-12, max_value=12, max_denominator=7).filter(lambda b: b != 0 and b**4 != 1)


@settings(max_examples=100, deadline=None)
@given(st.sampled_from([4, 6, 8, 10]), st.lists(admissible, min_size=4, max_size=4))
def test_symmetry_random_contexts(g, pool):
    beta = pool[: g // 2 - 1]
    try:
        ctx = SchoenContext.make(g, beta)
    except QMError:
        assume(False)
    assert surprising_symmetry_check(ctx)
    assert ctx.c[g // 2] == 2 and ctx.c[0] == ctx.c[g] == 0


@pytest.mark.parametrize("bad", [dict(g=5, beta=[2, 3]), dict(g=6, beta=[2]), dict(g=4, beta=[1]), dict(g=6, beta=[2, Fraction(1, 2)])])
def test_invalid_contexts(bad):
    with pytest.raises(QMError):
        SchoenContext.make(**bad)


def test_gamma_on_branch_point_refused():
    with pytest.raises(QMError):
        SchoenContext.make(4, [2], gamma=2)


@pytest.mark.parametrize("g", [4, 6, 8])
def test_evaluation_methods_agree(g):
    ctx = _ctx(g)
    rng = random.Random(g)
    for _ in range(10):
        pt = random_point(ctx, rng, bound=50)
        try:
            a = restrict_fhat_to_P0(ctx, pt, "resultant")
        except QMError:
            continue
        assert a == restrict_fhat_to_P0(ctx, pt, "factored")
        assert pair_factor_identity(ctx, pt)
        assert fourth_root_closed_form(ctx, pt) ** 4 == -a


def test_fourth_power_helper():
    assert is_rational_fourth_power(Fraction(16, 81)) == (True, Fraction(2, 3))
    assert is_rational_fourth_power(Fraction(8, 81))[0] is False
    assert is_rational_fourth_power(-16)[0] is False


def test_symbolic_g4():
    ctx = SchoenContext.make(4, [2], gamma=7)
    assert symbolic_fourth_power_check(ctx)
    assert not symbolic_fourth_power_check(ctx, sign=1)


@pytest.mark.parametrize("g", [6, 8])
def test_randomised_trials(g):
    rep = verify_fourth_power_identity(_ctx(g), trials=10, seed=5)
    assert rep.passed == 10 and rep.ok


def test_sign_control_fails():
    rep = verify_fourth_power_identity(_ctx(6), trials=10, seed=1, sign=1)
    assert rep.passed < 10


def test_degenerate_point():
    ctx = _ctx(4)
    # at g = 4 the delta = -2 factor is 15 - 6 e_1 + 12/5 e_2
    pt = P0Point.make(ctx, [Fraction(9, 2), Fraction(5)])
    with pytest.raises(QMError) as exc:
        fhat_value(ctx, pt)
    assert exc.value.code == "DEGENERATE_POINT"


def test_report_is_deterministic():
    a = verify_fourth_power_identity(_ctx(6), trials=5, seed=2).to_json()
    b = verify_fourth_power_identity(_ctx(6), trials=5, seed=2).to_json()
    assert a == b
