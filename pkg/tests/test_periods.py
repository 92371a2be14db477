import numpy as np
import pytest

from qmjac.errors import QMError
from qmjac.lattice import homology_data
from qmjac.periods import (
    POSITIVITY_SIGN,
    branch_points_g4,
    build_homology_basis,
    compute_period_matrix,
    period_matrix,
    period_report,
    stability_scan,
    verify_riemann_relations,
)


@pytest.fixture(scope="module")
def half():
    return period_matrix(0.5)


def test_branch_points_at_half():
    pts = branch_points_g4(0.5)
    assert abs(pts["z6"] - np.exp(1j * np.pi / 3)) < 1e-12
    assert abs(pts["z3"] - np.exp(2j * np.pi / 3)) < 1e-12


def test_report_at_half():
    rep = period_report(0.5)
    assert rep["residual_alpha"] < 1e-8
    assert rep["residual_beta"] < 1e-8
    assert rep["riemann_residual"] < 1e-8
    assert rep["positivity"]
    assert rep["lattice_rank"] == 8


def test_opposite_sign_is_not_positive(half):
    assert not verify_riemann_relations(half, homology_data().E, -POSITIVITY_SIGN)[1]


def test_scaled_matrix_stays_positive(half):
    residual, positive = verify_riemann_relations(2 * half.entries, homology_data().E)
    assert positive and residual < 1e-8


def test_random_matrix_fails(half):
    rng = np.random.default_rng(7)
    junk = rng.normal(size=half.entries.shape) + 1j * rng.normal(size=half.entries.shape)
    residual, _ = verify_riemann_relations(junk, homology_data().E)
    assert residual > 1e-3


def test_stability_scan():
    scan = stability_scan(20, 0.05, seed=1)
    assert len(scan) == 20
    assert max(max(s["residual_alpha"], s["residual_beta"]) for s in scan) < 1e-7


def test_complex_parameter():
    rep = period_report(0.5 + 0.3j, 1e-11)
    assert rep["residual_beta"] < 1e-8 and rep["positivity"]


def test_tolerances_agree(half):
    loose = compute_period_matrix(build_homology_basis(0.5), 0.5, tol=1e-8)
    assert np.max(np.abs(loose.entries - half.entries)) < 1e-7


def test_error_bounds_reported(half):
    assert half.error_bounds.shape == (4, 8)
    assert np.all(half.error_bounds <= 1e-11)


def test_hex_serialisation_round_trips(half):
    data = half.to_json()
    back = np.array([[complex(float.fromhex(re), float.fromhex(im)) for re, im in row] for row in data["entries"]])
    assert (back == half.entries).all()


def test_near_degenerate_parameter_refused():
    with pytest.raises(QMError) as exc:
        period_matrix(0.99999999, 1e-11)
    assert exc.value.code in ("ILL_CONDITIONED", "CONTINUATION_FAILED")


def test_tolerance_floor():
    with pytest.raises(QMError) as exc:
        period_matrix(0.5, 1e-14)
    assert exc.value.code == "PRECONDITION_FAILED"
