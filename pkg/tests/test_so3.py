from fractions import Fraction

import numpy as np
import pytest

from odegeom.geom import sample_points
from odegeom.so3 import (
    So3Error,
    build_G,
    expansion_check,
    frame_constant_checks,
    g_identities,
    hor_operator,
    mu_lambda,
    spinor_frame_data,
    trace_checks_symbolic,
)


def _all_pass(checks):
    bad = [(c.name, c.max_residual, c.notes) for c in checks if c.status != "pass"]
    assert not bad, f"failing checks: {bad}"


def test_spinor_pairing_is_frame_pairing():
    khat, _, _ = spinor_frame_data()
    expected = {(0, 4): 1, (1, 3): -4, (2, 2): 6, (3, 1): -4, (4, 0): 1}
    for i in range(5):
        for j in range(5):
            assert khat[i][j] == expected.get((i, j), 0)


def test_structure_tensor_is_sparse_and_rational():
    _, _, ghat = spinor_frame_data()
    nonzero = {
        (i, j, k): ghat[i][j][k]
        for i in range(5)
        for j in range(5)
        for k in range(5)
        if ghat[i][j][k] != 0
    }
    # every nonzero component sits on i+j+k = 6 (0-based) and is rational
    assert all(i + j + k == 6 for (i, j, k) in nonzero)
    assert all(isinstance(v, Fraction) for v in nonzero.values())
    assert ghat[0][2][4] == 1 and ghat[2][2][2] == -6


def test_requires_conics5(pd_gn5, metric_gn5):
    with pytest.raises(So3Error):
        build_G(pd_gn5, metric_gn5)


def test_frame_constants(gtensor):
    _all_pass(frame_constant_checks(gtensor))


def test_trace_free_coordinates(gtensor):
    _all_pass(trace_checks_symbolic(gtensor))


def test_identities(gtensor):
    _all_pass(g_identities(gtensor))


def test_expansion_rows(gtensor, metric_conics5):
    _all_pass(expansion_check(gtensor, metric_conics5))


def test_operator_on_constant(gtensor, metric_conics5, conics5):
    pt = sample_points(conics5, 1, seed=9)[0]

    def const_field(_):
        return 1.0, np.zeros(5), np.zeros((5, 5))

    hv = hor_operator(gtensor, metric_conics5, const_field, pt)
    assert np.max(np.abs(hv.covector)) == 0.0
    assert hv.laplacian == 0.0


def test_operator_on_coordinate_is_harmonic(gtensor, metric_conics5, conics5):
    # F = y: the laplacian reduces to -g^ab Gamma^y_ab, which vanishes
    pt = sample_points(conics5, 1, seed=10)[0]
    grad = np.zeros(5)
    grad[0] = 1.0

    def coord_field(_):
        return pt["y"], grad, np.zeros((5, 5))

    hv = hor_operator(gtensor, metric_conics5, coord_field, pt)
    assert abs(hv.laplacian) < 1e-9


def test_mu_lambda_values():
    assert mu_lambda(0.0, -60.0) == pytest.approx(-6.0)
    assert mu_lambda(1.0, -60.0) == pytest.approx(0.0)
    assert mu_lambda(0.0, 0.0) == 0.0
