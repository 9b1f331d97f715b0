import numpy as np
import pytest

from odegeom.expr import parse
from odegeom.radon import (
    RadonConfig,
    RadonError,
    conic_checks,
    conic_from_jet,
    default_test_jets,
    eval_Z,
    integrate_ode,
    integration_cross_checks,
    numerics_checks,
    radon_F,
    system_checks,
    verify_system,
)


def _all_pass(checks):
    bad = [(c.name, c.max_residual) for c in checks if c.status != "pass"]
    assert not bad, f"failing checks: {bad}"


def test_circle_jet():
    # y = sqrt(1 - x^2) at 0: 4-jet (1, 0, -1, 0, -3)
    conic, branch = conic_from_jet({"y": 1.0, "p": 0.0, "q": -1.0, "r": 0.0, "s": -3.0}, 0.0)
    v = np.array(conic.vector)
    ref = np.array([1.0, 0.0, 1.0, 0.0, 0.0, -1.0])
    ref /= np.linalg.norm(ref)
    assert min(np.max(np.abs(v - ref)), np.max(np.abs(v + ref))) < 1e-12
    y, q = eval_Z(conic, branch, 0.0)
    assert (y, q) == (pytest.approx(1.0), pytest.approx(-1.0))
    y, q = eval_Z(conic, branch, 0.6)
    assert y == pytest.approx(0.8)


def test_parabola_jet():
    conic, branch = conic_from_jet({"y": 0.0, "p": 0.0, "q": 2.0, "r": 0.0, "s": 0.0}, 0.0)
    y, q = eval_Z(conic, branch, 1.0)
    assert y == pytest.approx(1.0) and q == pytest.approx(2.0)


def test_degenerate_jet_rejected():
    with pytest.raises(RadonError):
        conic_from_jet({"y": 0.0, "p": 0.0, "q": 0.0, "r": 0.0, "s": 0.0}, 0.0)
    with pytest.raises(RadonError):
        conic_from_jet({"y": 1.0, "p": 0.0, "q": 0.0, "r": 1.0, "s": 0.0}, 0.0)


def test_branch_leaves_reals():
    conic, branch = conic_from_jet({"y": 1.0, "p": 0.0, "q": -1.0, "r": 0.0, "s": -3.0}, 0.0)
    with pytest.raises(RadonError):
        eval_Z(conic, branch, 2.0)


def test_integrate_zero_length(conics5):
    jet = {"y": 1.0, "p": 0.3, "q": 2.0, "r": 0.1, "s": -0.2}
    assert integrate_ode(conics5, jet, 0.0, 0.0) == jet


def test_integrate_matches_conic(conics5, gn5):
    _all_pass(integration_cross_checks(conics5, gn5))


def test_radon_constant_f_on_parabola():
    # y'' = 2 along y = x^2, so the integrand is the constant 2^(1/3)
    cfg = RadonConfig(f=parse("1"), x_a=-1.0, x_b=1.0)
    jet = {"y": 0.0, "p": 0.0, "q": 2.0, "r": 0.0, "s": 0.0}
    assert radon_F(cfg, jet) == pytest.approx(2.0 * 2.0 ** (1.0 / 3.0), rel=1e-12)


def test_radon_odd_f_on_parabola():
    cfg = RadonConfig(f=parse("x"), x_a=-1.0, x_b=1.0)
    jet = {"y": 0.0, "p": 0.0, "q": 2.0, "r": 0.0, "s": 0.0}
    assert abs(radon_F(cfg, jet)) < 1e-14


def test_radon_positive_for_positive_q():
    cfg = RadonConfig(f=parse("1"), x_a=-0.5, x_b=0.5)
    jet = {"y": 1.0, "p": 0.3, "q": 2.0, "r": 0.1, "s": -0.2}
    assert radon_F(cfg, jet) > 0.0


def test_config_validation():
    with pytest.raises(RadonError):
        RadonConfig(f=parse("1"), x_a=1.0, x_b=-1.0)
    with pytest.raises(RadonError):
        RadonConfig(f=parse("q"))
    with pytest.raises(RadonError):
        RadonConfig(f=parse("1"), h=0.0)


def test_conic_suite():
    _all_pass(conic_checks())


def test_numerics_suite():
    _all_pass(numerics_checks(RadonConfig(f=parse("x*y"))))


def test_verify_system_single_f(gtensor, metric_conics5):
    cfg = RadonConfig(f=parse("y"))
    ver = verify_system(cfg, default_test_jets(), gtensor, metric_conics5)
    assert ver.max_residual < 1e-4
    assert ver.lam == pytest.approx(1.0 / 3.0, abs=1e-4)
    assert ver.lam_spread < 1e-3
    assert ver.relation_gap < 1e-3


def test_verify_system_accepts_single_point(gtensor, metric_conics5):
    cfg = RadonConfig(f=parse("1"))
    ver = verify_system(cfg, default_test_jets()[0], gtensor, metric_conics5)
    assert len(ver.points) >= 2
    assert ver.max_residual < 1e-4


def test_system_suite(gtensor, metric_conics5):
    _all_pass(system_checks(gtensor, metric_conics5))
