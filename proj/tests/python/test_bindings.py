import math

import mpmath
import pytest

import renyi_toolkit as rt


def test_special_functions_against_mpmath():
    for x in (0.5, 2.5, 17.25, 1e-3):
        assert rt.log_gamma(x) == pytest.approx(float(mpmath.loggamma(x)), rel=1e-13)
    assert rt.nagy_w(1.0, 1.0) == pytest.approx(0.5)
    assert rt.gamma_ratio_gap(1.0, 0.5) > 0


def test_constants():
    r = rt.optimal_constant(1, 2.0)
    assert r["route"] == "closed_form_1d"
    assert r["value"] == pytest.approx(32 * math.pi**2 / 27, rel=1e-12)
    j11 = float(mpmath.besseljzero(1, 1))
    planar = rt.optimal_constant(2, 2.0)
    assert planar["value"] == pytest.approx(math.pi * j11**2 / 2, rel=1e-5)
    with pytest.raises(rt.UnsupportedRegion):
        rt.optimal_constant(3, 3.0)


def test_density_and_functionals():
    d = rt.density("family:cos_power(alpha=2,b=1,c=0)")
    assert d.dim == 1
    assert d.family == "cos_power"
    ni = rt.renyi_power(d, 2.0) * rt.renyi_fisher(d, 2.0)
    assert ni == pytest.approx(32 * math.pi**2 / 27, rel=1e-9)
    g = rt.density("family:gaussian(var=4)")
    assert rt.functional(g, "I_alpha", 3.0) == pytest.approx(0.25, rel=1e-9)
    m = rt.functional(rt.density("family:gaussian(n=2,var1=1,var2=2)"), "I_hat_matrix", 1.0)
    assert m.shape == (2, 2)
    with pytest.raises(rt.InputError):
        rt.density("family:nope()")
    with pytest.raises(rt.DomainError):
        rt.density("family:cos_power(alpha=0.5)")


def test_profile():
    p = rt.solve_profile(2, 2.0)
    assert p["T"] == pytest.approx(float(mpmath.besseljzero(1, 1)), abs=1e-6)
    assert p["u"][0] == pytest.approx(p["u0"])
    assert len(p["t"]) == len(p["uprime"])


def test_verdicts():
    r = rt.isoperimetric_check(rt.density("family:cos_power(alpha=3)"), 3.0)
    assert r.passed and r.equality_expected and r.equality_met()
    chain = rt.cramer_rao_weighted_chain(rt.density("family:barenblatt(alpha=2)"), 2.0)
    assert chain.passed
    stated = rt.cramer_rao_weighted(rt.density("family:barenblatt(alpha=2)"), 2.0)
    assert not stated.passed
    assert rt.bell_polynomials([1, 1, 1, 1]) == [1, 2, 5, 15]
    reports = rt.run_suite("isoperimetric", rt.density("family:gaussian(var=2)"), 2.0)
    assert len(reports) == 1 and reports[0].passed


def test_heat_trace():
    traces = rt.heat_trace(rt.density("family:gaussian(var=1)"), [2.0], [0.2, 0.5])
    (tr,) = traces
    for t, dh in zip(tr.t, tr.dh_dt_fd):
        assert dh == pytest.approx(0.5 / (1 + t), rel=1e-6)
