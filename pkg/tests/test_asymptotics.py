import math

import numpy as np
import pytest

from rankone_ps.asymptotics import (
    IllConditionedError,
    msp_leading,
    msp_power_fit,
    msp_rate_fit,
    phase_hessian,
    phase_hessian_fd,
)
from rankone_ps.groups import H2, H3
from rankone_ps.patterson_sullivan import PhaseSpaceFunction, l_lambda, symbol_function
from rankone_ps.quantization import make_symbol
from rankone_ps.regions import HyperbolicBall

GRID = [20.0, 40.0, 80.0, 120.0, 160.0]


def _f(model, name="gauss-trig", width=1.6, **kw):
    m = H3 if model == "h3" else H2
    return symbol_function(make_symbol(name, model, m.origin_chart(), width, **kw))


@pytest.mark.parametrize("m", [H2, H3], ids=["h2", "h3"])
def test_hessian(m):
    lead = phase_hessian(m)
    s = m.params.dim_N
    np.testing.assert_allclose(lead.hessian, 2 * np.eye(s))
    assert lead.hessian_det == pytest.approx(2.0**s)
    assert lead.signature == -s
    np.testing.assert_allclose(phase_hessian_fd(m), 2 * np.eye(s), atol=1e-6)


def test_constants():
    assert phase_hessian(H2).constant_C == pytest.approx(0.5 - 0.5j, abs=1e-15)
    assert phase_hessian(H3).constant_C == pytest.approx(-0.5j, abs=1e-15)


def test_leading_term_scaling():
    f = _f("h2")
    g = H2.identity()
    assert msp_leading(f, g, 40.0) / msp_leading(f, g, 160.0) == pytest.approx(2.0)
    f3 = _f("h3")
    assert msp_leading(f3, H3.identity(), 40.0) / msp_leading(f3, H3.identity(), 80.0) == pytest.approx(2.0)
    with pytest.raises(ValueError):
        msp_leading(f, g, 0.0)


def test_leading_matches_gaussian_model_integral():
    # (1/pi) int (1+u^2)^{-(i lam + 1/2)} du against the leading term for a = 1 near 0
    lam = 200.0
    import scipy.integrate as sint

    w = lambda u: (1 + u * u) ** (-(1j * lam + 0.5))  # noqa: E731
    cut = lambda u: math.exp(-u**8)  # noqa: E731
    re = sint.quad(lambda u: (w(u) * cut(u)).real, -3, 3, limit=2000, epsabs=1e-14)[0]
    im = sint.quad(lambda u: (w(u) * cut(u)).imag, -3, 3, limit=2000, epsabs=1e-14)[0]
    lead = phase_hessian(H2).constant_C * math.sqrt(2 * math.pi / lam) / math.pi
    assert abs((re + 1j * im) / math.pi / lead - 1) < 0.02


@pytest.mark.parametrize("model", ["h2", "h3"])
def test_rate_is_one_over_lambda(model):
    m = H3 if model == "h3" else H2
    fit = msp_rate_fit(_f(model), m.identity(), GRID)
    assert fit.slope == pytest.approx(-1.0, abs=0.1)
    # doubling lambda roughly halves the deviation
    assert fit.abs_dev[2] / fit.abs_dev[1] == pytest.approx(0.5, abs=0.1)
    assert np.all(np.diff(fit.abs_dev) < 0)
    assert float(fit) == fit.slope


@pytest.mark.parametrize("model,expected", [("h2", -0.5), ("h3", -1.0)])
def test_power_law(model, expected):
    m = H3 if model == "h3" else H2
    assert msp_power_fit(_f(model), m.identity(), GRID) == pytest.approx(expected, abs=0.05)


def test_grid_requirements():
    f = _f("h2")
    with pytest.raises(ValueError, match="at least 5"):
        msp_rate_fit(f, H2.identity(), [20, 40, 80, 160])
    with pytest.raises(ValueError, match="lam >="):
        msp_rate_fit(f, H2.identity(), [5, 40, 80, 120, 160])


def test_ill_conditioned():
    f = _f("h2")
    far = H2.from_chart(0.0 + 30j)
    with pytest.raises(IllConditionedError):
        msp_rate_fit(f, far, GRID)


def test_plateau_has_smaller_error_than_generic_symbol():
    g = H2.identity()
    plat = symbol_function(make_symbol("plateau", "h2", 1j, 0.8, inner=0.4))
    bump = _f("h2", "bump-trig", 0.8)
    ratio = lambda f: abs(l_lambda(f, 80.0, g) / msp_leading(f, g, 80.0) - 1)  # noqa: E731
    assert ratio(plat) < ratio(bump)


def test_off_critical_support_decays_fast():
    # the critical point n = 0 lies outside the support: L_lam decays faster than any power
    ball = HyperbolicBall("h2", 1j, 0.5)
    base = _f("h2", "bump-trig", 0.5)
    shifted = PhaseSpaceFunction("h2", base.fn, ball).translate(H2.n(-1.0))
    g = H2.identity()
    vals = np.abs(l_lambda(shifted, np.array(GRID), g))
    slope = np.polyfit(np.log(GRID), np.log(vals), 1)[0]
    assert slope < -3.0


def test_leading_constant_sign_against_quadrature():
    # f = 1 near g, lam = 100: only e^{-i pi/4} matches; the conjugate constant is off by a factor -i
    f = symbol_function(make_symbol("plateau", "h2", 1j, 1.2, inner=0.8))
    g = H2.identity()
    r = l_lambda(f, 100.0, g) / msp_leading(f, g, 100.0)
    assert abs(r - 1) < 0.01
    conj_lead = np.conj(phase_hessian(H2).constant_C) * math.sqrt(2 * math.pi / 100) / math.pi
    assert abs(l_lambda(f, 100.0, g) / conj_lead - 1) > 1


def test_leading_vanishes_with_f_and_phase_at_identity():
    f = _f("h2")
    far = H2.from_chart(0.0 + 30j)
    assert msp_leading(f, far, 50.0) == 0
    from rankone_ps.asymptotics import _psi

    assert _psi(H2, np.zeros(1)) == 0 and _psi(H3, np.zeros(2)) == 0
