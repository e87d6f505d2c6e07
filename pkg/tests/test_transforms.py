import math

import numpy as np
import pytest
from scipy import integrate as sint
from scipy import special

from rankone_ps.boundary import horocycle_bracket
from rankone_ps.groups import H2, H3
from rankone_ps.regions import HyperbolicBall, smooth_bump
from rankone_ps.transforms import (
    BoundaryDistribution,
    c_function,
    eigenvalue,
    fourier_inversion,
    helgason_fourier,
    l2_norm_boundary,
    laplacian_fd,
    loggamma,
    plancherel_density,
    plane_wave,
    poisson_transform,
    principal_series_apply,
    spherical_function,
)

# c(lambda) for SL(2,R), computed with mpmath at 30 digits
C_H2 = {
    0.5: 0.40429833970921244524 - 0.72847058074492974144j,
    1.0: 0.34359140992945207024 - 0.44882725456241556353j,
    2.0: 0.26371154716749188907 - 0.29935309091746938642j,
    10.0: 0.12456918624266838597 - 0.12772433776386732223j,
}


def _unit(v):
    v = np.asarray(v, float)
    return v / np.linalg.norm(v, axis=-1, keepdims=True)


def test_loggamma_matches_scipy():
    z = np.array([0.3 + 2j, 1 + 1e-3j, -2.5 + 0.7j, 5 - 30j, 0.5 + 100j])
    # phase rounding grows like |z| log|z| eps
    np.testing.assert_allclose(np.exp(loggamma(z)), special.gamma(z), rtol=1e-12)
    with pytest.raises(ZeroDivisionError):
        loggamma(np.array([-2.0 + 0j]))


@pytest.mark.parametrize("lam", sorted(C_H2))
def test_c_function_h2_frozen(lam):
    assert abs(c_function(lam, "h2") - C_H2[lam]) < 1e-13 * abs(C_H2[lam])


@pytest.mark.parametrize("lam", [0.5, 1.0, 2.0, 10.0])
def test_c_function_h3_is_one_over_i_lambda(lam):
    assert abs(c_function(lam, "h3") - (-1j / lam)) < 1e-13 / lam


@pytest.mark.parametrize("m", [H2, H3], ids=["h2", "h3"])
def test_c_function_normalization_and_pole(m):
    # the Gamma formula at i lam = rho gives c(-i rho) = 1
    p = m.params
    r = m.rho
    logc = (math.log(p.c0) - r * math.log(2) + loggamma(r)
            - loggamma(p.m_alpha / 4 + 0.5 + r / 2) - loggamma(p.m_alpha / 4 + p.m_2alpha / 2 + r / 2))
    assert np.exp(logc).real == pytest.approx(1.0, rel=1e-13)
    with pytest.raises(ZeroDivisionError):
        c_function(0.0, "h2")
    assert np.all(np.conj(c_function(np.array([1.5]), "h2")) == c_function(np.array([-1.5]), "h2"))


def test_plancherel_closed_forms():
    lam = np.array([0.0, 0.1, 0.7, 3.0, 25.0])
    np.testing.assert_allclose(plancherel_density(lam, "h2"), np.pi * lam * np.tanh(np.pi * lam), rtol=1e-12)
    np.testing.assert_allclose(plancherel_density(lam, "h3"), lam**2, rtol=1e-12)


@pytest.mark.parametrize("m", [H2, H3], ids=["h2", "h3"])
def test_poisson_is_eigenfunction(m):
    rng = np.random.default_rng(2)
    if m.is_complex:
        T = BoundaryDistribution.atoms(m, [1.0, -0.5j], _unit(rng.normal(size=(2, 3))))
        z = np.array([[0.1, -0.2, 0.9], [0.5, 0.3, 1.4]])
    else:
        T = BoundaryDistribution.atoms(m, [1.0, 0.3 - 0.2j, 2.0], [0.3, 2.0, 4.1])
        z = np.array([0.2 + 0.8j, -0.5 + 1.6j])
    lam = 1.7
    phi = poisson_transform(T, lam)
    lap = laplacian_fd(phi, z, 1e-3, m)
    np.testing.assert_allclose(lap, eigenvalue(lam, m) * phi(z), rtol=1e-5)


def test_poisson_with_density():
    # density cos(theta) against the normalized circle measure
    T = BoundaryDistribution("h2", density=np.cos)
    phi = poisson_transform(T, 0.8)
    z = 0.3 + 1.2j
    ref = sint.quad(lambda th: math.cos(th) * plane_wave(H2, z, 0.8, th).real, 0, 2 * math.pi)[0]
    ref += 1j * sint.quad(lambda th: math.cos(th) * plane_wave(H2, z, 0.8, th).imag, 0, 2 * math.pi)[0]
    assert abs(phi(z) - ref / (2 * math.pi)) < 1e-12


def test_spherical_function_h2_radial():
    lam, t = 1.3, 0.9
    phi = spherical_function("h2", lam)
    ref = sint.quad(lambda th: ((np.cosh(t) - np.sinh(t) * np.cos(th)) ** (-(1j * lam + 0.5))).real,
                    0, math.pi, epsabs=1e-14)[0] / math.pi
    vals = phi(np.stack([H2.mul(H2.k_from_angles(a), H2.a(t)) for a in (0.0, 0.7, 2.0)]))
    np.testing.assert_allclose(vals, ref, atol=1e-12)


def test_spherical_function_h3_closed_form():
    lam, r = 2.1, 1.1
    phi = spherical_function("h3", lam)
    assert phi(H3.a(r)) == pytest.approx(math.sin(lam * r) / (lam * math.sinh(r)), abs=1e-12)


def test_atoms_must_be_distinct():
    with pytest.raises(ValueError, match="distinct"):
        BoundaryDistribution.atoms("h2", [1, 1], [0.5, 0.5 + 2 * np.pi])
    with pytest.raises(ValueError):
        BoundaryDistribution.atoms("h2", [1, 1], [0.5])
    with pytest.raises(ValueError):
        BoundaryDistribution("h2")


@pytest.mark.parametrize("m", [H2, H3], ids=["h2", "h3"])
def test_twist(m):
    rng = np.random.default_rng(5)
    pts = _unit(rng.normal(size=(3, 3))) if m.is_complex else np.array([0.4, 2.5, 5.0])
    T = BoundaryDistribution.atoms(m, [1.0, 0.5j, -0.3], pts)
    gam = m.random_element(7, 1.0)
    z = m.random_element(8, 1.0, 4)
    lhs = poisson_transform(T, 1.1)(m.mul(gam, z))
    rhs = poisson_transform(T.twisted(gam, 1.1), 1.1)(z)
    np.testing.assert_allclose(lhs, rhs, rtol=1e-12)


def test_helgason_of_radial_bump_is_b_independent():
    ball = HyperbolicBall("h2", 1j, 1.0)
    u = lambda z: smooth_bump(H2.distance(z, 1j), 1.0)  # noqa: E731
    b = np.array([0.0, 1.0, 3.0, 5.5])
    vals = helgason_fourier(u, 1.5, b, ball)
    np.testing.assert_allclose(vals, vals[0], rtol=1e-8)
    # equals the spherical transform int u(x) phi_{-lam}(x) dx in geodesic polar coordinates
    phi = spherical_function("h2", -1.5)
    ref = sint.quad(lambda r: (smooth_bump(r, 1.0) * phi(H2.a(r)) * 2 * math.sinh(r)).real, 0, 1,
                    epsabs=1e-13)[0]
    assert vals[0] == pytest.approx(ref, rel=1e-8)
    with pytest.raises(ValueError):
        helgason_fourier(u, 1.0, 0.0, None)


def test_fourier_inversion_h2():
    ball = HyperbolicBall("h2", 1j, 0.8)
    u = lambda z: smooth_bump(H2.distance(z, 1j), 0.8) * (1 + 0.5 * np.real(z))  # noqa: E731
    pts = np.array([0.05 + 1.0j, -0.2 + 0.9j, 0.1 + 1.3j, 0.3 + 1.05j])
    rec = fourier_inversion(u, ball, pts)
    err = np.linalg.norm(rec - u(pts)) / np.linalg.norm(u(pts))
    assert err < 0.02
    with pytest.raises(NotImplementedError):
        fourier_inversion(u, HyperbolicBall("h3", np.array([0, 0, 1.0]), 0.5), pts)


@pytest.mark.parametrize("m", [H2, H3], ids=["h2", "h3"])
def test_principal_series_unitary_and_homomorphism(m):
    if m.is_complex:
        f = lambda b: np.exp(1j * b[..., 0]) * (1 + b[..., 2] ** 2)  # noqa: E731
        n = 24
    else:
        f = lambda b: np.exp(2j * b) + np.cos(b) ** 3  # noqa: E731
        n = 512
    g1, g2 = m.random_element(1, 0.8), m.random_element(2, 0.8)
    lam = 2.3
    pf = principal_series_apply(g1, lam, f, m)
    assert l2_norm_boundary(pf, m, n) == pytest.approx(l2_norm_boundary(f, m, n), rel=1e-6)
    nodes = np.array([[0.6, 0.0, 0.8], [0, 1.0, 0]]) if m.is_complex else np.array([0.3, 2.0])
    lhs = principal_series_apply(m.mul(g1, g2), lam, f, m)(nodes)
    rhs = principal_series_apply(g1, lam, principal_series_apply(g2, lam, f, m), m)(nodes)
    np.testing.assert_allclose(lhs, rhs, rtol=1e-12)


def test_laplacian_fd_basics():
    z = np.array([0.1 + 1j, 2 + 0.5j])
    np.testing.assert_allclose(laplacian_fd(lambda w: np.ones_like(w), z), 0, atol=1e-9)
    # y^s is an eigenfunction with eigenvalue s(s-1)
    np.testing.assert_allclose(laplacian_fd(lambda w: np.imag(w) ** 2, z), 2 * np.imag(z) ** 2, rtol=1e-6)
    with pytest.raises(ValueError):
        laplacian_fd(lambda w: w, z, h=0)


def test_plane_wave_matches_bracket():
    z = 0.4 + 1.3j
    assert plane_wave(H2, z, 2.0, 1.0) == pytest.approx(
        np.exp((2j + 0.5) * horocycle_bracket(H2, H2.from_chart(z), 1.0)))
