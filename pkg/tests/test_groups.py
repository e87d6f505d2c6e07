import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from rankone_ps.groups import H2, H3, NotUnimodularError, get_model

MODELS = [H2, H3]
ids = ["h2", "h3"]


def test_get_model():
    assert get_model("H2") is H2 and get_model(H3) is H3
    with pytest.raises(ValueError, match="valid"):
        get_model("h4")


def test_parameters():
    assert H2.rho == 0.5 and H3.rho == 1.0
    assert H2.params.c0 == pytest.approx(math.sqrt(2))
    assert H3.params.c0 == pytest.approx(math.sqrt(math.pi))
    assert H2.params.dim_X == 2 and H3.params.dim_X == 3


@pytest.mark.parametrize("m", MODELS, ids=ids)
def test_iwasawa_roundtrip(m):
    g = m.random_element(11, radius=2.0, size=50)
    c = m.iwasawa_kan(g)
    np.testing.assert_allclose(m.mul(c.k, m.a(c.t), m.n(c.n)), g, atol=1e-12)
    kk = m.mul(np.conj(np.swapaxes(c.k, -1, -2)), c.k)
    np.testing.assert_allclose(kk, m.identity((50,)), atol=1e-12)
    np.testing.assert_allclose(m.det(c.k), 1, atol=1e-12)


@pytest.mark.parametrize("m", MODELS, ids=ids)
def test_iwasawa_of_elements(m):
    t = np.linspace(-2, 2, 5)
    np.testing.assert_allclose(m.iwasawa_H(m.a(t)), t, atol=1e-14)
    x = np.array([[0.3, -0.2]]) if m.is_complex else np.array([0.3])
    np.testing.assert_allclose(m.iwasawa_H(m.n(x)), 0, atol=1e-15)
    np.testing.assert_allclose(m.iwasawa_H(m.random_k(3, 4)), 0, atol=1e-14)


@pytest.mark.parametrize("m", MODELS, ids=ids)
def test_H_cocycle_right_an(m):
    # H(g a_t n) = H(g) + t
    g = m.random_element(5, 1.5, 20)
    x = np.full((20, 2), 0.7) if m.is_complex else np.full(20, 0.7)
    lhs = m.iwasawa_H(m.mul(g, m.a(np.full(20, 0.4)), m.n(x)))
    np.testing.assert_allclose(lhs, m.iwasawa_H(g) + 0.4, atol=1e-13)


@pytest.mark.parametrize("m", MODELS, ids=ids)
def test_H_of_nbar(m):
    # H(nbar_x) = log(1 + |x|^2)
    x = np.array([[0.5, 1.5], [2.0, -0.1]]) if m.is_complex else np.array([0.5, -2.0])
    r2 = np.sum(x**2, axis=-1) if m.is_complex else x**2
    np.testing.assert_allclose(m.iwasawa_H(m.nbar(x)), np.log1p(r2), atol=1e-14)


@pytest.mark.parametrize("m", MODELS, ids=ids)
def test_weyl(m):
    w = m.weyl()
    np.testing.assert_allclose(m.mul(w, m.a(1.3), m.inv(w)), m.a(-1.3), atol=1e-15)
    np.testing.assert_allclose(m.mul(w, w), -m.identity(), atol=0)


def test_nbar_normalization_h2():
    # (1/pi) int exp(-2 rho H(nbar_x)) dx = 1
    from rankone_ps.quadrature import integrate_1d

    val = integrate_1d(lambda x: np.exp(-2 * H2.rho * H2.iwasawa_H(H2.nbar(x))) / math.pi).value
    assert val == pytest.approx(1.0, abs=1e-12)


def test_nbar_normalization_h3():
    from rankone_ps.quadrature import integrate_1d

    # radial in |x|: (1/pi) * 2 pi int r (1+r^2)^{-2} dr = 1
    val = integrate_1d(lambda r: 2 * r * np.exp(-2 * H3.iwasawa_H(H3.nbar(r + 0j))), (0.0, math.inf)).value
    assert val == pytest.approx(1.0, abs=1e-12)


def test_m_elements():
    assert np.allclose(H2.m(np.pi), -np.eye(2))
    mm = H3.m(0.3)
    np.testing.assert_allclose(H3.mul(mm, H3.a(0.5)), H3.mul(H3.a(0.5), mm))


def test_check_rejects():
    with pytest.raises(NotUnimodularError):
        H2.iwasawa_kan(2 * np.eye(2))
    with pytest.raises(ValueError):
        H2.check(np.eye(3))
    with pytest.raises(TypeError):
        H2.check(np.eye(2) * (1 + 1e-3j))
    with pytest.raises(TypeError):
        H2.n(0.5j)


@pytest.mark.parametrize("m", MODELS, ids=ids)
def test_random_reproducible(m):
    np.testing.assert_array_equal(m.random_element(9, size=3), m.random_element(9, size=3))
    assert not np.allclose(m.random_element(9), m.random_element(10))
    with pytest.raises(ValueError):
        m.random_element(0, radius=-1)
    np.testing.assert_allclose(m.random_element(0, radius=0), m.identity())


@pytest.mark.parametrize("m", MODELS, ids=ids)
def test_chart_and_distance(m):
    g = m.random_element(4, 1.5, 10)
    h = m.random_element(6, 1.5, 10)
    p = m.to_chart(g)
    np.testing.assert_allclose(m.to_chart(m.from_chart(p)), p, atol=1e-12)
    # d(o, a_t o) = |t|
    assert m.distance(m.origin_chart(), m.to_chart(m.a(-1.7))) == pytest.approx(1.7)
    # isometry
    k = m.random_element(8, 1.0)
    d1 = m.distance(m.to_chart(g), m.to_chart(h))
    d2 = m.distance(m.to_chart(m.mul(k, g)), m.to_chart(m.mul(k, h)))
    np.testing.assert_allclose(d1, d2, atol=1e-10)
    with pytest.raises(ValueError):
        m.from_chart(np.array([0, 0, -1.0]) if m.is_complex else 0.2 - 1j)


@given(st.floats(-2, 2), st.floats(-2, 2), st.floats(-3, 3))
def test_kan_uniqueness_h2(t, x, phi):
    g = H2.mul(H2.k_from_angles(phi), H2.a(t), H2.n(x))
    c = H2.iwasawa_kan(g)
    assert c.t == pytest.approx(t, abs=1e-10)
    assert c.n == pytest.approx(x, abs=1e-9)


def test_pickle_roundtrip():
    import pickle

    assert pickle.loads(pickle.dumps(H3)) is H3
