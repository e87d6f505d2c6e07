"""Plane waves, Poisson and Helgason transforms, c-function, principal series.

Spectral parameters are real ``lam`` (the identification ``a* = R`` via
``lam(H_0)``); eigenvalues of the Laplacian are ``-(lam^2 + rho^2)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .boundary import (
    boundary_action,
    canonical_boundary,
    chordal_distance,
    horocycle_bracket,
)
from .groups import GroupModel, get_model
from .quadrature import (
    QuadratureError,
    QuadratureSpec,
    circle_nodes,
    sphere_nodes,
)
from .regions import HyperbolicBall, integrate_over_ball

__all__ = [
    "as_group",
    "BoundaryDistribution",
    "plane_wave",
    "poisson_transform",
    "spherical_function",
    "helgason_fourier",
    "fourier_inversion",
    "loggamma",
    "c_function",
    "plancherel_density",
    "principal_series_apply",
    "l2_norm_boundary",
    "laplacian_fd",
    "eigenvalue",
    "boundary_quadrature",
]

ATOM_GAP = 1e-8


def as_group(model: GroupModel, z) -> np.ndarray:
    """Accept either batched group elements or chart points for a space point."""
    z = np.asarray(z)
    if z.shape[-2:] == (2, 2):
        return z
    return model.from_chart(z)


def eigenvalue(lam, model) -> float:
    """Laplace eigenvalue ``-(lam^2 + rho^2)``."""
    return -(np.asarray(lam) ** 2 + get_model(model).rho ** 2)


def boundary_quadrature(model, n: int):
    """Nodes and weights (total mass 1) on B."""
    model = get_model(model)
    if model.is_complex:
        return sphere_nodes(n)
    theta = circle_nodes(n)
    return theta, np.full(n, 1.0 / n)


@dataclass
class BoundaryDistribution:
    """Finite atomic measure plus an optional smooth density on B.

    ``density`` is vectorized over boundary points and integrated against
    the normalized measure ``dk_M``.
    """

    model: str
    weights: np.ndarray = field(default_factory=lambda: np.zeros(0, dtype=complex))
    points: np.ndarray = field(default_factory=lambda: np.zeros(0))
    density: Callable | None = None
    n_quad: int | None = None  # default: 256 circle nodes / 32 latitudes

    def __post_init__(self):
        m = get_model(self.model)
        self.model = m.name
        if self.n_quad is None:
            self.n_quad = 32 if m.is_complex else 256
        self.weights = np.atleast_1d(np.asarray(self.weights, dtype=complex))
        pts = np.asarray(self.points, dtype=float)
        if m.is_complex:
            pts = pts.reshape(-1, 3) if pts.size else np.zeros((0, 3))
        else:
            pts = np.atleast_1d(pts)
        self.points = canonical_boundary(m, pts) if len(pts) else pts
        if len(self.weights) != len(self.points):
            raise ValueError("atom weights and points differ in length")
        if len(self.points) == 0 and self.density is None:
            raise ValueError("a boundary distribution needs at least one atom or a density")
        n = len(self.points)
        if n > 1:
            i, j = np.triu_indices(n, 1)
            gaps = chordal_distance(m, self.points[i], self.points[j])
            if np.min(gaps) <= ATOM_GAP:
                raise ValueError("atom points must be pairwise distinct (chordal gap > 1e-8)")

    @classmethod
    def atoms(cls, model, weights, points) -> "BoundaryDistribution":
        return cls(model=get_model(model).name, weights=weights, points=points)

    @property
    def is_atomic(self) -> bool:
        return self.density is None

    def twisted(self, gamma, lam) -> "BoundaryDistribution":
        """Atomic ``T'`` with ``P_lam(T) o gamma = P_lam(T')``.

        Atoms move to ``gamma^{-1} b`` and pick up ``exp((i lam + rho) <gamma o, b>)``,
        the boundary-value transformation rule under translations.
        """
        if not self.is_atomic:
            raise ValueError("twist is implemented for atomic distributions")
        m = get_model(self.model)
        gamma = np.asarray(gamma)
        factor = np.exp((1j * lam + m.rho) * horocycle_bracket(m, gamma, self.points))
        pts = boundary_action(m, m.inv(gamma), self.points)
        return BoundaryDistribution(self.model, self.weights * factor, pts)


def plane_wave(model, z, lam, b) -> np.ndarray:
    """``e_{lam,b}(z) = exp((i lam + rho) <z, b>)``."""
    model = get_model(model)
    return np.exp((1j * lam + model.rho) * horocycle_bracket(model, as_group(model, z), b))


def poisson_transform(T: BoundaryDistribution, lam) -> Callable:
    """``z -> int_B e^{(i lam + rho)<z,b>} T(db)`` (vectorized over ``z``)."""
    m = get_model(T.model)
    if T.density is not None:
        nodes, qw = boundary_quadrature(m, T.n_quad)
        dens = np.asarray(T.density(nodes), dtype=complex) * qw
    else:
        nodes = dens = None

    def phi(z):
        g = as_group(m, z)
        out = np.zeros(g.shape[:-2], dtype=complex)
        for c, b in zip(T.weights, T.points):
            out = out + c * plane_wave(m, g, lam, b)
        if nodes is not None:
            br = horocycle_bracket(m, g[..., None, :, :], nodes)
            out = out + np.exp((1j * lam + m.rho) * br) @ dens
        return out

    return phi


def spherical_function(model, lam, n_quad: int | None = None) -> Callable:
    """``phi_lam`` = Poisson transform of the uniform density."""
    m = get_model(model)
    return poisson_transform(
        BoundaryDistribution(m.name, density=lambda b: np.ones(len(b)), n_quad=n_quad), lam
    )


def helgason_fourier(u: Callable, lam, b, support: HyperbolicBall | None,
                     spec: QuadratureSpec | None = None) -> np.ndarray:
    """``u~(lam, b) = int_X u(x) e^{(-i lam + rho)<x,b>} dx``.

    ``u`` takes chart points; ``support`` is a ball containing its support.
    ``lam`` and ``b`` broadcast against each other; all pairs are integrated
    together as one vector-valued integral.
    """
    if support is None:
        raise ValueError("helgason_fourier needs a declared compact support region")
    m = get_model(support.model)
    spec = spec or QuadratureSpec(rel_tol=1e-9, abs_tol=1e-13)
    lam_arr = np.asarray(lam, dtype=float)
    b_arr = np.asarray(b, dtype=float)
    if m.is_complex:
        lam_b, _ = np.broadcast_arrays(lam_arr[..., None], b_arr)
        lam_b = lam_b[..., 0]
        b_b = np.broadcast_to(b_arr, lam_b.shape + (3,))
    else:
        lam_b, b_b = np.broadcast_arrays(lam_arr, b_arr)
    shape = lam_b.shape
    lam_f = lam_b.reshape(-1)
    b_f = b_b.reshape((-1, 3) if m.is_complex else (-1,))

    def integrand(points):
        g = m.from_chart(points)
        br = horocycle_bracket(m, g[:, None], b_f[None])
        return u(points)[:, None] * np.exp((-1j * lam_f[None] + m.rho) * br)

    res = integrate_over_ball(integrand, support, spec, warn=False)
    if not res.converged:
        raise QuadratureError("Helgason Fourier transform did not converge")
    return np.asarray(res.value).reshape(shape)


# -- c-function -------------------------------------------------------------

_LANCZOS_G = 7.0
_LANCZOS = np.array([
    0.99999999999980993, 676.5203681218851, -1259.1392167224028,
    771.32342877765313, -176.61502916214059, 12.507343278686905,
    -0.13857109526572012, 9.9843695780195716e-6, 1.5056327351493116e-7,
])


def loggamma(z) -> np.ndarray:
    """Complex log-Gamma (Lanczos, g=7); recurrence shifts ``Re z < 1/2`` upward.

    Only ``exp(loggamma)`` is meaningful; the imaginary part is not forced
    onto the principal branch.
    """
    z = np.asarray(z, dtype=complex)
    shift = np.zeros(z.shape, dtype=complex)
    zz = z.copy()
    for _ in range(64):
        low = zz.real < 0.5
        if not low.any():
            break
        if np.any(np.abs(zz[low]) == 0):
            raise ZeroDivisionError("Gamma has a pole at non-positive integers")
        shift[low] -= np.log(zz[low])
        zz[low] += 1
    else:
        raise ValueError("loggamma argument too far into the left half-plane")
    w = zz - 1
    x = _LANCZOS[0] + sum(_LANCZOS[i] / (w + i) for i in range(1, len(_LANCZOS)))
    t = w + _LANCZOS_G + 0.5
    return 0.5 * math.log(2 * math.pi) + (w + 0.5) * np.log(t) - t + np.log(x) + shift


def c_function(lam, model) -> np.ndarray:
    """Harish-Chandra's c-function for the rank-one model.

    ``c(lam) = c0 2^{-i lam} Gamma(i lam) /
    (Gamma(m_a/4 + 1/2 + i lam/2) Gamma(m_a/4 + m_2a/2 + i lam/2))``
    with ``c0 = 2^{m_a/2 + m_2a} Gamma((m_a + m_2a + 1)/2)``.
    """
    p = get_model(model).params
    lam = np.asarray(lam, dtype=float)
    if np.any(lam == 0):
        raise ZeroDivisionError("c(lambda) has a pole at lambda = 0")
    il = 1j * lam
    logc = (
        math.log(p.c0)
        - il * math.log(2.0)
        + loggamma(il)
        - loggamma(p.m_alpha / 4 + 0.5 + il / 2)
        - loggamma(p.m_alpha / 4 + p.m_2alpha / 2 + il / 2)
    )
    return np.exp(logc)


def plancherel_density(lam, model) -> np.ndarray:
    """``|c(lam)|^{-2}``, extended by its limit 0 at ``lam = 0``."""
    lam = np.asarray(lam, dtype=float)
    out = np.zeros(lam.shape)
    nz = lam != 0
    out[nz] = np.abs(c_function(lam[nz], model)) ** -2
    return out


def fourier_inversion(u: Callable, support: HyperbolicBall, z_points, *,
                      lam_max: float = 30.0, n_lambda: int = 121,
                      n_boundary: int = 256, n_radial: int = 48) -> np.ndarray:
    """Reconstruct ``u`` at ``z_points`` from its Helgason transform.

    ``u(z) = |W|^{-1} int int e^{(i lam + rho)<z,b>} u~(lam, b) db |c(lam)|^{-2} dlam``
    truncated to ``|lam| <= lam_max``; the lambda-integral uses Simpson's rule
    on ``n_lambda`` points and ``u~`` is tabulated with a fixed product
    Gauss rule over the support (``n_radial`` nodes per axis).  H^2 only.
    """
    m = get_model(support.model)
    if m.is_complex:
        raise NotImplementedError("fourier_inversion is implemented for H2")
    if n_lambda % 2 == 0:
        raise ValueError("Simpson's rule needs an odd number of lambda points")
    lams = np.linspace(-lam_max, lam_max, n_lambda)
    simpson = np.ones(n_lambda)
    simpson[1:-1:2] = 4
    simpson[2:-1:2] = 2
    simpson *= (lams[1] - lams[0]) / 3
    b_nodes, b_w = boundary_quadrature(m, n_boundary)

    # product Gauss-Legendre rule on the ball: y, then x across the chord
    (ylo, yhi), xlim = support.chart_limits()
    s, ws = np.polynomial.legendre.leggauss(n_radial)
    y = 0.5 * (yhi + ylo) + 0.5 * (yhi - ylo) * s
    wy = 0.5 * (yhi - ylo) * ws
    xl, xh = xlim(y)
    x = 0.5 * (xh + xl)[:, None] + 0.5 * (xh - xl)[:, None] * s[None, :]
    wx = 0.5 * (xh - xl)[:, None] * ws[None, :]
    pts = (x + 1j * y[:, None]).ravel()
    w = (wy[:, None] * wx).ravel() * m.params.x_measure_const / np.imag(pts) ** 2
    uw = u(pts) * w

    br_x = horocycle_bracket(m, m.from_chart(pts)[:, None], b_nodes[None])  # (nx, nb)
    zg = m.from_chart(np.asarray(z_points))
    br_z = horocycle_bracket(m, zg[..., None, :, :], b_nodes)  # (..., nb)
    mu = plancherel_density(lams, m) * m.params.lambda_measure_const * simpson / 2.0
    out = np.zeros(br_z.shape[:-1], dtype=complex)
    for lam, weight in zip(lams, mu):
        if weight == 0:
            continue
        ut = uw @ np.exp((-1j * lam + m.rho) * br_x)  # (nb,)
        out += weight * (np.exp((1j * lam + m.rho) * br_z) @ (ut * b_w))
    return out


# -- principal series ---------------------------------------------------------

def principal_series_apply(g, lam, f: Callable, model) -> Callable:
    """Compact picture ``(pi_lam(g) f)(kM) = f(k(g^{-1}k)M) e^{-(i lam + rho) H(g^{-1}k)}``."""
    m = get_model(model)
    g = np.asarray(g)
    ginv = m.inv(g)

    def out(b):
        from .boundary import boundary_k  # local: avoid cycle at import time

        kb = boundary_k(m, b)
        h = m.mul(ginv, kb)
        weight = np.exp(-(1j * lam + m.rho) * m.iwasawa_H(h))
        return f(boundary_action(m, ginv, b)) * weight

    return out


def l2_norm_boundary(f: Callable, model, n: int = 512) -> float:
    nodes, w = boundary_quadrature(model, n)
    return float(np.sqrt(np.sum(w * np.abs(f(nodes)) ** 2)))


# -- finite-difference Laplacian ---------------------------------------------

def laplacian_fd(phi: Callable, z, h: float = 1e-3, model="h2") -> np.ndarray:
    """Central-difference hyperbolic Laplacian in the half-plane/space chart.

    H^2: ``y^2 (d_xx + d_yy)``; H^3: ``y^2 (d_x1x1 + d_x2x2 + d_yy) - y d_y``.
    """
    if not h > 0:
        raise ValueError("step h must be positive")
    m = get_model(model)
    z = np.asarray(z)
    if not m.is_complex:
        y = np.imag(z)
        c = phi(z)
        dxx = (phi(z + h) - 2 * c + phi(z - h)) / h**2
        dyy = (phi(z + 1j * h) - 2 * c + phi(z - 1j * h)) / h**2
        return y**2 * (dxx + dyy)
    y = z[..., 2]
    c = phi(z)
    total = 0
    for axis in range(3):
        e = np.zeros(3)
        e[axis] = h
        total = total + (phi(z + e) - 2 * c + phi(z - e)) / h**2
    e = np.array([0.0, 0.0, h])
    dy = (phi(z + e) - phi(z - e)) / (2 * h)
    return y**2 * total - y * dy
