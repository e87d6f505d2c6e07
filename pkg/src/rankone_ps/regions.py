"""Compact regions of X used as supports, and integration over them.

A hyperbolic ball is a Euclidean ball in the half-plane/space chart (centre
``(x0, y0 cosh R)``, radius ``y0 sinh R``), which gives exact iterated
integration limits in two coordinate systems:

* chart coordinates ``(y, x)`` / ``(y, x1, x2)`` with the Riemannian volume
  ``y^{-dim} dx dy``;
* frame coordinates ``(t, n)`` of points ``g a_t n . o`` for a fixed ``g``,
  with the Haar measure ``dt dn``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .groups import get_model
from .quadrature import QuadratureSpec, QuadResult, integrate_iterated

__all__ = ["HyperbolicBall", "smooth_bump", "integrate_over_ball", "integrate_frame_ball"]


def smooth_bump(d, radius):
    """``exp(1 - 1/(1 - (d/R)^2))`` inside the ball, 0 outside; equals 1 at d=0."""
    d = np.asarray(d, dtype=float)
    r2 = (d / radius) ** 2
    inside = r2 < 1
    out = np.zeros(d.shape)
    out[inside] = np.exp(1.0 - 1.0 / (1.0 - r2[inside]))
    return out


@dataclass(frozen=True)
class HyperbolicBall:
    model: str
    center: object  # chart point
    radius: float

    def __post_init__(self):
        if not self.radius > 0:
            raise ValueError("ball radius must be positive")
        m = get_model(self.model)
        c = np.asarray(self.center)
        if m.is_complex:
            if c.shape != (3,) or c[2] <= 0:
                raise ValueError("H3 ball centre must be (x1, x2, y) with y > 0")
        elif not (np.ndim(c) == 0 and np.imag(c) > 0):
            raise ValueError("H2 ball centre must be a complex number in the upper half-plane")

    @property
    def _m(self):
        return get_model(self.model)

    def distance(self, points):
        return self._m.distance(points, self.center)

    def contains(self, points):
        return self.distance(points) < self.radius

    def contains_ball(self, other: "HyperbolicBall") -> bool:
        d = float(self._m.distance(other.center, self.center))
        return d + other.radius <= self.radius + 1e-12

    def _euclid(self, center):
        """(horizontal centre, euclidean centre height, euclidean radius, y0)."""
        m = self._m
        c = np.asarray(center)
        if m.is_complex:
            xc, y0 = c[..., :2], c[..., 2]
        else:
            xc, y0 = np.real(c), np.imag(c)
        return xc, y0 * np.cosh(self.radius), y0 * np.sinh(self.radius), y0

    def chart_limits(self):
        """Iterated limits ``[y, x]`` (H^2) or ``[y, x1, x2]`` (H^3)."""
        xc, yc, r, y0 = self._euclid(self.center)
        ylo, yhi = y0 * np.exp(-self.radius), y0 * np.exp(self.radius)

        def half1(y):
            return np.sqrt(np.clip(r**2 - (y - yc) ** 2, 0, None))

        if not self._m.is_complex:
            return [(ylo, yhi), lambda y: (xc - half1(y), xc + half1(y))]

        def half2(y, x1):
            return np.sqrt(np.clip(r**2 - (y - yc) ** 2 - (x1 - xc[0]) ** 2, 0, None))

        return [
            (ylo, yhi),
            lambda y: (xc[0] - half1(y), xc[0] + half1(y)),
            lambda y, x1: (xc[1] - half2(y, x1), xc[1] + half2(y, x1)),
        ]

    def frame_limits(self, g):
        """Iterated limits ``[t, n...]`` covering ``{(t, n): g a_t n . o in ball}``."""
        m = self._m
        moved = m.to_chart(m.mul(m.inv(g), m.from_chart(self.center)))
        xc, yc, r, y0 = self._euclid(moved)
        tlo, thi = np.log(y0) - self.radius, np.log(y0) + self.radius

        def half1(t):
            y = np.exp(t)
            return np.sqrt(np.clip(r**2 - (y - yc) ** 2, 0, None))

        if not m.is_complex:
            return [(tlo, thi), lambda t: ((xc - half1(t)) * np.exp(-t), (xc + half1(t)) * np.exp(-t))]

        def half2(t, u1):
            y = np.exp(t)
            return np.sqrt(np.clip(r**2 - (y - yc) ** 2 - (u1 * y - xc[0]) ** 2, 0, None))

        return [
            (tlo, thi),
            lambda t: ((xc[0] - half1(t)) * np.exp(-t), (xc[0] + half1(t)) * np.exp(-t)),
            lambda t, u1: ((xc[1] - half2(t, u1)) * np.exp(-t), (xc[1] + half2(t, u1)) * np.exp(-t)),
        ]


def integrate_over_ball(f, ball: HyperbolicBall, spec: QuadratureSpec | None = None, **kw) -> QuadResult:
    """``int_X f(z) dx`` over the ball in chart coordinates; ``dx`` as in :mod:`groups`.

    ``f`` takes an array of chart points and may return extra trailing axes.
    """
    m = get_model(ball.model)
    const = m.params.x_measure_const
    dim = m.params.dim_X

    if m.is_complex:
        def g(y, x1, x2):
            vals = np.asarray(f(np.stack([x1, x2, y], axis=-1)))
            return const * vals / (y**dim).reshape((-1,) + (1,) * (vals.ndim - 1))
    else:
        def g(y, x):
            vals = np.asarray(f(x + 1j * y))
            return const * vals / (y**dim).reshape((-1,) + (1,) * (vals.ndim - 1))

    return integrate_iterated(g, ball.chart_limits(), spec, **kw)


def integrate_frame_ball(f, g0, ball: HyperbolicBall, spec: QuadratureSpec | None = None,
                         *, with_coords: bool = False, **kw) -> QuadResult:
    """``int_A int_N f(g0 a_t n) dn dt`` restricted to ``g0 a_t n . o`` in ``ball``.

    ``f`` receives batched group elements ``g0 a_t n`` (and ``t``, ``n`` when
    ``with_coords`` is set).
    """
    m = get_model(ball.model)
    const = m.params.n_bar_measure_const * m.params.a_measure_const

    def call(t, n):
        g = m.mul(g0, m.a(t), m.n(n))
        return const * np.asarray(f(g, t, n) if with_coords else f(g))

    if m.is_complex:
        def h(t, u1, u2):
            return call(t, u1 + 1j * u2)
    else:
        def h(t, u):
            return call(t, u)

    return integrate_iterated(h, ball.frame_limits(g0), spec, **kw)
