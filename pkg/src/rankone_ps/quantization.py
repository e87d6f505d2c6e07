"""Zero-order symbols, Op(a) on Poisson eigenfunctions, and Wigner pairings.

The Wigner pairing is *bilinear*: ``int chi Op(a)phi_j phi_k dx`` with no
complex conjugation.  This matches the convention for real-valued
eigenfunctions; with complex synthetic boundary data a sesquilinear pairing
would not satisfy the intertwining identity with the PS side.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .boundary import canonical_boundary, horocycle_bracket
from .groups import get_model
from .quadrature import QuadratureError, QuadratureSpec
from .regions import HyperbolicBall, integrate_over_ball, smooth_bump
from .transforms import BoundaryDistribution, as_group, boundary_quadrature

__all__ = [
    "Symbol",
    "Cutoff",
    "SYMBOL_FAMILY",
    "make_symbol",
    "op_apply_eigen",
    "wigner_bilinear",
    "wigner_region",
]


@dataclass(frozen=True)
class Symbol:
    """``a(z, lam, b)`` with compact support in ``z``.

    ``fn(z, lam, b)`` takes chart points ``z`` and boundary points ``b`` with
    matching leading shapes and is vectorized.  ``smooth`` is the declared
    differentiability order (``-1`` for ``C^infinity``).
    """

    model: str
    fn: Callable
    z_support: HyperbolicBall
    smooth: int = -1
    name: str = "custom"
    n_check: int = 64

    def __post_init__(self):
        if self.z_support is None:
            raise ValueError("a symbol needs a compact z-support region")
        object.__setattr__(self, "model", get_model(self.model).name)
        self._validate()

    def _validate(self):
        """Sample just outside and inside the support ball."""
        m = get_model(self.model)
        rng = np.random.default_rng(12345)
        center = m.from_chart(self.z_support.center)
        ks = m.random_k(rng, size=self.n_check)
        if m.is_complex:
            b = rng.normal(size=(self.n_check, 3))
        else:
            b = rng.uniform(0, 2 * np.pi, self.n_check)
        b = canonical_boundary(m, b)
        outside = m.to_chart(m.mul(center, ks, m.a(np.full(self.n_check, self.z_support.radius * 1.0001))))
        inside = m.to_chart(m.mul(center, ks, m.a(rng.uniform(0, self.z_support.radius, self.n_check))))
        if np.any(np.abs(self.fn(outside, 1.0, b)) > 0):
            raise ValueError("symbol does not vanish outside its declared z-support")
        vals = self.fn(inside, 1.0, b)
        if not np.all(np.isfinite(vals)):
            raise ValueError("symbol is not bounded on its support")

    def __call__(self, z, lam, b):
        return np.asarray(self.fn(z, lam, b), dtype=complex)

    def on_group(self, g, lam) -> np.ndarray:
        """``a`` at the phase-space point ``gM``, i.e. ``(g.o, g.M)``."""
        from .boundary import sx_coords

        z, b = sx_coords(self.model, g)
        return self(z, lam, b)


@dataclass(frozen=True)
class Cutoff:
    """Window ``chi`` with values in [0, 1] supported in ``support``."""

    model: str
    fn: Callable
    support: HyperbolicBall

    @classmethod
    def bump(cls, model, center, radius) -> "Cutoff":
        ball = HyperbolicBall(get_model(model).name, center, radius)
        return cls(ball.model, lambda z: smooth_bump(ball.distance(z), radius), ball)

    @classmethod
    def plateau(cls, model, center, inner, outer) -> "Cutoff":
        """1 on the ball of radius ``inner``, smooth decay to 0 at ``outer``."""
        ball = HyperbolicBall(get_model(model).name, center, outer)
        return cls(ball.model, lambda z: _plateau(ball.distance(z), inner, outer), ball)

    def __call__(self, z):
        return np.asarray(self.fn(z), dtype=float)


def _smooth_step(s):
    """C^infinity step: 0 for s <= 0, 1 for s >= 1."""
    s = np.asarray(s, dtype=float)

    def psi(x):
        out = np.zeros(x.shape)
        pos = x > 0
        out[pos] = np.exp(-1.0 / x[pos])
        return out

    a, b = psi(s), psi(1.0 - s)
    return a / (a + b)


def _plateau(d, inner, outer):
    return _smooth_step((outer - np.asarray(d)) / (outer - inner))


# -- built-in symbol family ----------------------------------------------------

def _trig_factor(model, b, freq, amp, phase):
    if get_model(model).is_complex:
        b = np.asarray(b)
        # trig polynomial in the polar/azimuthal angles of b
        ang = np.arctan2(b[..., 1], b[..., 0])
        return 1.0 + amp * (b[..., 2] * np.cos(freq * ang + phase) + 0.5 * b[..., 0])
    return 1.0 + amp * np.cos(freq * np.asarray(b) + phase)


def make_symbol(name: str, model, center=None, width: float = 0.6, *,
                freq: int = 1, amp: float = 0.5, phase: float = 0.3,
                inner: float | None = None) -> Symbol:
    """Build a named symbol of the built-in family.

    * ``bump-trig``: ``bump(d(z, c)/width) * (1 + amp cos(freq b + phase))``
    * ``gauss-trig``: Gaussian ``exp(-d^2/(2 (width/3)^2))`` times the bump
      window (so that it is compactly supported), times the same trig factor
    * ``plateau``: ``1`` on ``d < inner`` decaying smoothly to 0 at ``width``,
      independent of ``b`` and ``lam``
    * ``bump-lambda``: ``bump-trig`` times the order-zero factor ``lam/(1+|lam|)``
    """
    m = get_model(model)
    if center is None:
        center = m.origin_chart()
    ball = HyperbolicBall(m.name, center, width)
    if name not in SYMBOL_FAMILY:
        raise ValueError(f"unknown symbol {name!r}; valid: {sorted(SYMBOL_FAMILY)}")

    if name == "bump-trig":
        def fn(z, lam, b):
            return smooth_bump(ball.distance(z), width) * _trig_factor(m, b, freq, amp, phase)
    elif name == "gauss-trig":
        s = width / 3.0

        def fn(z, lam, b):
            d = ball.distance(z)
            return smooth_bump(d, width) * np.exp(-d**2 / (2 * s**2)) * _trig_factor(m, b, freq, amp, phase)
    elif name == "plateau":
        r0 = 0.5 * width if inner is None else inner

        def fn(z, lam, b):
            d = ball.distance(z)
            return _plateau(d, r0, width) * np.ones(np.shape(d))
    else:  # bump-lambda
        def fn(z, lam, b):
            lam_f = lam / (1.0 + abs(lam))
            return lam_f * smooth_bump(ball.distance(z), width) * _trig_factor(m, b, freq, amp, phase)

    return Symbol(m.name, fn, ball, smooth=-1, name=name)


SYMBOL_FAMILY = {
    "bump-trig": "smooth compact bump in z times 1 + amp cos(freq b + phase)",
    "gauss-trig": "windowed Gaussian in z times the trig factor",
    "plateau": "b-independent plateau: 1 near the centre, 0 outside width",
    "bump-lambda": "bump-trig times the order-zero factor lam/(1+|lam|)",
}


# -- operators -------------------------------------------------------------------

def op_apply_eigen(a: Symbol, lam, T: BoundaryDistribution) -> Callable:
    """``z -> int_B a(z, lam, b) e^{(i lam + rho)<z,b>} T(db)``.

    Atoms give a finite sum; a density is integrated with the periodic
    (circle) or product (sphere) rule of ``T.n_quad`` nodes.
    """
    m = get_model(a.model)
    if get_model(T.model) is not m:
        raise ValueError("symbol and boundary distribution belong to different models")
    if T.density is not None:
        nodes, qw = boundary_quadrature(m, T.n_quad)
        dens = np.asarray(T.density(nodes), dtype=complex) * qw
    else:
        nodes = dens = None

    def out(z):
        z = np.asarray(z)
        g = as_group(m, z)
        zc = m.to_chart(g) if z.shape[-2:] == (2, 2) else z
        lead = g.shape[:-2]
        res = np.zeros(lead, dtype=complex)
        for c, b in zip(T.weights, T.points):
            bb = np.broadcast_to(b, lead + np.shape(b))
            res = res + c * a(zc, lam, bb) * np.exp((1j * lam + m.rho) * horocycle_bracket(m, g, b))
        if nodes is not None:
            br = horocycle_bracket(m, g[..., None, :, :], nodes)
            zz = np.broadcast_to(zc[..., None] if not m.is_complex else zc[..., None, :],
                                 lead + (len(nodes),) + ((3,) if m.is_complex else ()))
            bb = np.broadcast_to(nodes, lead + nodes.shape)
            res = res + np.sum(a(zz, lam, bb) * np.exp((1j * lam + m.rho) * br) * dens, axis=-1)
        return res

    return out


def wigner_region(a: Symbol, chi: Cutoff) -> HyperbolicBall:
    """Integration ball: the smaller of the two supports when it is nested."""
    if chi.support.contains_ball(a.z_support):
        return a.z_support
    if a.z_support.contains_ball(chi.support):
        return chi.support
    return a.z_support if a.z_support.radius <= chi.support.radius else chi.support


def wigner_bilinear(a: Symbol, lambda_j, T_j: BoundaryDistribution, lambda_k,
                    T_k: BoundaryDistribution, chi: Cutoff,
                    spec: QuadratureSpec | None = None) -> np.ndarray:
    """``int_X chi(z) Op(a)phi_j(z) phi_k(z) dz`` with ``phi_i = P_{lam_i}(T_i)``.

    ``lambda_j`` and ``lambda_k`` may be equally shaped arrays; all pairs are
    computed as one vector-valued integral over the support ball in
    half-plane/space coordinates.
    """
    from .transforms import poisson_transform

    m = get_model(a.model)
    spec = spec or QuadratureSpec(rel_tol=1e-10, abs_tol=1e-15)
    lj, lk = np.broadcast_arrays(np.atleast_1d(np.asarray(lambda_j, dtype=float)),
                                 np.atleast_1d(np.asarray(lambda_k, dtype=float)))
    region = wigner_region(a, chi)
    scalar = np.ndim(lambda_j) == 0 and np.ndim(lambda_k) == 0

    def integrand(z):
        w = chi(z)
        cols = []
        for x, y in zip(lj, lk):
            cols.append(w * op_apply_eigen(a, x, T_j)(z) * poisson_transform(T_k, y)(z))
        return np.stack(cols, axis=-1)

    res = integrate_over_ball(integrand, region, spec, warn=False)
    if not res.converged:
        raise QuadratureError("Wigner pairing quadrature did not converge")
    val = np.asarray(res.value)
    return complex(val[0]) if scalar else val
