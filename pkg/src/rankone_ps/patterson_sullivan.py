"""Intermediate values, Radon transforms, L_lambda and PS pairings.

Phase-space functions live on ``G/M`` and are evaluated on batched group
elements.  Compact support is tracked as a ball in ``X`` together with
the right translations applied so far, so every geodesic and horocycle
integral below runs over exact, finite limits.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Callable

import numpy as np

from .boundary import DiagonalError, chordal_distance, geodesic_frame, sx_coords
from .groups import get_model
from .quadrature import (
    QuadratureError,
    QuadratureSpec,
    integrate_batch,
    integrate_iterated,
)
from .regions import HyperbolicBall, integrate_frame_ball

__all__ = [
    "PhaseSpaceFunction",
    "LTransform",
    "infer_model",
    "symbol_function",
    "d_lambda",
    "d_lambda_mu",
    "d_lambda_pair",
    "radon",
    "radon_frame",
    "weighted_radon",
    "weighted_radon_frame",
    "l_lambda",
    "ps_pairing",
]

DEFAULT_SPEC = QuadratureSpec(rel_tol=1e-11, abs_tol=1e-15)


def infer_model(g, model=None):
    """Model from an explicit name, else from the dtype (complex -> H^3)."""
    if model is not None:
        return get_model(model)
    return get_model("h3" if np.iscomplexobj(g) else "h2")


@dataclass(frozen=True)
class PhaseSpaceFunction:
    """``f(g)`` on ``G/M`` supported where ``g a_{shift} . o`` lies in ``support``.

    Right translation by ``w`` fixes ``o`` and only flips ``shift``.
    """

    model: str
    fn: Callable
    support: HyperbolicBall | None
    shift: float = 0.0
    name: str = "f"

    def __post_init__(self):
        object.__setattr__(self, "model", get_model(self.model).name)

    def __call__(self, g) -> np.ndarray:
        return np.asarray(self.fn(np.asarray(g)), dtype=complex)

    def flow(self, s: float) -> "PhaseSpaceFunction":
        """``g -> f(g a_s)``."""
        m = get_model(self.model)
        a_s = m.a(s)
        return PhaseSpaceFunction(self.model, lambda g: self.fn(m.mul(g, a_s)), self.support,
                                  self.shift + s, f"{self.name}.flow({s:g})")

    def reverse(self) -> "PhaseSpaceFunction":
        """``g -> f(g w)``; ``w a_s = a_{-s} w`` flips the recorded shift."""
        m = get_model(self.model)
        w = m.weyl()
        return PhaseSpaceFunction(self.model, lambda g: self.fn(m.mul(g, w)), self.support,
                                  -self.shift, f"{self.name}.reverse")

    def translate(self, gamma) -> "PhaseSpaceFunction":
        """``g -> f(gamma g)``; the support ball moves by ``gamma^{-1}``."""
        m = get_model(self.model)
        gamma = np.asarray(gamma)
        ball = self.support
        if ball is not None:
            c = m.to_chart(m.mul(m.inv(gamma), m.from_chart(ball.center)))
            ball = replace(ball, center=c)
        return PhaseSpaceFunction(self.model, lambda g: self.fn(m.mul(gamma, g)), ball,
                                  self.shift, f"{self.name}.translate")

    def check_m_invariance(self, seed=0, n: int = 16, tol: float = 1e-10) -> bool:
        m = get_model(self.model)
        rng = np.random.default_rng(seed)
        c = m.from_chart(self.support.center) if self.support is not None else m.identity()
        r = self.support.radius if self.support is not None else 1.0
        g = m.mul(c, m.random_k(rng, size=n), m.a(rng.uniform(0, r, n)), m.random_k(rng, size=n))
        f0 = self(g)
        f1 = self(m.mul(g, m.random_m(rng, size=n)))
        return bool(np.all(np.abs(f1 - f0) <= tol * (1 + np.abs(f0))))


def symbol_function(symbol, lam=1.0, cutoff=None) -> PhaseSpaceFunction:
    """``chi a`` as a function on ``G/M``: ``g -> chi(g.o) a(g.o, lam, g.M)``."""
    m = get_model(symbol.model)
    support = symbol.z_support
    if cutoff is not None and cutoff.support.radius < support.radius and \
            support.contains_ball(cutoff.support):
        support = cutoff.support

    def fn(g):
        z, b = sx_coords(m, g)
        val = symbol(z, lam, b)
        if cutoff is not None:
            val = val * cutoff(z)
        return val

    return PhaseSpaceFunction(m.name, fn, support, 0.0, f"chi*{symbol.name}")


# -- intermediate values -----------------------------------------------------------

def d_lambda_mu(g, lam, mu, model=None) -> np.ndarray:
    """``e^{(i lam + rho) H(g)} e^{(i mu + rho) H(g w)}``; broadcasts ``lam``, ``mu``
    over trailing axes appended to the batch shape of ``g``."""
    m = infer_model(g, model)
    g = np.asarray(g)
    hg = m.iwasawa_H(g)
    hgw = m.iwasawa_H(m.mul(g, m.weyl()))
    lam = np.asarray(lam, dtype=float)
    mu = np.asarray(mu, dtype=float)
    if lam.ndim or mu.ndim:
        hg = hg[..., None]
        hgw = hgw[..., None]
    return np.exp((1j * lam + m.rho) * hg + (1j * mu + m.rho) * hgw)


def d_lambda(g, lam, model=None) -> np.ndarray:
    """``d_lam(g MA) = e^{(i lam + rho)(H(g) + H(g w))}``."""
    return d_lambda_mu(g, lam, lam, model)


def d_lambda_pair(b, b_prime, lam, model) -> np.ndarray:
    """``d_lam(b, b')`` through the geodesic frame of the pair."""
    m = get_model(model)
    return d_lambda(geodesic_frame(m, b, b_prime).g, lam, m)


# -- Radon transforms --------------------------------------------------------------

def _geodesic_t_range(m, f: PhaseSpaceFunction, g):
    """``t`` with ``g a_{t + shift} . o`` in the support ball, or None if empty."""
    ball = f.support
    moved = m.to_chart(m.mul(m.inv(g), m.from_chart(ball.center)))
    xc, yc, r, _ = ball._euclid(moved)
    off = float(np.sum(np.abs(xc) ** 2))
    if off >= r**2:
        return None
    h = np.sqrt(r**2 - off)
    return float(np.log(yc - h)) - f.shift, float(np.log(yc + h)) - f.shift


def _frame_1d(m, integrand_t, t_range, spec):
    """Vector-valued 1D adaptive integral over ``t_range``."""

    def fn(t, idx):
        return integrand_t(t)

    res = integrate_batch(fn, t_range[0], t_range[1], spec, initial_panels=4, warn=False)
    if not res.converged.all():
        raise QuadratureError("Radon quadrature did not converge")
    return res.value[0]


def radon_frame(f: PhaseSpaceFunction, g, spec: QuadratureSpec | None = None) -> complex:
    """``int_A f(g a) da`` for the frame representative ``g``."""
    return weighted_radon_frame(f, None, None, g, spec)


def radon(f: PhaseSpaceFunction, b, b_prime, spec: QuadratureSpec | None = None) -> complex:
    """``Rf(b, b') = int_A f(g(b, b') a M) da``."""
    m = get_model(f.model)
    return radon_frame(f, geodesic_frame(m, b, b_prime).g, spec)


def weighted_radon_frame(f, lam, mu, g, spec: QuadratureSpec | None = None):
    """``int_A d_{lam,mu}(g a) f(g a) da`` (plain Radon when ``lam`` is None).

    ``lam`` and ``mu`` may be equally shaped 1-D arrays; the result then has
    the same shape.  ``LTransform`` arguments are integrated over ``A x N``
    in one iterated quadrature.
    """
    m = get_model(f.model)
    spec = spec or DEFAULT_SPEC
    g = np.asarray(g)
    vector = lam is not None and (np.ndim(lam) or np.ndim(mu))
    if isinstance(f, LTransform):
        return f.weighted_radon_frame(lam, mu, g, spec)
    if f.support is None:
        raise ValueError("Radon transform needs a compactly supported phase-space function")
    tr = _geodesic_t_range(m, f, g)
    if tr is None:
        n = np.broadcast(np.asarray(lam), np.asarray(mu)).size if vector else 1
        return np.zeros(n, dtype=complex) if vector else 0j

    def integrand(t):
        ga = m.mul(g, m.a(t))
        vals = f(ga)
        if lam is None:
            return vals
        d = d_lambda_mu(ga, lam, mu, m)
        return d * (vals[:, None] if vector else vals)

    val = _frame_1d(m, integrand, tr, spec) * m.params.a_measure_const
    return val if vector else complex(val)


def weighted_radon(f, lam, mu, b, b_prime, spec: QuadratureSpec | None = None):
    """``R_{lam,mu} f(b, b')``."""
    m = get_model(f.model)
    return weighted_radon_frame(f, lam, mu, geodesic_frame(m, b, b_prime).g, spec)


# -- L_lambda -----------------------------------------------------------------------

def _n_weight(m, lam, n):
    """``e^{-(i lam + rho) H(n w)}`` via the Iwasawa projection."""
    h = m.iwasawa_H(m.mul(m.n(n), m.weyl()))
    lam = np.asarray(lam, dtype=float)
    if lam.ndim:
        h = h[..., None]
    return np.exp(-(1j * lam + m.rho) * h)


def _horocycle_limits(m, ball: HyperbolicBall, g):
    """Region of ``n`` with ``g n . o`` in the ball: a disk in the N-chart."""
    moved = m.to_chart(m.mul(m.inv(g), m.from_chart(ball.center)))
    xc, yc, r, _ = ball._euclid(moved)
    rad2 = r**2 - (1.0 - yc) ** 2
    return xc, rad2


def l_lambda(a_chi: PhaseSpaceFunction, lam, g, spec: QuadratureSpec | None = None):
    """``L_lam a(g) = int_N e^{-(i lam + rho) H(n w)} a(g n) dn`` for batched ``g``.

    H^2: ``(1/pi) int (1+u^2)^{-(i lam + rho)} a(g n_u) du`` over the
    window where ``g n_u . o`` meets the support; H^3 integrates over the
    corresponding disk in ``N = C``.
    """
    m = get_model(a_chi.model)
    spec = spec or DEFAULT_SPEC
    if a_chi.support is None or a_chi.shift != 0:
        raise ValueError("l_lambda needs a z-supported phase-space function with no A-shift")
    g = np.asarray(g)
    batch = g.shape[:-2]
    gf = g.reshape((-1, 2, 2))
    out = []
    const = m.params.n_bar_measure_const
    for gi in gf:
        xc, rad2 = _horocycle_limits(m, a_chi.support, gi)
        if rad2 <= 0:
            out.append(np.zeros(np.shape(lam), dtype=complex))
            continue
        rad = np.sqrt(rad2)
        if not m.is_complex:
            def fn(u, idx, gi=gi):
                vals = a_chi(m.mul(gi, m.n(u)))
                w = _n_weight(m, lam, u)
                return w * (vals[:, None] if np.ndim(lam) else vals)

            res = integrate_batch(fn, xc - rad, xc + rad, spec, initial_panels=4, warn=False)
            val, ok = res.value[0], bool(res.converged.all())
        else:
            def fn(u1, u2, gi=gi):
                n = u1 + 1j * u2
                vals = a_chi(m.mul(gi, m.n(n)))
                w = _n_weight(m, lam, n)
                return w * (vals[:, None] if np.ndim(lam) else vals)

            lim = [
                (xc[0] - rad, xc[0] + rad),
                lambda u1: (xc[1] - np.sqrt(np.clip(rad2 - (u1 - xc[0]) ** 2, 0, None)),
                            xc[1] + np.sqrt(np.clip(rad2 - (u1 - xc[0]) ** 2, 0, None))),
            ]
            res = integrate_iterated(fn, lim, spec, warn=False)
            val, ok = res.value, res.converged
        if not ok:
            raise QuadratureError("L_lambda quadrature did not converge")
        out.append(const * np.asarray(val))
    out = np.asarray(out)
    return out.reshape(batch + out.shape[1:])


@dataclass(frozen=True)
class LTransform(PhaseSpaceFunction):
    """``L_lam(base)`` as a phase-space function.

    Evaluation calls :func:`l_lambda`.  Radon-type integrals of an
    ``LTransform`` are computed as one iterated ``A x N`` integral over the
    exact region where ``g a n . o`` meets the support of ``base``.
    """

    base: PhaseSpaceFunction | None = None
    lam: object = 0.0
    spec: QuadratureSpec = field(default=DEFAULT_SPEC)

    def flow(self, s):
        raise NotImplementedError("translate the base function instead")

    reverse = translate = flow

    @classmethod
    def of(cls, base: PhaseSpaceFunction, lam, spec: QuadratureSpec | None = None) -> "LTransform":
        if base.support is None or base.shift != 0:
            raise ValueError("L_lambda needs a z-supported base with no A-shift")
        spec = spec or DEFAULT_SPEC
        return cls(base.model, lambda g: l_lambda(base, lam, g, spec), base.support, 0.0,
                   f"L({base.name})", base=base, lam=lam, spec=spec)

    def weighted_radon_frame(self, lam, mu, g, spec):
        m = get_model(self.model)
        lam_l = np.asarray(self.lam, dtype=float)
        vector = lam_l.ndim or (lam is not None and (np.ndim(lam) or np.ndim(mu)))

        def h(ga_n, t, n):
            vals = self.base(ga_n)
            w = _n_weight(m, lam_l, n)
            if vector:
                vals = vals[:, None]
            out = vals * w
            if lam is not None:
                ga = m.mul(g, m.a(t))
                out = out * d_lambda_mu(ga, lam, mu, m)
            return out

        res = integrate_frame_ball(h, g, self.support, spec, with_coords=True, warn=False)
        if not res.converged:
            raise QuadratureError("A x N quadrature did not converge")
        val = np.asarray(res.value)
        return val if vector else complex(val)


# -- PS pairings ----------------------------------------------------------------------

def ps_pairing(f, lambda_j, T_j, lambda_k, T_k, spec: QuadratureSpec | None = None,
               normalization: complex = 1.0):
    """``sum_{i,l} c_i c'_l R_{lam_j,lam_k} f(b_i, b'_l)`` for atomic data.

    ``normalization`` is a manual scalar applied to the result (no lattice is
    available to normalize against).  ``lambda_j``/``lambda_k`` may be
    equally shaped 1-D arrays.
    """
    m = get_model(f.model)
    if not (T_j.is_atomic and T_k.is_atomic):
        raise ValueError("PS pairings are implemented for atomic boundary data")
    bi = T_j.points
    bl = T_k.points
    ii, ll = np.meshgrid(np.arange(len(bi)), np.arange(len(bl)), indexing="ij")
    ii, ll = ii.ravel(), ll.ravel()
    if np.any(chordal_distance(m, bi[ii], bl[ll]) < 1e-10):
        raise DiagonalError("an atom pair lies on the diagonal of B x B")
    total = 0
    for i, l in zip(ii, ll):
        g = geodesic_frame(m, bi[i], bl[l]).g
        total = total + T_j.weights[i] * T_k.weights[l] * weighted_radon_frame(
            f, lambda_j, lambda_k, g, spec)
    return normalization * total
