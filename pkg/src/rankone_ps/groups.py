"""The two rank-one group models: SL(2,R) on H^2 and SL(2,C) on H^3.

Group elements are plain numpy arrays of shape ``(..., 2, 2)``; every
operation is batched over the leading axes.  Conventions (shared by the whole
package):

* ``a_t = diag(e^{t/2}, e^{-t/2})`` so that ``a_t . o`` is at distance ``|t|``
  from the origin (curvature -1) and ``rho = 1/2`` (H^2) or ``1`` (H^3).
* ``n_x = [[1, x], [0, 1]]``; ``x`` is real for H^2 and complex for H^3.
* Iwasawa ``g = k(g) exp(H(g) H_0) n(g)`` with ``H(g) = log |g e_1|^2``.
* ``w = [[0, -1], [1, 0]]``.
* Haar measures: ``dk`` and ``dk_M`` have mass 1, ``da = dt``, and
  ``dn = dn_bar = (Lebesgue)/pi`` so that the N-bar integral of
  ``exp(-2 rho H)`` is 1.  With ``dx = da dn`` the volume on X is the
  Riemannian volume divided by pi.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

__all__ = [
    "ModelParams",
    "IwasawaCoords",
    "GroupModel",
    "H2",
    "H3",
    "get_model",
    "NotUnimodularError",
]


class NotUnimodularError(ValueError):
    pass


@dataclass(frozen=True)
class ModelParams:
    name: str
    m_alpha: int
    m_2alpha: int
    rho: float
    dim_N: int
    c0: float
    n_bar_measure_const: float
    # dx = x_measure_const * Riemannian volume element
    x_measure_const: float
    a_measure_const: float = 1.0
    # dual normalization of d(lambda) so that Euclidean Fourier on A inverts with no constant
    lambda_measure_const: float = 1.0 / (2.0 * math.pi)

    @property
    def dim_X(self) -> int:
        return 1 + self.dim_N


def _c0(m_alpha: int, m_2alpha: int) -> float:
    return 2.0 ** (0.5 * m_alpha + m_2alpha) * math.gamma(0.5 * (m_alpha + m_2alpha) + 0.5)


@dataclass(frozen=True)
class IwasawaCoords:
    """Batched ``(k, t, n)`` with ``g = k @ a(t) @ n_(n)``."""

    k: np.ndarray
    t: np.ndarray
    n: np.ndarray


class GroupModel:
    """Matrix algebra, Iwasawa decomposition and charts for one model."""

    def __init__(self, params: ModelParams, dtype):
        self.params = params
        self.dtype = np.dtype(dtype)
        self.name = params.name

    def __repr__(self):
        return f"GroupModel({self.name!r})"

    def __reduce__(self):
        return (get_model, (self.name,))

    @property
    def rho(self) -> float:
        return self.params.rho

    @property
    def is_complex(self) -> bool:
        return self.dtype.kind == "c"

    # -- basic elements -------------------------------------------------
    def identity(self, shape=()) -> np.ndarray:
        out = np.zeros(tuple(shape) + (2, 2), dtype=self.dtype)
        out[..., 0, 0] = 1
        out[..., 1, 1] = 1
        return out

    def a(self, t) -> np.ndarray:
        t = np.asarray(t, dtype=float)
        out = np.zeros(t.shape + (2, 2), dtype=self.dtype)
        out[..., 0, 0] = np.exp(t / 2)
        out[..., 1, 1] = np.exp(-t / 2)
        return out

    def n(self, x) -> np.ndarray:
        x = self._n_coord(x)
        out = self.identity(x.shape)
        out[..., 0, 1] = x
        return out

    def nbar(self, x) -> np.ndarray:
        x = self._n_coord(x)
        out = self.identity(x.shape)
        out[..., 1, 0] = x
        return out

    def weyl(self) -> np.ndarray:
        """Weyl element ``w``: ``w a_t w^{-1} = a_{-t}``, ``w^2 = -I`` in M."""
        return np.array([[0, -1], [1, 0]], dtype=self.dtype)

    def m(self, phase) -> np.ndarray:
        """Element of M: ``+-I`` for H^2 (phase 0 or pi), ``diag(e^{i p}, e^{-i p})`` for H^3."""
        phase = np.asarray(phase, dtype=float)
        if self.is_complex:
            out = np.zeros(phase.shape + (2, 2), dtype=complex)
            out[..., 0, 0] = np.exp(1j * phase)
            out[..., 1, 1] = np.exp(-1j * phase)
            return out
        sign = np.where(np.cos(phase) >= 0, 1.0, -1.0)
        return sign[..., None, None] * self.identity(phase.shape)

    def _n_coord(self, x) -> np.ndarray:
        x = np.asarray(x)
        if self.is_complex:
            if x.shape[-1:] == (2,) and x.dtype.kind != "c":
                x = x[..., 0] + 1j * x[..., 1]
            return x.astype(complex)
        if x.dtype.kind == "c":
            raise TypeError("H2 N-coordinates are real")
        return x.astype(float)

    # -- algebra ---------------------------------------------------------
    @staticmethod
    def mul(*gs) -> np.ndarray:
        out = gs[0]
        for g in gs[1:]:
            out = np.matmul(out, g)
        return out

    @staticmethod
    def inv(g) -> np.ndarray:
        out = np.empty_like(g)
        out[..., 0, 0] = g[..., 1, 1]
        out[..., 1, 1] = g[..., 0, 0]
        out[..., 0, 1] = -g[..., 0, 1]
        out[..., 1, 0] = -g[..., 1, 0]
        return out

    @staticmethod
    def det(g) -> np.ndarray:
        return g[..., 0, 0] * g[..., 1, 1] - g[..., 0, 1] * g[..., 1, 0]

    def renormalize(self, g) -> np.ndarray:
        d = self.det(g)
        if not self.is_complex:
            d = np.abs(d)
        return g / np.sqrt(d)[..., None, None]

    def check(self, g, tol: float = 1e-9) -> np.ndarray:
        g = np.asarray(g)
        if g.shape[-2:] != (2, 2):
            raise ValueError(f"expected (..., 2, 2) matrices, got shape {g.shape}")
        if not self.is_complex and np.iscomplexobj(g) and np.any(np.imag(g) != 0):
            raise TypeError("H2 elements must be real")
        scale = np.maximum(1.0, np.sum(np.abs(g) ** 2, axis=(-2, -1)))
        bad = np.abs(self.det(g) - 1) > tol * scale
        if np.any(bad):
            raise NotUnimodularError(f"det != 1 (max deviation {np.max(np.abs(self.det(g) - 1)):.3e})")
        return g.astype(self.dtype, copy=False)

    # -- Iwasawa -----------------------------------------------------------
    def iwasawa_kan(self, g, *, check: bool = True) -> IwasawaCoords:
        """KAN decomposition via the Gram identity ``g^H g = n^H a^2 n``."""
        if check:
            g = self.check(g)
        g11, g21 = g[..., 0, 0], g[..., 1, 0]
        g12, g22 = g[..., 0, 1], g[..., 1, 1]
        et = np.abs(g11) ** 2 + np.abs(g21) ** 2
        t = np.log(et)
        ncoord = (np.conj(g11) * g12 + np.conj(g21) * g22) / et
        if not self.is_complex:
            ncoord = np.real(ncoord)
        s = np.sqrt(et)
        k = np.empty(g.shape, dtype=np.result_type(g.dtype, self.dtype))
        k[..., 0, 0] = g11 / s
        k[..., 1, 0] = g21 / s
        k[..., 0, 1] = (g12 - ncoord * g11) * s
        k[..., 1, 1] = (g22 - ncoord * g21) * s
        return IwasawaCoords(k=k, t=t, n=ncoord)

    def iwasawa_H(self, g, *, check: bool = False) -> np.ndarray:
        """A-coordinate ``H(g) = log(|g_11|^2 + |g_21|^2)``."""
        if check:
            g = self.check(g)
        return np.log(np.abs(g[..., 0, 0]) ** 2 + np.abs(g[..., 1, 0]) ** 2)

    def iwasawa_k(self, g) -> np.ndarray:
        return self.iwasawa_kan(g, check=False).k

    def canonical_k(self, k) -> np.ndarray:
        """Representative of ``kM`` whose first-column leading entry is real positive."""
        k = np.array(k, dtype=self.dtype, copy=True)
        lead = np.where(np.abs(k[..., 0, 0]) > 1e-14, k[..., 0, 0], k[..., 1, 0])
        if self.is_complex:
            phase = np.conj(lead) / np.abs(lead)
            k[..., :, 0] *= phase[..., None]
            k[..., :, 1] *= np.conj(phase)[..., None]
        else:
            sign = np.where(lead < 0, -1.0, 1.0)
            k *= sign[..., None, None]
        return k

    # -- K and random elements -------------------------------------------
    def k_from_angles(self, angles) -> np.ndarray:
        """Rotation in K.

        H^2: ``angles`` is phi, ``k = [[cos, sin], [-sin, cos]]`` (acts on the
        boundary circle as rotation by ``2 phi``).  H^3: ``angles[..., :3]`` are
        Euler angles ``(alpha, beta, gamma)`` of SU(2).
        """
        angles = np.asarray(angles, dtype=float)
        if not self.is_complex:
            c, s = np.cos(angles), np.sin(angles)
            out = np.empty(angles.shape + (2, 2))
            out[..., 0, 0] = c
            out[..., 0, 1] = s
            out[..., 1, 0] = -s
            out[..., 1, 1] = c
            return out
        al, be, ga = angles[..., 0], angles[..., 1], angles[..., 2]
        c, s = np.cos(be / 2), np.sin(be / 2)
        ea, eg = np.exp(0.5j * al), np.exp(0.5j * ga)
        out = np.empty(angles.shape[:-1] + (2, 2), dtype=complex)
        out[..., 0, 0] = ea * c * eg
        out[..., 0, 1] = ea * s / eg
        out[..., 1, 0] = -s * eg / ea
        out[..., 1, 1] = c / (ea * eg)
        return out

    def random_element(self, seed, radius: float = 1.0, size=None) -> np.ndarray:
        """Reproducible ``g = n_x a_t k`` with all coordinates uniform in ``[-radius, radius]``."""
        if radius < 0:
            raise ValueError("radius must be >= 0")
        rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
        shape = () if size is None else tuple(np.atleast_1d(size))
        u = lambda *extra: rng.uniform(-radius, radius, size=shape + extra) if radius > 0 else np.zeros(shape + extra)
        t = u()
        if self.is_complex:
            x = u(2)
            ang = u(3)
        else:
            x = u()
            ang = u()
        g = self.mul(self.n(x), self.a(t), self.k_from_angles(ang))
        return self.renormalize(g)

    def random_k(self, seed, size=None) -> np.ndarray:
        rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
        shape = () if size is None else tuple(np.atleast_1d(size))
        if self.is_complex:
            ang = rng.uniform(0, 2 * np.pi, size=shape + (3,))
            ang[..., 1] = np.arccos(rng.uniform(-1, 1, size=shape))
        else:
            ang = rng.uniform(0, 2 * np.pi, size=shape)
        return self.k_from_angles(ang)

    def random_m(self, seed, size=None) -> np.ndarray:
        rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
        shape = () if size is None else tuple(np.atleast_1d(size))
        if self.is_complex:
            return self.m(rng.uniform(0, 2 * np.pi, size=shape))
        return self.m(np.pi * rng.integers(0, 2, size=shape))

    # -- space points --------------------------------------------------------
    def to_chart(self, g) -> np.ndarray:
        """Coordinates of ``g . o`` in the upper half-plane / half-space.

        H^2 returns complex ``z``; H^3 returns ``(..., 3)`` arrays ``(x1, x2, y)``.
        """
        p = np.matmul(g, np.conj(np.swapaxes(g, -1, -2)))
        p22 = np.real(p[..., 1, 1])
        y = 1.0 / p22
        z = p[..., 0, 1] / p22
        if self.is_complex:
            return np.stack([np.real(z), np.imag(z), y], axis=-1)
        return np.real(z) + 1j * y

    def from_chart(self, point) -> np.ndarray:
        """Group element ``n_x a_t`` carrying ``o`` to the given chart point."""
        point = np.asarray(point)
        if self.is_complex:
            x = point[..., 0] + 1j * point[..., 1]
            y = point[..., 2]
        else:
            x, y = np.real(point), np.imag(point)
        if np.any(y <= 0):
            raise ValueError("chart point must have positive height")
        return self.mul(self.n(x), self.a(np.log(y)))

    def distance(self, p, q) -> np.ndarray:
        """Hyperbolic distance between chart points."""
        p, q = np.asarray(p), np.asarray(q)
        if self.is_complex:
            num = np.sum((p - q) ** 2, axis=-1)
            den = 2 * p[..., 2] * q[..., 2]
        else:
            num = np.abs(p - q) ** 2
            den = 2 * np.imag(p) * np.imag(q)
        return np.arccosh(1 + num / den)

    def origin_chart(self):
        return np.array([0.0, 0.0, 1.0]) if self.is_complex else 1j


H2 = GroupModel(
    ModelParams(name="h2", m_alpha=1, m_2alpha=0, rho=0.5, dim_N=1, c0=_c0(1, 0),
                n_bar_measure_const=1.0 / math.pi, x_measure_const=1.0 / math.pi),
    float,
)
H3 = GroupModel(
    ModelParams(name="h3", m_alpha=2, m_2alpha=0, rho=1.0, dim_N=2, c0=_c0(2, 0),
                n_bar_measure_const=1.0 / math.pi, x_measure_const=1.0 / math.pi),
    complex,
)
_MODELS = {"h2": H2, "h3": H3}


def get_model(model) -> GroupModel:
    if isinstance(model, GroupModel):
        return model
    try:
        return _MODELS[str(model).lower()]
    except KeyError:
        raise ValueError(f"unknown model {model!r}; valid: {sorted(_MODELS)}") from None
