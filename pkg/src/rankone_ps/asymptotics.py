"""Stationary phase for ``L_lam``.

In the chart ``n -> n`` of ``N`` the weight of ``L_lam`` is
``exp(-(i lam + rho) psi(n))`` with ``psi(n) = H(n w) = log(1 + |n|^2)``.
The only critical point is ``n = 0`` with Hessian ``2 I_s``.  Since the
phase enters as ``-lam psi``, the leading term is

    L_lam a(g) ~ C (2 pi / lam)^{s/2} c_N a(g),
    C = |det 2I|^{-1/2} exp(-i pi s / 4),

where ``c_N`` is the constant in ``dn = c_N (Lebesgue)``.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np

from .groups import get_model
from .patterson_sullivan import PhaseSpaceFunction, l_lambda
from .quadrature import QuadratureSpec

__all__ = [
    "MspLeading",
    "MspRateFit",
    "IllConditionedError",
    "phase_hessian",
    "phase_hessian_fd",
    "msp_leading",
    "msp_rate_fit",
    "msp_power_fit",
]


class IllConditionedError(ValueError):
    """The leading term vanishes, so relative errors are meaningless."""


@dataclass(frozen=True)
class MspLeading:
    hessian: np.ndarray
    hessian_det: float
    signature: int
    constant_C: complex
    s: int
    measure_const: float


def _psi(m, x):
    """``psi(n) = H(n w)`` in real coordinates ``x`` of ``N``."""
    x = np.asarray(x, dtype=float)
    n = x[..., 0] + 1j * x[..., 1] if m.is_complex else x[..., 0]
    return m.iwasawa_H(m.mul(m.n(n), m.weyl()))


def phase_hessian_fd(model, h: float = 1e-4) -> np.ndarray:
    """Central second differences of ``psi`` at ``n = 0``."""
    m = get_model(model)
    s = m.params.dim_N
    e = np.eye(s) * h
    out = np.empty((s, s))
    for i in range(s):
        for j in range(s):
            pts = np.array([e[i] + e[j], e[i] - e[j], -e[i] + e[j], -e[i] - e[j]])
            v = _psi(m, pts)
            out[i, j] = (v[0] - v[1] - v[2] + v[3]) / (4 * h * h)
    return out


def phase_hessian(model) -> MspLeading:
    """Closed-form Hessian ``2 I_s`` of ``psi`` and the resulting constants.

    The stationary phase is applied to ``exp(i lam (-psi))``, so the
    signature that enters ``C`` is that of ``-2 I_s``.
    """
    m = get_model(model)
    s = m.params.dim_N
    hess = 2.0 * np.eye(s)
    det = float(np.linalg.det(hess))
    sig = -s
    C = abs(det) ** -0.5 * cmath.exp(1j * math.pi * sig / 4)
    return MspLeading(hess, det, sig, C, s, m.params.n_bar_measure_const)


def msp_leading(f: PhaseSpaceFunction, g, lam, model=None) -> complex:
    """``C (2 pi / lam)^{s/2} c_N f(g)``."""
    m = get_model(model or f.model)
    lam = float(lam)
    if not lam > 0:
        raise ValueError("msp_leading needs lam > 0")
    lead = phase_hessian(m)
    return complex(lead.constant_C * (2 * math.pi / lam) ** (lead.s / 2)
                   * lead.measure_const * f(np.asarray(g))[()])


@dataclass(frozen=True)
class MspRateFit:
    slope: float
    intercept: float
    lambdas: np.ndarray
    ratios: np.ndarray
    abs_dev: np.ndarray

    def __float__(self):
        return self.slope


def _check_grid(grid, min_points=5, min_lambda=20.0):
    grid = np.asarray(grid, dtype=float)
    if grid.ndim != 1 or grid.size < min_points:
        raise ValueError(f"rate fit needs a grid of at least {min_points} values")
    if np.any(grid < min_lambda):
        raise ValueError(f"rate fit needs lam >= {min_lambda:g}")
    return grid


def msp_rate_fit(f: PhaseSpaceFunction, g, lambda_grid, spec: QuadratureSpec | None = None) -> MspRateFit:
    """Least-squares slope of ``log|L_lam f(g) / leading - 1|`` against ``log lam``."""
    grid = _check_grid(lambda_grid)
    f0 = f(np.asarray(g))[()]
    if abs(f0) < 1e-8:
        raise IllConditionedError("f(g) is ~0; the leading term vanishes")
    spec = spec or QuadratureSpec(rel_tol=1e-12, abs_tol=1e-16)
    vals = np.asarray(l_lambda(f, grid, g, spec))
    lead = np.array([msp_leading(f, g, x) for x in grid])
    ratios = vals / lead
    dev = np.abs(ratios - 1)
    slope, icpt = np.polyfit(np.log(grid), np.log(dev), 1)
    return MspRateFit(float(slope), float(icpt), grid, ratios, dev)


def msp_power_fit(f: PhaseSpaceFunction, g, lambda_grid, spec: QuadratureSpec | None = None) -> float:
    """Slope of ``log|L_lam f(g)|`` against ``log lam`` (expected ``-s/2``)."""
    grid = _check_grid(lambda_grid)
    spec = spec or QuadratureSpec(rel_tol=1e-10, abs_tol=1e-16)
    vals = np.asarray(l_lambda(f, grid, g, spec))
    slope, _ = np.polyfit(np.log(grid), np.log(np.abs(vals)), 1)
    return float(slope)
