"""Boundary B = K/M, horocycle bracket, geodesic frames and disk charts.

Boundary points are arrays: an angle ``theta`` (H^2, the point ``e^{i theta}``
of the unit circle in the disk model) or a unit 3-vector (H^3, the sphere at
infinity of the ball model, north pole = infinity of the half-space).  The
coset ``M`` (forward end of the standard geodesic) is ``theta = 0`` /
``(0, 0, 1)``; ``wM`` is ``theta = pi`` / ``(0, 0, -1)``.

All bracket computations go through Iwasawa projections; the disk helpers
exist for independent checks.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .groups import GroupModel, get_model

__all__ = [
    "DiagonalError",
    "UnsupportedModelError",
    "GeodesicFrame",
    "canonical_boundary",
    "boundary_k",
    "boundary_from_k",
    "boundary_action",
    "horocycle_bracket",
    "bracket_at_chart",
    "chordal_distance",
    "geodesic_frame",
    "frame_endpoints",
    "mobius_derivative",
    "cayley",
    "cayley_inverse",
    "boundary_to_disk",
    "boundary_to_halfspace",
    "sx_coords",
    "b_infinity",
    "b_minus_infinity",
    "DIAGONAL_TOL",
]

DIAGONAL_TOL = 1e-10


class DiagonalError(ValueError):
    """Boundary pair lies on the diagonal of B x B."""


class UnsupportedModelError(ValueError):
    pass


def b_infinity(model):
    model = get_model(model)
    return np.array([0.0, 0.0, 1.0]) if model.is_complex else np.float64(0.0)


def b_minus_infinity(model):
    model = get_model(model)
    return np.array([0.0, 0.0, -1.0]) if model.is_complex else np.float64(np.pi)


def canonical_boundary(model, b) -> np.ndarray:
    model = get_model(model)
    b = np.asarray(b, dtype=float)
    if model.is_complex:
        return b / np.linalg.norm(b, axis=-1, keepdims=True)
    return np.mod(b, 2 * np.pi)


def boundary_k(model, b) -> np.ndarray:
    """Canonical ``k_b`` in K with ``k_b M = b``."""
    model = get_model(model)
    b = canonical_boundary(model, b)
    if not model.is_complex:
        return model.k_from_angles(b / 2)
    v1, v2, v3 = b[..., 0], b[..., 1], b[..., 2]
    north = v3 >= 0
    with np.errstate(divide="ignore", invalid="ignore"):
        a_n = np.sqrt(np.clip((1 + v3) / 2, 0, None)).astype(complex)
        b_n = (v1 - 1j * v2) / (2 * np.where(north, a_n, 1))
        b_s = np.sqrt(np.clip((1 - v3) / 2, 0, None)).astype(complex)
        a_s = (v1 + 1j * v2) / (2 * np.where(north, 1, b_s))
    alpha = np.where(north, a_n, a_s)
    beta = np.where(north, b_n, b_s)
    k = np.empty(b.shape[:-1] + (2, 2), dtype=complex)
    k[..., 0, 0] = alpha
    k[..., 1, 0] = beta
    k[..., 0, 1] = -np.conj(beta)
    k[..., 1, 1] = np.conj(alpha)
    return model.canonical_k(k)


def boundary_from_k(model, k) -> np.ndarray:
    """The boundary point ``kM`` of a K-matrix (first column up to M)."""
    model = get_model(model)
    alpha, beta = k[..., 0, 0], k[..., 1, 0]
    if not model.is_complex:
        return np.mod(2 * np.arctan2(-np.real(beta), np.real(alpha)), 2 * np.pi)
    ab = alpha * np.conj(beta)
    v = np.stack([2 * ab.real, 2 * ab.imag, np.abs(alpha) ** 2 - np.abs(beta) ** 2], axis=-1)
    return v / np.linalg.norm(v, axis=-1, keepdims=True)


def boundary_action(model, g, b) -> np.ndarray:
    """``g . kM = k(g k) M``."""
    model = get_model(model)
    return boundary_from_k(model, model.iwasawa_k(model.mul(g, boundary_k(model, b))))


def horocycle_bracket(model, g, b) -> np.ndarray:
    """``<gK, kM> = -H(g^{-1} k)`` for batched group elements ``g`` and points ``b``."""
    model = get_model(model)
    return -model.iwasawa_H(model.mul(model.inv(g), boundary_k(model, b)))


def bracket_at_chart(model, point, b) -> np.ndarray:
    model = get_model(model)
    return horocycle_bracket(model, model.from_chart(point), b)


def chordal_distance(model, b1, b2) -> np.ndarray:
    model = get_model(model)
    if model.is_complex:
        return np.linalg.norm(canonical_boundary(model, b1) - canonical_boundary(model, b2), axis=-1)
    return np.abs(np.exp(1j * np.asarray(b1)) - np.exp(1j * np.asarray(b2)))


def boundary_to_halfspace(model, b):
    """Boundary point in the upper half-plane/space chart (``inf`` for ``M``)."""
    model = get_model(model)
    k = boundary_k(model, b)
    with np.errstate(divide="ignore", invalid="ignore"):
        xi = k[..., 0, 0] / k[..., 1, 0]
    return xi if model.is_complex else np.real(xi)


@dataclass(frozen=True)
class GeodesicFrame:
    """Representative ``g`` of ``g(b, b') MA`` with cached ``H(g)``, ``H(gw)``."""

    g: np.ndarray
    H_g: np.ndarray
    H_gw: np.ndarray


def geodesic_frame(model, b, b_prime, *, tol: float = DIAGONAL_TOL) -> GeodesicFrame:
    """``g`` with ``g . M = b`` and ``g . wM = b'``.

    Built as ``g = k_b n_xi`` where ``xi`` is the half-plane coordinate of
    ``k_b^{-1} . b'``; i.e. ``(pk)^{-1}`` with ``k . b = b_inf`` and
    ``p = n_{-xi}`` moving ``k . b'`` to ``b_{-inf}``.
    """
    model = get_model(model)
    if np.any(chordal_distance(model, b, b_prime) < tol):
        raise DiagonalError("geodesic frame requested for a diagonal pair (b == b')")
    kb = boundary_k(model, b)
    rel = model.mul(model.inv(kb), boundary_k(model, b_prime))
    xi = rel[..., 0, 0] / rel[..., 1, 0]
    if not model.is_complex:
        xi = np.real(xi)
    g = model.mul(kb, model.n(xi))
    w = model.weyl()
    return GeodesicFrame(g=g, H_g=model.iwasawa_H(g), H_gw=model.iwasawa_H(model.mul(g, w)))


def frame_endpoints(model, g):
    """``(g . M, g . wM)``."""
    model = get_model(model)
    kg = model.iwasawa_k(g)
    kgw = model.iwasawa_k(model.mul(g, model.weyl()))
    return boundary_from_k(model, kg), boundary_from_k(model, kgw)


def sx_coords(model, g):
    """Phase-space point ``gM`` as ``(chart point g.o, forward boundary point g.M)``."""
    model = get_model(model)
    return model.to_chart(g), boundary_from_k(model, model.iwasawa_k(g))


# -- disk model (H^2 only) -------------------------------------------------

_CAYLEY = np.array([[1, -1j], [1, 1j]]) / np.sqrt(2j)


def cayley(z):
    """Upper half-plane -> unit disk, ``i -> 0``, ``inf -> 1``."""
    z = np.asarray(z, dtype=complex)
    return (z - 1j) / (z + 1j)


def cayley_inverse(w):
    w = np.asarray(w, dtype=complex)
    return 1j * (1 + w) / (1 - w)


def boundary_to_disk(b):
    return np.exp(1j * np.asarray(b, dtype=float))


def _disk_matrix(gamma):
    return _CAYLEY @ np.asarray(gamma, dtype=complex) @ np.linalg.inv(_CAYLEY)


def mobius_derivative(model, gamma, b) -> np.ndarray:
    """``|gamma'(b)|`` for the disk-model Moebius action on the unit circle."""
    model = get_model(model)
    if model.is_complex:
        raise UnsupportedModelError("mobius_derivative is defined for the H2 disk model only")
    gd = _disk_matrix(gamma)
    zeta = boundary_to_disk(b)
    return 1.0 / np.abs(gd[..., 1, 0] * zeta + gd[..., 1, 1]) ** 2
