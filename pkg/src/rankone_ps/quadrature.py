"""Vectorized adaptive quadrature.

Every transform in the package funnels through :func:`integrate_batch`, a
globally adaptive Gauss-Kronrod scheme that integrates many independent
1D integrals at once.  Integrands are called with whole arrays of nodes, so
group-theoretic integrands (Iwasawa projections of batched matrices) stay
inside numpy.  Nested integrals (:func:`integrate_iterated`) reuse the same
engine level by level; inner error estimates are integrated and added to the
outer estimate.

Infinite limits are compactified algebraically, ``x = u/(1-u)`` by default
(``x = u/(1-u^2)`` as the alternative), because the integrands of interest
have algebraic tails.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import Callable, NamedTuple, Sequence

import numpy as np

__all__ = [
    "QuadratureSpec",
    "QuadResult",
    "QuadratureError",
    "NonFiniteIntegrandError",
    "NonConvergenceWarning",
    "integrate_batch",
    "integrate_1d",
    "integrate_2d",
    "integrate_iterated",
    "integrate_circle",
    "integrate_sphere",
    "circle_nodes",
    "sphere_nodes",
]


class QuadratureError(RuntimeError):
    """Raised when a caller demands convergence and the engine did not reach it."""


class NonFiniteIntegrandError(FloatingPointError):
    def __init__(self, point):
        self.point = point
        super().__init__(f"integrand returned NaN/Inf at x={point!r}")


class NonConvergenceWarning(RuntimeWarning):
    pass


@dataclass(frozen=True)
class QuadratureSpec:
    rel_tol: float = 1e-10
    abs_tol: float = 1e-14
    max_depth: int = 40
    rule_order: int = 21

    def __post_init__(self):
        if not self.rel_tol > 0:
            raise ValueError("rel_tol must be > 0")
        if not self.abs_tol >= 0:
            raise ValueError("abs_tol must be >= 0")
        if self.max_depth < 1:
            raise ValueError("max_depth must be >= 1")
        if self.rule_order not in _RULES:
            raise ValueError(f"rule_order must be one of {sorted(_RULES)}")

    def tighter(self, factor: float = 10.0) -> "QuadratureSpec":
        """Spec for an inner integral: tolerances divided by ``factor``."""
        return QuadratureSpec(
            rel_tol=self.rel_tol / factor,
            abs_tol=self.abs_tol / factor,
            max_depth=self.max_depth,
            rule_order=self.rule_order,
        )


class QuadResult(NamedTuple):
    value: complex | np.ndarray
    error: float | np.ndarray
    converged: bool | np.ndarray


# Kronrod nodes (positive half, descending, centre last) with their Gauss
# subsets at the odd positions.
_K21_X = np.array([
    0.995657163025808080735527280689003, 0.973906528517171720077964012084452,
    0.930157491355708226001207180059508, 0.865063366688984510732096688423493,
    0.780817726586416897063717578345042, 0.679409568299024406234327365114874,
    0.562757134668604683339000099272694, 0.433395394129247190799265943165784,
    0.294392862701460198131126603103866, 0.148874338981631210884826001129720,
    0.0,
])
_K21_W = np.array([
    0.011694638867371874278064396062192, 0.032558162307964727478818972459390,
    0.054755896574351996031381300244580, 0.075039674810919952767043140916190,
    0.093125454583697605535065465083366, 0.109387158802297641899210590325805,
    0.123491976262065851077600525226262, 0.134709217311473325928054001771707,
    0.142775938577060080797094273138717, 0.147739104901338491374841515972068,
    0.149445554002916905664936468389821,
])
_G10_W = np.array([
    0.066671344308688137593568809893332, 0.149451349150580593145776339657697,
    0.219086362515982043995534934228163, 0.269266719309996355091226921569469,
    0.295524224714752870173892994651338,
])
_K15_X = np.array([
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.0,
])
_K15_W = np.array([
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714,
])
_G7_W = np.array([
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327,
])


def _full_rule(xk, wk, wg):
    x = np.concatenate([-xk[:-1], xk[::-1]])
    w = np.concatenate([wk[:-1], wk[::-1]])
    half = np.zeros(len(xk))
    half[1::2] = wg
    g = np.concatenate([half[:-1], half[::-1]])
    return x, w, g


_RULES = {
    21: _full_rule(_K21_X, _K21_W, _G10_W),
    15: _full_rule(_K15_X, _K15_W, _G7_W),
}

_EPS = np.finfo(float).eps


def _evaluate(f, x, idx):
    out = f(x, idx)
    inner_err = None
    if isinstance(out, tuple):
        out, inner_err = out
    out = np.asarray(out)
    if out.ndim == 0:
        out = np.full(x.shape, out)
    bad = ~np.isfinite(out)
    if bad.any():
        where = np.argwhere(bad)[0][0]
        raise NonFiniteIntegrandError(float(x[where]))
    return out, inner_err


def integrate_batch(
    f: Callable,
    lo,
    hi,
    spec: QuadratureSpec | None = None,
    *,
    initial_panels: int = 1,
    warn: bool = True,
) -> QuadResult:
    """Integrate ``B`` independent integrals ``int_{lo[i]}^{hi[i]} f(x, i) dx``.

    ``f(x, idx)`` receives flat arrays of nodes and item indices and returns
    values of shape ``x.shape + vshape`` (vector-valued integrands are
    allowed; errors are measured in the max norm).  It may also return a pair
    ``(values, err)`` where ``err`` is a per-node error bound of an inner
    quadrature; it is integrated and added to the estimate.

    Global adaptive bisection: an item is done when the sum of its panel
    error estimates is below ``max(rel_tol*|I|, abs_tol)``; otherwise its
    worst panels are bisected.  Panels that reach ``max_depth`` are frozen and
    the item is reported as not converged.
    """
    spec = spec or QuadratureSpec()
    nodes, wk, wg = _RULES[spec.rule_order]
    lo = np.atleast_1d(np.asarray(lo, dtype=float))
    hi = np.atleast_1d(np.asarray(hi, dtype=float))
    lo, hi = np.broadcast_arrays(lo, hi)
    n_items = lo.shape[0]
    if not (np.all(np.isfinite(lo)) and np.all(np.isfinite(hi))):
        raise ValueError("integrate_batch needs finite limits; use integrate_1d for infinite ranges")
    width_total = np.abs(hi - lo)

    k = max(int(initial_panels), 1)
    frac = np.linspace(0.0, 1.0, k + 1)
    pa = (lo[:, None] + (hi - lo)[:, None] * frac[None, :-1]).ravel()
    pb = (lo[:, None] + (hi - lo)[:, None] * frac[None, 1:]).ravel()
    pidx = np.repeat(np.arange(n_items), k)
    pdepth = np.zeros(pa.shape, dtype=int)

    # cached panel results
    c_a = np.empty(0)
    c_b = np.empty(0)
    c_idx = np.empty(0, dtype=int)
    c_depth = np.empty(0, dtype=int)
    c_val = None
    c_err = np.empty(0)

    done_val = None
    done_err = np.zeros(n_items)
    converged = np.ones(n_items, dtype=bool)
    vshape = None

    max_rounds = 8 * spec.max_depth + 16
    for _ in range(max_rounds):
        if pa.size:
            centre = 0.5 * (pa + pb)
            half = 0.5 * (pb - pa)
            x = (centre[:, None] + half[:, None] * nodes[None, :]).ravel()
            xi = np.repeat(pidx, nodes.size)
            vals, inner = _evaluate(f, x, xi)
            if vshape is None:
                vshape = vals.shape[1:]
                dtype = np.result_type(vals.dtype, np.complex128)
                c_val = np.empty((0,) + vshape, dtype=dtype)
                done_val = np.zeros((n_items,) + vshape, dtype=dtype)
            vals = vals.reshape((pa.size, nodes.size) + vshape)
            ext = (slice(None),) + (None,) * len(vshape)
            kron = half[ext] * np.tensordot(vals, wk, axes=([1], [0]))
            gauss = half[ext] * np.tensordot(vals, wg, axes=([1], [0]))
            mean = kron / np.where(half == 0, 1.0, 2 * half)[ext]
            resasc = np.abs(half)[ext] * np.tensordot(
                np.abs(vals - mean[:, None]), wk, axes=([1], [0])
            )
            resabs = np.abs(half)[ext] * np.tensordot(np.abs(vals), wk, axes=([1], [0]))
            raw = np.abs(kron - gauss)
            with np.errstate(divide="ignore", invalid="ignore"):
                scaled = np.where(
                    (resasc > 0) & (raw > 0),
                    resasc * np.minimum(1.0, (200.0 * raw / np.where(resasc > 0, resasc, 1.0)) ** 1.5),
                    raw,
                )
            scaled = np.maximum(scaled, 50 * _EPS * resabs)
            err = scaled.reshape(pa.size, -1).max(axis=1) if vshape else scaled
            if inner is not None:
                inner = np.asarray(inner, dtype=float).reshape(pa.size, nodes.size)
                err = err + np.abs(half) * (inner @ wk)
            c_a = np.concatenate([c_a, pa])
            c_b = np.concatenate([c_b, pb])
            c_idx = np.concatenate([c_idx, pidx])
            c_depth = np.concatenate([c_depth, pdepth])
            c_val = np.concatenate([c_val, kron])
            c_err = np.concatenate([c_err, err])

        if c_idx.size == 0:
            break
        est = done_val.copy()
        np.add.at(est, c_idx, c_val)
        tot_err = done_err.copy()
        np.add.at(tot_err, c_idx, c_err)
        norm = np.abs(est).reshape(n_items, -1).max(axis=1) if vshape else np.abs(est)
        tol = np.maximum(spec.rel_tol * norm, spec.abs_tol)
        item_ok = tot_err <= tol

        # split candidates among unfinished items
        worst = np.zeros(n_items)
        np.maximum.at(worst, c_idx, c_err)
        scale = np.where(width_total > 0, width_total, 1.0)[c_idx]
        local = c_err > tol[c_idx] * np.abs(c_b - c_a) / scale
        split = (~item_ok[c_idx]) & ((c_err >= 0.5 * worst[c_idx]) | local)
        split &= c_depth < spec.max_depth

        # items with nothing left to split are committed
        has_split = np.zeros(n_items, dtype=bool)
        has_split[c_idx[split]] = True
        fin_panels = ~has_split[c_idx]
        if fin_panels.any():
            np.add.at(done_val, c_idx[fin_panels], c_val[fin_panels])
            np.add.at(done_err, c_idx[fin_panels], c_err[fin_panels])
            fin_items = np.unique(c_idx[fin_panels])
            converged[fin_items] = item_ok[fin_items]
        keep = ~fin_panels & ~split
        mid = 0.5 * (c_a[split] + c_b[split])
        pa = np.concatenate([c_a[split], mid])
        pb = np.concatenate([mid, c_b[split]])
        pidx = np.concatenate([c_idx[split], c_idx[split]])
        pdepth = np.concatenate([c_depth[split] + 1, c_depth[split] + 1])
        c_a, c_b, c_idx, c_depth = c_a[keep], c_b[keep], c_idx[keep], c_depth[keep]
        c_val, c_err = c_val[keep], c_err[keep]
        if pa.size == 0 and c_idx.size == 0:
            break
    else:
        # round budget exhausted: commit whatever is left
        if c_idx.size:
            np.add.at(done_val, c_idx, c_val)
            np.add.at(done_err, c_idx, c_err)
            converged[np.unique(c_idx)] = False

    if done_val is None:
        done_val = np.zeros(n_items, dtype=complex)
    if warn and not converged.all():
        warnings.warn(
            f"{int((~converged).sum())} of {n_items} integrals did not reach tolerance",
            NonConvergenceWarning,
            stacklevel=2,
        )
    return QuadResult(done_val, done_err, converged)


# ---------------------------------------------------------------------------
# compactifying substitutions for infinite ranges

def _sub_rational(u):
    return u / (1.0 - u), 1.0 / (1.0 - u) ** 2


def _sub_algebraic(u):
    d = (1.0 - u) * (1.0 + u)
    return u / d, (1.0 + u * u) / (d * d)


SUBSTITUTIONS = {"rational": _sub_rational, "algebraic": _sub_algebraic}


def _chart(a: float, b: float, substitution: str):
    """Return pieces ``(u_lo, u_hi, x(u), dx/du)`` covering ``[a, b]``."""
    sub = SUBSTITUTIONS[substitution]
    if math.isfinite(a) and math.isfinite(b):
        return [(a, b, lambda u: u, lambda u: np.ones_like(u))]
    if math.isfinite(a):
        return [(0.0, 1.0, lambda u: a + sub(u)[0], lambda u: sub(u)[1])]
    if math.isfinite(b):
        return [(0.0, 1.0, lambda u: b - sub(u)[0], lambda u: sub(u)[1])]
    return [
        (0.0, 1.0, lambda u: sub(u)[0], lambda u: sub(u)[1]),
        (0.0, 1.0, lambda u: -sub(u)[0], lambda u: sub(u)[1]),
    ]


def integrate_1d(
    f: Callable,
    domain: tuple[float, float] = (-math.inf, math.inf),
    spec: QuadratureSpec | None = None,
    *,
    substitution: str = "rational",
    warn: bool = True,
) -> QuadResult:
    """Integrate a vectorized ``f(x)`` over a finite interval or (half) line.

    >>> integrate_1d(lambda x: 1 / (1 + x**2)).value.real  # doctest: +ELLIPSIS
    3.14159265358979...
    """
    spec = spec or QuadratureSpec()
    a, b = map(float, domain)
    sign = 1.0
    if a > b:
        a, b, sign = b, a, -1.0
    if a == b:
        return QuadResult(0j, 0.0, True)
    pieces = _chart(a, b, substitution)
    lo = np.array([p[0] for p in pieces])
    hi = np.array([p[1] for p in pieces])

    def g(u, idx):
        out = None
        for j, (_, _, xm, jac) in enumerate(pieces):
            sel = idx == j
            if not sel.any():
                continue
            uj = u[sel]
            vals = np.asarray(f(xm(uj)), dtype=complex)
            if vals.ndim == 0:
                vals = np.full(uj.shape, vals)
            vals = vals * jac(uj).reshape((-1,) + (1,) * (vals.ndim - 1))
            if out is None:
                out = np.zeros(u.shape + vals.shape[1:], dtype=complex)
            out[sel] = vals
        return out

    res = integrate_batch(_pull_back_nonfinite(g, pieces), lo, hi, spec,
                          initial_panels=2, warn=warn)
    value = sign * res.value.sum(axis=0)
    return QuadResult(complex(value) if np.ndim(value) == 0 else value,
                      float(res.error.sum()), bool(res.converged.all()))


def _pull_back_nonfinite(g, pieces):
    """Report NaN/Inf at the original x rather than the compactified u."""

    def wrapped(u, idx):
        out = g(u, idx)
        bad = ~np.isfinite(out)
        if bad.any():
            k = np.argwhere(bad)[0][0]
            xm = pieces[idx[k]][2]
            raise NonFiniteIntegrandError(float(xm(np.array([u[k]]))[0]))
        return out

    return wrapped


LimitSpec = "tuple[float, float] | Callable[..., tuple[np.ndarray, np.ndarray]]"


def integrate_iterated(
    f: Callable,
    limits: Sequence,
    spec: QuadratureSpec | None = None,
    *,
    inner_factor: float = 10.0,
    warn: bool = True,
) -> QuadResult:
    """Iterated adaptive integral ``int dx0 int dx1 ... f(x0, x1, ...)``.

    ``limits[k]`` is either a constant pair (infinite ends allowed) or a
    callable of the outer coordinates ``(x0, ..., x_{k-1})`` (arrays)
    returning finite ``(lo, hi)`` arrays.  ``f`` is vectorized over equally
    shaped coordinate arrays.  Inner levels run at ``rel_tol/inner_factor``.
    """
    spec = spec or QuadratureSpec()
    depth = len(limits)
    specs = [spec]
    for _ in range(depth - 1):
        specs.append(specs[-1].tighter(inner_factor))
    flags = {"ok": True}

    def level(k, outer):
        lim = limits[k]
        n_outer = outer[0].shape[0] if outer else 1
        if callable(lim):
            lo, hi = lim(*outer)
            lo = np.broadcast_to(np.asarray(lo, dtype=float), (n_outer,))
            hi = np.broadcast_to(np.asarray(hi, dtype=float), (n_outer,))
            pieces = [(None, None, lambda u: u, lambda u: np.ones_like(u))]
            piece_lo, piece_hi = [lo], [hi]
        else:
            a, b = map(float, lim)
            pieces = _chart(a, b, "rational")
            piece_lo = [np.full(n_outer, p[0]) for p in pieces]
            piece_hi = [np.full(n_outer, p[1]) for p in pieces]
        n_p = len(pieces)
        lo_all = np.concatenate(piece_lo)
        hi_all = np.concatenate(piece_hi)

        def integrand(u, idx):
            piece = idx // n_outer
            item = idx % n_outer
            x = np.empty_like(u)
            jac = np.empty_like(u)
            for j, p in enumerate(pieces):
                sel = piece == j
                if sel.any():
                    x[sel] = p[2](u[sel])
                    jac[sel] = p[3](u[sel])
            coords = tuple(c[item] for c in outer) + (x,)
            if k == depth - 1:
                vals = np.asarray(f(*coords), dtype=complex)
                return vals * jac.reshape((-1,) + (1,) * (vals.ndim - 1))
            inner = level(k + 1, coords)
            vals = inner.value
            return vals * jac.reshape((-1,) + (1,) * (vals.ndim - 1)), inner.error * jac

        res = integrate_batch(integrand, lo_all, hi_all, specs[k],
                              initial_panels=2, warn=False)
        if not res.converged.all():
            flags["ok"] = False
        val = res.value.reshape((n_p, n_outer) + res.value.shape[1:]).sum(axis=0)
        err = res.error.reshape(n_p, n_outer).sum(axis=0)
        return QuadResult(val, err, res.converged)

    res = level(0, ())
    converged = flags["ok"]
    if warn and not converged:
        warnings.warn("iterated integral did not reach tolerance", NonConvergenceWarning, stacklevel=2)
    value = res.value[0]
    return QuadResult(complex(value) if np.ndim(value) == 0 else value, float(res.error[0]), converged)


def integrate_2d(
    f: Callable,
    x_range: tuple[float, float],
    y_range,
    spec: QuadratureSpec | None = None,
    *,
    warn: bool = True,
) -> QuadResult:
    """``int_x int_y f(x, y) dy dx``; ``y_range`` may depend on ``x``.

    The half-plane chart is ``y_range=(0, inf)``.
    """
    return integrate_iterated(f, [x_range, y_range], spec, warn=warn)


def circle_nodes(n_points: int) -> np.ndarray:
    if n_points < 4:
        raise ValueError("integrate_circle needs at least 4 points")
    return 2 * np.pi * np.arange(n_points) / n_points


def integrate_circle(f: Callable, n_points: int = 256):
    """Mean of a 2pi-periodic ``f`` (trapezoid rule, normalized to mass 1)."""
    theta = circle_nodes(n_points)
    vals = np.asarray(f(theta))
    return vals.mean(axis=0)


def sphere_nodes(n_points: int) -> tuple[np.ndarray, np.ndarray]:
    """Unit vectors and weights (summing to 1) of a product rule on S^2.

    ``n_points`` is the number of Gauss-Legendre nodes in ``cos(theta)``; the
    azimuth uses ``2*n_points`` equispaced nodes.
    """
    if n_points < 4:
        raise ValueError("integrate_sphere needs at least 4 latitude nodes")
    c, w = np.polynomial.legendre.leggauss(n_points)
    phi = 2 * np.pi * np.arange(2 * n_points) / (2 * n_points)
    s = np.sqrt(1 - c**2)
    vec = np.stack(
        [
            np.outer(s, np.cos(phi)).ravel(),
            np.outer(s, np.sin(phi)).ravel(),
            np.repeat(c, phi.size),
        ],
        axis=-1,
    )
    weights = np.repeat(w, phi.size) / (2.0 * phi.size)
    return vec, weights


def integrate_sphere(f: Callable, n_points: int = 32):
    """Integral over S^2 against the rotation-invariant probability measure."""
    vec, w = sphere_nodes(n_points)
    vals = np.asarray(f(vec))
    return np.tensordot(w, vals, axes=([0], [0]))
