"""Verification suites: plan cases from a config, evaluate them, collect a report.

Every case is a plain dict (suite, model, index, params) so that it can be
shipped to a worker process; random draws use ``default_rng([seed, suite,
model, case])`` and therefore do not depend on the parallelism.
"""

from __future__ import annotations

import datetime as _dt
import math
import time
from concurrent.futures import ProcessPoolExecutor

import numpy as np

from . import boundary as bd
from .asymptotics import IllConditionedError, msp_leading, msp_power_fit, phase_hessian
from .config import MODELS, SUITES, SuiteConfig, parse_config
from .groups import get_model
from .patterson_sullivan import (
    LTransform,
    d_lambda_pair,
    l_lambda,
    ps_pairing,
    radon,
    symbol_function,
)
from .quadrature import QuadratureSpec, integrate_1d, integrate_iterated
from .quantization import Cutoff, make_symbol, wigner_bilinear
from .regions import HyperbolicBall, smooth_bump
from .report import CaseRecord, VerificationReport
from .transforms import (
    BoundaryDistribution,
    eigenvalue,
    fourier_inversion,
    l2_norm_boundary,
    laplacian_fd,
    poisson_transform,
    principal_series_apply,
)

__all__ = ["plan_cases", "run_case", "run_suite", "DEFAULT_TOLERANCES", "SUITE_INFO"]

DEFAULT_TOLERANCES = {
    "iwasawa": {"roundtrip": 1e-10, "cocycle": 1e-10, "measure": 1e-8, "log2": 1e-12, "weyl": 1e-12},
    "bracket": {"identity": 1e-10},
    "poisson": {"fd": 1e-4, "intertwining": 1e-9},
    "principal-series": {"unitarity": 1e-7},
    "ps-invariance": {"invariance": 1e-8},
    "intertwining-diagonal": {"rel": 1e-6},
    "intertwining-offdiag": {"rel": 1e-6},
    "msp-rate": {"slope": 0.15, "ratio": 0.2, "power": 0.15},
    "fourier-inversion": {"l2": 0.05},
}

SUITE_INFO = {
    "iwasawa": "KAN roundtrip, cocycle of H, N-bar normalization, Weyl element",
    "bracket": "K-invariance and cocycle of the horocycle bracket, frame identities, Poisson kernel",
    "poisson": "FD eigenfunction certificate, Poisson intertwining, translation twist",
    "principal-series": "unitarity of the compact-picture principal series",
    "ps-invariance": "geodesic flow, time reversal and translation twist of PS pairings",
    "intertwining-diagonal": "int chi a e_{lam,b} e_{lam,b'} = d_lam R(L_lam chi a)",
    "intertwining-offdiag": "Wigner pairing = off-diagonal PS pairing of L_{lam_k}(chi a)",
    "msp-rate": "L_lam / stationary-phase leading term -> 1 at rate 1/lam",
    "fourier-inversion": "Helgason transform followed by the Plancherel inversion (H2)",
}

_PARAM_DEFAULTS = {
    "iwasawa": {"n_samples": 10000, "n_triples": 1000, "chunk": 1000, "radius": 2.0},
    "bracket": {"n_samples": 1000, "radius": 1.5},
    "poisson": {"n_distributions": 20, "n_atoms": 3, "h": 1e-3, "radius": 1.0},
    "principal-series": {"n_samples": 100, "chunk": 25, "radius": 1.0, "n_quad_h2": 1024,
                         "n_quad_h3": 64},
    "ps-invariance": {"n_samples": 6, "n_atoms": 2},
    "intertwining-diagonal": {"n_pairs": 3},
    "intertwining-offdiag": {"n_atoms": 3},
    "msp-rate": {},
    "fourier-inversion": {"lam_max": 30.0, "n_lambda": 121, "n_boundary": 256, "n_radial": 48,
                          "radius": 1.5, "n_points": 40},
}

_DEFAULT_GRIDS = {
    "poisson": [0.5, 1.0, 2.0, 5.0],
    "principal-series": [0.5, 10.0],
    "ps-invariance": [1.0, 2.0, 5.0],
    "intertwining-diagonal": [1.0, 2.0, 5.0, 10.0],
    "intertwining-offdiag": [1.0, 2.0, 5.0, 10.0],
    "msp-rate": [20.0, 40.0, 80.0, 120.0, 160.0],
}

_DEFAULT_SYMBOLS = {
    "ps-invariance": [{"name": "bump-trig", "width": 0.7}],
    "intertwining-diagonal": [{"name": "bump-trig", "width": 0.7},
                              {"name": "gauss-trig", "width": 0.9, "freq": 2}],
    "intertwining-offdiag": [{"name": "bump-trig", "width": 0.7}],
    "msp-rate": [{"name": "gauss-trig", "width": 1.6}],
}

_DEFAULT_CENTERS = {"h2": [0.2, 1.1], "h3": [0.1, -0.2, 1.1]}
_MSP_CENTERS = {"h2": [0.1, 1.05], "h3": [0.1, -0.1, 1.05]}


# -- helpers -------------------------------------------------------------------------

def _rng(seed, suite, model, case):
    return np.random.default_rng([int(seed), SUITES.index(suite), MODELS.index(model), int(case)])


def _chart_point(model, xs):
    xs = [float(x) for x in xs]
    if get_model(model).is_complex:
        if len(xs) != 3:
            raise ValueError("H3 points are [x1, x2, y]")
        return np.array(xs)
    if len(xs) != 2:
        raise ValueError("H2 points are [x, y]")
    return complex(xs[0], xs[1])


def _boundary_point(model, p):
    if get_model(model).is_complex:
        return np.asarray(p, dtype=float)
    return float(p)


def _symbol(model, spec, default_center):
    spec = dict(spec)
    center = _chart_point(model, spec.pop("center", default_center))
    name = spec.pop("name")
    return make_symbol(name, model, center=center, **spec)


def _cutoff(model, symbol, cfg):
    c = dict(cfg or {})
    center = _chart_point(model, c["center"]) if "center" in c else symbol.z_support.center
    radius = float(c.get("radius", symbol.z_support.radius + 0.3))
    return Cutoff.bump(model, center, radius)


def _random_boundary(model, rng, n):
    if get_model(model).is_complex:
        return bd.canonical_boundary(model, rng.normal(size=(n, 3)))
    return rng.uniform(0, 2 * np.pi, n)


def _random_weights(rng, n):
    return rng.normal(size=n) + 1j * rng.normal(size=n)


def _atoms(model, spec, rng, n, side="j", through=None):
    """Atoms from the config, else random ones.

    ``through`` (a ball) makes random atoms endpoints of geodesics that cross
    it, so that pairings are not trivially zero.
    """
    if spec and side in spec:
        items = spec[side]
        w = [complex(*it["weight"]) if isinstance(it["weight"], (list, tuple)) else complex(it["weight"])
             for it in items]
        pts = [_boundary_point(model, it["point"]) for it in items]
        return BoundaryDistribution.atoms(model, w, pts)
    if through is not None:
        g = _random_through(model, rng, through, n)
        pts = bd.frame_endpoints(model, g)[0 if side == "j" else 1]
    else:
        pts = _random_boundary(model, rng, n)
    return BoundaryDistribution.atoms(model, _random_weights(rng, n), pts)


def _random_through(model, rng, ball, n):
    """Frames ``g`` with ``g.o`` within half the radius of ``ball``'s centre."""
    m = get_model(model)
    c = m.from_chart(ball.center)
    return m.mul(c, m.random_k(rng, size=n), m.a(rng.uniform(0, ball.radius / 2, n)),
                 m.random_k(rng, size=n))


def _worst(values_lhs, values_rhs):
    i = int(np.argmax(np.abs(np.asarray(values_lhs) - np.asarray(values_rhs))))
    return complex(np.ravel(values_lhs)[i]), complex(np.ravel(values_rhs)[i])


# -- planning ----------------------------------------------------------------------------

def plan_cases(cfg: SuiteConfig) -> tuple[list, list]:
    """Return ``(cases, skipped)``; ``skipped`` lists (suite, model, reason)."""
    cases, skipped = [], []
    for suite in cfg.suites:
        params = dict(_PARAM_DEFAULTS[suite])
        params.update({k: v for k, v in cfg.params.items() if k not in SUITES})
        params.update(cfg.params.get(suite) or {})
        for model in cfg.models:
            if suite == "fourier-inversion" and model != "h2":
                skipped.append({"suite": suite, "model": model,
                                "reason": "Fourier inversion is implemented for h2 only"})
                continue
            for idx, extra in enumerate(_case_params(suite, model, params, cfg)):
                cases.append({"suite": suite, "model": model, "index": idx,
                              "params": {**params, **extra}})
    return cases, skipped


def _case_params(suite, model, params, cfg):
    grid = cfg.lambda_grid or _DEFAULT_GRIDS.get(suite)
    syms = cfg.symbols or _DEFAULT_SYMBOLS.get(suite)
    if suite == "iwasawa":
        n_rt = math.ceil(params["n_samples"] / params["chunk"])
        n_co = math.ceil(params["n_triples"] / params["chunk"])
        return ([{"kind": "roundtrip"}] * n_rt + [{"kind": "cocycle"}] * n_co + [{"kind": "measure"}])
    if suite == "bracket":
        kinds = ["k-invariance", "cocycle", "frame-identities", "poisson-kernel", "action"]
        return [{"kind": k} for k in kinds]
    if suite == "poisson":
        return [{"lambda_grid": grid}] * int(params["n_distributions"])
    if suite == "principal-series":
        n = math.ceil(params["n_samples"] / params["chunk"])
        return [{"lambda_range": grid[:1] + grid[-1:]}] * n
    if suite == "ps-invariance":
        return [{"lambda_grid": grid, "symbol": syms[i % len(syms)]} for i in range(int(params["n_samples"]))]
    if suite == "intertwining-diagonal":
        return [{"lambda_grid": grid, "symbol": s, "pair": p}
                for s in syms for p in range(int(params["n_pairs"]))]
    if suite == "intertwining-offdiag":
        return [{"lambda_grid": grid, "lambda_j": lj, "symbol": s} for s in syms for lj in grid]
    if suite == "msp-rate":
        return [{"lambda_grid": grid, "symbol": s} for s in syms]
    if suite == "fourier-inversion":
        return [{}]
    raise AssertionError(suite)


# -- case bodies ---------------------------------------------------------------------------

def _case_iwasawa(model, idx, p, rng, tol):
    m = get_model(model)
    kind = p["kind"]
    out = []
    if kind == "roundtrip":
        n = int(min(p["chunk"], p["n_samples"] - (idx * p["chunk"])))
        g = m.random_element(rng, p["radius"], size=n)
        c = m.iwasawa_kan(g)
        rec = m.mul(c.k, m.a(c.t), m.n(c.n))
        dev = np.max(np.abs(rec - g), axis=(-1, -2))
        out.append(dict(check="roundtrip", lhs=float(dev.max()), rhs=0.0, tol=tol["roundtrip"], mode="abs",
                        params={"n": n}))
        kk = m.mul(np.conj(np.swapaxes(c.k, -1, -2)), c.k) - m.identity()
        out.append(dict(check="k-unitary", lhs=float(np.abs(kk).max()), rhs=0.0, tol=tol["roundtrip"],
                        mode="abs", params={"n": n}))
        out.append(dict(check="det", lhs=float(np.abs(m.det(g) - 1).max()), rhs=0.0, tol=1e-12,
                        mode="abs", params={"n": n}))
    elif kind == "cocycle":
        n = int(p["chunk"])
        g1 = m.random_element(rng, p["radius"], size=n)
        g2 = m.random_element(rng, p["radius"], size=n)
        k = m.random_k(rng, size=n)
        lhs = m.iwasawa_H(m.mul(g1, g2, k))
        rhs = m.iwasawa_H(m.mul(g1, m.iwasawa_k(m.mul(g2, k)))) + m.iwasawa_H(m.mul(g2, k))
        lo, hi = _worst(lhs, rhs)
        out.append(dict(check="cocycle", lhs=lo, rhs=hi, tol=tol["cocycle"], params={"n": n}))
    else:
        const = m.params.n_bar_measure_const
        spec = QuadratureSpec(rel_tol=1e-12, abs_tol=1e-15)
        if m.is_complex:
            res = integrate_iterated(
                lambda x1, x2: const * np.exp(-2 * m.rho * m.iwasawa_H(m.nbar(x1 + 1j * x2))),
                [(-math.inf, math.inf), (-math.inf, math.inf)], spec)
        else:
            res = integrate_1d(lambda x: const * np.exp(-2 * m.rho * m.iwasawa_H(m.nbar(x))),
                               spec=spec)
        out.append(dict(check="nbar-normalization", lhs=res.value, rhs=1.0, tol=tol["measure"]))
        out.append(dict(check="H(nbar_1)", lhs=float(m.iwasawa_H(m.nbar(1.0))), rhs=math.log(2),
                        tol=tol["log2"]))
        w = m.weyl()
        ts = np.array([-5.0, -1.0, 1.0, 5.0])
        conj = m.mul(w, m.a(ts), m.inv(w))
        out.append(dict(check="weyl-conjugation", lhs=float(np.abs(conj - m.a(-ts)).max()), rhs=0.0,
                        tol=tol["weyl"], mode="abs"))
        out.append(dict(check="weyl-square", lhs=float(np.abs(m.mul(w, w) + m.identity()).max()),
                        rhs=0.0, tol=tol["weyl"], mode="abs"))
        out.append(dict(check="ad-w-on-A", lhs=float(np.abs(m.iwasawa_H(conj) + ts).max()), rhs=0.0,
                        tol=tol["weyl"], mode="abs"))
    return out


def _poisson_kernel_oracle(m, z, b):
    """``e^{2 rho <z, b>}`` from chart formulas (disk for H^2, half-space for H^3)."""
    if not m.is_complex:
        w = bd.cayley(z)
        return (1 - np.abs(w) ** 2) / np.abs(w - bd.boundary_to_disk(b)) ** 2
    x = z[..., 0] + 1j * z[..., 1]
    y = z[..., 2]
    v = np.asarray(b)
    xi = (v[..., 0] + 1j * v[..., 1]) / (1 - v[..., 2])
    return (y * (1 + np.abs(xi) ** 2) / (np.abs(x - xi) ** 2 + y**2)) ** 2


def _case_bracket(model, idx, p, rng, tol):
    m = get_model(model)
    n = int(p["n_samples"])
    r = p["radius"]
    t = tol["identity"]
    kind = p["kind"]
    x = m.random_element(rng, r, size=n)
    b = _random_boundary(model, rng, n)
    out = []
    if kind == "k-invariance":
        k = m.random_k(rng, size=n)
        lhs = bd.horocycle_bracket(m, m.mul(k, x), bd.boundary_action(m, k, b))
        lo, hi = _worst(lhs, bd.horocycle_bracket(m, x, b))
        out.append(dict(check="k-invariance", lhs=lo, rhs=hi, tol=t, params={"n": n}))
    elif kind == "cocycle":
        g = m.random_element(rng, r, size=n)
        gb = bd.boundary_action(m, g, b)
        lhs = bd.horocycle_bracket(m, m.mul(g, x), gb)
        rhs = bd.horocycle_bracket(m, x, b) + bd.horocycle_bracket(m, g, gb)
        lo, hi = _worst(lhs, rhs)
        out.append(dict(check="bracket-cocycle", lhs=lo, rhs=hi, tol=t, params={"n": n}))
    elif kind == "frame-identities":
        gam = m.random_element(rng, r, size=n)
        g = x
        w = m.weyl()
        eM = bd.frame_endpoints(m, m.mul(gam, g))
        lhs1 = m.iwasawa_H(m.mul(gam, g))
        rhs1 = m.iwasawa_H(g) + bd.horocycle_bracket(m, gam, eM[0])
        lhs2 = m.iwasawa_H(m.mul(gam, g, w))
        rhs2 = m.iwasawa_H(m.mul(g, w)) + bd.horocycle_bracket(m, gam, eM[1])
        lo, hi = _worst(lhs1, rhs1)
        out.append(dict(check="H(gamma g)", lhs=lo, rhs=hi, tol=t, params={"n": n}))
        lo, hi = _worst(lhs2, rhs2)
        out.append(dict(check="H(gamma g w)", lhs=lo, rhs=hi, tol=t, params={"n": n}))
        # frame endpoints of constructed frames
        b2 = _random_boundary(model, rng, n)
        keep = bd.chordal_distance(m, b, b2) > 1e-3
        fr = bd.geodesic_frame(m, b[keep], b2[keep])
        e0, e1 = bd.frame_endpoints(m, fr.g)
        dev = max(float(bd.chordal_distance(m, e0, b[keep]).max()),
                  float(bd.chordal_distance(m, e1, b2[keep]).max()))
        out.append(dict(check="frame-endpoints", lhs=dev, rhs=0.0, tol=t, mode="abs",
                        params={"n": int(keep.sum())}))
    elif kind == "poisson-kernel":
        z = m.to_chart(x)
        lhs = np.exp(2 * m.rho * bd.horocycle_bracket(m, x, b))
        lo, hi = _worst(lhs, _poisson_kernel_oracle(m, z, b))
        out.append(dict(check="poisson-kernel", lhs=lo, rhs=hi, tol=t, params={"n": n}))
    else:
        g1 = m.random_element(rng, r, size=n)
        g2 = m.random_element(rng, r, size=n)
        lhs = bd.boundary_action(m, m.mul(g1, g2), b)
        rhs = bd.boundary_action(m, g1, bd.boundary_action(m, g2, b))
        dev = float(bd.chordal_distance(m, lhs, rhs).max())
        out.append(dict(check="action-associativity", lhs=dev, rhs=0.0, tol=t, mode="abs",
                        params={"n": n}))
    return out


def _random_space_point(m, rng, radius):
    g = m.mul(m.random_k(rng), m.a(rng.uniform(0, radius)))
    return m.to_chart(g)


def _case_poisson(model, idx, p, rng, tol):
    m = get_model(model)
    T = _atoms(model, None, rng, int(p["n_atoms"]))
    out = []
    for lam in p["lambda_grid"]:
        phi = poisson_transform(T, lam)
        z = _random_space_point(m, rng, p["radius"])
        lap = complex(laplacian_fd(phi, z, h=p["h"], model=m))
        out.append(dict(check="fd-eigen", lam=lam, lhs=lap, rhs=complex(eigenvalue(lam, m) * phi(z)),
                        tol=tol["fd"], mode="rel", params={"z": _jsonable(z)}))
        g = m.random_element(rng, p["radius"])
        lhs = complex(phi(g))
        pi1 = principal_series_apply(g, lam, lambda b: np.ones(np.shape(b)[:np.ndim(b) - m.is_complex]), m)
        rhs = complex(np.sum(T.weights * pi1(T.points)))
        out.append(dict(check="intertwining", lam=lam, lhs=lhs, rhs=rhs, tol=tol["intertwining"]))
        gam = m.random_element(rng, p["radius"])
        Tt = T.twisted(gam, lam)
        lhs = complex(phi(m.mul(gam, m.from_chart(z))))
        rhs = complex(poisson_transform(Tt, lam)(z))
        out.append(dict(check="translation-twist", lam=lam, lhs=lhs, rhs=rhs, tol=tol["intertwining"]))
    return out


def _random_boundary_function(m, rng):
    if m.is_complex:
        c0 = complex(*rng.normal(size=2))
        c1 = rng.normal(size=3) + 1j * rng.normal(size=3)
        A = rng.normal(size=(3, 3)) + 1j * rng.normal(size=(3, 3))
        return lambda v: c0 + v @ c1 + np.einsum("...i,ij,...j->...", v, A, v)
    K = 3
    c = rng.normal(size=2 * K + 1) + 1j * rng.normal(size=2 * K + 1)
    ks = np.arange(-K, K + 1)
    return lambda th: np.exp(1j * np.multiply.outer(th, ks)) @ c


def _case_principal(model, idx, p, rng, tol):
    m = get_model(model)
    n = int(min(p["chunk"], p["n_samples"] - idx * p["chunk"]))
    nq = int(p["n_quad_h3"] if m.is_complex else p["n_quad_h2"])
    lo, hi = p["lambda_range"]
    out = []
    for _ in range(n):
        g = m.random_element(rng, p["radius"])
        lam = float(rng.uniform(lo, hi))
        f = _random_boundary_function(m, rng)
        lhs = l2_norm_boundary(principal_series_apply(g, lam, f, m), m, nq)
        rhs = l2_norm_boundary(f, m, nq)
        out.append(dict(check="unitarity", lam=lam, lhs=lhs, rhs=rhs, tol=tol["unitarity"], mode="rel"))
    return out


def _case_ps_invariance(model, idx, p, rng, tol, cfg):
    m = get_model(model)
    a = _symbol(model, p["symbol"], _DEFAULT_CENTERS[model])
    chi = _cutoff(model, a, cfg.cutoff)
    f = symbol_function(a, cutoff=chi)
    n = int(p["n_atoms"])
    Tj = _atoms(model, None, rng, n, "j", through=a.z_support)
    Tk = _atoms(model, None, rng, n, "k", through=a.z_support)
    grid = p["lambda_grid"]
    lam = float(grid[rng.integers(len(grid))])
    mu = float(grid[rng.integers(len(grid))])
    s = float(rng.uniform(-1, 1))
    gam = m.random_element(rng, 0.5)
    t = tol["invariance"]
    base = ps_pairing(f, lam, Tj, lam, Tk)
    out = [
        dict(check="geodesic-flow", lam=lam, lhs=ps_pairing(f.flow(s), lam, Tj, lam, Tk), rhs=base, tol=t,
             params={"s": s}),
        dict(check="time-reversal", lam=lam, lhs=ps_pairing(f.reverse(), lam, Tk, lam, Tj), rhs=base, tol=t),
    ]
    lhs = ps_pairing(f.translate(gam), lam, Tj.twisted(gam, lam), mu, Tk.twisted(gam, mu))
    out.append(dict(check="translation-twist", lam=lam, lhs=lhs, rhs=ps_pairing(f, lam, Tj, mu, Tk), tol=t,
                    params={"mu": mu}))
    return out


def _spec_for(model):
    return QuadratureSpec(rel_tol=1e-10, abs_tol=1e-16) if model == "h2" else \
        QuadratureSpec(rel_tol=1e-8, abs_tol=1e-14)


def _case_diagonal(model, idx, p, rng, tol, cfg):
    m = get_model(model)
    a = _symbol(model, p["symbol"], _DEFAULT_CENTERS[model])
    chi = _cutoff(model, a, cfg.cutoff)
    lams = np.asarray(p["lambda_grid"], dtype=float)
    g = _random_through(model, rng, a.z_support, 1)[0]
    b, b2 = bd.frame_endpoints(m, g)
    spec = _spec_for(model)
    one = lambda pt: BoundaryDistribution.atoms(model, [1.0], [pt])  # noqa: E731
    lhs = wigner_bilinear(a, lams, one(b), lams, one(b2), chi, spec=spec)
    f = symbol_function(a, cutoff=chi)
    rhs = d_lambda_pair(b, b2, lams, m) * radon(LTransform.of(f, lams, spec), b, b2, spec)
    params = {"symbol": p["symbol"], "b": _jsonable(b), "b_prime": _jsonable(b2)}
    return [dict(check="diagonal-key-formula", lam=float(x), lhs=l, rhs=r, tol=tol["rel"], mode="rel",
                 params=params) for x, l, r in zip(lams, lhs, rhs)]


def _case_offdiag(model, idx, p, rng, tol, cfg):
    a = _symbol(model, p["symbol"], _DEFAULT_CENTERS[model])
    chi = _cutoff(model, a, cfg.cutoff)
    n = int(p["n_atoms"])
    # atoms are shared by all cases of the suite: draw them from a case-independent stream
    arng = _rng(cfg.seed, "intertwining-offdiag", model, 10**6)
    Tj = _atoms(model, cfg.atoms, arng, n, "j", through=a.z_support)
    Tk = _atoms(model, cfg.atoms, arng, n, "k", through=a.z_support)
    lk = np.asarray(p["lambda_grid"], dtype=float)
    lj = np.full_like(lk, float(p["lambda_j"]))
    spec = _spec_for(model)
    lhs = wigner_bilinear(a, lj, Tj, lk, Tk, chi, spec=spec)
    f = symbol_function(a, cutoff=chi)
    rhs = ps_pairing(LTransform.of(f, lk, spec), lj, Tj, lk, Tk, spec=spec)
    params = {"symbol": p["symbol"], "lambda_j": float(p["lambda_j"])}
    return [dict(check="wigner=ps", lam=float(x), lhs=l, rhs=r, tol=tol["rel"], mode="rel",
                 params={**params, "lambda_k": float(x)}) for x, l, r in zip(lk, lhs, rhs)]


def _case_msp(model, idx, p, rng, tol, cfg):
    m = get_model(model)
    a = _symbol(model, p["symbol"], _MSP_CENTERS[model])
    f = symbol_function(a)
    g = m.from_chart(_chart_point(model, p["point"])) if "point" in p else m.identity()
    grid = np.asarray(p["lambda_grid"], dtype=float)
    if abs(f(g)[()]) < 1e-8:
        raise IllConditionedError("f(g) is ~0; the leading term vanishes")
    spec = QuadratureSpec(rel_tol=1e-12, abs_tol=1e-16)
    vals = np.asarray(l_lambda(f, grid, g, spec))
    lead = np.array([msp_leading(f, g, x) for x in grid])
    ratios = vals / lead
    dev = np.abs(ratios - 1)
    out = []
    for x, v, ld, r, d in zip(grid, vals, lead, ratios, dev):
        out.append(dict(check="ratio", lam=float(x), lhs=r, rhs=1.0, tol=tol["ratio"], mode="abs",
                        ratio=r, abs_dev=float(d),
                        params={"L": [v.real, v.imag], "leading": [ld.real, ld.imag]}))
    if len(grid) >= 2:
        slope = float(np.polyfit(np.log(grid), np.log(dev), 1)[0])
        out.append(dict(check="rate-slope", lhs=slope, rhs=-1.0, tol=tol["slope"], mode="abs"))
        power = msp_power_fit(f, g, grid) if len(grid) >= 5 else \
            float(np.polyfit(np.log(grid), np.log(np.abs(vals)), 1)[0])
        s = phase_hessian(m).s
        out.append(dict(check="leading-power", lhs=power, rhs=-s / 2, tol=tol["power"], mode="abs"))
        tail = grid >= 40
        if tail.sum() >= 2:
            viol = int(np.sum(np.diff(dev[tail]) > 0))
            out.append(dict(check="monotone-beyond-40", lhs=viol, rhs=0.0, tol=0.0, mode="abs"))
    return out


def _case_fourier(model, idx, p, rng, tol):
    m = get_model(model)
    R = float(p["radius"])
    ball = HyperbolicBall(model, m.origin_chart(), R)

    def u(z):
        return smooth_bump(ball.distance(z), R)

    n = int(p["n_points"])
    pts = m.to_chart(m.mul(m.random_k(rng, size=n), m.a(rng.uniform(0, 0.95 * R, n))))
    rec = fourier_inversion(u, ball, pts, lam_max=p["lam_max"], n_lambda=int(p["n_lambda"]),
                            n_boundary=int(p["n_boundary"]), n_radial=int(p["n_radial"]))
    exact = u(pts)
    err = float(np.linalg.norm(rec - exact) / np.linalg.norm(exact))
    return [dict(check="l2-reconstruction", lhs=err, rhs=0.0, tol=tol["l2"], mode="abs",
                 params={"lam_max": p["lam_max"], "n_lambda": p["n_lambda"], "n_points": n})]


_BODIES = {
    "iwasawa": _case_iwasawa,
    "bracket": _case_bracket,
    "poisson": _case_poisson,
    "principal-series": _case_principal,
    "fourier-inversion": _case_fourier,
}
_BODIES_CFG = {
    "ps-invariance": _case_ps_invariance,
    "intertwining-diagonal": _case_diagonal,
    "intertwining-offdiag": _case_offdiag,
    "msp-rate": _case_msp,
}


def _jsonable(x):
    x = np.asarray(x)
    if np.iscomplexobj(x):
        return [float(x.real), float(x.imag)] if x.ndim == 0 else [[float(v.real), float(v.imag)] for v in x.ravel()]
    return float(x) if x.ndim == 0 else [float(v) for v in x.ravel()]


def run_case(case: dict, cfg_echo: dict) -> list:
    """Evaluate one planned case; infrastructure errors become failed records."""
    cfg = parse_config(cfg_echo, parallelism=1)
    suite, model, idx, p = case["suite"], case["model"], case["index"], case["params"]
    tol = dict(DEFAULT_TOLERANCES[suite])
    tol.update(cfg.tolerances)
    rng = _rng(cfg.seed, suite, model, idx)
    try:
        if suite in _BODIES:
            raw = _BODIES[suite](model, idx, p, rng, tol)
        else:
            raw = _BODIES_CFG[suite](model, idx, p, rng, tol, cfg)
    except Exception as exc:  # recorded, not raised: a failing case is a report outcome
        return [CaseRecord.failure(suite, model, idx, "error", exc, params={})]
    recs = []
    for r in raw:
        r = dict(r)
        prm = r.pop("params", {})
        recs.append(CaseRecord(suite=suite, model=model, case=idx, params=prm, **r))
    return recs


def run_suite(config, *, suite=None, parallelism=None, timestamp=True) -> VerificationReport:
    """Run every planned case of ``config`` (a :class:`SuiteConfig` or mapping)."""
    cfg = config if isinstance(config, SuiteConfig) else parse_config(config)
    if suite is not None or parallelism is not None:
        cfg = parse_config(cfg.echo(), suite_override=suite, parallelism=parallelism or cfg.parallelism)
    echo = cfg.echo()
    cases, skipped = plan_cases(cfg)
    t0 = time.perf_counter()
    if cfg.parallelism > 1 and len(cases) > 1:
        with ProcessPoolExecutor(max_workers=cfg.parallelism) as ex:
            results = list(ex.map(run_case, cases, [echo] * len(cases)))
    else:
        results = [run_case(c, echo) for c in cases]
    records = [r for rs in results for r in rs]
    wall = time.perf_counter() - t0
    return VerificationReport(
        cases=records,
        config_echo=echo,
        wall_time=wall if timestamp else None,
        timestamp=_dt.datetime.now(_dt.timezone.utc).isoformat() if timestamp else None,
        skipped=skipped,
    )
