"""Grid optimization, rate-region tracing and baseline comparisons."""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field, replace
from typing import Callable, Mapping

import numpy as np

from . import gaussian_strategies as gs
from .core import (
    BrcError,
    DomainError,
    GaussianBrcParams,
    InfeasibleParameterError,
    RatePoint2D,
    RateRegion,
    StrategyKind,
)

# bound on grid points evaluated in one objective call
BATCH = 200_000


@dataclass(frozen=True)
class SweepSpec:
    """Box, grid resolution and refinement schedule for :func:`maximin_optimize`.

    ``bounds`` maps parameter names to (lower, upper); its order fixes the
    order used for lexicographic tie-breaking.
    """

    bounds: Mapping[str, tuple[float, float]] = field(default_factory=dict)
    points: int = 101
    refine: int = 3
    zoom: float = 0.1

    def __post_init__(self) -> None:
        b = {}
        for name, (lo, hi) in dict(self.bounds).items():
            lo, hi = float(lo), float(hi)
            if not (math.isfinite(lo) and math.isfinite(hi)) or lo > hi:
                raise DomainError(f"bad bounds for {name}: ({lo}, {hi})")
            b[name] = (lo, hi)
        object.__setattr__(self, "bounds", b)
        if self.points < 2:
            raise DomainError("points must be >= 2")
        if self.refine < 0:
            raise DomainError("refine must be >= 0")
        if not 0.0 < self.zoom < 1.0:
            raise DomainError("zoom must lie in (0, 1)")

    def with_bounds(self, **bounds: tuple[float, float]) -> SweepSpec:
        return replace(self, bounds=bounds)


@dataclass(frozen=True)
class CompositeScenario:
    """Relay channel that is branch 1 of ``params`` with probability ``p``
    and branch 2 otherwise."""

    p: float
    params: GaussianBrcParams

    def __post_init__(self) -> None:
        if not (math.isfinite(self.p) and 0.0 <= self.p <= 1.0):
            raise DomainError(f"p must lie in [0, 1], got {self.p!r}")


# ---------------------------------------------------------------- optimizer


def _safe_eval(objective, batch: Mapping[str, np.ndarray]) -> np.ndarray:
    n = len(next(iter(batch.values())))
    try:
        with np.errstate(all="ignore"):
            v = np.asarray(objective(**batch), dtype=float)
        v = np.broadcast_to(v, (n,)).copy()
    except (BrcError, ValueError, ArithmeticError):
        # isolate the failing points
        v = np.empty(n)
        for i in range(n):
            try:
                with np.errstate(all="ignore"):
                    v[i] = float(np.asarray(objective(**{k: a[i:i + 1] for k, a in batch.items()})).reshape(-1)[0])
            except (BrcError, ValueError, ArithmeticError):
                v[i] = -np.inf
    v[~np.isfinite(v)] = -np.inf
    return v


def _grid(lo: np.ndarray, hi: np.ndarray, points: int) -> list[np.ndarray]:
    return [np.linspace(a, b, points) if b > a else np.array([a]) for a, b in zip(lo, hi)]


def maximin_optimize(objective: Callable[..., np.ndarray], spec: SweepSpec):
    """Maximize ``objective`` over the box of ``spec``.

    ``objective`` is called with one keyword array per parameter (all the
    same shape) and must return the values elementwise. Points where it
    raises or returns NaN count as -inf. Each pass scans a regular grid;
    later passes rescan a box ``zoom`` times narrower centred on the
    incumbent. Ties go to the lexicographically smallest point.

    Returns ``(best, value)`` with ``best`` a dict of parameter values.
    """
    names = list(spec.bounds)
    if not names:
        raise DomainError("spec has no parameters")
    lo0 = np.array([spec.bounds[k][0] for k in names])
    hi0 = np.array([spec.bounds[k][1] for k in names])
    lo, hi = lo0.copy(), hi0.copy()
    best_x, best_v = None, -np.inf
    for _ in range(spec.refine + 1):
        axes = _grid(lo, hi, spec.points)
        shape = tuple(len(a) for a in axes)
        total = int(np.prod(shape))
        vals = np.empty(total)
        for start in range(0, total, BATCH):
            idx = np.unravel_index(np.arange(start, min(total, start + BATCH)), shape)
            vals[start:start + len(idx[0])] = _safe_eval(
                objective, {k: axes[i][idx[i]] for i, k in enumerate(names)})
        j = int(np.argmax(vals))
        v = vals[j]
        x = np.array([axes[i][k] for i, k in enumerate(np.unravel_index(j, shape))])
        if v > best_v or (v == best_v and best_x is not None and tuple(x) < tuple(best_x)):
            best_x, best_v = x, v
        if best_x is None:
            break
        half = 0.5 * spec.zoom * (hi - lo)
        lo = np.maximum(lo0, best_x - half)
        hi = np.minimum(hi0, best_x + half)
    if best_x is None or best_v == -np.inf:
        raise InfeasibleParameterError("objective is -inf on the whole search box")
    best = {k: float(best_x[i]) for i, k in enumerate(names)}
    value = float(_safe_eval(objective, {k: np.array([best[k]]) for k in names})[0])
    return best, value


def batched_maximize(objective, bounds_lo, bounds_hi, spec: SweepSpec):
    """Independent 1-D/2-D maximizations for a batch of problems.

    ``bounds_lo``/``bounds_hi`` have shape (m, d). ``objective(X)`` receives
    X of shape (m, g, d) and returns values of shape (m, g). Returns the
    arg-max points (m, d) and values (m,). Same scan/zoom/tie rules as
    :func:`maximin_optimize`.
    """
    lo0 = np.asarray(bounds_lo, float)
    hi0 = np.asarray(bounds_hi, float)
    m, d = lo0.shape
    lo, hi = lo0.copy(), hi0.copy()
    best_x = np.full((m, d), np.nan)
    best_v = np.full(m, -np.inf)
    t = np.linspace(0.0, 1.0, spec.points)
    unit = np.array(list(itertools.product(t, repeat=d)))  # C order, ascending
    for _ in range(spec.refine + 1):
        X = lo[:, None, :] + unit[None, :, :] * (hi - lo)[:, None, :]
        with np.errstate(all="ignore"):
            V = np.asarray(objective(X), float)
        V = np.where(np.isfinite(V), V, -np.inf)
        j = np.argmax(V, axis=1)
        v = V[np.arange(m), j]
        x = X[np.arange(m), j]
        better = v > best_v
        best_v = np.where(better, v, best_v)
        best_x = np.where(better[:, None], x, best_x)
        half = 0.5 * spec.zoom * (hi - lo)
        ok = np.isfinite(best_x)
        lo = np.where(ok, np.maximum(lo0, best_x - half), lo0)
        hi = np.where(ok, np.minimum(hi0, best_x + half), hi0)
    return best_x, best_v


def time_sharing_rate(r_df: float, r_cf: float):
    """max over tau of min(tau r_df, (1 - tau) r_cf) as (tau*, value)."""
    if r_df < 0 or r_cf < 0:
        raise DomainError("rates must be nonnegative")
    s = r_df + r_cf
    if s == 0:
        return 0.0, 0.0
    return r_cf / s, r_df * r_cf / s


# ---------------------------------------------------------------- hulls


def _cross(o, a, b) -> float:
    return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])


def convex_hull_2d(points) -> list[RatePoint2D]:
    """Counterclockwise convex hull (Andrew's monotone chain) starting at
    the lowest-x, lowest-y point; collinear boundary points are dropped."""
    pts = sorted({(float(p[0]), float(p[1])) for p in points})
    if not pts:
        raise DomainError("convex hull of an empty point set")
    for p in pts:
        if not (math.isfinite(p[0]) and math.isfinite(p[1])):
            raise DomainError("points must be finite")
    if len(pts) <= 2:
        return [RatePoint2D(*p) for p in pts]

    def chain(seq):
        out = []
        for p in seq:
            while len(out) >= 2 and _cross(out[-2], out[-1], p) <= 0:
                out.pop()
            out.append(p)
        return out

    lower = chain(pts)
    upper = chain(reversed(pts))
    hull = lower[:-1] + upper[:-1]
    return [RatePoint2D(*p) for p in hull]


def hull_contains(hull, point, tol: float = 1e-12) -> bool:
    """True if ``point`` lies in the convex polygon ``hull`` (ccw order)."""
    h = list(hull)
    if len(h) == 1:
        return abs(h[0][0] - point[0]) <= tol and abs(h[0][1] - point[1]) <= tol
    if len(h) == 2:
        a, b = h
        if abs(_cross(a, b, point)) > tol * max(1.0, math.dist(a, b)):
            return False
        lo_x, hi_x = sorted((a[0], b[0]))
        lo_y, hi_y = sorted((a[1], b[1]))
        return lo_x - tol <= point[0] <= hi_x + tol and lo_y - tol <= point[1] <= hi_y + tol
    for i in range(len(h)):
        a, b = h[i], h[(i + 1) % len(h)]
        if _cross(a, b, point) < -tol * max(1.0, math.dist(a, b)):
            return False
    return True


# ---------------------------------------------------------------- per-strategy kernels

INNER_SPEC = SweepSpec(points=41, refine=4, zoom=0.15)
CODING_KEYS = ("alpha", "beta1", "beta2", "gamma", "lambda")
# DPC inflation search range for user 2 in DF_DF
GAMMA_MAX = 2.0


def best_dpc_coef(q, s, first, second, lo: float = 0.0, hi: float = 1.0):
    """Coefficient in [lo, hi] maximizing min of two dirty-paper terms.

    ``first``/``second`` are (N, n) pairs for :func:`dpc_rate` sharing
    (q, s). The optimum of a max-min of two unimodal curves sits at an end
    point, at one of the two peaks or where the curves cross, and the
    crossing solves a quadratic; all candidates are scored exactly.
    Returns (coef, value) arrays; ties go to the smallest coefficient.
    """
    (N1, n1), (N2, n2) = first, second
    q, s, N1, n1, N2, n2 = np.broadcast_arrays(*(np.asarray(v, float) for v in (q, s, N1, n1, N2, n2)))
    a = s * (N1 * (n2 + q) - N2 * (n1 + q))
    b = -2.0 * q * s * (N1 - N2)
    d = q * (N1 * n2 - N2 * n1 + s * (N1 - N2))
    with np.errstate(all="ignore"):
        disc = np.sqrt(np.where(b * b - 4 * a * d >= 0, b * b - 4 * a * d, np.nan))
        scale = np.maximum.reduce([np.abs(a), np.abs(b), np.abs(d)])
        quad = np.abs(a) > 1e-14 * np.where(scale > 0, scale, 1.0)
        r1 = np.where(quad, (-b + disc) / (2 * a), -d / b)
        r2 = np.where(quad, (-b - disc) / (2 * a), np.nan)
        c1 = q / (q + n1)
        c2 = q / (q + n2)
    cand = np.stack([np.full_like(q, lo), np.full_like(q, hi), c1, c2, r1, r2], axis=-1)
    cand = np.where((cand >= lo) & (cand <= hi), cand, np.nan)
    cand = np.sort(cand, axis=-1)
    val = np.minimum(gs.dpc_rate(q[..., None], s[..., None], N1[..., None], n1[..., None], cand),
                     gs.dpc_rate(q[..., None], s[..., None], N2[..., None], n2[..., None], cand))
    val = np.where(np.isnan(cand) | np.isnan(val), -np.inf, val)
    j = np.argmax(val, axis=-1)[..., None]
    return np.take_along_axis(cand, j, -1)[..., 0], np.take_along_axis(val, j, -1)[..., 0]


def _user1_best(params, alpha, beta, lam=None):
    q, s, A, B = gs.df_user1_dpc(params, alpha, beta)
    if lam is None:
        return best_dpc_coef(q, s, A, B)
    lam = np.broadcast_to(np.asarray(lam, float), np.shape(q))
    return lam, np.minimum(gs.dpc_rate(q, s, *A, lam), gs.dpc_rate(q, s, *B, lam))


def _dfdf_user2_best(params, alpha, beta1, beta2=None, gamma=None, inner: SweepSpec = INNER_SPEC):
    """max over (beta2, gamma) of min(R21, R22); returns (beta2, gamma, value)."""
    alpha, beta1 = np.broadcast_arrays(np.asarray(alpha, float), np.asarray(beta1, float))

    def at(b2):
        q, s, A, B = gs.dfdf_user2_dpc(params, alpha[..., None] if b2.ndim > alpha.ndim else alpha,
                                       beta1[..., None] if b2.ndim > beta1.ndim else beta1, b2)
        if gamma is None:
            return best_dpc_coef(q, s, A, B, 0.0, GAMMA_MAX)
        g = np.broadcast_to(np.asarray(gamma, float), np.shape(q))
        return g, np.minimum(gs.dpc_rate(q, s, *A, g), gs.dpc_rate(q, s, *B, g))

    if beta2 is not None:
        b2 = np.broadcast_to(np.asarray(beta2, float), alpha.shape)
        g, v = at(b2)
        return b2, g, v
    m = alpha.size
    x, _ = batched_maximize(lambda X: at(X[..., 0].reshape(alpha.shape + (-1,)))[1].reshape(m, -1),
                            np.zeros((m, 1)), np.ones((m, 1)), inner)
    b2 = x[:, 0].reshape(alpha.shape)
    g, v = at(b2)
    return b2, g, v


def strategy_profile(strategy: StrategyKind, params: GaussianBrcParams, alpha, beta1,
                     fixed: Mapping[str, float] | None = None, *, degraded: bool = False,
                     form: str = gs.CF_FORM_MIXED, inner: SweepSpec = INNER_SPEC) -> dict:
    """Rates of ``strategy`` at arrays (alpha, beta1), with the remaining
    coding parameters either taken from ``fixed`` or set to their best
    values. Returns arrays keyed R0, R1, R2 and the coding parameter names.
    """
    fixed = dict(fixed or {})
    alpha, beta1 = np.broadcast_arrays(np.asarray(alpha, float), np.asarray(beta1, float))
    zero = np.zeros_like(alpha)
    out = {"alpha": alpha, "beta1": beta1, "beta2": zero + 1.0, "gamma": zero, "lambda": zero, "R0": zero}
    kind = StrategyKind(strategy)
    if kind is StrategyKind.DF_DF:
        out["lambda"], out["R1"] = _user1_best(params, alpha, beta1, fixed.get("lambda"))
        out["beta2"], out["gamma"], out["R2"] = _dfdf_user2_best(
            params, alpha, beta1, fixed.get("beta2"), fixed.get("gamma"), inner)
    elif kind is StrategyKind.DF_CF_CASE1:
        relay, direct, _ = gs.dfcf1_terms(params, alpha, beta1, form=form)
        out["R1"] = np.minimum(relay, direct)
        q = (1.0 - alpha) * params.P
        nt = gs.cf_equivalent_noise(params, 2, form)
        g = fixed.get("gamma")
        out["gamma"] = q / (q + nt) if g is None else zero + g
        out["R2"] = gs.dfcf1_terms(params, alpha, beta1, g if g is None else out["gamma"], form)[2]
    elif kind is StrategyKind.DF_CF_CASE2:
        out["lambda"], out["R1"] = _user1_best(params, alpha, beta1, fixed.get("lambda"))
        ab = (1.0 - alpha) * params.P
        neff = alpha * beta1 * params.P + gs.cf_equivalent_noise(params, 2, form)
        g = fixed.get("gamma")
        out["gamma"] = (np.sqrt((1.0 - beta1) * alpha * params.P / params.P1) * ab / (ab + neff)
                        if g is None else zero + g)
        out["R2"] = gs.dfcf2_terms(params, alpha, beta1, 0.0, g if g is None else out["gamma"], form)[2]
    elif kind is StrategyKind.CF_CF:
        out["R1"], out["R2"] = gs.cfcf_terms(params, alpha)
        q = (1.0 - alpha) * params.P
        out["gamma"] = q / (q + gs.cf_equivalent_noise(params, 2))
    elif kind is StrategyKind.OBLIVIOUS:
        relay, direct, r2, outer = gs.oblivious_terms(params, alpha, beta1, degraded)
        out["R1"], out["R2"] = np.minimum(relay, direct), r2
        out["R1_outer"] = np.minimum(outer, direct)
        q = (1.0 - alpha) * params.P
        out["gamma"] = q / (q + params.pl("d_y2") * params.N2)
    elif kind is StrategyKind.PARTIAL_COOP_CAPACITY:
        relay, direct, r2 = gs.partial_coop_terms(params, alpha, beta1)
        out["R1"], out["R2"] = np.minimum(relay, direct), r2
    elif kind is StrategyKind.DEGRADED_CR_CAPACITY:
        a, b, s = gs.degraded_cr_terms(params, alpha, beta1)
        sym = np.minimum.reduce([a, b, 0.5 * s])
        out.update(R0=sym, R1=sym, R2=zero, r0_max=a, r1_max=b, sum_max=s)
    else:
        raise DomainError(f"{kind.value} has no (alpha, beta) profile")
    for k in ("R0", "R1", "R2"):
        out[k] = np.maximum(np.broadcast_to(out[k], alpha.shape), 0.0)
    return out


def _objective_value(kind: StrategyKind, prof: dict) -> np.ndarray:
    if kind is StrategyKind.DEGRADED_CR_CAPACITY:
        return prof["R0"]
    return np.minimum(prof["R1"], prof["R2"])


def evaluate_strategy(strategy, params: GaussianBrcParams, spec: SweepSpec | None = None,
                      fixed: Mapping[str, float] | None = None, *, degraded: bool = False,
                      form: str = gs.CF_FORM_MIXED, inner: SweepSpec = INNER_SPEC) -> dict:
    """Max-min evaluation of one strategy: maximize min(R1, R2) (or the
    symmetric common/private point for DEGRADED_CR_CAPACITY) over the
    coding parameters not listed in ``fixed``. Returns a flat dict of floats.
    """
    spec = spec or SweepSpec()
    fixed = dict(fixed or {})
    kind = StrategyKind(strategy)
    if kind is StrategyKind.COMPOUND:
        bspec = replace(spec, bounds={"beta": (fixed["beta1"],) * 2 if "beta1" in fixed else (0.0, 1.0)})
        pt = compound_point(params, bspec, form)
        row = {"alpha": 1.0, "beta1": pt["beta"], "beta2": 1.0, "gamma": 0.0, "lambda": 0.0,
               "R0": pt["R0"], "R1": 0.0, "R2": 0.0}
        row.update({k: pt[k] for k in ("R_DF", "R_CF", "R_TS", "tau", "R_CF1")})
        return row
    bounds = {}
    for name in ("alpha", "beta1"):
        v = fixed.get(name)
        bounds[name] = (v, v) if v is not None else (0.0, 1.0)
    if kind is StrategyKind.CF_CF:
        bounds["beta1"] = (1.0, 1.0)

    def objective(alpha, beta1):
        prof = strategy_profile(kind, params, alpha, beta1, fixed, degraded=degraded, form=form, inner=inner)
        return _objective_value(kind, prof)

    best, _ = maximin_optimize(objective, replace(spec, bounds=bounds))
    prof = strategy_profile(kind, params, np.array([best["alpha"]]), np.array([best["beta1"]]), fixed,
                            degraded=degraded, form=form, inner=inner)
    row = {k: float(np.asarray(v).reshape(-1)[0]) for k, v in prof.items()}
    if kind is StrategyKind.OBLIVIOUS:
        # outer bound maximized over beta at the same alpha
        ob = maximin_optimize(
            lambda beta1: strategy_profile(kind, params, best["alpha"], beta1, degraded=degraded)["R1_outer"],
            replace(spec, bounds={"beta1": bounds["beta1"]}))
        row["R1_outer"] = ob[1]
    return row


def _alpha_grid(spec: SweepSpec, alpha: float | None) -> np.ndarray:
    if alpha is not None:
        return np.array([float(alpha)])
    lo, hi = spec.bounds.get("alpha", (0.0, 1.0))
    return np.linspace(lo, hi, spec.points)


def _beta_grid(spec: SweepSpec, name: str = "beta1") -> np.ndarray:
    lo, hi = spec.bounds.get(name, spec.bounds.get("beta", (0.0, 1.0)))
    return np.linspace(lo, hi, spec.points)


def rate_pairs(strategy: StrategyKind, params: GaussianBrcParams, spec: SweepSpec, *,
               alpha: float | None = None, bound: str = "inner", degraded: bool = False,
               form: str = gs.CF_FORM_MIXED, inner: SweepSpec = INNER_SPEC) -> np.ndarray:
    """Candidate (R1, R2) pairs of ``strategy``, shape (k, 2).

    Pairs are produced on the alpha grid. Where R1 and R2 share beta1
    (DF_DF, DF_CF_CASE2) the beta1 grid is crossed with it; otherwise beta
    only enters R1 and is maximized out per alpha.
    """
    kind = StrategyKind(strategy)
    if kind is StrategyKind.OBLIVIOUS and bound not in ("inner", "outer"):
        raise DomainError(f"bound must be 'inner' or 'outer', got {bound!r}")
    if kind in (StrategyKind.COMPOUND, StrategyKind.COMPOSITE, StrategyKind.DEGRADED_CR_CAPACITY):
        raise DomainError(f"{kind.value} has no private-rate region")
    a = _alpha_grid(spec, alpha)
    key = "R1_outer" if (kind is StrategyKind.OBLIVIOUS and bound == "outer") else "R1"

    def prof(al, be):
        return strategy_profile(kind, params, al, be, degraded=degraded, form=form, inner=inner)

    if kind is StrategyKind.CF_CF:
        p = prof(a, np.ones_like(a))
        r1, r2 = p["R1"], p["R2"]
    elif kind in (StrategyKind.DF_DF, StrategyKind.DF_CF_CASE2):
        aa, bb = (g.ravel() for g in np.meshgrid(a, _beta_grid(spec, "beta1"), indexing="ij"))
        step = max(1, BATCH // (inner.points * 6))
        r1, r2 = [], []
        for i in range(0, len(aa), step):
            p = prof(aa[i:i + step], bb[i:i + step])
            r1.append(p["R1"])
            r2.append(p["R2"])
        r1, r2 = np.concatenate(r1), np.concatenate(r2)
    else:
        lo = np.zeros((len(a), 1))
        hi = np.ones((len(a), 1))
        _, r1 = batched_maximize(lambda X: prof(a[:, None], X[..., 0])[key], lo, hi, inner)
        r2 = prof(a, np.ones_like(a))["R2"]
    return np.maximum(np.column_stack([r1, r2]), 0.0)


def _degraded_cr_points(params, spec: SweepSpec, alpha: float | None) -> np.ndarray:
    """Pentagon vertices (R1, R0) of each (alpha, beta) slice."""
    a = _alpha_grid(spec, alpha)
    aa, bb = (g.ravel() for g in np.meshgrid(a, _beta_grid(spec), indexing="ij"))
    r0, r1, s = gs.degraded_cr_terms(params, aa, bb)
    r0c, r1c = np.minimum(r0, s), np.minimum(r1, s)
    pts = [
        np.column_stack([r1c, np.clip(np.minimum(r0, s - r1c), 0, None)]),
        np.column_stack([np.clip(np.minimum(r1, s - r0c), 0, None), r0c]),
        np.column_stack([r1c, np.zeros_like(r1c)]),
        np.column_stack([np.zeros_like(r0c), r0c]),
    ]
    return np.vstack(pts)


def _scalarize(pts: np.ndarray, weights: int) -> list[RatePoint2D]:
    """Weighted-sum maximizers over a weight grid, the axis points and the origin."""
    chosen = []
    for w in np.linspace(0.0, 1.0, weights):
        j = int(np.argmax(w * pts[:, 0] + (1.0 - w) * pts[:, 1]))
        chosen.append(RatePoint2D(float(pts[j, 0]), float(pts[j, 1])))
    chosen.append(RatePoint2D(float(pts[:, 0].max()), 0.0))
    chosen.append(RatePoint2D(0.0, float(pts[:, 1].max())))
    chosen.append(RatePoint2D(0.0, 0.0))
    return chosen


def region_boundary(strategy, params: GaussianBrcParams, spec: SweepSpec | None = None, *,
                    alpha: float | None = None, bound: str = "inner", degraded: bool = False,
                    weights: int = 101, form: str = gs.CF_FORM_MIXED,
                    inner: SweepSpec = INNER_SPEC) -> RateRegion:
    """Trace the private-rate region of ``strategy`` as a convex hull.

    DF_DF and CF_CF also include the mirrored DPC ordering (roles of the
    branches swapped, rates swapped back). DF_CF_CASE1/2 give one case; use
    COMPOSITE or call twice for their union, or pass ``"DF_CF"`` for both.
    DEGRADED_CR_CAPACITY returns its (R1, R0) region.
    """
    spec = spec or SweepSpec()
    tag = str(getattr(strategy, "value", strategy))
    kw = dict(alpha=alpha, bound=bound, degraded=degraded, form=form, inner=inner)
    if tag == "DF_CF":
        pts = np.vstack([rate_pairs(StrategyKind.DF_CF_CASE1, params, spec, **kw),
                         rate_pairs(StrategyKind.DF_CF_CASE2, params, spec, **kw)])
        axes = ("R1", "R2")
    elif tag == StrategyKind.DEGRADED_CR_CAPACITY.value:
        pts = _degraded_cr_points(params, spec, alpha)
        axes = ("R1", "R0")
    else:
        kind = StrategyKind(tag)
        pts = rate_pairs(kind, params, spec, **kw)
        if kind in (StrategyKind.DF_DF, StrategyKind.CF_CF):
            mkw = {**kw, "alpha": None if alpha is None else 1.0 - float(alpha)}
            mirrored = rate_pairs(kind, params.mirrored(), _mirror_spec(spec), **mkw)
            # mirrored alpha is the share of the other user
            pts = np.vstack([pts, mirrored[:, ::-1]])
        axes = ("R1", "R2")
    chosen = _scalarize(pts, weights)
    hull = convex_hull_2d(chosen)
    return RateRegion(points=chosen, hull=hull, axes=axes,
                      meta={"strategy": tag, "bound": bound, "candidates": int(len(pts))})


def _mirror_spec(spec: SweepSpec) -> SweepSpec:
    b = dict(spec.bounds)
    if "alpha" in b:
        lo, hi = b["alpha"]
        b["alpha"] = (1.0 - hi, 1.0 - lo)
    if "beta1" in b or "beta2" in b:
        b1, b2 = b.get("beta1"), b.get("beta2")
        b.pop("beta1", None)
        b.pop("beta2", None)
        if b2 is not None:
            b["beta1"] = b2
        if b1 is not None:
            b["beta2"] = b1
    return replace(spec, bounds=b)


# ---------------------------------------------------------------- common-message baselines

BETA_SPEC = SweepSpec(bounds={"beta": (0.0, 1.0)})


def df_single_rate(params: GaussianBrcParams, side: int, spec: SweepSpec = BETA_SPEC):
    """Best DF rate of branch ``side`` alone as (beta*, rate)."""
    p = params if side == 1 else params.mirrored()

    def f(beta):
        relay, direct, _ = gs.compound_terms(p, beta)
        return np.minimum(relay, direct)

    best, val = maximin_optimize(f, spec)
    return best["beta"], val


def compound_point(params: GaussianBrcParams, spec: SweepSpec = BETA_SPEC, form: str = gs.CF_FORM_MIXED) -> dict:
    """Best common rate of the DF/CF compound channel and its comparisons."""
    beta, r_df = df_single_rate(params, 1, spec)
    r_cf = gs.cf_single_rate(params, 2, form)
    tau, r_ts = time_sharing_rate(r_df, r_cf)
    return {
        "beta": beta,
        "R_DF": r_df,
        "R_CF": r_cf,
        "R0": min(r_df, r_cf),
        "R_TS": r_ts,
        "tau": tau,
        "R_CF1": gs.cf_single_rate(params, 1, gs.CF_FORM_BOTH),
    }


def cutset_max(params: GaussianBrcParams, spec: SweepSpec | None = None):
    """max over (beta1, beta2) of the cut-set bound as (best, value)."""
    spec = spec or SweepSpec(bounds={"beta1": (0.0, 1.0), "beta2": (0.0, 1.0)})
    return maximin_optimize(lambda beta1, beta2: np.minimum.reduce(gs.cutset_terms(params, beta1, beta2)), spec)


def relay_position_sweep(params: GaussianBrcParams, d1_values, d2: float,
                         spec: SweepSpec = BETA_SPEC) -> list[dict]:
    """Compound common-rate comparison as relay 1 moves along the
    source-destination segment while relay 2 stays at ``d2``."""
    base = params.with_relay_position(2, d2)
    rows = []
    for d1 in d1_values:
        row = {"d1": float(d1)}
        row.update(compound_point(base.with_relay_position(1, float(d1)), spec))
        rows.append(row)
    return rows


def composite_candidates(params: GaussianBrcParams, spec: SweepSpec | None = None,
                         inner: SweepSpec = INNER_SPEC, form: str = gs.CF_FORM_MIXED):
    """Common point and private (R1, R2) pairs of both DF-CF cases."""
    spec = spec or SweepSpec()
    common = compound_point(params, BETA_SPEC, form)
    pairs = np.vstack([
        rate_pairs(StrategyKind.DF_CF_CASE1, params, spec, form=form, inner=inner),
        rate_pairs(StrategyKind.DF_CF_CASE2, params, spec, form=form, inner=inner),
    ])
    return common, pairs


def composite_baselines(params: GaussianBrcParams, form: str = gs.CF_FORM_MIXED) -> dict:
    """Per-channel single-scheme rates used by the composite baselines."""
    return {
        "R_DF1": df_single_rate(params, 1)[1],
        "R_DF2": df_single_rate(params, 2)[1],
        "R_CF1": gs.cf_single_rate(params, 1, form),
        "R_CF2": gs.cf_single_rate(params, 2, form),
    }


def composite_expected_rate(scn: CompositeScenario, spec: SweepSpec | None = None, *,
                            candidates=None, baselines: Mapping[str, float] | None = None,
                            form: str = gs.CF_FORM_MIXED):
    """(r_av_broadcast, r_av_df, r_av_cf) for the composite relay channel.

    The broadcast scheme time-shares between the pure common point
    (R0, 0, 0) and the private pairs (0, R1, R2) of both DF-CF cases, so the
    expected rate is the largest linear score over those candidates.
    ``candidates``/``baselines`` may carry precomputed
    :func:`composite_candidates`/:func:`composite_baselines` results.
    """
    p = scn.p
    common, pairs = candidates or composite_candidates(scn.params, spec, form=form)
    b = baselines or composite_baselines(scn.params, form)
    r_bc = max(common["R0"], float(np.max(p * pairs[:, 0] + (1.0 - p) * pairs[:, 1])))
    df = (b["R_DF1"], b["R_DF2"])
    cf = (b["R_CF1"], b["R_CF2"])
    return r_bc, _single_scheme_average(df, p), _single_scheme_average(cf, p)


def _single_scheme_average(rates: tuple[float, float], p: float) -> float:
    """max{p_max R_max, R_min} for one scheme with per-channel rates."""
    probs = (p, 1.0 - p)
    k = 0 if rates[0] >= rates[1] else 1
    return max(probs[k] * rates[k], min(rates))
