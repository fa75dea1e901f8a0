"""Finite-alphabet reference computations.

Mutual information is evaluated by exhaustive summation over explicit
probability tensors. Nothing here is vectorized cleverly beyond what numpy
gives for free; alphabets are meant to be tiny.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from ..core import DomainError, RatePoint2D, RateRegion

NORM_TOL = 1e-12
TV_TOL = 1e-9


def _entropy(p: np.ndarray, keep: Sequence[int]) -> float:
    """Entropy in bits of the marginal on axes ``keep``."""
    drop = tuple(i for i in range(p.ndim) if i not in set(keep))
    m = p.sum(axis=drop) if drop else p
    m = m[m > 0]
    return float(-(m * np.log2(m)).sum())


def discrete_mi(joint, a_axes, b_axes, cond_axes=()) -> float:
    """I(A;B|C) in bits for a joint probability tensor.

    Axes are integer positions. ``0 log 0`` is taken as 0.
    """
    p = np.asarray(joint, dtype=float)
    if np.any(p < 0) or abs(p.sum() - 1.0) > NORM_TOL:
        raise DomainError(f"joint must be a probability tensor (sum={p.sum()!r})")
    a, b, c = list(a_axes), list(b_axes), list(cond_axes)
    if not a or not b:
        raise DomainError("a and b must be nonempty")
    if set(a) & set(b):
        raise DomainError("a and b must be disjoint")
    for ax in a + b + c:
        if not 0 <= ax < p.ndim:
            raise DomainError(f"axis {ax} out of range")
    a = [x for x in a if x not in c]
    b = [x for x in b if x not in c]
    if not a or not b:
        return 0.0
    val = _entropy(p, a + c) + _entropy(p, b + c) - _entropy(p, a + b + c) - _entropy(p, c)
    return max(val, 0.0)


class NamedDist:
    """Probability tensor with named axes, for readable MI expressions."""

    def __init__(self, p: np.ndarray, names: Sequence[str]):
        if p.ndim != len(names):
            raise DomainError("one name per axis required")
        self.p = p
        self.axis = {n: i for i, n in enumerate(names)}

    def mi(self, a: str, b: str, cond: str = "") -> float:
        """``a``, ``b``, ``cond`` are comma-separated variable names."""
        def ax(s):
            return [self.axis[k.strip()] for k in s.split(",") if k.strip()]
        return discrete_mi(self.p, ax(a), ax(b), ax(cond))


@dataclass(frozen=True)
class DiscreteBRC:
    """Common-relay BRC given by W[x, x1, y1, z1, y2] = P(y1, z1, y2 | x, x1)."""

    W: np.ndarray

    def __post_init__(self) -> None:
        W = np.asarray(self.W, dtype=float)
        if W.ndim != 5:
            raise DomainError("W must have axes (x, x1, y1, z1, y2)")
        if np.any(W < 0):
            raise DomainError("W has negative entries")
        if np.any(np.abs(W.sum(axis=(2, 3, 4)) - 1.0) > NORM_TOL):
            raise DomainError("each conditional slice of W must sum to 1")
        object.__setattr__(self, "W", W)

    @property
    def sizes(self) -> tuple[int, ...]:
        return self.W.shape

    @classmethod
    def from_parts(cls, relay: np.ndarray, dest1: np.ndarray, dest2: np.ndarray) -> DiscreteBRC:
        """Build W = P(z1|x,x1) P(y1|x,x1,z1) P(y2|x,x1,z1,y1) from its factors."""
        return cls(np.einsum("abz,abzy,abzyw->abyzw", relay, dest1, dest2))


@dataclass(frozen=True)
class DegradednessReport:
    holds: bool
    worst_violation: float
    witness: tuple | None
    chain: str | None
    per_chain: tuple[tuple[str, float], ...] = ()

    def __bool__(self) -> bool:
        return self.holds


def _conditional_spread(num: np.ndarray, vary: tuple[int, ...], out_axes: tuple[int, ...]):
    """Worst total-variation spread of P(out | rest) across the ``vary`` axes.

    ``num`` is an unnormalized joint over (inputs, conditioning, outputs).
    Cells whose conditioning probability is zero are skipped.
    """
    den = num.sum(axis=out_axes, keepdims=True)
    valid = den > 0
    cond = np.where(valid, num / np.where(valid, den, 1.0), np.nan)
    # move varying axes to the front and flatten them
    rest = [i for i in range(num.ndim) if i not in vary and i not in out_axes]
    order = list(vary) + rest + list(out_axes)
    c = np.transpose(cond, order)
    nv = int(np.prod([num.shape[i] for i in vary]))
    nr = int(np.prod([num.shape[i] for i in rest])) if rest else 1
    c = c.reshape(nv, nr, -1)
    worst, witness = 0.0, None
    for r in range(nr):
        rows = [(v, c[v, r]) for v in range(nv) if not np.isnan(c[v, r]).any()]
        for i in range(1, len(rows)):
            tv = 0.5 * float(np.abs(rows[i][1] - rows[0][1]).sum())
            if tv > worst:
                worst, witness = tv, (rows[0][0], rows[i][0], r)
    return worst, witness


def check_degradedness(ch: DiscreteBRC, kind: str) -> DegradednessReport:
    """Test the Markov conditions of a degraded or semi-degraded BRC-CR.

    ``kind="degraded"``: X - (X1,Z1) - (Y1,Y2) and (X,X1) - Y1 - Y2.
    ``kind="semi_degraded"``: X - (X1,Z1) - Y2 and X - (X1,Y1) - Z1.
    Conditions are checked on the channel itself, i.e. for inputs of full
    support. ``witness`` is (reference input index, violating input index,
    conditioning cell index) in flattened order.
    """
    W = ch.W  # axes x, x1, y1, z1, y2
    if kind == "degraded":
        checks = [
            ("X-(X1,Z1)-(Y1,Y2)", np.transpose(W, (0, 1, 3, 2, 4)), (0,), (3, 4)),
            ("(X,X1)-Y1-Y2", W.sum(axis=3), (0, 1), (3,)),
        ]
    elif kind == "semi_degraded":
        checks = [
            ("X-(X1,Z1)-Y2", W.sum(axis=2), (0,), (3,)),
            ("X-(X1,Y1)-Z1", W.sum(axis=4), (0,), (3,)),
        ]
    else:
        raise DomainError(f"unknown degradedness kind {kind!r}")
    worst, witness, chain = 0.0, None, None
    per_chain = []
    for name, num, vary, out in checks:
        tv, wit = _conditional_spread(num, vary, out)
        per_chain.append((name, tv))
        if tv > worst:
            worst, witness, chain = tv, wit, name
    holds = worst <= TV_TOL
    return DegradednessReport(holds, worst, None if holds else witness,
                              None if holds else chain, tuple(per_chain))


# ---------------------------------------------------------------- Marton reduction


def _relay_free_tensor(pd: np.ndarray, channel: np.ndarray, comp1: np.ndarray, comp2: np.ndarray) -> NamedDist:
    """Joint law after removing the relays: trivial X1, X2, V0; Z_b = Y_b;
    U3 = U1, U4 = U2; Zh_b a compression of Z_b."""
    n0, n1, n2, nx = pd.shape
    _, ny1, ny2 = channel.shape
    e1 = np.eye(n1)
    e2 = np.eye(n2)
    ey1 = np.eye(ny1)
    ey2 = np.eye(ny2)
    p = np.einsum(
        "abcx,xyw,bd,ce,yz,wv,zh,vg->abcdexywzvhg",
        pd, channel, e1, e2, ey1, ey2, comp1, comp2,
    )
    p = p[None, None, None]  # V0, X1, X2 with one symbol each
    names = ["V0", "X1", "X2", "U0", "U1", "U2", "U3", "U4", "X",
             "Y1", "Y2", "Z1", "Z2", "Zh1", "Zh2"]
    return NamedDist(p, names)


def marton_bounds(d: NamedDist) -> np.ndarray:
    """(R0+R1, R0+R2, R0+R1+R2, 2R0+R1+R2) bounds of Marton's region."""
    i01 = d.mi("U0,U1", "Y1")
    i02 = d.mi("U0,U2", "Y2")
    pen = d.mi("U1", "U2", "U0")
    s = min(d.mi("U0", "Y1"), d.mi("U0", "Y2")) + d.mi("U1", "Y1", "U0") + d.mi("U2", "Y2", "U0") - pen
    return np.array([i01, i02, s, i01 + i02 - pen])


def _dfdf_bounds(d: NamedDist) -> np.ndarray:
    def I(i):
        j = str(i + 2)
        i = str(i)
        return min(
            d.mi("U0,U" + i, "Z" + i, "V0,X" + i) + d.mi("U" + j, "Y" + i, f"U0,V0,X{i},U{i}"),
            d.mi(f"U0,V0,U{i},U{j},X{i}", "Y" + i),
        )

    def J(i):
        j = str(i + 2)
        i = str(i)
        return min(
            d.mi("U" + i, "Z" + i, f"U0,V0,X{i}") + d.mi("U" + j, "Y" + i, f"U0,V0,X{i},U{i}"),
            d.mi(f"U{j},U{i},X{i}", "Y" + i, "U0,V0"),
        )

    im = d.mi("U3", "U4", "U1,U2,X1,X2,U0,V0")
    p12 = d.mi("U0,U1", "X2", "X1,V0")
    p21 = d.mi("U0,U2", "X1", "X2,V0")
    return np.array([
        I(1) - p12,
        I(2) - p21,
        min(I(1) + J(2) - p12 - d.mi("U1,X1", "U2", "X2,U0,V0") - im,
            J(1) + I(2) - p21 - d.mi("U1", "U2,X2", "X1,U0,V0") - im),
        I(1) + I(2) - p12 - p21 - d.mi("U1", "U2", "X1,X2,U0,V0") - im,
    ])


def _dfcf_bounds(d: NamedDist) -> np.ndarray:
    i1 = min(d.mi("U0,U1", "Z1", "X1,V0"), d.mi("U1,U0,X1,V0", "Y1"))
    i2 = d.mi("U2,U0,V0", "Zh2,Y2", "X2")
    j1 = min(d.mi("U1", "Z1", "X1,U0,V0"), d.mi("U1,X1", "Y1", "U0,V0"))
    j2 = d.mi("U2", "Zh2,Y2", "X2,U0,V0")
    pen = d.mi("U1,X1", "U2", "U0,V0")
    return np.array([
        i1,
        i2 - d.mi("U2", "X1", "U0,V0"),
        min(i1 + j2 - pen, j1 + i2 - pen),
        i1 + i2 - pen,
    ])


def _cfcf_bounds(d: NamedDist) -> np.ndarray:
    a = d.mi("U0,U1", "Y1,Zh1", "X1")
    b = d.mi("U0,U2", "Y2,Zh2", "X2")
    pen = d.mi("U1", "U2", "U0")
    i0 = min(d.mi("U0", "Y1,Zh1", "X1"), d.mi("U0", "Y2,Zh2", "X2"))
    s = i0 + d.mi("U1", "Y1,Zh1", "X1,U0") + d.mi("U2", "Y2,Zh2", "X2,U0") - pen
    return np.array([a, b, s, a + b - pen])


_STRATEGY_BOUNDS = {"df_df": _dfdf_bounds, "df_cf": _dfcf_bounds, "cf_cf": _cfcf_bounds}


def _random_stochastic(rng: np.random.Generator, n: int) -> np.ndarray:
    m = rng.random((n, n)) + 1e-3
    return m / m.sum(axis=1, keepdims=True)


def relay_free_bounds(pd, channel, strategy: str = "cf_cf", seed: int = 0):
    """Both bound vectors (relay region with trivial relays, Marton) for one pd."""
    if strategy not in _STRATEGY_BOUNDS:
        raise DomainError(f"unknown strategy {strategy!r}")
    pd = np.asarray(pd, dtype=float)
    channel = np.asarray(channel, dtype=float)
    if pd.ndim != 4 or abs(pd.sum() - 1.0) > NORM_TOL or np.any(pd < 0):
        raise DomainError("pd must be a probability tensor over (U0, U1, U2, X)")
    if channel.ndim != 3 or np.any(np.abs(channel.sum(axis=(1, 2)) - 1.0) > NORM_TOL):
        raise DomainError("channel must be P(y1, y2 | x) with axes (x, y1, y2)")
    rng = np.random.default_rng(seed)
    comp1 = _random_stochastic(rng, channel.shape[1])
    comp2 = _random_stochastic(rng, channel.shape[2])
    d = _relay_free_tensor(pd, channel, comp1, comp2)
    return _STRATEGY_BOUNDS[strategy](d), marton_bounds(d)


def marton_reduction_check(pd, channel, strategy: str = "cf_cf", tol: float = 1e-12, seed: int = 0) -> bool:
    """True iff the relay-free substitution of a BRC region gives Marton's
    region term by term on ``pd`` over (U0, U1, U2, X) and ``channel``."""
    reduced, marton = relay_free_bounds(pd, channel, strategy, seed)
    return bool(np.max(np.abs(reduced - marton)) <= tol)


# ---------------------------------------------------------------- semi-degraded search

CHUNK = 10_000
REFINE_STEPS = 40
REFINE_WEIGHTS = (0.0, 0.25, 0.5, 0.75, 1.0)
DIRICHLET_CONC = (1.0, 0.2, 0.05)
SHARPEN = np.array([1.5, 3.0])


def _batch_entropy(p: np.ndarray) -> np.ndarray:
    """Entropy per batch row (axis 0) of the joint law in the remaining axes."""
    m = p.reshape(p.shape[0], -1)
    with np.errstate(divide="ignore", invalid="ignore"):
        t = np.where(m > 0, m * np.log2(np.where(m > 0, m, 1.0)), 0.0)
    return -t.sum(axis=1)


def _semideg_terms(q: np.ndarray, W: np.ndarray):
    """(A, B) per row of q[n, u, x1, x]: A = min{I(U,X1;Y2), I(U;Z1|X1)},
    B = I(X;Y1|X1,U)."""
    H = _batch_entropy
    # only three small marginals are needed, never the full joint
    p_y1 = np.einsum("nuax,xay->nuaxy", q, W.sum(axis=(3, 4)))
    q_ua = q.sum(axis=3)
    p_z1 = np.einsum("nuax,xaz->nuaz", q, W.sum(axis=(2, 4)))
    p_y2 = np.einsum("nuax,xaw->nuaw", q, W.sum(axis=(2, 3)))
    h_ua = H(q_ua)
    i_y2 = H(p_y2.sum(axis=(1, 2))) + h_ua - H(p_y2)
    i_z1 = h_ua + H(p_z1.sum(axis=1)) - H(p_z1) - H(q_ua.sum(axis=1))
    b = H(q) + H(p_y1.sum(axis=3)) - H(p_y1) - h_ua
    return np.maximum(np.minimum(i_y2, i_z1), 0.0), np.maximum(b, 0.0)


def _corner_points(a: np.ndarray, b: np.ndarray) -> list[tuple[float, float]]:
    """Pentagon corners (0, A), (B, A), (A + B, 0), pruned to the Pareto front.

    The region holds the origin and both axis projections of every corner,
    so a dominated corner never changes the hull.
    """
    a, b = np.asarray(a, dtype=float), np.asarray(b, dtype=float)
    if a.size == 0:
        return []
    pts = [(0.0, float(a.max())), (float((a + b).max()), 0.0)]
    order = np.lexsort((-a, -b))  # b descending, then a descending
    bs, as_ = b[order], a[order]
    prev = np.maximum.accumulate(np.concatenate(([-np.inf], as_[:-1])))
    keep = as_ > prev
    pts += list(zip(bs[keep].tolist(), as_[keep].tolist()))
    return pts


def _weighted_value(a, b, w):
    return np.maximum(w * (a + b), w * b + (1.0 - w) * a)


def _search_chunk(W: np.ndarray, shape: tuple[int, int, int], seed: int, index: int, count: int):
    rng = np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(index,)))
    k = int(np.prod(shape))
    # dense and sparse Dirichlet draws; sparse ones reach near-deterministic laws
    conc = np.resize(DIRICHLET_CONC, count)[:, None]
    g = rng.standard_gamma(np.broadcast_to(conc, (count, k)))
    tot = g.sum(axis=1, keepdims=True)
    q = np.where(tot > 0, g / np.where(tot > 0, tot, 1.0), 1.0 / k)
    a, b = _semideg_terms(q.reshape((count,) + shape), W)
    pts = _corner_points(a, b)
    if count < CHUNK:
        return pts
    # local refinement from the best sample per weight
    for w in REFINE_WEIGHTS:
        best = int(np.argmax(_weighted_value(a, b, w)))
        with np.errstate(divide="ignore"):
            logit = np.log(q[best])
        val = float(_weighted_value(a[best], b[best], w))
        step = 0.5
        for _ in range(REFINE_STEPS):
            # random moves plus sharpened copies heading for a deterministic law
            rel = logit - logit.max()
            trial = np.vstack([logit + step * rng.standard_normal((8, k)),
                               rel[None] * SHARPEN[:, None]])
            with np.errstate(invalid="ignore"):
                tq = np.exp(trial - trial.max(axis=1, keepdims=True))
            tq = np.nan_to_num(tq)
            tq /= tq.sum(axis=1, keepdims=True)
            ta, tb = _semideg_terms(tq.reshape((len(trial),) + shape), W)
            tv = _weighted_value(ta, tb, w)
            j = int(np.argmax(tv))
            if tv[j] > val:
                val, logit = float(tv[j]), trial[j]
                pts += _corner_points(ta[j:j + 1], tb[j:j + 1])
            else:
                step *= 0.8
    return pts


def semidegraded_capacity_search(
    ch: DiscreteBRC, samples: int = 100_000, seed: int = 0, workers: int = 1
) -> RateRegion:
    """Inner approximation of the semi-degraded BRC-CR capacity region.

    Draws input laws P(U, X1, X) with |U| = |X||X1| + 2 in fixed chunks of
    ``CHUNK`` samples (chunk i always uses the same random stream, so a
    larger ``samples`` only adds points), refines each full chunk locally and
    returns the convex hull of the pentagon corners in (R1, R2) axes.
    """
    from ..region_tools import convex_hull_2d

    rep = check_degradedness(ch, "semi_degraded")
    if not rep.holds:
        raise DomainError(f"channel is not semi-degraded ({rep.chain}, TV {rep.worst_violation:.3g})")
    if samples < 1:
        raise DomainError("samples must be >= 1")
    nx, nx1 = ch.W.shape[:2]
    shape = (nx * nx1 + 2, nx1, nx)
    counts = [CHUNK] * (samples // CHUNK) + ([samples % CHUNK] if samples % CHUNK else [])
    jobs = [(ch.W, shape, seed, i, c) for i, c in enumerate(counts)]
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as ex:
            parts = list(ex.map(lambda j: _search_chunk(*j), jobs))
    else:
        parts = [_search_chunk(*j) for j in jobs]
    pts = [RatePoint2D(0.0, 0.0)] + [RatePoint2D(*xy) for part in parts for xy in part]
    hull = convex_hull_2d(pts)
    return RateRegion(points=hull, hull=hull, axes=("R1", "R2"),
                      meta={"samples": samples, "seed": seed, "u_size": shape[0]})

