"""Closed-form rate vs covariance-oracle pairs, one generator per strategy.

Each generator draws its coding parameters from ``rng`` and yields
``(label, closed_form, oracle)``. Both sides are clamped at zero, matching
the clamping of rate records.
"""

from __future__ import annotations

import warnings

import numpy as np

from brc_rates import gaussian_strategies as gs
from brc_rates.core import CodingParams, GaussianBrcParams, compression_noise_cf
from brc_rates.oracle import LinearGaussianModel, logdet_mi
from brc_rates.oracle import constructions as C


def _pos(v) -> float:
    return max(float(v), 0.0)


def _two_look(signal: float, interference: float, look1: float, look2: float) -> float:
    """I(S; S + I1 + E1, S + I2 + E2) with independent interference copies."""
    m = LinearGaussianModel()
    m.source("s", signal)
    for k, e in (("1", look1), ("2", look2)):
        m.source("i" + k, interference)
        m.source("e" + k, e)
        m.define("L" + k, {"s": 1.0, "i" + k: 1.0, "e" + k: 1.0})
    return logdet_mi(m.joint(), ["s"], ["L1", "L2"])


def dfdf(p: GaussianBrcParams, rng):
    c = CodingParams(*rng.uniform(0, 1, 3), rng.uniform(0, 2), rng.uniform(0, 1))
    r = gs.dfdf_rates(p, c)
    o = C.dfdf(p, c)
    yield "R11", r.r1_relay_constraint, _pos(o["r11"])
    yield "R12", r.r1_direct_constraint, _pos(o["r12"])
    yield "R21", r.r2_relay_constraint, _pos(o["r21"])
    yield "R22", r.r2_direct_constraint, _pos(o["r22"])


def dfcf_case1(p: GaussianBrcParams, rng):
    a, b, g = rng.uniform(0, 1), rng.uniform(0, 1), rng.uniform(0, 2)
    nh = compression_noise_cf(p, 2, gs.CF_FORM_MIXED)
    r, coef = gs.dfcf_case1(p, CodingParams(a, b))
    o = C.dfcf_case1(p, CodingParams(a, b, 1.0, coef.gamma_star), nh)
    yield "R1 relay", r.r1_relay_constraint, _pos(o["r1_relay"])
    yield "R1 direct", r.r1_direct_constraint, _pos(o["r1_direct"])
    yield "R2 at gamma*", r.r2, _pos(o["r2"])
    o = C.dfcf_case1(p, CodingParams(a, b, 1.0, g), nh)
    yield "R2 at gamma", _pos(gs.dfcf_case1_r2(p, a, g)), _pos(o["r2"])


def dfcf_case2(p: GaussianBrcParams, rng):
    a, b, lam, g = rng.uniform(0, 1), rng.uniform(0, 1), rng.uniform(0, 1), rng.uniform(0, 2)
    nh = compression_noise_cf(p, 2, gs.CF_FORM_MIXED)
    r, coef = gs.dfcf_case2(p, CodingParams(a, b, 1.0, 0.0, lam))
    o = C.dfcf_case2(p, CodingParams(a, b, 1.0, coef.gamma_star, lam), nh)
    yield "R11", r.r1_relay_constraint, _pos(o["r11"])
    yield "R12", r.r1_direct_constraint, _pos(o["r12"])
    yield "R2 at gamma*", r.r2, _pos(o["r2"])
    o = C.dfcf_case2(p, CodingParams(a, b, 1.0, g, lam), nh)
    yield "R2 at gamma", _pos(gs.dfcf_case2_r2(p, a, b, g)), _pos(o["r2"])
    ia, q = a * b * p.P, (1 - a) * p.P
    oracle = _two_look(q, ia, p.pl("d_y2") * p.N2, p.pl("d_z2") * (nh + p.Nt2))
    yield "R2 decoupled", gs.dfcf_case2_r2_decoupled(p, a, b), oracle


def cf_cf(p: GaussianBrcParams, rng):
    a = rng.uniform(0, 1)
    nh1 = compression_noise_cf(p, 1, gs.CF_FORM_BOTH)
    nh2 = compression_noise_cf(p, 2, gs.CF_FORM_BOTH)
    q = (1 - a) * p.P
    g = q / (q + gs.cf_equivalent_noise(p, 2))
    r = gs.cfcf_rates(p, a)
    o = C.cfcf(p, a, g, nh1, nh2)
    yield "R1", r.r1, _pos(o["r1"])
    yield "R2", r.r2, _pos(o["r2"])
    oracle = _two_look(a * p.P, q, p.pl("d_y1") * p.N1, p.pl("d_z1") * (nh1 + p.Nt1))
    yield "R1 decoupled", gs.cfcf_r1_decoupled(p, a), oracle
    common = min(C.cf_rate(p, 1, nh1), C.cf_rate(p, 2, nh2))
    yield "common", gs.cfcf_common_rate(p), common


def compound(p: GaussianBrcParams, rng):
    b = rng.uniform(0, 1)
    nh = compression_noise_cf(p, 2, gs.CF_FORM_MIXED)
    r_df, r_cf, r0 = gs.compound_common_rate(p, b)
    o = C.compound(p, b, nh)
    yield "R_DF", r_df, min(o["df_relay"], o["df_direct"])
    yield "R_CF", r_cf, o["cf"]
    yield "R0", r0, min(o["df_relay"], o["df_direct"], o["cf"])


def cutset(p: GaussianBrcParams, rng):
    b1, b2 = rng.uniform(0, 1, 2)
    terms = gs.cutset_terms(p, b1, b2)
    o = C.cutset(p, b1, b2)
    for k, v in zip(("bc1", "mac1", "bc2", "mac2"), terms):
        yield k, float(v), o[k]
    yield "bound", gs.cutset_upper_bound(p, b1, b2), min(o.values())


def oblivious(p: GaussianBrcParams, rng):
    a, b = rng.uniform(0, 1, 2)
    inner, outer = gs.oblivious_rates(p, a, b)
    q = (1 - a) * p.P
    g = q / (q + p.pl("d_y2") * p.N2)
    o = C.oblivious_inner(p, a, b, g)
    yield "R1 relay", inner.r1_relay_constraint, _pos(o["r1_relay"])
    yield "R1 direct", inner.r1_direct_constraint, _pos(o["r1_direct"])
    yield "R2", inner.r2, _pos(o["r2"])
    yield "outer relay", outer.r1_relay_constraint, C.oblivious_outer_relay_term(p, a, b)
    # degraded variant needs a noisier destination look
    pz, py = p.pl("d_z1"), p.pl("d_y1")
    if py * p.N1 < pz * p.Nt1:
        p = GaussianBrcParams(**{**p.as_dict(), "N1": pz * p.Nt1 / py * rng.uniform(1.0, 3.0)})
    _, outer_d = gs.oblivious_rates(p, a, b, degraded=True)
    yield "outer relay degraded", outer_d.r1_relay_constraint, C.oblivious_degraded_cut(p, a, b)["joint"]


def degraded_cr(p: GaussianBrcParams, rng):
    a, b = rng.uniform(0, 1, 2)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", RuntimeWarning)
        r = gs.degraded_cr_capacity(p, a, b)
    o = C.degraded_cr(p, a, b)
    yield "R0 bound", r.r0_max, o["r0"]
    yield "R1 bound", r.r1_max, o["r1"]
    yield "sum bound", r.sum_max, o["sum"]


def partial_coop(p: GaussianBrcParams, rng):
    a, b = rng.uniform(0, 1, 2)
    relay, direct, r2 = gs.partial_coop_terms(p, a, b)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", RuntimeWarning)
        t = gs.partial_coop_capacity(p, a, b)
    o = C.partial_coop(p, a, b)
    yield "R1 relay", float(relay), o["r1_relay"]
    yield "R1 direct", float(direct), o["r1_direct"]
    yield "R1", t.r1, min(o["r1_relay"], o["r1_direct"])
    yield "R2", t.r2, o["r2"]


GENERATORS = {
    "DF_DF": dfdf,
    "DF_CF_CASE1": dfcf_case1,
    "DF_CF_CASE2": dfcf_case2,
    "CF_CF": cf_cf,
    "COMPOUND": compound,
    "CUTSET": cutset,
    "OBLIVIOUS": oblivious,
    "DEGRADED_CR_CAPACITY": degraded_cr,
    "PARTIAL_COOP_CAPACITY": partial_coop,
}


def worst_error(name: str, samples: int, seed: int, sampler) -> tuple[float, str]:
    """Largest |closed - oracle| over ``samples`` random scenarios."""
    rng = np.random.default_rng(seed)
    gen = GENERATORS[name]
    worst, where = 0.0, ""
    for i in range(samples):
        p = sampler(rng)
        for label, closed, oracle in gen(p, rng):
            err = abs(float(closed) - float(oracle))
            if not np.isfinite(err):
                return np.inf, f"sample {i} {label}: non-finite"
            if err > worst:
                worst, where = err, f"sample {i} {label}"
    return worst, where
