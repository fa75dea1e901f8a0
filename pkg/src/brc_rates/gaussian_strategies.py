"""Closed-form achievable rates and bounds for the Gaussian BRC.

Every public rate function is a pure function of a :class:`GaussianBrcParams`
and the coding parameters. The ``*_terms`` kernels underneath accept numpy
arrays for the coding parameters so the optimizers in ``region_tools`` can
evaluate whole grids at once; they return raw (possibly negative) rates.

Dirty-paper terms share one shape. For a wanted signal of power ``q``, a
known state of power ``s``, unknown noise ``n`` and inflation ``coef``
applied to the state, the rate is

    0.5 log2[ q (q + s + n) / (n (q + coef^2 s) + (1 - coef)^2 q s) ]

which peaks at ``coef = q / (q + n)`` with value ``cap(q / n)``.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from .core import (
    CodingParams,
    DomainError,
    GaussianBrcParams,
    InfeasibleParameterError,
    RateTriple,
    cap,
    compression_noise_cf,
    equivalent_noise,
)

CF_FORM_MIXED = "df_cf"
CF_FORM_BOTH = "cf_cf"


@dataclass(frozen=True)
class StrategyRates:
    """Per-user constraint terms and the resulting rates.

    For CF users the single rate is repeated in both constraint slots.
    ``flags`` records non-fatal conditions such as ``"clamped"`` (a negative
    expression was raised to zero) or ``"cf_constraint_violated"``.
    """

    r1_relay_constraint: float
    r1_direct_constraint: float
    r2_relay_constraint: float
    r2_direct_constraint: float
    r1: float
    r2: float
    r0: float | None = None
    flags: tuple[str, ...] = ()

    def __post_init__(self) -> None:
        terms = (self.r1_relay_constraint, self.r1_direct_constraint,
                 self.r2_relay_constraint, self.r2_direct_constraint)
        if min(terms) < 0 or (self.r0 is not None and self.r0 < 0):
            raise DomainError("rates must be nonnegative")
        if self.r1 != min(terms[:2]) or self.r2 != min(terms[2:]):
            raise DomainError("r1/r2 must equal the min of their constraints")

    @classmethod
    def from_terms(cls, r11, r12, r21, r22, r0=None, flags=()) -> StrategyRates:
        raw = [float(v) for v in (r11, r12, r21, r22)]
        for name, v in zip(("r1_relay", "r1_direct", "r2_relay", "r2_direct"), raw):
            if not math.isfinite(v):
                raise InfeasibleParameterError(f"{name} term is undefined", constraint=name)
        flags = tuple(flags)
        if min(raw) < 0 and "clamped" not in flags:
            flags += ("clamped",)
        t = [max(v, 0.0) for v in raw]
        return cls(t[0], t[1], t[2], t[3], min(t[0], t[1]), min(t[2], t[3]), r0, flags)


@dataclass(frozen=True)
class DpcCoefficients:
    """Optimal inflation factors and the equivalent noise they were tuned to."""

    gamma_star: float
    lambda_star: float
    nt: float

    def __post_init__(self) -> None:
        if not (math.isfinite(self.gamma_star) and math.isfinite(self.lambda_star)):
            raise DomainError("DPC coefficients must be finite")
        if not self.nt > 0:
            raise DomainError("equivalent noise must be > 0")


@dataclass(frozen=True)
class DegradedCrBounds:
    """The three constraints of one (alpha, beta) slice of the degraded
    common-relay region: R0 <= r0_max, R1 <= r1_max, R0 + R1 <= sum_max."""

    r0_max: float
    r1_max: float
    sum_max: float

    def best_r0(self) -> float:
        return min(self.r0_max, self.sum_max)

    def best_r1(self) -> float:
        return min(self.r1_max, self.sum_max)


# ---------------------------------------------------------------- helpers


def _c(x):
    """cap() for kernels; negative SNRs only arise from invalid inputs."""
    return 0.5 * np.log2(1.0 + np.asarray(x, dtype=float))


def _half_log2_ratio(num, den):
    """0.5 log2(num/den) with a zero wanted signal giving rate zero."""
    num = np.asarray(num, dtype=float)
    den = np.asarray(den, dtype=float)
    with np.errstate(divide="ignore", invalid="ignore"):
        out = np.where(den > 0, 0.5 * np.log2(num / np.where(den > 0, den, 1.0)), np.nan)
    return np.where(num == 0, 0.0, out)


def dpc_rate(q, s, N, n, coef):
    """0.5 log2(N / (n (q + coef^2 s) + (1 - coef)^2 q s)); zero when q = 0."""
    q, s, N, n, coef = (np.asarray(v, dtype=float) for v in (q, s, N, n, coef))
    return _half_log2_ratio(N, n * (q + coef**2 * s) + (1.0 - coef) ** 2 * q * s)


def costa_rate(q, s, n, coef):
    """Dirty-paper rate with inflation ``coef`` applied to the state."""
    q, s, n = (np.asarray(v, dtype=float) for v in (q, s, n))
    return dpc_rate(q, s, q * (q + s + n), n, coef)


def _coherent_power(P, Pr, beta, share, p_direct, p_relay):
    """Received power of share*P source plus a relay carrying (1-beta) of it
    coherently: P'/pd + Pr/pr + 2 sqrt((1-beta) P' Pr / (pd pr))."""
    return (share * P / p_direct + Pr / p_relay
            + 2.0 * np.sqrt(np.clip(1.0 - beta, 0.0, None) * share * P * Pr / (p_direct * p_relay)))


def _pl(params: GaussianBrcParams):
    return {k: params.pl(k) for k in ("d_y1", "d_y2", "d_z1", "d_z2", "d_z1y1", "d_z2y2")}


def _cf_flags(params: GaussianBrcParams, side: int, form: str) -> tuple[str, ...]:
    if form == CF_FORM_BOTH:
        return ()
    used = compression_noise_cf(params, side, form)
    tight = compression_noise_cf(params, side, CF_FORM_BOTH)
    return ("cf_constraint_violated",) if used < tight * (1.0 - 1e-12) else ()


def cf_equivalent_noise(params: GaussianBrcParams, side: int, form: str = CF_FORM_BOTH) -> float:
    """Noise of the combined (Y_b, Zhat_b) observation in source-power units."""
    b = str(side)
    nh = compression_noise_cf(params, side, form)
    return equivalent_noise([
        params.pl("d_z" + b) * (getattr(params, "Nt" + b) + nh),
        params.pl("d_y" + b) * getattr(params, "N" + b),
    ])


def cf_single_rate(params: GaussianBrcParams, side: int, form: str = CF_FORM_BOTH) -> float:
    """I(X; Y_b, Zhat_b | X_b) at full source power."""
    return float(cap(params.P / cf_equivalent_noise(params, side, form)))


# ---------------------------------------------------------------- kernels


def df_user1_dpc(params: GaussianBrcParams, alpha, beta):
    """Dirty-paper pieces of a DF user 1 that pre-cancels X_B.

    Returns (q, s, (N_relay, n_relay), (N_direct, n_direct)); each term is
    ``dpc_rate(q, s, N, n, lam)``.
    """
    P, pl = params.P, _pl(params)
    ab = 1.0 - alpha
    q, s = alpha * beta * P, ab * P
    n_relay = pl["d_z1"] * params.Nt1
    total = _coherent_power(P, params.P1, beta, alpha, pl["d_y1"], pl["d_z1y1"]) + ab * P / pl["d_y1"] + params.N1
    return q, s, (q * (q + s + n_relay), n_relay), (q * pl["d_y1"] * total, pl["d_y1"] * params.N1)


def dfdf_user2_dpc(params: GaussianBrcParams, alpha, beta1, beta2):
    """Dirty-paper pieces of DF user 2 pre-canceling the relay-1 part of X_A.

    The fresh part of X_A adds to both noises. Same layout as
    :func:`df_user1_dpc`, with ``gamma`` as the coefficient.
    """
    P, pl = params.P, _pl(params)
    ab = 1.0 - alpha
    q, s = ab * beta2 * P, (1.0 - beta1) * alpha * P
    fresh = alpha * beta1 * P
    n_relay = pl["d_z2"] * params.Nt2 + fresh
    total = _coherent_power(P, params.P2, beta2, ab, pl["d_y2"], pl["d_z2y2"]) + alpha * P / pl["d_y2"] + params.N2
    return q, s, (q * (q + s + n_relay), n_relay), (q * pl["d_y2"] * total, pl["d_y2"] * params.N2 + fresh)


def dfdf_terms(params: GaussianBrcParams, alpha, beta1, beta2, gamma, lam):
    """(R11, R12, R21, R22) for DF at both relays.

    ``gamma`` scales the relay-1 component of X_A seen as state by user 2.
    """
    alpha, beta1, beta2, gamma, lam = np.broadcast_arrays(
        *(np.asarray(v, dtype=float) for v in (alpha, beta1, beta2, gamma, lam)))
    q1, s1, (Na, na), (Nb, nb) = df_user1_dpc(params, alpha, beta1)
    q2, s2, (Nc, nc), (Nd, nd) = dfdf_user2_dpc(params, alpha, beta1, beta2)
    return (dpc_rate(q1, s1, Na, na, lam), dpc_rate(q1, s1, Nb, nb, lam),
            dpc_rate(q2, s2, Nc, nc, gamma), dpc_rate(q2, s2, Nd, nd, gamma))


def _df_private_terms(params, alpha, beta):
    """Relay-decode and cooperative-direct terms of a DF user that treats
    the other user's signal as noise."""
    P, pl = params.P, _pl(params)
    ab = 1.0 - alpha
    relay = _c(alpha * beta * P / (ab * P + pl["d_z1"] * params.Nt1))
    sig = _coherent_power(P, params.P1, beta, alpha, pl["d_y1"], pl["d_z1y1"])
    direct = _c(sig / (ab * P / pl["d_y1"] + params.N1))
    return relay, direct


def dfcf1_terms(params: GaussianBrcParams, alpha, beta, gamma=None, form: str = CF_FORM_MIXED):
    """(R1 relay term, R1 direct term, R2) for DF-CF with user 2 pre-canceling X_A.

    ``gamma=None`` evaluates R2 at its optimum.
    """
    alpha, beta = np.broadcast_arrays(np.asarray(alpha, float), np.asarray(beta, float))
    relay, direct = _df_private_terms(params, alpha, beta)
    nt = cf_equivalent_noise(params, 2, form)
    q = (1.0 - alpha) * params.P
    if gamma is None:
        r2 = _c(q / nt)
    else:
        r2 = costa_rate(q, alpha * params.P, nt, gamma)
    return relay, direct, r2


def dfcf2_terms(params: GaussianBrcParams, alpha, beta, lam, gamma=None, form: str = CF_FORM_MIXED):
    """(R11, R12, R2) for DF-CF with user 2 pre-canceling the relay part of X_A.

    ``gamma`` multiplies X1 inside U2; ``None`` evaluates R2 at its optimum.
    The fresh part of X_A is common to both looks of destination 2, so it
    adds to the combined noise rather than to each look separately.
    """
    P = params.P
    alpha, beta, lam = np.broadcast_arrays(*(np.asarray(v, float) for v in (alpha, beta, lam)))
    ab = 1.0 - alpha
    q1, s1, (Na, na), (Nb, nb) = df_user1_dpc(params, alpha, beta)
    r11, r12 = dpc_rate(q1, s1, Na, na, lam), dpc_rate(q1, s1, Nb, nb, lam)
    Q, S = ab * P, (1.0 - beta) * alpha * P
    Neff = alpha * beta * P + cf_equivalent_noise(params, 2, form)
    if gamma is None:
        r2 = _c(Q / Neff)
    else:
        g = np.asarray(gamma, float)
        num = Q * (Q + S + Neff)
        den = Q * (np.sqrt(S) - g * math.sqrt(params.P1)) ** 2 + Neff * (Q + g**2 * params.P1)
        r2 = _half_log2_ratio(num, den)
    return r11, r12, r2


def cfcf_terms(params: GaussianBrcParams, alpha):
    """(R1, R2) for CF at both relays, user 2 pre-canceling X_A."""
    alpha = np.asarray(alpha, float)
    P = params.P
    nt1 = cf_equivalent_noise(params, 1, CF_FORM_BOTH)
    nt2 = cf_equivalent_noise(params, 2, CF_FORM_BOTH)
    return _c(alpha * P / ((1.0 - alpha) * P + nt1)), _c((1.0 - alpha) * P / nt2)


def compound_terms(params: GaussianBrcParams, beta, form: str = CF_FORM_MIXED):
    """(DF relay-decode term, DF cooperative term, CF rate) for a common message."""
    beta = np.asarray(beta, float)
    relay, direct = _df_private_terms(params, np.ones_like(beta), beta)
    r_cf = np.full_like(relay, cf_single_rate(params, 2, form))
    return relay, direct, r_cf


def cutset_terms(params: GaussianBrcParams, beta1, beta2):
    """Broadcast and multiple-access cuts (bc1, mac1, bc2, mac2)."""
    P, pl = params.P, _pl(params)
    beta1, beta2 = np.broadcast_arrays(np.asarray(beta1, float), np.asarray(beta2, float))
    out = []
    for b, beta in ((1, beta1), (2, beta2)):
        s = str(b)
        py, pz, pr = pl["d_y" + s], pl["d_z" + s], pl[f"d_z{s}y{s}"]
        N, Nt, Pb = getattr(params, "N" + s), getattr(params, "Nt" + s), getattr(params, "P" + s)
        out.append(_c(beta * P * (1.0 / (pz * Nt) + 1.0 / (py * N))))
        out.append(_c(_coherent_power(P, Pb, beta, 1.0, py, pr) / N))
    return tuple(out)


def oblivious_terms(params: GaussianBrcParams, alpha, beta, degraded: bool = False):
    """(inner relay, direct, r2, outer relay) with no relay on branch 2."""
    alpha, beta = np.broadcast_arrays(np.asarray(alpha, float), np.asarray(beta, float))
    P, pl = params.P, _pl(params)
    ab = 1.0 - alpha
    relay, direct = _df_private_terms(params, alpha, beta)
    r2 = _c(ab * P / (pl["d_y2"] * params.N2))
    if degraded:
        outer = relay
    else:
        sig = alpha * beta * P
        outer = _c(sig / (ab * P + pl["d_z1"] * params.Nt1) + sig / (ab * P + pl["d_y1"] * params.N1))
    return relay, direct, r2, outer


def degraded_cr_terms(params: GaussianBrcParams, alpha, beta):
    """(r0_max, r1_max, sum_max) with unit gains."""
    alpha, beta = np.broadcast_arrays(np.asarray(alpha, float), np.asarray(beta, float))
    P, P1 = params.P, params.P1
    T = P + P1 + 2.0 * np.sqrt((1.0 - beta) * P * P1)
    return (
        _c(alpha * T / ((1.0 - alpha) * T + params.N2)),
        _c((1.0 - alpha) * T / params.N1),
        _c(beta * P / params.Nt1),
    )


def partial_coop_terms(params: GaussianBrcParams, alpha, beta):
    """(R1 relay term, R1 direct term, R2) with unit gains."""
    alpha, beta = np.broadcast_arrays(np.asarray(alpha, float), np.asarray(beta, float))
    P, P1 = params.P, params.P1
    ab = 1.0 - alpha
    relay = _c(alpha * beta * P / (ab * P + params.Nt1))
    direct = _c((alpha * P + P1 + 2.0 * np.sqrt((1.0 - beta) * alpha * P * P1)) / (ab * P + params.N1))
    return relay, direct, _c(ab * P / params.N2)


# ---------------------------------------------------------------- public API


def dfdf_rates(params: GaussianBrcParams, c: CodingParams) -> StrategyRates:
    return StrategyRates.from_terms(*dfdf_terms(params, c.alpha, c.beta1, c.beta2, c.gamma, c.lam))


def dfcf_case1(params: GaussianBrcParams, c: CodingParams, form: str = CF_FORM_MIXED):
    """DF at relay 1, CF at relay 2, user 2 pre-cancels X_A. R2 is at gamma*."""
    relay, direct, r2 = dfcf1_terms(params, c.alpha, c.beta1, form=form)
    nt = cf_equivalent_noise(params, 2, form)
    q = (1.0 - c.alpha) * params.P
    coef = DpcCoefficients(q / (q + nt), 0.0, nt)
    return StrategyRates.from_terms(relay, direct, r2, r2, flags=_cf_flags(params, 2, form)), coef


def dfcf_case1_r2(params: GaussianBrcParams, alpha: float, gamma: float, form: str = CF_FORM_MIXED) -> float:
    """Case-1 user-2 rate at an arbitrary inflation factor."""
    return float(dfcf1_terms(params, alpha, 1.0, gamma, form)[2])


def dfcf_case2(params: GaussianBrcParams, c: CodingParams, form: str = CF_FORM_MIXED):
    """DF at relay 1, CF at relay 2, user 2 pre-cancels X1 and user 1 pre-cancels X_B.

    R1 terms are evaluated at the supplied (beta1, lam); R2 at gamma*.
    """
    r11, r12, r2 = dfcf2_terms(params, c.alpha, c.beta1, c.lam, form=form)
    P = params.P
    q, ab = c.alpha * c.beta1 * P, (1.0 - c.alpha) * P
    nt = c.alpha * c.beta1 * P + cf_equivalent_noise(params, 2, form)
    scale = math.sqrt((1.0 - c.beta1) * c.alpha * P / params.P1)
    lam_star = q / (q + params.pl("d_z1") * params.Nt1) if q > 0 else 0.0
    coef = DpcCoefficients(scale * ab / (ab + nt), lam_star, nt)
    return StrategyRates.from_terms(r11, r12, r2, r2, flags=_cf_flags(params, 2, form)), coef


def dfcf_case2_r2(params: GaussianBrcParams, alpha: float, beta: float, gamma: float,
                  form: str = CF_FORM_MIXED) -> float:
    """Case-2 user-2 rate at an arbitrary inflation factor on X1."""
    return float(dfcf2_terms(params, alpha, beta, 0.0, gamma, form)[2])


def dfcf_case2_r2_decoupled(params: GaussianBrcParams, alpha: float, beta: float,
                            form: str = CF_FORM_MIXED) -> float:
    """Case-2 user-2 value when each look is charged its own copy of the
    fresh X_A interference. Upper-bounds :func:`dfcf_case2`'s r2."""
    b = "2"
    nh = compression_noise_cf(params, 2, form)
    ia = alpha * beta * params.P
    q = (1.0 - alpha) * params.P
    look_y = params.pl("d_y" + b) * params.N2 + ia
    look_z = params.pl("d_z" + b) * (nh + params.Nt2) + ia
    return float(cap(q / look_y + q / look_z))


def cfcf_rates(params: GaussianBrcParams, alpha: float) -> StrategyRates:
    if not (math.isfinite(alpha) and 0.0 <= alpha <= 1.0):
        raise DomainError(f"alpha must lie in [0, 1], got {alpha!r}")
    r1, r2 = cfcf_terms(params, alpha)
    return StrategyRates.from_terms(r1, r1, r2, r2)


def cfcf_r1_decoupled(params: GaussianBrcParams, alpha: float) -> float:
    """User-1 CF-CF value when each look is charged its own copy of the X_B
    interference. Upper-bounds :func:`cfcf_rates`'s r1."""
    P, ab = params.P, 1.0 - alpha
    nh = compression_noise_cf(params, 1, CF_FORM_BOTH)
    look_y = params.pl("d_y1") * params.N1 + ab * P
    look_z = params.pl("d_z1") * (nh + params.Nt1) + ab * P
    return float(cap(alpha * P / look_y + alpha * P / look_z))


def cfcf_common_rate(params: GaussianBrcParams) -> float:
    return min(cf_single_rate(params, 1), cf_single_rate(params, 2))


def compound_common_rate(params: GaussianBrcParams, beta: float, form: str = CF_FORM_MIXED):
    """(r_df, r_cf, r0) for a common message decoded through a DF relay on
    branch 1 and a CF relay on branch 2."""
    if not (math.isfinite(beta) and 0.0 <= beta <= 1.0):
        raise DomainError(f"beta must lie in [0, 1], got {beta!r}")
    relay, direct, r_cf = (float(v) for v in compound_terms(params, beta, form))
    r_df = min(relay, direct)
    return r_df, r_cf, min(r_df, r_cf)


def cutset_upper_bound(params: GaussianBrcParams, beta1: float, beta2: float) -> float:
    for name, v in (("beta1", beta1), ("beta2", beta2)):
        if not (math.isfinite(v) and 0.0 <= v <= 1.0):
            raise DomainError(f"{name} must lie in [0, 1], got {v!r}")
    return float(min(cutset_terms(params, beta1, beta2)))


def oblivious_rates(params: GaussianBrcParams, alpha: float, beta: float, degraded: bool = False):
    """Inner and outer rates when only branch 1 has a (DF) relay.

    ``degraded=True`` asserts that Y1 is a noisier version of Z1, in which
    case the outer bound's relay term collapses onto the inner one.
    """
    CodingParams(alpha=alpha, beta1=beta)
    if degraded and params.pl("d_y1") * params.N1 < params.pl("d_z1") * params.Nt1:
        raise DomainError("degraded=True needs pl(d_y1) N1 >= pl(d_z1) Nt1")
    relay, direct, r2, outer = oblivious_terms(params, alpha, beta, degraded)
    inner = StrategyRates.from_terms(relay, direct, r2, r2)
    return inner, StrategyRates.from_terms(outer, direct, r2, r2)


def degraded_cr_capacity(params: GaussianBrcParams, alpha: float, beta: float) -> DegradedCrBounds:
    """Capacity-region slice for the degraded common-relay channel.

    Uses the unit-gain model; distance fields are ignored.
    """
    CodingParams(alpha=alpha, beta1=beta)
    if not (params.Nt1 <= params.N1 < params.N2):
        warnings.warn("capacity claim needs Nt1 <= N1 < N2", RuntimeWarning, stacklevel=2)
    return DegradedCrBounds(*(float(v) for v in degraded_cr_terms(params, alpha, beta)))


def partial_coop_capacity(params: GaussianBrcParams, alpha: float, beta: float) -> RateTriple:
    """Capacity-region slice with a relay serving destination 1 only.

    Uses the unit-gain model; distance fields are ignored. The capacity
    claim needs Nt1 <= N1 and N2 < Nt1.
    """
    CodingParams(alpha=alpha, beta1=beta)
    if not (params.N2 < params.Nt1 <= params.N1):
        warnings.warn("capacity claim needs N2 < Nt1 <= N1", RuntimeWarning, stacklevel=2)
    relay, direct, r2 = (float(v) for v in partial_coop_terms(params, alpha, beta))
    return RateTriple(0.0, min(relay, direct), r2)
