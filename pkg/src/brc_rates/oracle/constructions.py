"""Second-moment models of the Gaussian coding schemes.

Each function builds the jointly Gaussian vector induced by a scheme's
auxiliary variables and evaluates the mutual-information functional that
defines its rates with :func:`logdet_mi`. Nothing here reuses the
closed-form rate expressions; only the channel model and the code
construction enter.

Variable names: ``X, X1, X2`` inputs, ``XA, XB`` the two superposed
descriptions, ``Y1, Y2`` destination outputs, ``Z1, Z2`` relay outputs and
``Zh1, Zh2`` compressed relay outputs.
"""

from __future__ import annotations

import math
from dataclasses import replace

from ..core import CodingParams, GaussianBrcParams
from .gaussian import LinearGaussianModel, logdet_mi


def _amp(params: GaussianBrcParams, name: str) -> float:
    return 1.0 / math.sqrt(params.pl(name))


def brc_model(
    params: GaussianBrcParams,
    alpha: float,
    beta1: float | None = None,
    beta2: float | None = None,
    *,
    nh1: float | None = None,
    nh2: float | None = None,
    relay2: bool = True,
) -> LinearGaussianModel:
    """Superposition input X = XA + XB over the Gaussian BRC.

    ``beta1`` (``beta2``) makes XA (XB) partially coherent with X1 (X2):
    XA = fresh + sqrt((1-beta1) alpha P / P1) X1. ``None`` keeps the
    description independent of the relay input (CF relays).
    """
    P, ab = params.P, 1.0 - alpha
    m = LinearGaussianModel()
    m.source("X1", params.P1)
    m.source("X2", params.P2)
    b1 = 1.0 if beta1 is None else beta1
    b2 = 1.0 if beta2 is None else beta2
    m.source("xa", alpha * b1 * P)
    m.source("xb", ab * b2 * P)
    m.define("XA", xa=1.0, X1=math.sqrt((1.0 - b1) * alpha * P / params.P1))
    m.define("XB", xb=1.0, X2=math.sqrt((1.0 - b2) * ab * P / params.P2))
    m.define("X", XA=1.0, XB=1.0)
    for name in ("N1", "N2", "Nt1", "Nt2"):
        m.source("n_" + name, getattr(params, name))
    m.define("Y1", X=_amp(params, "d_y1"), X1=_amp(params, "d_z1y1"), n_N1=1.0)
    y2 = {"X": _amp(params, "d_y2"), "n_N2": 1.0}
    if relay2:
        y2["X2"] = _amp(params, "d_z2y2")
    m.define("Y2", y2)
    m.define("Z1", X=_amp(params, "d_z1"), n_Nt1=1.0)
    m.define("Z2", X=_amp(params, "d_z2"), n_Nt2=1.0)
    if nh1 is not None:
        m.source("n_hat1", nh1)
        m.define("Zh1", Z1=1.0, n_hat1=1.0)
    if nh2 is not None:
        m.source("n_hat2", nh2)
        m.define("Zh2", Z2=1.0, n_hat2=1.0)
    return m


def _relay_coef(params: GaussianBrcParams, alpha: float, beta: float, branch: int = 1) -> float:
    share = alpha if branch == 1 else 1.0 - alpha
    return math.sqrt((1.0 - beta) * share * params.P / getattr(params, f"P{branch}"))


def dfdf(params: GaussianBrcParams, c: CodingParams) -> dict[str, float]:
    """U1 = XA + lam XB, U2 = XB + gamma s X1 with s X1 the part of XA
    carried coherently with relay 1."""
    m = brc_model(params, c.alpha, c.beta1, c.beta2)
    m.define("U1", XA=1.0, XB=c.lam)
    m.define("U2", XB=1.0, X1=c.gamma * _relay_coef(params, c.alpha, c.beta1))
    j = m.joint()
    pen1 = logdet_mi(j, ["U1"], ["X2", "U2"], ["X1"])
    pen2 = logdet_mi(j, ["X1"], ["U2"], ["X2"])
    return {
        "r11": logdet_mi(j, ["U1"], ["Z1"], ["X1"]) - pen1,
        "r12": logdet_mi(j, ["U1", "X1"], ["Y1"]) - pen1,
        "r21": logdet_mi(j, ["U2"], ["Z2"], ["X2"]) - pen2,
        "r22": logdet_mi(j, ["U2", "X2"], ["Y2"]) - pen2,
    }


def dfcf_case1(params: GaussianBrcParams, c: CodingParams, nh2: float) -> dict[str, float]:
    """U1 = XA (partially coherent with X1), U2 = XB + gamma XA."""
    m = brc_model(params, c.alpha, c.beta1, None, nh2=nh2)
    m.define("U1", XA=1.0)
    m.define("U2", XB=1.0, XA=c.gamma)
    j = m.joint()
    return {
        "r1_relay": logdet_mi(j, ["U1"], ["Z1"], ["X1"]),
        "r1_direct": logdet_mi(j, ["U1", "X1"], ["Y1"]),
        "r2": logdet_mi(j, ["U2"], ["Y2", "Zh2"], ["X2"]) - logdet_mi(j, ["U1", "X1"], ["U2"]),
    }


def dfcf_case2(params: GaussianBrcParams, c: CodingParams, nh2: float) -> dict[str, float]:
    """U1 = XA + lam XB, U2 = XB + gamma X1."""
    m = brc_model(params, c.alpha, c.beta1, None, nh2=nh2)
    m.define("U1", XA=1.0, XB=c.lam)
    m.define("U2", XB=1.0, X1=c.gamma)
    j = m.joint()
    pen1 = logdet_mi(j, ["U1"], ["U2"], ["X1"])
    return {
        "r11": logdet_mi(j, ["U1"], ["Z1"], ["X1"]) - pen1,
        "r12": logdet_mi(j, ["U1", "X1"], ["Y1"]) - pen1,
        "r2": logdet_mi(j, ["U2"], ["Y2", "Zh2"], ["X2"]) - logdet_mi(j, ["X1"], ["U2"]),
    }


def cfcf(params: GaussianBrcParams, alpha: float, gamma: float, nh1: float, nh2: float) -> dict[str, float]:
    """U1 = XA, U2 = XB + gamma XA with both relays compressing."""
    m = brc_model(params, alpha, None, None, nh1=nh1, nh2=nh2)
    m.define("U1", XA=1.0)
    m.define("U2", XB=1.0, XA=gamma)
    j = m.joint()
    return {
        "r1": logdet_mi(j, ["U1"], ["Y1", "Zh1"], ["X1"]),
        "r2": logdet_mi(j, ["U2"], ["Y2", "Zh2"], ["X2"]) - logdet_mi(j, ["U1", "X1"], ["U2"]),
    }


def cf_rate(params: GaussianBrcParams, side: int, nh: float) -> float:
    """I(X; Y_b, Zhat_b | X_b) with X independent of the relay input."""
    kw = {f"nh{side}": nh}
    j = brc_model(params, 1.0, None, None, **kw).joint()
    return logdet_mi(j, ["X"], [f"Y{side}", f"Zh{side}"], [f"X{side}"])


def cf_feasibility(params: GaussianBrcParams, side: int, nh: float) -> tuple[float, float]:
    """Both sides of the CF constraint: (I(X_b;Y_b), I(Z_b;Zhat_b|X_b,Y_b))."""
    kw = {f"nh{side}": nh}
    j = brc_model(params, 1.0, None, None, **kw).joint()
    b = str(side)
    return (
        logdet_mi(j, ["X" + b], ["Y" + b]),
        logdet_mi(j, ["Z" + b], ["Zh" + b], ["X" + b, "Y" + b]),
    )


def compound(params: GaussianBrcParams, beta: float, nh2: float) -> dict[str, float]:
    """X = U + sqrt((1-beta) P / P1) X1 decoded by a DF and a CF relay branch."""
    j = brc_model(params, 1.0, beta, None, nh2=nh2).joint()
    return {
        "df_relay": logdet_mi(j, ["X"], ["Z1"], ["X1"]),
        "df_direct": logdet_mi(j, ["X", "X1"], ["Y1"]),
        "cf": logdet_mi(j, ["X"], ["Y2", "Zh2"], ["X2"]),
    }


def cutset(params: GaussianBrcParams, beta1: float, beta2: float) -> dict[str, float]:
    """Broadcast and multiple-access cuts of each relay branch."""
    out = {}
    for b, beta in ((1, beta1), (2, beta2)):
        if b == 1:
            j = brc_model(params, 1.0, beta, None).joint()
        else:
            j = brc_model(params, 0.0, None, beta).joint()
        s = str(b)
        out["bc" + s] = logdet_mi(j, ["X"], ["Z" + s, "Y" + s], ["X" + s])
        out["mac" + s] = logdet_mi(j, ["X", "X" + s], ["Y" + s])
    return out


def oblivious_inner(params: GaussianBrcParams, alpha: float, beta: float, gamma: float) -> dict[str, float]:
    """Single DF relay; destination 2 receives no relay signal."""
    m = brc_model(params, alpha, beta, None, relay2=False)
    m.define("U1", XA=1.0)
    m.define("U2", XB=1.0, XA=gamma)
    j = m.joint()
    return {
        "r1_relay": logdet_mi(j, ["U1"], ["Z1"], ["X1"]),
        "r1_direct": logdet_mi(j, ["U1", "X1"], ["Y1"]),
        "r2": logdet_mi(j, ["U2"], ["Y2"]) - logdet_mi(j, ["U1", "X1"], ["U2"]),
    }


def oblivious_outer_relay_term(params: GaussianBrcParams, alpha: float, beta: float) -> float:
    """Fresh part of XA observed through the relay and destination looks,
    each with its own independent copy of the XB interference."""
    P, ab = params.P, 1.0 - alpha
    m = LinearGaussianModel()
    m.source("xa", alpha * beta * P)
    m.source("xb_z", ab * P)
    m.source("xb_y", ab * P)
    m.source("ez", params.pl("d_z1") * params.Nt1)
    m.source("ey", params.pl("d_y1") * params.N1)
    m.define("Zs", xa=1.0, xb_z=1.0, ez=1.0)
    m.define("Ys", xa=1.0, xb_y=1.0, ey=1.0)
    return logdet_mi(m.joint(), ["xa"], ["Zs", "Ys"])


def oblivious_degraded_cut(params: GaussianBrcParams, alpha: float, beta: float) -> dict[str, float]:
    """I(U1; Z1, Y1 | X1) and I(U1; Z1 | X1) when Y1 is a noisier copy of Z1.

    The destination noise is built as the (rescaled) relay noise plus an
    independent excess, so Y1 is physically degraded with respect to Z1.
    """
    P, ab = params.P, 1.0 - alpha
    pz, py = params.pl("d_z1"), params.pl("d_y1")
    excess = py * params.N1 - pz * params.Nt1
    m = LinearGaussianModel()
    m.source("X1", params.P1)
    m.source("xa", alpha * beta * P)
    m.source("xb", ab * P)
    m.source("n_Nt1", params.Nt1)
    m.source("w", excess)
    m.define("XA", xa=1.0, X1=_relay_coef(params, alpha, beta))
    m.define("X", XA=1.0, xb=1.0)
    m.define("Z1", X=1.0 / math.sqrt(pz), n_Nt1=1.0)
    m.define(
        "Y1",
        X=1.0 / math.sqrt(py),
        X1=_amp(params, "d_z1y1"),
        n_Nt1=math.sqrt(pz) / math.sqrt(py),
        w=1.0 / math.sqrt(py),
    )
    m.define("U1", XA=1.0)
    j = m.joint()
    return {
        "joint": logdet_mi(j, ["U1"], ["Z1", "Y1"], ["X1"]),
        "relay_only": logdet_mi(j, ["U1"], ["Z1"], ["X1"]),
    }


def _unit(params: GaussianBrcParams) -> GaussianBrcParams:
    return replace(params, d_y1=1.0, d_y2=1.0, d_z1=1.0, d_z2=1.0, d_z1y1=1.0, d_z2y2=1.0)


def degraded_cr(params: GaussianBrcParams, alpha: float, beta: float) -> dict[str, float]:
    """Common relay, both destinations see X + X1.

    The coherent sum S = X + X1 is split into a cloud U carrying a fraction
    alpha of its power and a remainder, with X = fresh + sqrt((1-beta)P/P1) X1.
    """
    P, P1, ab = params.P, params.P1, 1.0 - alpha
    c = math.sqrt((1.0 - beta) * P / P1)
    m = LinearGaussianModel()
    m.source("xt_u", alpha * beta * P)
    m.source("xt_w", ab * beta * P)
    m.source("x1_u", alpha * P1)
    m.source("x1_w", ab * P1)
    for name in ("N1", "N2", "Nt1"):
        m.source("n_" + name, getattr(params, name))
    m.define("X1", x1_u=1.0, x1_w=1.0)
    m.define("X", xt_u=1.0, xt_w=1.0, X1=c)
    m.define("U", xt_u=1.0, x1_u=1.0 + c)
    m.define("Y1", X=1.0, X1=1.0, n_N1=1.0)
    m.define("Y2", X=1.0, X1=1.0, n_N2=1.0)
    m.define("Z1", X=1.0, n_Nt1=1.0)
    j = m.joint()
    return {
        "r0": logdet_mi(j, ["U"], ["Y2"]),
        "r1": logdet_mi(j, ["X", "X1"], ["Y1"], ["U"]),
        "sum": logdet_mi(j, ["X"], ["Z1"], ["X1"]),
    }


def partial_coop(params: GaussianBrcParams, alpha: float, beta: float) -> dict[str, float]:
    """Relay helps destination 1 only; destination 2 peels XA off first."""
    m = brc_model(_unit(params), alpha, beta, None, relay2=False)
    j = m.joint()
    return {
        "r1_relay": logdet_mi(j, ["XA"], ["Z1"], ["X1"]),
        "r1_direct": logdet_mi(j, ["XA", "X1"], ["Y1"]),
        "r2": logdet_mi(j, ["XB"], ["Y2"], ["XA"]),
    }
