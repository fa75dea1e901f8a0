"""Shared domain types and scalar information-theoretic primitives.

Rates are in bits per channel use and powers/noise variances are linear.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field, fields, replace
from typing import NamedTuple, Sequence

import numpy as np

PATHLOSS_FLOOR = 1e-6
DEFAULT_DELTA = 2.0


class BrcError(Exception):
    """Base class for errors raised by this package."""


class DomainError(BrcError, ValueError):
    """An argument lies outside the domain of the operation."""


class InfeasibleParameterError(BrcError):
    """A rate expression is undefined for the supplied coding parameters.

    ``constraint`` names the rate term whose ratio became invalid.
    """

    def __init__(self, message: str, constraint: str | None = None):
        super().__init__(message)
        self.constraint = constraint


class NumericError(BrcError, ArithmeticError):
    """A numerical routine could not produce a trustworthy value."""


class StrategyKind(str, enum.Enum):
    DF_DF = "DF_DF"
    DF_CF_CASE1 = "DF_CF_CASE1"
    DF_CF_CASE2 = "DF_CF_CASE2"
    CF_CF = "CF_CF"
    COMPOUND = "COMPOUND"
    COMPOSITE = "COMPOSITE"
    OBLIVIOUS = "OBLIVIOUS"
    DEGRADED_CR_CAPACITY = "DEGRADED_CR_CAPACITY"
    PARTIAL_COOP_CAPACITY = "PARTIAL_COOP_CAPACITY"


def _check_positive(name: str, value: float) -> None:
    if not (math.isfinite(value) and value > 0):
        raise DomainError(f"{name} must be finite and > 0, got {value!r}")


def _check_unit(name: str, value: float) -> None:
    if not (math.isfinite(value) and 0.0 <= value <= 1.0):
        raise DomainError(f"{name} must lie in [0, 1], got {value!r}")


@dataclass(frozen=True)
class GaussianBrcParams:
    """One Gaussian broadcast relay channel scenario.

    ``Nt1``/``Nt2`` are the relay observation noises, ``d_*`` the node
    distances (source->destination ``d_y``, source->relay ``d_z``,
    relay->destination ``d_zy``) and ``delta`` the path-loss exponent.
    """

    P: float
    P1: float
    P2: float
    N1: float = 1.0
    N2: float = 1.0
    Nt1: float = 1.0
    Nt2: float = 1.0
    d_y1: float = 1.0
    d_y2: float = 1.0
    d_z1: float = 1.0
    d_z2: float = 1.0
    d_z1y1: float = 1.0
    d_z2y2: float = 1.0
    delta: float = DEFAULT_DELTA

    def __post_init__(self) -> None:
        for f in fields(self):
            value = getattr(self, f.name)
            if isinstance(value, bool) or not isinstance(value, (int, float, np.floating, np.integer)):
                raise DomainError(f"{f.name} must be a real number, got {value!r}")
            object.__setattr__(self, f.name, float(value))
        for name in ("P", "P1", "P2", "N1", "N2", "Nt1", "Nt2"):
            _check_positive(name, getattr(self, name))
        for name in ("d_y1", "d_y2", "d_z1", "d_z2", "d_z1y1", "d_z2y2"):
            if not math.isfinite(getattr(self, name)):
                raise DomainError(f"{name} must be finite")
        if not (math.isfinite(self.delta) and self.delta >= 0):
            raise DomainError(f"delta must be >= 0, got {self.delta!r}")

    def pl(self, name: str) -> float:
        """Path loss of the link whose distance field is ``name``."""
        return path_loss(getattr(self, name), self.delta)

    def mirrored(self) -> GaussianBrcParams:
        """Swap the roles of branch 1 and branch 2."""
        return replace(
            self,
            P1=self.P2, P2=self.P1, N1=self.N2, N2=self.N1,
            Nt1=self.Nt2, Nt2=self.Nt1, d_y1=self.d_y2, d_y2=self.d_y1,
            d_z1=self.d_z2, d_z2=self.d_z1, d_z1y1=self.d_z2y2, d_z2y2=self.d_z1y1,
        )

    def with_relay_position(self, branch: int, position: float) -> GaussianBrcParams:
        """Place relay ``branch`` on the source-destination segment.

        The relay sits at ``position`` from the source and ``1 - position``
        from its destination.
        """
        if branch == 1:
            return replace(self, d_z1=position, d_z1y1=1.0 - position)
        if branch == 2:
            return replace(self, d_z2=position, d_z2y2=1.0 - position)
        raise DomainError(f"branch must be 1 or 2, got {branch!r}")

    def as_dict(self) -> dict[str, float]:
        return {f.name: getattr(self, f.name) for f in fields(self)}


@dataclass(frozen=True)
class CodingParams:
    """Power split ``alpha``, source-relay splits ``beta1``/``beta2`` and
    dirty-paper coefficients ``gamma``/``lam``.

    Single-beta strategies read ``beta1``.
    """

    alpha: float = 0.5
    beta1: float = 1.0
    beta2: float = 1.0
    gamma: float = 0.0
    lam: float = 0.0

    def __post_init__(self) -> None:
        for name in ("alpha", "beta1", "beta2", "gamma", "lam"):
            value = float(getattr(self, name))
            object.__setattr__(self, name, value)
            if not math.isfinite(value):
                raise DomainError(f"{name} must be finite, got {value!r}")
        for name in ("alpha", "beta1", "beta2"):
            _check_unit(name, getattr(self, name))

    @property
    def beta(self) -> float:
        return self.beta1


@dataclass(frozen=True)
class RateTriple:
    r0: float
    r1: float
    r2: float
    clamped: bool = False

    def __post_init__(self) -> None:
        if min(self.r0, self.r1, self.r2) < 0:
            raise DomainError("rates must be nonnegative")


class RatePoint2D(NamedTuple):
    x: float
    y: float


@dataclass(frozen=True)
class RateRegion:
    """Point cloud plus its counterclockwise convex hull.

    ``axes`` names the rate plotted on each coordinate, e.g. ``("R1", "R2")``.
    """

    points: list[RatePoint2D]
    hull: list[RatePoint2D]
    axes: tuple[str, str] = ("R1", "R2")
    meta: dict = field(default_factory=dict, compare=False)


def path_loss(distance: float, delta: float) -> float:
    return max(abs(distance), PATHLOSS_FLOOR) ** delta


def cap(x):
    """Gaussian capacity function ``0.5 * log2(1 + x)``.

    Accepts scalars or arrays; negative or non-finite SNRs are rejected.
    """
    arr = np.asarray(x, dtype=float)
    if not np.all(np.isfinite(arr)) or np.any(arr < 0):
        raise DomainError(f"SNR must be finite and >= 0, got {x!r}")
    out = 0.5 * np.log2(1.0 + arr)
    return float(out) if out.ndim == 0 else out


def equivalent_noise(terms: Sequence[float]) -> float:
    """Noise of maximum-ratio combined looks: ``1 / sum(1 / n_k)``."""
    if len(terms) == 0:
        raise DomainError("equivalent_noise needs at least one term")
    for t in terms:
        _check_positive("noise term", float(t))
    return 1.0 / sum(1.0 / float(t) for t in terms)


COMPRESSION_FORMS = ("cf_cf", "df_cf")


def compression_noise_cf(params: GaussianBrcParams, side: int, form: str = "cf_cf") -> float:
    """Compression noise variance for the relay of branch ``side``.

    ``form="cf_cf"`` makes the CF constraint I(X_b;Y_b) >= I(Z_b;Zhat_b|X_b,Y_b)
    hold with equality. ``form="df_cf"`` is the variant used for the CF branch
    of the mixed DF/CF schemes; it scales by the direct-link path loss and
    drops the relay-noise factor, so it coincides with ``cf_cf`` only when
    ``Nt_b * pl(d_zbyb) == pl(d_yb)``.
    """
    if side not in (1, 2):
        raise DomainError(f"side must be 1 or 2, got {side!r}")
    if form not in COMPRESSION_FORMS:
        raise DomainError(f"unknown compression form {form!r}")
    b = str(side)
    P = params.P
    Pb = getattr(params, "P" + b)
    Nb = getattr(params, "N" + b)
    Ntb = getattr(params, "Nt" + b)
    py = params.pl("d_y" + b)
    pz = params.pl("d_z" + b)
    load = P * (1.0 / (py * Nb) + 1.0 / (pz * Ntb)) + 1.0
    if form == "cf_cf":
        gain = Pb / (params.pl(f"d_z{b}y{b}") * Nb)
        value = Ntb * load / gain
    else:
        gain = Pb / (py * Nb)
        value = load / gain
    if not (math.isfinite(value) and value > 0):
        raise NumericError(f"compression noise for side {side} is not finite ({value!r})")
    return value
