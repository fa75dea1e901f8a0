"""Shared scenario builders and samplers for the test suite."""

from __future__ import annotations

import numpy as np
from hypothesis import strategies as st

from brc_rates.core import CodingParams, GaussianBrcParams

# two-relay scenario with relay 2 at 0.7 and relay 1 placed by the sweep
RELAY_SWEEP_BASE = GaussianBrcParams(P=10, P1=10, P2=10).with_relay_position(2, 0.7)
RELAY_SWEEP_D1 = np.round(np.arange(-1.0, 1.0 + 1e-9, 0.01), 12)

# composite scenario: far destination 1, near destination 2
COMPOSITE_BASE = GaussianBrcParams(
    P=10, P1=10, P2=10, d_y1=3, d_y2=1, d_z1=1, d_z1y1=2, d_z2=0.9, d_z2y2=0.1
)

UNIT = GaussianBrcParams(P=10, P1=10, P2=10)


def relay_sweep_at(d1: float) -> GaussianBrcParams:
    return RELAY_SWEEP_BASE.with_relay_position(1, float(d1))


def _dist(rng: np.random.Generator) -> float:
    return float(rng.choice([-1.0, 1.0]) * rng.uniform(0.2, 3.0))


def random_params(rng: np.random.Generator) -> GaussianBrcParams:
    """Moderate-conditioning scenario (path losses within ~[1e-3, 1e2])."""
    return GaussianBrcParams(
        P=rng.uniform(0.5, 20), P1=rng.uniform(0.5, 20), P2=rng.uniform(0.5, 20),
        N1=rng.uniform(0.2, 3), N2=rng.uniform(0.2, 3),
        Nt1=rng.uniform(0.2, 3), Nt2=rng.uniform(0.2, 3),
        d_y1=_dist(rng), d_y2=_dist(rng), d_z1=_dist(rng), d_z2=_dist(rng),
        d_z1y1=_dist(rng), d_z2y2=_dist(rng), delta=rng.uniform(1, 4),
    )


def random_coding(rng: np.random.Generator, gamma_hi: float = 1.0) -> CodingParams:
    a, b1, b2, lam = rng.uniform(0, 1, 4)
    return CodingParams(a, b1, b2, rng.uniform(0, gamma_hi), lam)


pos = st.floats(0.2, 5.0)
dist = st.floats(0.2, 3.0)
unit = st.floats(0.0, 1.0)

params_st = st.builds(
    GaussianBrcParams,
    P=st.floats(0.5, 20.0), P1=st.floats(0.5, 20.0), P2=st.floats(0.5, 20.0),
    N1=pos, N2=pos, Nt1=pos, Nt2=pos,
    d_y1=dist, d_y2=dist, d_z1=dist, d_z2=dist, d_z1y1=dist, d_z2y2=dist,
    delta=st.floats(1.0, 4.0),
)
