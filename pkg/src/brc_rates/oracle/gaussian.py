"""Gaussian mutual information from covariance log-determinants."""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import Iterable, Mapping

import numpy as np

from ..core import DomainError, NumericError

EIG_FLOOR = 1e-14
SYMMETRY_TOL = 1e-12
PSD_TOL = 1e-10


class EigenvalueFloorWarning(RuntimeWarning):
    """Emitted when a conditional covariance needed eigenvalue flooring."""


@dataclass(frozen=True)
class GaussianJoint:
    """Zero-mean jointly Gaussian vector described by its covariance."""

    names: tuple[str, ...]
    cov: np.ndarray

    def __post_init__(self) -> None:
        cov = np.asarray(self.cov, dtype=float)
        n = len(self.names)
        if cov.shape != (n, n):
            raise DomainError(f"covariance shape {cov.shape} does not match {n} names")
        if len(set(self.names)) != n:
            raise DomainError("variable names must be unique")
        scale = max(1.0, float(np.max(np.abs(cov)))) if n else 1.0
        if not np.allclose(cov, cov.T, atol=SYMMETRY_TOL * scale, rtol=0.0):
            raise DomainError("covariance is not symmetric")
        if n and np.linalg.eigvalsh(cov).min() < -PSD_TOL * scale:
            raise DomainError("covariance is not positive semidefinite")
        object.__setattr__(self, "cov", cov)
        object.__setattr__(self, "_index", {k: i for i, k in enumerate(self.names)})

    def indices(self, names: Iterable[str]) -> list[int]:
        out = []
        for k in names:
            if k not in self._index:
                raise DomainError(f"unknown variable {k!r}")
            out.append(self._index[k])
        return out

    def logdet(self, names: Iterable[str], regularize: bool = True) -> float:
        """Natural-log determinant of the covariance of ``names``.

        The block is rescaled to unit diagonal first; eigenvalues of the
        rescaled block below the floor are clamped (with a warning) when
        ``regularize`` is true and raise :class:`NumericError` otherwise.
        """
        idx = sorted(set(self.indices(names)))
        if not idx:
            return 0.0
        sub = self.cov[np.ix_(idx, idx)]
        # equilibrate to unit diagonal; zero-variance entries stay unscaled
        diag = np.diag(sub)
        scale = np.sqrt(np.where(diag > 0, diag, 1.0))
        eig = np.linalg.eigvalsh(sub / np.outer(scale, scale))
        shift = 2.0 * float(np.sum(np.log(scale)))
        if eig.min() < EIG_FLOOR:
            if not regularize:
                raise NumericError(
                    f"singular covariance for {[self.names[i] for i in idx]}"
                )
            warnings.warn(
                f"near-singular covariance for {[self.names[i] for i in idx]}; "
                f"eigenvalues floored at {EIG_FLOOR:g}",
                EigenvalueFloorWarning,
                stacklevel=3,
            )
            eig = np.maximum(eig, EIG_FLOOR)
        return float(np.sum(np.log(eig))) + shift


class LinearGaussianModel:
    """Build a :class:`GaussianJoint` from independent Gaussian sources.

    Every named variable is a linear combination of the sources, so the
    covariance is ``A diag(var) A^T``.

    >>> m = LinearGaussianModel()
    >>> m.source("x", 10.0); m.source("n", 1.0)
    >>> m.define("y", x=1.0, n=1.0)
    >>> round(logdet_mi(m.joint(), ["x"], ["y"]), 6)
    1.729716
    """

    def __init__(self) -> None:
        self._sources: dict[str, float] = {}
        self._vars: dict[str, dict[str, float]] = {}

    def source(self, name: str, variance: float) -> None:
        if name in self._sources or name in self._vars:
            raise DomainError(f"duplicate name {name!r}")
        if not (math.isfinite(variance) and variance >= 0):
            raise DomainError(f"source variance must be >= 0, got {variance!r}")
        self._sources[name] = float(variance)
        self._vars[name] = {name: 1.0}

    def define(self, name: str, terms: Mapping[str, float] | None = None, **kw: float) -> None:
        """Define ``name`` as a weighted sum of sources or earlier variables."""
        if name in self._vars:
            raise DomainError(f"duplicate name {name!r}")
        combo: dict[str, float] = {}
        for ref, w in {**(terms or {}), **kw}.items():
            if ref not in self._vars:
                raise DomainError(f"unknown variable {ref!r}")
            for src, a in self._vars[ref].items():
                combo[src] = combo.get(src, 0.0) + float(w) * a
        self._vars[name] = combo

    def joint(self, names: Iterable[str] | None = None) -> GaussianJoint:
        names = tuple(names) if names is not None else tuple(self._vars)
        srcs = list(self._sources)
        A = np.array([[self._vars[v].get(s, 0.0) for s in srcs] for v in names])
        var = np.array([self._sources[s] for s in srcs])
        cov = (A * var) @ A.T
        return GaussianJoint(names, 0.5 * (cov + cov.T))


def logdet_mi(
    joint: GaussianJoint,
    a: Iterable[str],
    b: Iterable[str],
    cond: Iterable[str] = (),
    *,
    regularize: bool = True,
) -> float:
    """I(A;B|C) in bits for jointly Gaussian variables.

    Uses I = 0.5*[log|S_AC| + log|S_BC| - log|S_ABC| - log|S_C|] / ln 2.
    """
    a, b, cond = list(a), list(b), list(cond)
    if not a or not b:
        raise DomainError("a and b must be nonempty")
    if set(a) & set(b):
        raise DomainError("a and b must be disjoint")
    joint.indices(a + b + cond)
    a = [k for k in a if k not in cond]
    b = [k for k in b if k not in cond]
    if not a or not b:
        return 0.0
    def ld(names):
        return joint.logdet(names, regularize)

    nats = 0.5 * (ld(a + cond) + ld(b + cond) - ld(a + b + cond) - ld(cond))
    if not math.isfinite(nats):
        raise NumericError("mutual information is not finite")
    # tiny negative values are round-off
    return max(nats / math.log(2.0), 0.0)
