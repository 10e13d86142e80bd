"""Geometry of the open unit disc.

Points are plain Python/numpy complex numbers.  A :class:`DiscSequence`
is an immutable, validated, ordered collection of such points.

Products of many sub-unit pseudohyperbolic factors are always formed as
sums of logarithms and exponentiated once; a hundred factors of 0.01
would otherwise underflow.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable

import numpy as np

from .errors import NearCollision, PointOutsideDisc

#: Minimum pseudohyperbolic separation for two points to count as distinct.
EPS_SEP = 1e-12


def _one_minus_abs2(z):
    r = np.abs(z)
    return (1.0 - r) * (1.0 + r)


def pseudohyperbolic_distance(a: complex, b: complex) -> float:
    """Return ``|a - b| / |1 - conj(a) b|`` for two points of the disc.

    Evaluated through the identity
    ``|1 - conj(a) b|^2 = |a - b|^2 + (1 - |a|^2)(1 - |b|^2)``, which keeps
    the result exactly symmetric and strictly below one.
    """
    d2 = abs(a - b) ** 2
    if d2 == 0.0:
        return 0.0
    denom = d2 + float(_one_minus_abs2(a) * _one_minus_abs2(b))
    return float(np.sqrt(d2 / denom))


def pseudohyperbolic_matrix(points) -> np.ndarray:
    """All pairwise distances ``rho(points[j], points[k])`` as a matrix."""
    z = np.asarray(points, dtype=complex)
    d2 = np.abs(z[:, None] - z[None, :]) ** 2
    s = _one_minus_abs2(z)
    denom = d2 + np.outer(s, s)
    return np.sqrt(d2 / denom)


def log_pseudohyperbolic_matrix(points) -> np.ndarray:
    """Elementwise ``log rho`` with the diagonal set to 0 (it is excluded from products)."""
    z = np.asarray(points, dtype=complex)
    d2 = np.abs(z[:, None] - z[None, :]) ** 2
    s = _one_minus_abs2(z)
    denom = d2 + np.outer(s, s)
    np.fill_diagonal(d2, 1.0)
    np.fill_diagonal(denom, 1.0)
    with np.errstate(divide="ignore"):
        return 0.5 * (np.log(d2) - np.log(denom))


@dataclass(frozen=True, eq=False)
class DiscSequence:
    """Ordered, pairwise distinct points strictly inside the unit disc.

    Build instances with :func:`validate_disc_sequence`; the constructor
    itself does no checking.
    """

    points: np.ndarray
    label: str = ""
    _moduli: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        pts = np.array(self.points, dtype=complex)
        pts.setflags(write=False)
        object.__setattr__(self, "points", pts)
        mod = np.abs(pts)
        mod.setflags(write=False)
        object.__setattr__(self, "_moduli", mod)

    def __len__(self):
        return len(self.points)

    def __getitem__(self, idx):
        if isinstance(idx, slice):
            return DiscSequence(self.points[idx], self.label)
        return complex(self.points[idx])

    def __iter__(self):
        return (complex(p) for p in self.points)

    @property
    def max_modulus(self) -> float:
        return float(self._moduli.max()) if len(self) else 0.0

    @property
    def weights(self) -> np.ndarray:
        """Normalizing weights ``sqrt(1 - |lambda_k|^2)``."""
        return np.sqrt(_one_minus_abs2(self.points))

    def truncate(self, count: int) -> "DiscSequence":
        return DiscSequence(self.points[:count], self.label)


def validate_disc_sequence(points: Iterable[complex], label: str = "",
                           eps_sep: float = EPS_SEP) -> DiscSequence:
    """Check that ``points`` lie in the open disc and are separated.

    Raises
    ------
    PointOutsideDisc
        If some ``|z| >= 1`` (or ``z`` is not finite).
    NearCollision
        If two points are within pseudohyperbolic distance ``eps_sep``;
        the first offending pair (lexicographic order) is reported.
    """
    z = np.asarray(list(points), dtype=complex).ravel()
    bad = ~np.isfinite(z) | (np.abs(z) >= 1.0)
    if bad.any():
        i = int(np.flatnonzero(bad)[0])
        raise PointOutsideDisc(f"point {i} = {z[i]!r} is not inside the open unit disc")
    if len(z) > 1:
        rho = pseudohyperbolic_matrix(z)
        rho[np.tril_indices(len(z))] = np.inf
        close = np.argwhere(rho < eps_sep)
        if len(close):
            i, j = (int(v) for v in close[0])
            raise NearCollision(i, j, float(rho[i, j]))
    return DiscSequence(z, label)


def carleson_infimum(seq: DiscSequence) -> tuple[float, int]:
    """Truncated Carleson statistic ``min_n prod_{k != n} rho(lambda_k, lambda_n)``.

    Returns the value and the 0-based index ``n`` attaining it (the
    smallest such index on ties).  A single point gives the empty
    product, 1.0.
    """
    if len(seq) == 0:
        raise ValueError("carleson_infimum needs at least one point")
    logs = log_pseudohyperbolic_matrix(seq.points).sum(axis=0)
    n = int(np.argmin(logs))
    return float(np.exp(logs[n])), n


def carleson_products(seq: DiscSequence) -> np.ndarray:
    """Per-point products ``prod_{k != n} rho(lambda_k, lambda_n)`` for every ``n``."""
    return np.exp(log_pseudohyperbolic_matrix(seq.points).sum(axis=0))
