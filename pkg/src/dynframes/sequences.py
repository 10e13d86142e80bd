"""Eigenvalue families with known Carleson behaviour.

Families
--------
``geometric``               lambda_k = 1 - c**k,                 0 < c < 1
``polynomial``              lambda_k = 1 - k**(-p),              p > 1
``geometric_with_phases``   lambda_k = (1 - c**k) exp(i k theta)
``explicit``                a user supplied list of points

``k`` runs from 1.  Geometric families are Carleson (interpolating);
polynomial ones are not, since consecutive points crowd together
hyperbolically.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .disc import DiscSequence, validate_disc_sequence
from .errors import InvalidParameter, InvalidSpec, SequenceTooShort

FAMILIES = ("geometric", "polynomial", "geometric_with_phases", "explicit")

#: Slack under 1 for declaring the ratio condition satisfied.
EPS_RATIO = 1e-9


@dataclass(frozen=True)
class SequenceSpec:
    family: str
    count: int
    param: Optional[float] = None
    phase: float = 0.0
    points: tuple = field(default=())

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise InvalidSpec(f"unknown family {self.family!r}; expected one of {FAMILIES}")
        if not isinstance(self.count, (int, np.integer)) or self.count < 1:
            raise InvalidSpec(f"count must be a positive integer, got {self.count!r}")
        if self.family in ("geometric", "geometric_with_phases"):
            if self.param is None or not 0.0 < self.param < 1.0:
                raise InvalidSpec(f"geometric base must lie in (0, 1), got {self.param!r}")
        elif self.family == "polynomial":
            if self.param is None or not self.param > 1.0:
                raise InvalidSpec(f"polynomial power must exceed 1, got {self.param!r}")
        elif self.family == "explicit":
            if len(self.points) < self.count:
                raise InvalidSpec(
                    f"explicit family has {len(self.points)} points, count is {self.count}")

    @classmethod
    def explicit(cls, points: Sequence[complex]) -> "SequenceSpec":
        pts = tuple(complex(p) for p in points)
        return cls("explicit", len(pts), points=pts)

    def label(self) -> str:
        if self.family == "explicit":
            return f"explicit[{self.count}]"
        if self.family == "geometric_with_phases":
            return f"{self.family}({self.param:g},{self.phase:g})[{self.count}]"
        return f"{self.family}({self.param:g})[{self.count}]"


def _family_points(spec: SequenceSpec, count: int) -> np.ndarray:
    k = np.arange(1, count + 1, dtype=float)
    if spec.family == "geometric":
        return 1.0 - spec.param ** k
    if spec.family == "polynomial":
        return 1.0 - k ** (-spec.param)
    if spec.family == "geometric_with_phases":
        return (1.0 - spec.param ** k) * np.exp(1j * spec.phase * k)
    return np.asarray(spec.points[:count], dtype=complex)


def generate(spec: SequenceSpec) -> DiscSequence:
    """Materialize ``spec.count`` points of the family as a validated sequence.

    Geometric bases close to 1 or long polynomial runs eventually round
    to points on the circle or to duplicates; validation reports that
    instead of returning a degenerate sequence.
    """
    return validate_disc_sequence(_family_points(spec, spec.count), spec.label())


@dataclass(frozen=True)
class Admissibility:
    partial_sum: float
    tail_bound: float
    admissible: bool


def admissibility_check(spec: SequenceSpec, K: Optional[int] = None) -> Admissibility:
    """Partial sum of ``1 - |lambda_k|^2`` over ``k <= K`` plus an analytic tail bound.

    The weights ``sqrt(1 - |lambda_k|^2)`` are square summable iff the
    full series converges.  Tails use ``1 - x^2 <= 2 (1 - x)``:
    geometric ``2 c^(K+1) / (1 - c)``; polynomial, by comparison with
    an integral, ``2 K^(1-p) / (p - 1)``.  Explicit lists have no tail.
    """
    K = spec.count if K is None else K
    if K < 1:
        raise InvalidSpec(f"K must be positive, got {K}")
    if spec.family == "explicit" and K > len(spec.points):
        raise InvalidSpec(f"explicit family has only {len(spec.points)} points")
    lam = _family_points(spec, K)
    r = np.abs(lam)
    partial = float(np.sum((1.0 - r) * (1.0 + r)))
    if spec.family in ("geometric", "geometric_with_phases"):
        c = spec.param
        tail = 2.0 * c ** (K + 1) / (1.0 - c)
    elif spec.family == "polynomial":
        p = spec.param
        tail = 2.0 * K ** (1.0 - p) / (p - 1.0)
    else:
        tail = 0.0
    return Admissibility(partial, tail, math.isfinite(tail))


@dataclass(frozen=True)
class RatioCondition:
    c_hat: float
    satisfied: bool
    argmax: tuple


def ratio_condition_constant(seq_a: DiscSequence, seq_b: Optional[DiscSequence] = None,
                             eps_ratio: float = EPS_RATIO) -> RatioCondition:
    """Largest ratio ``(1 - |a_k b_(l+1)|) / (1 - |a_k b_l|)`` over all ``k`` and ``l``.

    With a single sequence the ratio is taken along that sequence,
    ``(1 - |b_(l+1)|) / (1 - |b_l|)``.  The condition counts as satisfied
    when the supremum stays below ``1 - eps_ratio``.  ``argmax`` holds the
    0-based ``(k, l)`` (``k`` is 0 in the single-sequence reading).
    """
    if seq_b is None:
        seq_b, mods_a = seq_a, np.ones(1)
    else:
        mods_a = np.abs(seq_a.points)
    if len(seq_b) < 2:
        raise SequenceTooShort("ratio condition needs at least two points in the second factor")
    prods = np.outer(mods_a, np.abs(seq_b.points))
    gaps = 1.0 - prods
    ratios = gaps[:, 1:] / gaps[:, :-1]
    k, l = np.unravel_index(int(np.argmax(ratios)), ratios.shape)
    c_hat = float(ratios[k, l])
    return RatioCondition(c_hat, c_hat < 1.0 - eps_ratio, (int(k), int(l)))


@dataclass(frozen=True)
class ProductBound:
    partial: float
    tail_factor: float

    @property
    def certified(self) -> float:
        """Lower bound for the infinite product."""
        return self.partial * self.tail_factor


def carleson_lower_bound(c: float, n_terms: int = 50) -> ProductBound:
    """Lower bound ``prod_{N>=1} ((1 - c^N) / (1 + c^N))^2`` on the Carleson constant.

    Any sequence whose gaps ``1 - |lambda|`` shrink at least by the factor
    ``c`` per step has Carleson constant at least this infinite product.
    The first ``n_terms`` factors are multiplied out.  For the rest,
    ``log((1 - x) / (1 + x)) >= -3x`` on ``[0, 1/2]`` gives
    ``tail_factor = exp(-6 c^(n+1) / (1 - c))``, which needs
    ``c^(n_terms + 1) <= 1/2``.
    """
    if not 0.0 < c < 1.0:
        raise InvalidParameter(f"c must lie in (0, 1), got {c!r}")
    if n_terms < 1:
        raise InvalidParameter(f"n_terms must be positive, got {n_terms}")
    if c ** (n_terms + 1) > 0.5:
        need = math.ceil(math.log(0.5) / math.log(c)) - 1
        raise InvalidParameter(
            f"tail estimate needs c^(n_terms+1) <= 1/2; use n_terms >= {need} for c = {c}")
    x = c ** np.arange(1, n_terms + 1, dtype=float)
    log_partial = 2.0 * np.sum(np.log1p(-x) - np.log1p(x))
    tail_exp = -6.0 * c ** (n_terms + 1) / (1.0 - c)
    return ProductBound(float(np.exp(log_partial)), float(np.exp(tail_exp)))
