"""Weighted point evaluation on H^2 and minimal-norm interpolation.

Functions in H^2 are held by their Taylor coefficients (the monomials
``z^n`` are orthonormal).  The weighted evaluation map is

    phi(f) = ( f(lambda_k) sqrt(1 - |lambda_k|^2) )_k

and the minimal-norm solution of ``phi(f) = t`` lies in the span of
the normalized Szego kernels ``w_j k_(lambda_j)`` with
``k_lambda(z) = sum_n conj(lambda)^n z^n``.  In those coordinates the
problem is ``G alpha = t`` where ``G`` is exactly the closed-form frame
operator of the matching iterated system.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .disc import DiscSequence
from .errors import DimensionMismatch, IllConditioned, InvalidParameter, ToleranceNotReached
from .frames import A_FLOOR, FrameOperatorMatrix, closed_form_gram, frame_bounds
from .linalg import conjugate_gradient

#: Above this many product points the Kronecker Gram is not assembled.
KRON_SOLVE_LIMIT = 256


@dataclass(frozen=True, eq=False)
class PolyFunction:
    """Truncated H^2 element ``sum_n a_n z^n``."""

    coefficients: np.ndarray

    def __post_init__(self):
        c = np.atleast_1d(np.asarray(self.coefficients, dtype=complex))
        if not np.isfinite(c).all():
            raise ValueError("coefficients must be finite")
        object.__setattr__(self, "coefficients", c)

    @property
    def degree(self) -> int:
        return len(self.coefficients) - 1

    def norm_sq(self) -> float:
        return float(np.vdot(self.coefficients, self.coefficients).real)

    def __call__(self, z):
        # Horner, vectorized over the evaluation points
        z = np.asarray(z, dtype=complex)
        acc = np.zeros_like(z)
        for a in self.coefficients[::-1]:
            acc = acc * z + a
        return acc

    def __add__(self, other: "PolyFunction") -> "PolyFunction":
        a, b = self.coefficients, other.coefficients
        n = max(len(a), len(b))
        out = np.zeros(n, dtype=complex)
        out[:len(a)] += a
        out[:len(b)] += b
        return PolyFunction(out)


def phi_lambda(f: PolyFunction, seq: DiscSequence) -> np.ndarray:
    return f(seq.points) * seq.weights


def kernel_degree(seq: DiscSequence, alpha, budget: float) -> int:
    """Degree ``D`` at which to cut the kernel expansion.

    Smallest ``D`` with ``r^(D+1) / (1 - r) <= budget / (K max_j |alpha_j| w_j)``;
    that bounds every entry of ``phi(f_D) - phi(f)``.
    """
    r = seq.max_modulus
    scale = len(seq) * float(np.max(np.abs(alpha) * seq.weights, initial=0.0))
    if r == 0.0 or scale == 0.0:
        return 0
    rhs = budget * (1.0 - r) / scale
    if rhs >= r:
        return 0
    return max(0, math.ceil(math.log(rhs) / math.log(r)) - 1)


@dataclass(frozen=True, eq=False)
class InterpolationResult:
    kernel_coefficients: np.ndarray
    norm_sq: float
    residual: float
    gram_condition: float
    degree: int
    iterations: int
    seq: DiscSequence

    def as_poly(self) -> PolyFunction:
        """Taylor coefficients ``a_n = sum_j alpha_j w_j conj(lambda_j)^n`` for ``n <= degree``."""
        lam = self.seq.points
        n = np.arange(self.degree + 1)
        powers = np.power(lam.conj()[:, None], n[None, :])
        return PolyFunction((self.kernel_coefficients * self.seq.weights) @ powers)


def _truncated_values(G, lam, alpha, degree):
    # phi of the degree-D truncation: G_kj (1 - (lambda_k conj lambda_j)^(D+1)) alpha_j
    P = np.outer(lam, lam.conj())
    return (G * (1.0 - P ** (degree + 1))) @ alpha


def min_norm_interpolant(seq: DiscSequence, targets, tol: float = 1e-10,
                         a_floor: float = A_FLOOR) -> InterpolationResult:
    """Minimal H^2-norm ``f`` with ``f(lambda_k) w_k = t_k``.

    Solves ``G alpha = t`` by conjugate gradients and truncates the kernel
    expansion at a degree chosen so that the polynomial ``f_D`` still meets
    the targets.  ``residual`` is ``||phi(f_D) - t|| / ||t||`` evaluated
    exactly for that polynomial, and ``gram_condition`` is ``B / A``.

    Raises
    ------
    IllConditioned
        If the lower bound of ``G`` is below ``a_floor``.
    ToleranceNotReached
        If the residual cannot be brought under ``tol``.
    """
    t = np.asarray(targets, dtype=complex)
    K = len(seq)
    if t.shape != (K,):
        raise DimensionMismatch(f"targets have shape {t.shape}, expected ({K},)")
    if tol <= 0:
        raise InvalidParameter("tol must be positive")
    G = closed_form_gram(seq)
    bounds = frame_bounds(FrameOperatorMatrix(G, "closed_form"))
    if bounds.lower_A < a_floor:
        raise IllConditioned(
            f"Gram lower bound {bounds.lower_A:.3e} is below {a_floor:.1e}; "
            "the points are too close to a Carleson failure")
    tnorm = np.linalg.norm(t)
    if tnorm == 0.0:
        return InterpolationResult(np.zeros(K, dtype=complex), 0.0, 0.0, bounds.condition,
                                   0, 0, seq)
    sol = conjugate_gradient(G, t, tol=0.5 * tol)
    alpha = sol.x
    degree = kernel_degree(seq, alpha, 0.5 * tol * tnorm / math.sqrt(K))
    vals = _truncated_values(G, seq.points, alpha, degree)
    residual = float(np.linalg.norm(vals - t) / tnorm)
    if residual > tol:
        raise ToleranceNotReached(
            f"interpolation residual {residual:.3e} exceeds {tol:.1e}", residual=residual)
    norm_sq = float(max(np.vdot(alpha, G @ alpha).real, 0.0))
    return InterpolationResult(alpha, norm_sq, residual, bounds.condition, degree,
                               sol.iterations, seq)


def _unit(v):
    return v / np.linalg.norm(v)


def surjectivity_probe(seq: DiscSequence, trials: int, seed: int, refine_steps: int = 25,
                       tol: float = 1e-10) -> tuple[float, float]:
    """Extremes of ``||f_t||`` over unit targets ``t``, ``f_t`` the minimal interpolant.

    Each trial draws a random unit target (Philox stream keyed by ``seed``)
    and then follows it ``refine_steps`` times in two directions: feeding
    the normalized solution ``alpha`` back in as the next target, which
    drifts toward the hardest targets, and feeding ``G t`` back in, which
    drifts toward the easiest.  Every visited target is a genuine unit
    target, so the returned ``(max, min)`` always lies inside
    ``[1/sqrt(B), 1/sqrt(A)]``.  With ``refine_steps=0`` this is plain
    random sampling, which in more than a few dimensions rarely comes
    close to the extremes.
    """
    if trials < 1:
        raise InvalidParameter("trials must be positive")
    rng = np.random.Generator(np.random.Philox(seed))
    K = len(seq)
    G = closed_form_gram(seq)
    hi, lo = 0.0, math.inf
    for _ in range(trials):
        t0 = _unit(rng.standard_normal(K) + 1j * rng.standard_normal(K))
        t = t0
        for _ in range(refine_steps + 1):
            res = min_norm_interpolant(seq, t, tol)
            hi = max(hi, math.sqrt(res.norm_sq))
            t = _unit(res.kernel_coefficients)
        t = t0
        for _ in range(refine_steps + 1):
            res = min_norm_interpolant(seq, t, tol)
            lo = min(lo, math.sqrt(res.norm_sq))
            t = _unit(G @ t)
    return hi, lo


@dataclass(frozen=True, eq=False)
class TensorInterpolationResult:
    kernel_coefficients: np.ndarray
    norm_sq: float
    residual: float


def tensor_min_norm_interpolant(seq_a: DiscSequence, seq_b: DiscSequence, targets,
                                tol: float = 1e-10) -> TensorInterpolationResult:
    """Minimal-norm interpolation on the product points ``(lambda_k, gamma_l)``.

    ``targets`` is either a pair ``(c, f)`` standing for the rank-one
    targets ``c_k f_l``, solved as two one-factor problems, or a full
    ``K_A x K_B`` matrix, solved against the Kronecker Gram ``G_A kron G_B``
    (only up to ``KRON_SOLVE_LIMIT`` product points).  Coefficients come
    back as a ``K_A x K_B`` matrix.
    """
    if isinstance(targets, tuple):
        c, f = targets
        ra = min_norm_interpolant(seq_a, c, tol)
        rb = min_norm_interpolant(seq_b, f, tol)
        alpha = np.outer(ra.kernel_coefficients, rb.kernel_coefficients)
        Ga, Gb = closed_form_gram(seq_a), closed_form_gram(seq_b)
        T = np.outer(np.asarray(c, dtype=complex), np.asarray(f, dtype=complex))
        fit = Ga @ alpha @ Gb.T
        tn = np.linalg.norm(T)
        res = float(np.linalg.norm(fit - T) / tn) if tn else 0.0
        return TensorInterpolationResult(alpha, ra.norm_sq * rb.norm_sq, res)
    T = np.asarray(targets, dtype=complex)
    ka, kb = len(seq_a), len(seq_b)
    if T.shape != (ka, kb):
        raise DimensionMismatch(f"targets have shape {T.shape}, expected ({ka}, {kb})")
    if ka * kb > KRON_SOLVE_LIMIT:
        raise InvalidParameter(
            f"{ka * kb} product points exceed the Kronecker solve limit {KRON_SOLVE_LIMIT}")
    G = np.kron(closed_form_gram(seq_a), closed_form_gram(seq_b))
    bounds = frame_bounds(FrameOperatorMatrix(G, "kronecker"))
    if bounds.lower_A < A_FLOOR:
        raise IllConditioned(f"Kronecker Gram lower bound {bounds.lower_A:.3e} is too small")
    sol = conjugate_gradient(G, T.ravel(), tol=tol)
    alpha = sol.x
    norm_sq = float(max(np.vdot(alpha, G @ alpha).real, 0.0))
    return TensorInterpolationResult(alpha.reshape(ka, kb), norm_sq, sol.residual)
