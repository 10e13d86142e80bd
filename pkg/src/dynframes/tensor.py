"""Tensor products of two iterated systems.

Index pairs ``(k, l)`` are flattened row-major, ``(k, l) -> k * K_B + l``
(0-based), which is the ordering ``numpy.kron`` produces.  Every
routine here, and the matching tests, use this one convention.
"""
from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .disc import EPS_SEP, DiscSequence, log_pseudohyperbolic_matrix, pseudohyperbolic_matrix
from .errors import DimensionMismatch, ProductCollision, SequenceTooShort, ToleranceNotReached
from .frames import (FrameBoundEstimate, FrameOperatorMatrix, IteratedSystem, VectorSystem,
                     build_synthesis, frame_bounds, frame_operator_closed_form)
from .sequences import SequenceSpec, generate, ratio_condition_constant

#: Largest Kronecker size for which bounds are cross-checked on the assembled matrix.
KRON_CHECK_LIMIT = 256


@dataclass(frozen=True, eq=False)
class TensorSystem:
    factor_a: IteratedSystem
    factor_b: IteratedSystem

    @property
    def shape(self) -> tuple:
        return self.factor_a.K, self.factor_b.K

    def product_points(self) -> np.ndarray:
        return product_points(self.factor_a.eigenvalues, self.factor_b.eigenvalues)


@dataclass(frozen=True)
class TensorCoefficients:
    a: np.ndarray
    b: np.ndarray

    def __post_init__(self):
        a = np.asarray(self.a, dtype=complex)
        b = np.asarray(self.b, dtype=complex)
        if not (np.isfinite(a).all() and np.isfinite(b).all()):
            raise ValueError("tensor coefficients must be finite")
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "b", b)


def product_points(seq_a: DiscSequence, seq_b: DiscSequence) -> np.ndarray:
    """Flattened products ``lambda_k * gamma_l``."""
    return np.outer(seq_a.points, seq_b.points).ravel()


def _unflatten(i, kb):
    return (int(i) // kb, int(i) % kb)


def check_product_distinctness(seq_a: DiscSequence, seq_b: DiscSequence,
                               eps_sep: float = EPS_SEP) -> None:
    """Raise :class:`ProductCollision` if two products ``lambda_k gamma_l`` coincide."""
    pts = product_points(seq_a, seq_b)
    if len(pts) < 2:
        return
    rho = pseudohyperbolic_matrix(pts)
    rho[np.tril_indices(len(pts))] = np.inf
    close = np.argwhere(rho < eps_sep)
    if len(close):
        i, j = close[0]
        kb = len(seq_b)
        raise ProductCollision(_unflatten(i, kb), _unflatten(j, kb), float(rho[i, j]))


def tensor_carleson_infimum(seq_a: DiscSequence, seq_b: DiscSequence,
                            eps_sep: float = EPS_SEP) -> tuple[float, tuple]:
    """Carleson statistic of the product points, taken literally.

    ``min_(n,m) prod_((k,l) != (n,m)) rho(lambda_k gamma_l, lambda_n gamma_m)``
    over the ``K_A * K_B`` products, summed in the log domain.  Coinciding
    products would contribute an exact zero factor; they are reported as
    :class:`ProductCollision` instead.  Returns ``(value, (n, m))``.
    """
    check_product_distinctness(seq_a, seq_b, eps_sep)
    logs = log_pseudohyperbolic_matrix(product_points(seq_a, seq_b)).sum(axis=0)
    i = int(np.argmin(logs))
    return float(np.exp(logs[i])), _unflatten(i, len(seq_b))


def kron_frame_operator(Sa: FrameOperatorMatrix, Sb: FrameOperatorMatrix) -> FrameOperatorMatrix:
    return FrameOperatorMatrix(np.kron(Sa.entries, Sb.entries), "kronecker")


def tensor_frame_bounds(ts: TensorSystem, tol: float = 1e-10) -> FrameBoundEstimate:
    """Frame bounds of the tensor system from its factors, ``A = A_a A_b``, ``B = B_a B_b``.

    For ``K_A K_B <= KRON_CHECK_LIMIT`` the assembled Kronecker operator is
    also diagonalized and must agree to within ``tol`` (relative to ``B``).
    """
    Sa = frame_operator_closed_form(ts.factor_a)
    Sb = frame_operator_closed_form(ts.factor_b)
    ba = frame_bounds(Sa, tol)
    bb = frame_bounds(Sb, tol)
    A = ba.lower_A * bb.lower_A
    B = ba.upper_B * bb.upper_B
    residual = max(ba.residual, bb.residual)
    if Sa.size * Sb.size <= KRON_CHECK_LIMIT:
        direct = frame_bounds(kron_frame_operator(Sa, Sb), tol)
        gap = max(abs(direct.lower_A - A), abs(direct.upper_B - B)) / max(B, 1e-300)
        if gap > tol:
            raise ToleranceNotReached(
                f"Kronecker cross-check disagrees with factor bounds by {gap:.3e}",
                residual=gap)
        residual = max(residual, direct.residual, gap)
    return FrameBoundEstimate(A, B, ba.method, residual, (ts.shape, None))


def tensor_synthesis_apply(ts: TensorSystem, coeffs: TensorCoefficients) -> np.ndarray:
    """``K_A x K_B`` matrix with entries ``(sum_n a_n lambda_k^n w_k)(sum_m b_m gamma_l^m v_l)``."""
    Va = build_synthesis(ts.factor_a).entries
    Vb = build_synthesis(ts.factor_b).entries
    if coeffs.a.shape != (Va.shape[1],) or coeffs.b.shape != (Vb.shape[1],):
        raise DimensionMismatch(
            f"coefficient lengths {coeffs.a.shape}, {coeffs.b.shape} do not match "
            f"orders ({Va.shape[1]},), ({Vb.shape[1]},)")
    return np.outer(Va @ coeffs.a, Vb @ coeffs.b)


def kron_synthesis(ts: TensorSystem) -> np.ndarray:
    """Synthesis matrix of the tensor system, ``V_a kron V_b``."""
    return np.kron(build_synthesis(ts.factor_a).entries, build_synthesis(ts.factor_b).entries)


def tensor_vector_system(vs_a: VectorSystem, vs_b: VectorSystem) -> VectorSystem:
    """The family ``f_k kron g_k`` with operator ``T_a kron T_b``."""
    n = min(vs_a.count, vs_b.count)
    F = np.stack([np.kron(vs_a.vectors[k], vs_b.vectors[k]) for k in range(n)])
    T = None
    if vs_a.rep_operator is not None and vs_b.rep_operator is not None:
        T = np.kron(vs_a.rep_operator, vs_b.rep_operator)
    return VectorSystem(F, T)


@dataclass(frozen=True)
class TrendRow:
    K: int
    carleson_trunc: Optional[float]
    lower_A: float
    upper_B: float
    ratio_c_hat: Optional[float]
    ratio_satisfied: Optional[bool]
    collision: Optional[str] = None

    def cells(self) -> list:
        return [self.K, self.carleson_trunc, self.lower_A, self.upper_B, self.ratio_c_hat]


TREND_COLUMNS = ["K", "carleson_trunc", "lower_A", "upper_B", "ratio_c_hat"]


def _trend_row(seq_a: DiscSequence, seq_b: DiscSequence, K: int, tol: float) -> TrendRow:
    a, b = seq_a.truncate(K), seq_b.truncate(K)
    try:
        carleson, _ = tensor_carleson_infimum(a, b)
        collision = None
    except ProductCollision as exc:
        carleson, collision = None, str(exc)
    ts = TensorSystem(IteratedSystem(a, 0), IteratedSystem(b, 0))
    bounds = tensor_frame_bounds(ts, tol)
    try:
        rc = ratio_condition_constant(a, b)
        c_hat, sat = rc.c_hat, rc.satisfied
    except SequenceTooShort:
        c_hat, sat = None, None
    return TrendRow(K, carleson, bounds.lower_A, bounds.upper_B, c_hat, sat, collision)


def frame_trend_experiment(spec_a: SequenceSpec, spec_b: SequenceSpec, k_list: Sequence[int],
                           tol: float = 1e-10, max_workers: Optional[int] = None) -> list:
    """Carleson statistic, tensor frame bounds and ratio constant along truncations.

    For each ``K`` in ``k_list`` both factors are cut to their first ``K``
    points.  A row whose product points collide gets ``carleson_trunc =
    None`` and the collision message in ``collision``.  Rows come back
    sorted by ``K``; cells are independent and may run on a thread pool.
    """
    ks = sorted(int(k) for k in k_list)
    if not ks or ks[0] < 1:
        raise ValueError("k_list must contain positive integers")
    kmax = ks[-1]
    if spec_a.count < kmax or spec_b.count < kmax:
        raise SequenceTooShort(f"specs must generate at least {kmax} points")
    seq_a, seq_b = generate(spec_a), generate(spec_b)
    if max_workers and max_workers > 1:
        with ThreadPoolExecutor(max_workers) as pool:
            return list(pool.map(lambda K: _trend_row(seq_a, seq_b, K, tol), ks))
    return [_trend_row(seq_a, seq_b, K, tol) for K in ks]
