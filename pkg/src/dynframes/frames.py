"""Iterated systems ``{T^n h}`` for diagonal ``T`` and their frame operators.

With ``T e_k = lambda_k e_k`` and ``h = sum_k w_k e_k``, where
``w_k = sqrt(1 - |lambda_k|^2)``, the orbit vectors have coordinates
``(T^n h)_k = w_k lambda_k^n``.  Truncating to ``K`` eigenvalues and
powers ``n = 0..N`` gives the ``K x (N+1)`` synthesis matrix ``V``; the
frame operator is ``S = V V^*``.  Letting ``N -> oo`` sums a geometric
series entrywise::

    S_jk = w_j w_k / (1 - lambda_j conj(lambda_k))

which is also the Gram matrix of the normalized Szego kernels.  Frame
bounds are the extreme eigenvalues of ``S``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Union

import numpy as np

from .disc import DiscSequence
from .errors import (DimensionMismatch, InsufficientVectors, InvalidParameter,
                     MissingBase, MissingOperator, NotAFrame, ToleranceNotReached)
from .linalg import conjugate_gradient, inverse_iteration, power_iteration

#: Smallest lower frame bound accepted by :func:`reconstruct`.
A_FLOOR = 1e-10
#: Largest size handled by a dense eigendecomposition in :func:`frame_bounds`.
DENSE_LIMIT = 512
TOL_REP = 1e-10
TOL_PSD = 1e-10


@dataclass(frozen=True, eq=False)
class IteratedSystem:
    eigenvalues: DiscSequence
    order: int

    def __post_init__(self):
        if len(self.eigenvalues) < 1:
            raise InvalidParameter("an iterated system needs at least one eigenvalue")
        if self.order < 0:
            raise InvalidParameter(f"iteration order must be >= 0, got {self.order}")

    @property
    def K(self) -> int:
        return len(self.eigenvalues)

    @property
    def weights(self) -> np.ndarray:
        return self.eigenvalues.weights


@dataclass(frozen=True, eq=False)
class SynthesisMatrix:
    entries: np.ndarray
    system: IteratedSystem


@dataclass(frozen=True, eq=False)
class FrameOperatorMatrix:
    """Hermitian positive semidefinite frame operator (or Gram) matrix.

    ``provenance`` is one of ``"truncated"``, ``"closed_form"``,
    ``"gram"`` or ``"kronecker"``; ``order`` is the iteration order
    ``N`` for truncated operators and ``None`` otherwise.
    """

    entries: np.ndarray
    provenance: str
    order: Optional[int] = None

    def __post_init__(self):
        S = np.asarray(self.entries, dtype=complex)
        if S.ndim != 2 or S.shape[0] != S.shape[1]:
            raise DimensionMismatch(f"frame operator must be square, got shape {S.shape}")
        scale = max(np.abs(S).max(initial=0.0), 1.0)
        if not np.allclose(S, S.conj().T, rtol=0.0, atol=1e-12 * scale):
            raise ValueError("frame operator matrix is not Hermitian")
        object.__setattr__(self, "entries", S)

    @property
    def size(self) -> int:
        return self.entries.shape[0]

    def is_psd(self, tol: float = TOL_PSD) -> bool:
        ev = np.linalg.eigvalsh(self.entries)
        return bool(ev[0] >= -tol * max(abs(ev[-1]), 1e-300))


@dataclass(frozen=True)
class FrameBoundEstimate:
    lower_A: float
    upper_B: float
    method: str
    residual: float
    truncation: tuple

    @property
    def condition(self) -> float:
        return self.upper_B / self.lower_A if self.lower_A > 0 else math.inf


def iterated_system(eigenvalues: DiscSequence, order: int) -> IteratedSystem:
    return IteratedSystem(eigenvalues, int(order))


def build_synthesis(system: IteratedSystem) -> SynthesisMatrix:
    lam = system.eigenvalues.points
    n = np.arange(system.order + 1)
    # numpy gives 0**0 == 1, matching T^0 h = h
    V = system.weights[:, None] * np.power(lam[:, None], n[None, :])
    return SynthesisMatrix(V, system)


def frame_operator_truncated(synth: SynthesisMatrix) -> FrameOperatorMatrix:
    V = synth.entries
    return FrameOperatorMatrix(V @ V.conj().T, "truncated", synth.system.order)


def closed_form_gram(seq: DiscSequence) -> np.ndarray:
    lam = seq.points
    w = seq.weights
    S = np.outer(w, w) / (1.0 - np.outer(lam, lam.conj()))
    # w_j^2 / (1 - |lambda_j|^2) is 1; avoid the cancellation in 1 - lambda conj(lambda)
    np.fill_diagonal(S, 1.0)
    return S


def frame_operator_closed_form(system: Union[IteratedSystem, DiscSequence]) -> FrameOperatorMatrix:
    seq = system.eigenvalues if isinstance(system, IteratedSystem) else system
    return FrameOperatorMatrix(closed_form_gram(seq), "closed_form")


def truncation_tail_bound(seq: DiscSequence, order: int) -> float:
    """Entrywise bound on ``|S_N - S_oo|``: ``max_j w_j^2 r^(2(N+1)) / (1 - r^2)``."""
    r = seq.max_modulus
    if r == 0.0:
        return 0.0
    w2 = float(np.max(seq.weights) ** 2)
    return w2 * r ** (2 * (order + 1)) / ((1.0 - r) * (1.0 + r))


def select_order(seq: DiscSequence, tol: float) -> int:
    """Smallest ``N`` with ``K r^(2(N+1)) / (1 - r^2) <= tol``, ``r = max |lambda_k|``."""
    if tol <= 0:
        raise InvalidParameter("tol must be positive")
    r = seq.max_modulus
    if r == 0.0:
        return 0
    K = len(seq)
    one_minus_r2 = (1.0 - r) * (1.0 + r)

    def ok(N):
        return K * r ** (2 * (N + 1)) / one_minus_r2 <= tol

    N = max(0, math.ceil(math.log(tol * one_minus_r2 / K) / (2.0 * math.log(r))) - 1)
    while N > 0 and ok(N - 1):
        N -= 1
    while not ok(N):
        N += 1
    return N


def frame_bounds(S: FrameOperatorMatrix, tol: float = 1e-10, method: str = "auto",
                 max_iter: int = 100_000) -> FrameBoundEstimate:
    """Lower and upper frame bounds as the extreme eigenvalues of ``S``.

    ``method="auto"`` uses a dense Hermitian eigensolver up to
    ``DENSE_LIMIT`` rows and otherwise power iteration for the top and
    CG-driven inverse iteration for the bottom of the spectrum.  Either
    way both eigenpairs are certified by ``||S v - theta v|| <= tol ||S||``
    and the worst relative residual is reported.
    """
    if tol <= 0:
        raise InvalidParameter("tol must be positive")
    if method == "auto":
        method = "dense_eig" if S.size <= DENSE_LIMIT else "power_iteration"
    M = S.entries
    trunc = (S.size, S.order)
    if method == "dense_eig":
        ev, vec = np.linalg.eigh(M)
        B = float(ev[-1])
        scale = max(abs(B), abs(float(ev[0])), 1e-300)
        res = max(np.linalg.norm(M @ vec[:, i] - ev[i] * vec[:, i]) for i in (0, -1)) / scale
        A = float(ev[0])
    elif method == "power_iteration":
        top = power_iteration(M, S.size, tol, scale=None, max_iter=max_iter)
        B = top.value
        scale = max(B, 1e-300)
        bottom = inverse_iteration(M, S.size, tol, scale=scale, max_iter=max_iter)
        A = bottom.value
        res = max(top.residual, bottom.residual) / scale
    else:
        raise InvalidParameter(f"unknown method {method!r}")
    if res > tol:
        raise ToleranceNotReached(
            f"eigen-residual {res:.3e} exceeds tolerance {tol:.3e}", residual=res)
    # rounding can push the bottom of a PSD spectrum a hair below zero
    A = max(A, 0.0)
    return FrameBoundEstimate(A, max(B, A), method, float(res), trunc)


def analyze(system: IteratedSystem, x) -> np.ndarray:
    """Analysis coefficients ``<x, T^n h>`` for ``n = 0..N``."""
    x = np.asarray(x, dtype=complex)
    if x.shape != (system.K,):
        raise DimensionMismatch(f"signal has shape {x.shape}, expected ({system.K},)")
    V = build_synthesis(system).entries
    return V.conj().T @ x


def synthesize(system: IteratedSystem, coeffs) -> np.ndarray:
    """``sum_n c_n T^n h``."""
    c = np.asarray(coeffs, dtype=complex)
    if c.shape != (system.order + 1,):
        raise DimensionMismatch(
            f"coefficients have shape {c.shape}, expected ({system.order + 1},)")
    return build_synthesis(system).entries @ c


def reconstruct(system: IteratedSystem, coeffs, tol: float = 1e-12,
                a_floor: float = A_FLOOR) -> tuple[np.ndarray, int]:
    """Recover ``x`` from coefficients by solving ``S x = V c`` with CG.

    ``S`` is the closed-form frame operator.  Returns ``(x_hat, iterations)``.

    Raises
    ------
    NotAFrame
        If the lower frame bound of ``S`` is below ``a_floor``.
    ToleranceNotReached
        If CG cannot reach relative residual ``tol``.
    """
    rhs = synthesize(system, coeffs)
    S = frame_operator_closed_form(system)
    bounds = frame_bounds(S)
    if bounds.lower_A < a_floor:
        raise NotAFrame(
            f"lower frame bound {bounds.lower_A:.3e} is below the floor {a_floor:.1e}")
    sol = conjugate_gradient(S.entries, rhs, tol=tol)
    return sol.x, sol.iterations


# -- explicit vector families ------------------------------------------------


@dataclass(frozen=True, eq=False)
class VectorSystem:
    """Finite family ``f_0, f_1, ...`` (rows of ``vectors``) with an optional
    operator ``T`` meant to satisfy ``T f_k = f_(k+1)``."""

    vectors: np.ndarray
    rep_operator: Optional[np.ndarray] = None

    def __post_init__(self):
        F = np.atleast_2d(np.asarray(self.vectors, dtype=complex))
        object.__setattr__(self, "vectors", F)
        if self.rep_operator is not None:
            T = np.asarray(self.rep_operator, dtype=complex)
            if T.shape != (self.dim, self.dim):
                raise DimensionMismatch(
                    f"operator shape {T.shape} does not match vector dimension {self.dim}")
            object.__setattr__(self, "rep_operator", T)

    @property
    def count(self) -> int:
        return self.vectors.shape[0]

    @property
    def dim(self) -> int:
        return self.vectors.shape[1]

    def is_represented(self, tol: float = TOL_REP) -> bool:
        return self.rep_operator is not None and representation_residual(self) <= tol


def representation_residual(vs: VectorSystem) -> float:
    """``max_k ||T f_k - f_(k+1)|| / max(||f_(k+1)||, 1)``."""
    if vs.rep_operator is None:
        raise MissingOperator("vector system carries no representation operator")
    if vs.count < 2:
        raise InsufficientVectors("need at least two vectors")
    F = vs.vectors
    shifted = F[:-1] @ vs.rep_operator.T
    err = np.linalg.norm(shifted - F[1:], axis=1)
    scale = np.maximum(np.linalg.norm(F[1:], axis=1), 1.0)
    return float(np.max(err / scale))


def gram_matrix(vs: VectorSystem) -> FrameOperatorMatrix:
    F = vs.vectors
    return FrameOperatorMatrix(F.conj() @ F.T, "gram")


def shift_ratios(vs: VectorSystem, trials: int, max_len: int, seed: int) -> np.ndarray:
    """Ratios ``||V(shift c)|| / ||V c||`` for random finite sequences ``c``.

    ``V c = sum_k c_k f_k`` and the right shift sends ``(c_0, c_1, ...)`` to
    ``(0, c_0, c_1, ...)``, so ``V(shift c) = sum_k c_k f_(k+1)``.  Lengths
    are uniform on ``[1, max_len]`` and entries uniform on the complex unit
    square, drawn from a Philox stream keyed by ``seed``.
    """
    if trials < 1:
        raise InvalidParameter("trials must be positive")
    if max_len < 1 or vs.count < max_len + 1:
        raise InsufficientVectors(
            f"need at least max_len + 1 = {max_len + 1} vectors, have {vs.count}")
    rng = np.random.Generator(np.random.Philox(seed))
    F = vs.vectors
    out = np.empty(trials)
    for t in range(trials):
        L = int(rng.integers(1, max_len + 1))
        c = rng.random(L) + 1j * rng.random(L)
        num = np.linalg.norm(c @ F[1:L + 1])
        den = np.linalg.norm(c @ F[:L])
        out[t] = num / den if den > 0 else math.inf
    return out


def shift_domination_constant(vs: VectorSystem, trials: int, max_len: int, seed: int) -> float:
    """Empirical lower estimate of the smallest ``K`` with ``||V(shift c)|| <= K ||V c||``."""
    return float(np.max(shift_ratios(vs, trials, max_len, seed)))


def _orbit_system(system: IteratedSystem, size: int) -> VectorSystem:
    lam = system.eigenvalues.points
    n = np.arange(size)
    F = (system.weights[:, None] * np.power(lam[:, None], n[None, :])).T
    return VectorSystem(F, np.diag(lam))


def scale_system(vs: VectorSystem, factor: float = 2.0) -> VectorSystem:
    """Family ``factor^k f_k`` with operator ``factor * T``."""
    weights = factor ** np.arange(vs.count)
    T = None if vs.rep_operator is None else factor * vs.rep_operator
    return VectorSystem(weights[:, None] * vs.vectors, T)


def generate_fixture(kind: str, size: int,
                     base: Union[IteratedSystem, VectorSystem, None] = None) -> VectorSystem:
    """Ready-made vector families.

    ``overlap_basis``
        ``f_k = e_k + e_(k+1)`` in dimension ``size + 1`` with the forward
        shift as operator.  A Bessel sequence whose lower bound decays to 0.
    ``from_iterated``
        The orbit ``T^n h``, ``n = 0..size-1``, of an iterated system with
        ``T = diag(lambda)``.
    ``scaled_frame``
        ``2^n f_n`` for the orbit of ``base`` (or for ``base`` itself when it
        is a VectorSystem), represented by ``2 T``.
    """
    if size < 2:
        raise InvalidParameter("fixtures need size >= 2")
    if kind == "overlap_basis":
        F = np.zeros((size, size + 1))
        idx = np.arange(size)
        F[idx, idx] = 1.0
        F[idx, idx + 1] = 1.0
        T = np.eye(size + 1, k=-1)
        return VectorSystem(F, T)
    if kind not in ("from_iterated", "scaled_frame"):
        raise InvalidParameter(f"unknown fixture kind {kind!r}")
    if base is None:
        raise MissingBase(f"fixture {kind!r} needs a base system")
    if kind == "from_iterated":
        if not isinstance(base, IteratedSystem):
            raise MissingBase("from_iterated needs an IteratedSystem base")
        return _orbit_system(base, size)
    vs = _orbit_system(base, size) if isinstance(base, IteratedSystem) else base
    return scale_system(vs, 2.0)
