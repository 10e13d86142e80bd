"""Iterative Hermitian solvers and extremal-eigenvalue estimators.

All routines accept either a dense matrix or a callable ``x -> A @ x``.
They are deterministic: starting vectors come from a seeded generator.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional, Union

import numpy as np

from .errors import ToleranceNotReached

Operator = Union[np.ndarray, Callable[[np.ndarray], np.ndarray]]


def _as_matvec(A: Operator) -> Callable[[np.ndarray], np.ndarray]:
    if callable(A):
        return A
    A = np.asarray(A)
    return lambda x: A @ x


@dataclass
class CGResult:
    x: np.ndarray
    iterations: int
    residual: float


def conjugate_gradient(A: Operator, b, tol: float = 1e-12, x0=None,
                       max_iter: Optional[int] = None) -> CGResult:
    """Solve ``A x = b`` for Hermitian positive definite ``A``.

    Stops once ``||b - A x|| <= tol * ||b||``.  The recursively updated
    residual drifts from the true one in floating point, so convergence
    is confirmed against a freshly computed residual and the iteration
    restarted from the current iterate if the two disagree.

    Raises
    ------
    ToleranceNotReached
        After ``max_iter`` iterations (default ``20 * n + 100``).
    """
    matvec = _as_matvec(A)
    b = np.asarray(b, dtype=complex)
    n = b.shape[0]
    if max_iter is None:
        max_iter = 20 * n + 100
    bnorm = np.linalg.norm(b)
    if bnorm == 0.0:
        return CGResult(np.zeros_like(b), 0, 0.0)
    x = np.zeros_like(b) if x0 is None else np.array(x0, dtype=complex)
    target = tol * bnorm

    r = b - matvec(x)
    p = r.copy()
    rr = np.vdot(r, r).real
    it = 0
    while True:
        if np.sqrt(rr) <= target:
            r = b - matvec(x)
            rr = np.vdot(r, r).real
            if np.sqrt(rr) <= target:
                return CGResult(x, it, float(np.sqrt(rr) / bnorm))
            p = r.copy()
        if it >= max_iter:
            raise ToleranceNotReached(
                f"conjugate gradient stalled at relative residual {np.sqrt(rr) / bnorm:.3e} "
                f"after {it} iterations", iterations=it, residual=float(np.sqrt(rr) / bnorm))
        Ap = matvec(p)
        pAp = np.vdot(p, Ap).real
        if pAp <= 0.0:
            raise ToleranceNotReached(
                "operator is not positive definite along a search direction",
                iterations=it, residual=float(np.sqrt(rr) / bnorm))
        alpha = rr / pAp
        x = x + alpha * p
        r = r - alpha * Ap
        rr_new = np.vdot(r, r).real
        p = r + (rr_new / rr) * p
        rr = rr_new
        it += 1


@dataclass
class EigenEstimate:
    value: float
    vector: np.ndarray
    iterations: int
    residual: float


def _start_vector(n, seed):
    rng = np.random.Generator(np.random.Philox(seed))
    v = rng.standard_normal(n) + 1j * rng.standard_normal(n)
    return v / np.linalg.norm(v)


def power_iteration(A: Operator, n: int, tol: float, scale: Optional[float] = None,
                    max_iter: int = 100_000, seed: int = 0) -> EigenEstimate:
    """Largest eigenvalue of a Hermitian positive semidefinite operator.

    Iterates until the eigen-residual ``||A v - theta v||`` drops to
    ``tol * scale``.  Without ``scale`` the running estimate ``theta``
    (which tends to ``||A||``) is used.
    """
    matvec = _as_matvec(A)
    v = _start_vector(n, seed)
    Av = matvec(v)
    for it in range(1, max_iter + 1):
        theta = np.vdot(v, Av).real
        res = np.linalg.norm(Av - theta * v)
        if res <= tol * (abs(theta) if scale is None else scale):
            return EigenEstimate(float(theta), v, it, float(res))
        nrm = np.linalg.norm(Av)
        if nrm == 0.0:
            return EigenEstimate(0.0, v, it, 0.0)
        v = Av / nrm
        Av = matvec(v)
    raise ToleranceNotReached(
        f"power iteration residual {res:.3e} not below tolerance after {max_iter} steps",
        iterations=max_iter, residual=float(res))


def inverse_iteration(A: Operator, n: int, tol: float, scale: float = 1.0,
                      max_iter: int = 10_000, seed: int = 1) -> EigenEstimate:
    """Smallest eigenvalue of a Hermitian positive definite operator.

    Each step solves ``A y = v`` with :func:`conjugate_gradient`.
    """
    matvec = _as_matvec(A)
    v = _start_vector(n, seed)
    for it in range(1, max_iter + 1):
        Av = matvec(v)
        theta = np.vdot(v, Av).real
        res = np.linalg.norm(Av - theta * v)
        if res <= tol * scale:
            return EigenEstimate(float(theta), v, it, float(res))
        y = conjugate_gradient(matvec, v, tol=1e-10).x
        v = y / np.linalg.norm(y)
    raise ToleranceNotReached(
        f"inverse iteration residual {res:.3e} above {tol * scale:.3e} after {max_iter} steps",
        iterations=max_iter, residual=float(res))
