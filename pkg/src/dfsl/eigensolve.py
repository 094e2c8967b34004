"""Symmetric and weighted symmetric eigensolvers.

``jacobi_eigen`` is a cyclic-by-row Jacobi method. ``generalized_symmetric_eigen``
reduces ``M x = lambda diag(r) x`` to the standard problem for
``S = D^{-1/2} M D^{-1/2}`` and maps the eigenvectors back, normalized in the
``r``-weighted inner product.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Any, Callable

import numpy as np

from .errors import ConvergenceError, ValidationError

try:
    from numba import njit
except ImportError:  # pragma: no cover
    def njit(*args, **kwargs):
        if args and callable(args[0]):
            return args[0]
        return lambda f: f

__all__ = [
    "EigenDecomposition",
    "jacobi_eigen",
    "congruence",
    "generalized_symmetric_eigen",
    "residual_check",
    "CLUSTER_RTOL",
]

JACOBI_RTOL = 1.0e-13
MAX_SWEEPS = 100
SYMMETRY_RTOL = 1.0e-12
CLUSTER_RTOL = 1.0e-8
SIGN_ATOL = 1.0e-12


@njit(cache=True)
def _jacobi_sweep(a, v):  # pragma: no cover - compiled
    n = a.shape[0]
    for p in range(n - 1):
        for q in range(p + 1, n):
            apq = a[p, q]
            if apq == 0.0:
                continue
            theta = (a[q, q] - a[p, p]) / (2.0 * apq)
            if abs(theta) > 1.0e150:
                t = 0.5 / theta
            else:
                t = 1.0 / (abs(theta) + math.sqrt(theta * theta + 1.0))
                if theta < 0.0:
                    t = -t
            c = 1.0 / math.sqrt(t * t + 1.0)
            s = t * c

            a[p, p] -= t * apq
            a[q, q] += t * apq
            a[p, q] = 0.0
            a[q, p] = 0.0
            for k in range(n):
                if k == p or k == q:
                    continue
                akp = a[k, p]
                akq = a[k, q]
                a[k, p] = c * akp - s * akq
                a[p, k] = a[k, p]
                a[k, q] = s * akp + c * akq
                a[q, k] = a[k, q]
            for k in range(n):
                vkp = v[k, p]
                vkq = v[k, q]
                v[k, p] = c * vkp - s * vkq
                v[k, q] = s * vkp + c * vkq


def _off_norm(a: np.ndarray) -> float:
    off = a - np.diag(np.diag(a))
    return float(np.sqrt(np.sum(off * off)))


def _norm_inf(a: np.ndarray) -> float:
    if a.size == 0:
        return 0.0
    return float(np.abs(a).sum(axis=1).max())


def jacobi_eigen(
    S,
    *,
    tol: float = JACOBI_RTOL,
    max_sweeps: int = MAX_SWEEPS,
    callback: Callable[[int, np.ndarray], None] | None = None,
) -> tuple[np.ndarray, np.ndarray]:
    """Eigenvalues (ascending) and orthonormal eigenvectors of a symmetric matrix.

    Sweeps over the strict upper triangle row by row, annihilating each entry
    with a plane rotation, until the off-diagonal Frobenius norm is at most
    ``tol * ||S||_F``.

    :arg callback: called as ``callback(sweep, A)`` after every sweep with the
        current rotated matrix (read it, do not modify it).
    :raises ValueError: if *S* is not square or not symmetric to
        ``1e-12 ||S||_inf``.
    :raises ConvergenceError: if *max_sweeps* sweeps do not suffice.
    """
    S = np.asarray(S, dtype=np.float64)
    if S.ndim != 2 or S.shape[0] != S.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {S.shape}")
    if not np.all(np.isfinite(S)):
        raise ValueError("matrix has non-finite entries")
    asym = float(np.abs(S - S.T).max()) if S.size else 0.0
    if asym > SYMMETRY_RTOL * _norm_inf(S):
        raise ValueError(f"matrix is not symmetric: max |S - S^T| = {asym:.3e}")

    n = S.shape[0]
    a = np.array(0.5 * (S + S.T), order="C")
    v = np.eye(n)
    target = tol * float(np.sqrt(np.sum(a * a)))

    sweep = 0
    off = _off_norm(a)
    while off > target:
        if sweep >= max_sweeps:
            raise ConvergenceError(
                f"Jacobi did not converge in {max_sweeps} sweeps "
                f"(off-diagonal norm {off:.3e} > {target:.3e})",
                off_norm=off, sweeps=sweep)
        _jacobi_sweep(a, v)
        sweep += 1
        if callback is not None:
            callback(sweep, a)
        off = _off_norm(a)

    values = np.diag(a).copy()
    order = np.argsort(values, kind="stable")
    return values[order], v[:, order]


@dataclass(frozen=True)
class EigenDecomposition:
    """Real eigenvalues (ascending) with ``r``-orthonormal column eigenvectors."""

    values: np.ndarray
    vectors: np.ndarray
    residuals: np.ndarray
    meta: dict[str, Any] = field(default_factory=dict)

    def __len__(self) -> int:
        return self.values.size


def congruence(M, r) -> np.ndarray:
    """``D^{-1/2} M D^{-1/2}`` with ``D = diag(r)``."""
    M = np.asarray(M, dtype=np.float64)
    d = 1.0 / np.sqrt(np.asarray(r, dtype=np.float64))
    return M * np.outer(d, d)


def _r_orthonormalize(X: np.ndarray, r: np.ndarray, cols: list[int]) -> None:
    """Modified Gram-Schmidt on columns *cols* of *X* in the ``r`` inner product, in place."""
    for jj, j in enumerate(cols):
        for i in cols[:jj]:
            X[:, j] -= np.sum(r * X[:, i] * X[:, j]) * X[:, i]
        X[:, j] /= math.sqrt(np.sum(r * X[:, j] * X[:, j]))


def _clusters(values: np.ndarray, gap: float) -> list[list[int]]:
    groups: list[list[int]] = []
    for k in range(values.size):
        if groups and values[k] - values[groups[-1][-1]] <= gap:
            groups[-1].append(k)
        else:
            groups.append([k])
    return groups


def _fix_signs(X: np.ndarray) -> None:
    for k in range(X.shape[1]):
        big = np.flatnonzero(np.abs(X[:, k]) > SIGN_ATOL)
        if big.size and X[big[0], k] < 0.0:
            X[:, k] = -X[:, k]


def _pair_residuals(M: np.ndarray, r: np.ndarray, values: np.ndarray,
                    vectors: np.ndarray) -> np.ndarray:
    R = M @ vectors - (r[:, None] * vectors) * values[None, :]
    if R.size == 0:
        return np.zeros(values.size)
    return np.abs(R).max(axis=0)


def generalized_symmetric_eigen(M, r, **kwargs) -> EigenDecomposition:
    """Solve ``M x = lambda diag(r) x`` for symmetric *M* and positive *r*.

    Eigenvectors are normalized so that ``sum_i r[i] x[i]^2 = 1``. Vectors
    belonging to eigenvalues closer than ``1e-8 ||M||_inf`` are explicitly
    re-orthogonalized in the ``r`` inner product. Each vector is signed so that
    its first entry larger than ``1e-12`` in magnitude is positive.

    Extra keyword arguments are passed on to :func:`jacobi_eigen`.
    """
    M = np.asarray(M, dtype=np.float64)
    r = np.asarray(r, dtype=np.float64)
    if M.ndim != 2 or M.shape[0] != M.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {M.shape}")
    if r.shape != (M.shape[0],):
        raise ValueError(f"weight has shape {r.shape}, matrix has shape {M.shape}")
    bad = np.flatnonzero(~(r > 0.0))
    if bad.size:
        raise ValidationError(f"weight r must be positive; violated at indices {bad.tolist()}")

    sweeps = []
    user_callback = kwargs.pop("callback", None)

    def count(sweep, a):
        sweeps.append(sweep)
        if user_callback is not None:
            user_callback(sweep, a)

    S = congruence(M, r)
    values, V = jacobi_eigen(S, callback=count, **kwargs)

    X = V / np.sqrt(r)[:, None]
    norm_M = _norm_inf(M)
    for group in _clusters(values, CLUSTER_RTOL * norm_M):
        if len(group) > 1:
            _r_orthonormalize(X, r, group)
        else:
            k = group[0]
            X[:, k] /= math.sqrt(np.sum(r * X[:, k] * X[:, k]))
    _fix_signs(X)

    residuals = _pair_residuals(M, r, values, X)
    meta = {"sweeps": len(sweeps), "norm_inf": norm_M, "size": M.shape[0]}
    values.setflags(write=False)
    X.setflags(write=False)
    residuals.setflags(write=False)
    return EigenDecomposition(values, X, residuals, meta)


def residual_check(problem, decomp: EigenDecomposition, r=None) -> float:
    """Largest scaled eigenpair defect ``max_k ||M x_k - lambda_k D x_k||_inf / ||M||_inf``.

    *problem* is an assembled problem (anything with ``matrix`` and ``weight``)
    or a bare matrix, in which case *r* defaults to ones.
    """
    if hasattr(problem, "matrix"):
        M = problem.matrix.entries
        weight = problem.weight if r is None else r
    else:
        M = np.asarray(problem, dtype=np.float64)
        weight = np.ones(M.shape[0]) if r is None else r
    weight = np.asarray(weight, dtype=np.float64)
    values = np.asarray(decomp.values, dtype=np.float64)
    vectors = np.asarray(decomp.vectors, dtype=np.float64)
    n = M.shape[0]
    if weight.shape != (n,) or vectors.shape != (n, values.size):
        raise ValueError(
            f"dimension mismatch: matrix {M.shape}, weight {weight.shape}, "
            f"vectors {vectors.shape}, values {values.shape}")
    if values.size == 0:
        return 0.0
    scale = _norm_inf(M) or 1.0
    return float(_pair_residuals(M, weight, values, vectors).max() / scale)
