"""Assembly of the two discrete fractional Sturm-Liouville operators.

Both operators have the form ``L x = A (p * (A^T x)) + q x`` where ``A`` is a
left fractional difference and its transpose plays the right difference:

* ``Form.RL``: ``A`` is the Riemann-Liouville nabla left difference on
  ``{a+1, ..., b-1}``.
* ``Form.GL``: ``A`` is the Grunwald-Letnikov delta left difference on
  ``{0, ..., n}`` with step ``h``.

The weight ``r`` of the eigenproblem ``L x = lambda r x`` is kept separate and
never folded into the matrix.
"""

from __future__ import annotations

import enum
from collections.abc import Mapping, Sequence
from dataclasses import dataclass
from typing import Union

import numpy as np

from .errors import ValidationError
from .fracops import (
    Grid,
    OperatorMatrix,
    Side,
    delta_left_diff_matrix,
    nabla_left_diff_matrix,
)
from .kernels import FractionalOrder, Order, as_order

__all__ = [
    "Form",
    "Coefficients",
    "SLProblem",
    "sample_coefficients",
    "assemble_L1",
    "assemble_L2",
    "assemble",
    "weighted_inner",
]

CoefficientValue = Union[float, Sequence[float], np.ndarray]


class Form(enum.Enum):
    RL = "rl"
    GL = "gl"


def _frozen(x) -> np.ndarray:
    arr = np.array(x, dtype=np.float64)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True)
class Coefficients:
    """Grid samples of ``p > 0``, ``q`` and ``r > 0``."""

    p: np.ndarray
    q: np.ndarray
    r: np.ndarray

    def __post_init__(self) -> None:
        p, q, r = (_frozen(v) for v in (self.p, self.q, self.r))
        if not (p.ndim == q.ndim == r.ndim == 1 and p.size == q.size == r.size):
            raise ValidationError(
                f"p, q, r must be vectors of equal length, got {p.shape}, {q.shape}, {r.shape}")
        for name, v in (("p", p), ("q", q), ("r", r)):
            if not np.all(np.isfinite(v)):
                bad = np.flatnonzero(~np.isfinite(v)).tolist()
                raise ValidationError(f"{name} is not finite at indices {bad}")
        for name, v in (("p", p), ("r", r)):
            bad = np.flatnonzero(v <= 0.0)
            if bad.size:
                raise ValidationError(f"{name} must be positive; violated at indices {bad.tolist()}")
        object.__setattr__(self, "p", p)
        object.__setattr__(self, "q", q)
        object.__setattr__(self, "r", r)

    @property
    def size(self) -> int:
        return self.p.size


def _broadcast(name: str, value: CoefficientValue, n: int) -> np.ndarray:
    arr = np.asarray(value, dtype=np.float64)
    if arr.ndim == 0:
        return np.full(n, float(arr))
    if arr.ndim != 1 or arr.size != n:
        raise ValidationError(f"{name} has {arr.size} values but the grid has {n} points")
    return arr


def sample_coefficients(spec: Mapping[str, CoefficientValue], grid: Grid) -> Coefficients:
    """Build validated coefficients from constants or explicit value lists.

    *spec* maps ``"p"``, ``"q"`` and ``"r"`` to either a number (broadcast over
    the grid) or a sequence with exactly ``grid.size`` entries. Missing keys
    default to ``p = 1``, ``q = 0``, ``r = 1``.
    """
    unknown = set(spec) - {"p", "q", "r"}
    if unknown:
        raise ValidationError(f"unknown coefficient keys: {sorted(unknown)}")
    n = grid.size
    return Coefficients(
        _broadcast("p", spec.get("p", 1.0), n),
        _broadcast("q", spec.get("q", 0.0), n),
        _broadcast("r", spec.get("r", 1.0), n),
    )


@dataclass(frozen=True)
class SLProblem:
    """An assembled operator matrix with the data that produced it."""

    coeffs: Coefficients
    grid: Grid
    mu: FractionalOrder
    form: Form
    matrix: OperatorMatrix
    outer: OperatorMatrix

    @property
    def weight(self) -> np.ndarray:
        return self.coeffs.r

    @property
    def size(self) -> int:
        return self.grid.size


def _sandwich(A: np.ndarray, p: np.ndarray, q: np.ndarray) -> np.ndarray:
    K = (A * p) @ A.T
    # mirror the lower triangle so the result is symmetric bit for bit
    K = np.tril(K) + np.tril(K, -1).T
    K[np.diag_indices_from(K)] += q
    return K


def _assemble(coeffs: Coefficients, grid: Grid, order: FractionalOrder,
              form: Form, outer: OperatorMatrix) -> SLProblem:
    if coeffs.size != grid.size:
        raise ValidationError(
            f"coefficients sampled on {coeffs.size} points, grid has {grid.size}")
    M = _sandwich(outer.entries, coeffs.p, coeffs.q)
    tag = "L1" if form is Form.RL else "L2"
    matrix = OperatorMatrix(M, tag, order, grid, Side.Left)
    return SLProblem(coeffs, grid, order, form, matrix, outer)


def assemble_L1(coeffs: Coefficients, grid: Grid, mu: Order) -> SLProblem:
    """Riemann-Liouville operator ``A diag(p) A^T + diag(q)`` with ``A`` the nabla left difference."""
    order = as_order(mu)
    return _assemble(coeffs, grid, order, Form.RL, nabla_left_diff_matrix(grid, order))


def assemble_L2(coeffs: Coefficients, grid: Grid, mu: Order) -> SLProblem:
    """Grunwald-Letnikov operator ``G diag(p) G^T + diag(q)`` with ``G`` the delta left difference."""
    order = as_order(mu)
    return _assemble(coeffs, grid, order, Form.GL, delta_left_diff_matrix(grid, order))


def assemble(form: Form | str, coeffs: Coefficients, grid: Grid, mu: Order) -> SLProblem:
    form = Form(form)
    if form is Form.RL:
        return assemble_L1(coeffs, grid, mu)
    return assemble_L2(coeffs, grid, mu)


def weighted_inner(u, v, r) -> float:
    """Weighted inner product ``sum_i r[i] u[i] v[i]``."""
    u = np.asarray(u, dtype=np.float64)
    v = np.asarray(v, dtype=np.float64)
    r = np.asarray(r, dtype=np.float64)
    if not (u.shape == v.shape == r.shape) or u.ndim != 1:
        raise ValueError(f"length mismatch: u {u.shape}, v {v.shape}, r {r.shape}")
    return float(np.sum(r * u * v))
