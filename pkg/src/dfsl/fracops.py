"""Fractional sums and differences as triangular Toeplitz matrices.

Left-sided operators are lower triangular. The right-sided operators are built
as exact transposes of their left counterparts, which is the only choice that
makes the summation-by-parts identities

    sum_s u(s) (L v)(s) = sum_s v(s) (R u)(s)

hold for every pair of grid functions. Grid functions are zero-extended
outside the grid.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Any

import numpy as np

from .errors import ValidationError
from .kernels import (
    FractionalOrder,
    Order,
    ToeplitzKernel,
    as_order,
    gl_weights,
    rl_diff_kernel,
    rl_sum_kernel,
)

__all__ = [
    "Grid",
    "Side",
    "OperatorMatrix",
    "toeplitz_lower",
    "nabla_left_sum_matrix",
    "nabla_left_diff_matrix",
    "nabla_right_diff_matrix",
    "delta_left_diff_matrix",
    "delta_right_diff_matrix",
    "apply_operator",
    "sbp_residual",
]


@dataclass(frozen=True)
class Grid:
    """Uniform lattice ``{start, start + 1, ..., end}`` with physical step *h*.

    Use :meth:`nabla` for the Riemann-Liouville interior ``{a+1, ..., b-1}``
    and :meth:`delta` for the Grunwald-Letnikov grid ``{0, ..., n}``.
    """

    start: int
    end: int
    h: float = 1.0

    def __post_init__(self) -> None:
        if int(self.start) != self.start or int(self.end) != self.end:
            raise ValidationError("grid endpoints must be integers")
        if self.end < self.start:
            raise ValidationError(
                f"empty grid: end={self.end} < start={self.start}")
        h = float(self.h)
        if not (math.isfinite(h) and h > 0.0):
            raise ValidationError(f"grid step must be positive, got {self.h!r}")
        object.__setattr__(self, "start", int(self.start))
        object.__setattr__(self, "end", int(self.end))
        object.__setattr__(self, "h", h)

    @classmethod
    def nabla(cls, a: int, b: int) -> Grid:
        """Active set ``{a+1, ..., b-1}`` of the nabla operators (unit step)."""
        if b - a - 1 < 1:
            raise ValidationError(f"need b - a >= 2 for a nonempty interior, got a={a}, b={b}")
        return cls(a + 1, b - 1, 1.0)

    @classmethod
    def delta(cls, n: int, h: float = 1.0) -> Grid:
        """Grid ``{0, ..., n}`` of the delta operators."""
        if n < 0:
            raise ValidationError(f"need n >= 0, got {n}")
        return cls(0, n, h)

    @property
    def size(self) -> int:
        return self.end - self.start + 1

    @property
    def points(self) -> np.ndarray:
        return np.arange(self.start, self.end + 1)

    def to_dict(self) -> dict[str, Any]:
        return {"start": self.start, "end": self.end, "h": self.h}


class Side(enum.Enum):
    Left = "left"
    Right = "right"


@dataclass(frozen=True)
class OperatorMatrix:
    """Dense operator matrix together with where it came from."""

    entries: np.ndarray
    source: str
    mu: FractionalOrder
    grid: Grid
    side: Side
    kernel: ToeplitzKernel | None = field(default=None, compare=False)
    scale: float = 1.0

    def __post_init__(self) -> None:
        entries = np.array(self.entries, dtype=np.float64)
        if entries.ndim != 2 or entries.shape[0] != entries.shape[1]:
            raise ValidationError(f"operator matrix must be square, got shape {entries.shape}")
        entries.setflags(write=False)
        object.__setattr__(self, "entries", entries)

    @property
    def shape(self) -> tuple[int, int]:
        return self.entries.shape

    def __matmul__(self, x):
        return self.entries @ x

    @property
    def T(self) -> np.ndarray:
        return self.entries.T

    def transpose(self, source: str | None = None) -> OperatorMatrix:
        side = Side.Right if self.side is Side.Left else Side.Left
        return OperatorMatrix(
            np.ascontiguousarray(self.entries.T),
            source if source is not None else f"transpose({self.source})",
            self.mu, self.grid, side, self.kernel, self.scale)

    def norm_inf(self) -> float:
        return float(np.abs(self.entries).sum(axis=1).max())


def toeplitz_lower(coeffs: np.ndarray, n: int, scale: float = 1.0) -> np.ndarray:
    """Lower-triangular Toeplitz ``M[i, j] = scale * coeffs[i - j]`` for ``j <= i``."""
    coeffs = np.asarray(coeffs, dtype=np.float64)
    if coeffs.size < n:
        raise ValidationError(f"kernel of length {coeffs.size} too short for size {n}")
    col = coeffs[:n] * scale
    i, j = np.indices((n, n))
    return np.where(i >= j, col[np.abs(i - j)], 0.0)


def _require_unit_step(grid: Grid) -> None:
    if grid.h != 1.0:
        raise ValidationError(f"nabla operators are defined on a unit lattice, got h={grid.h}")


def nabla_left_sum_matrix(grid: Grid, mu: Order) -> OperatorMatrix:
    """Nabla left fractional sum of order *mu*: a weighted cumulative sum."""
    _require_unit_step(grid)
    order = as_order(mu)
    kernel = rl_sum_kernel(order, grid.size - 1)
    return OperatorMatrix(toeplitz_lower(kernel.coeffs, grid.size),
                          "nabla_left_sum", order, grid, Side.Left, kernel)


def nabla_left_diff_matrix(grid: Grid, mu: Order) -> OperatorMatrix:
    """Riemann-Liouville nabla left fractional difference of order *mu*."""
    _require_unit_step(grid)
    order = as_order(mu)
    kernel = rl_diff_kernel(order, grid.size - 1)
    return OperatorMatrix(toeplitz_lower(kernel.coeffs, grid.size),
                          "nabla_left_diff", order, grid, Side.Left, kernel)


def nabla_right_diff_matrix(grid: Grid, mu: Order) -> OperatorMatrix:
    """Riemann-Liouville nabla right fractional difference, the transpose of the left one."""
    return nabla_left_diff_matrix(grid, mu).transpose("nabla_right_diff")


def delta_left_diff_matrix(grid: Grid, mu: Order) -> OperatorMatrix:
    """Grunwald-Letnikov delta left difference, ``h^-mu sum_s w[s] x(t - s)``."""
    order = as_order(mu)
    kernel = gl_weights(order, grid.size - 1)
    scale = grid.h ** (-order.mu)
    return OperatorMatrix(toeplitz_lower(kernel.coeffs, grid.size, scale),
                          "delta_left_diff", order, grid, Side.Left, kernel, scale)


def delta_right_diff_matrix(grid: Grid, mu: Order) -> OperatorMatrix:
    """Grunwald-Letnikov delta right difference, ``h^-mu sum_s w[s] x(t + s)``."""
    return delta_left_diff_matrix(grid, mu).transpose("delta_right_diff")


def apply_operator(kernel: ToeplitzKernel | np.ndarray, scale: float, x) -> np.ndarray:
    """Matrix-free lower-triangular Toeplitz product.

    Returns ``y[i] = scale * sum_{k <= i} kernel[k] x[i - k]``, i.e. the
    convolution of *kernel* with the zero-extended *x*, truncated to ``len(x)``.
    A kernel shorter than *x* is treated as zero beyond its last entry.
    """
    coeffs = kernel.coeffs if isinstance(kernel, ToeplitzKernel) else np.asarray(kernel, dtype=np.float64)
    x = np.asarray(x, dtype=np.float64)
    if x.ndim != 1:
        raise ValueError(f"expected a vector, got shape {x.shape}")
    if coeffs.ndim != 1 or coeffs.size == 0:
        raise ValueError("kernel must be a nonempty sequence")
    n = x.size
    if n == 0:
        return np.zeros(0)
    return scale * np.convolve(coeffs[:n], x)[:n]


def sbp_residual(left, right, u, v) -> float:
    """Defect ``|sum_s u(s) (left v)(s) - sum_s v(s) (right u)(s)|`` of summation by parts."""
    L = left.entries if isinstance(left, OperatorMatrix) else np.asarray(left, dtype=np.float64)
    R = right.entries if isinstance(right, OperatorMatrix) else np.asarray(right, dtype=np.float64)
    u = np.asarray(u, dtype=np.float64)
    v = np.asarray(v, dtype=np.float64)
    n = u.size
    if L.shape != (n, n) or R.shape != (n, n) or v.shape != (n,):
        raise ValueError(
            f"dimension mismatch: left {L.shape}, right {R.shape}, u {u.shape}, v {v.shape}")
    return abs(float(u @ (L @ v)) - float(v @ (R @ u)))
