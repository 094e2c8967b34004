"""Gamma-type special functions and the coefficient sequences of the fractional operators.

Every fractional sum or difference on a uniform lattice is a discrete
convolution, so it is fully described by one coefficient sequence (a kernel).
Three kernels are provided:

``gl_weights``
    Grunwald-Letnikov weights ``w[s] = (-1)^s binom(mu, s)``.
``rl_sum_kernel``
    Normalized nabla fractional sum kernel ``(k+1)^{rising mu-1} / Gamma(mu)``.
``rl_diff_kernel``
    First backward difference of the ``(1-mu)`` sum kernel, i.e. the
    Riemann-Liouville nabla difference of order ``mu`` with ``n = 1``.

All kernels are generated by ratio recurrences. Gamma values are never divided
directly since ``Gamma(k + mu)`` overflows a double near ``k = 170``.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Union

import numpy as np

from .errors import DomainError, ValidationError

__all__ = [
    "FractionalOrder",
    "KernelKind",
    "ToeplitzKernel",
    "as_order",
    "log_gamma",
    "falling",
    "rising",
    "gl_weights",
    "rl_sum_kernel",
    "rl_diff_kernel",
]


# {{{ special functions

_HALF_LOG_2PI = 0.5 * math.log(2.0 * math.pi)

# B_{2k} / (2k (2k - 1)), k = 1..8
_STIRLING = (
    1.0 / 12.0,
    -1.0 / 360.0,
    1.0 / 1260.0,
    -1.0 / 1680.0,
    1.0 / 1188.0,
    -691.0 / 360360.0,
    1.0 / 156.0,
    -3617.0 / 122400.0,
)

# below this the argument is shifted up with Gamma(x + 1) = x Gamma(x)
_STIRLING_MIN = 15.0


def _stirling(x: float) -> float:
    z = 1.0 / (x * x)
    series = 0.0
    for c in reversed(_STIRLING):
        series = series * z + c
    return (x - 0.5) * math.log(x) - x + _HALF_LOG_2PI + series / x


def log_gamma(x: float) -> float:
    """Natural logarithm of the gamma function for ``x > 0``.

    Uses the asymptotic Stirling series for ``x >= 15`` and the recurrence
    ``Gamma(x + 1) = x Gamma(x)`` to shift smaller arguments into that range.

    :raises DomainError: if *x* is not a finite positive number.
    """
    x = float(x)
    if not math.isfinite(x) or x <= 0.0:
        raise DomainError(f"log_gamma requires a finite x > 0, got {x!r}")

    if x >= _STIRLING_MIN:
        return _stirling(x)

    n = math.ceil(_STIRLING_MIN - x)
    prod = 1.0
    for k in range(n):
        prod *= x + k
    return _stirling(x + n) - math.log(prod)


def _is_pole(x: float) -> bool:
    return x <= 0.0 and x == math.floor(x)


def _signed_log_gamma(x: float) -> tuple[float, float]:
    """Return ``(sign, log|Gamma(x)|)`` for any real *x* that is not a pole."""
    if not math.isfinite(x) or _is_pole(x):
        raise DomainError(f"gamma function has a pole at {x!r}")
    if x > 0.0:
        return 1.0, log_gamma(x)

    # reflection: Gamma(x) Gamma(1 - x) = pi / sin(pi x)
    s = math.sin(math.pi * x)
    return math.copysign(1.0, s), math.log(math.pi / abs(s)) - log_gamma(1.0 - x)


def _gamma_ratio(num: float, den: float) -> float:
    """``Gamma(num) / Gamma(den)`` through log-gamma differences."""
    sn, ln = _signed_log_gamma(num)
    sd, ld = _signed_log_gamma(den)
    return sn * sd * math.exp(ln - ld)


def _is_nonneg_int(alpha: float) -> bool:
    return alpha >= 0.0 and alpha == math.floor(alpha)


def falling(t: float, alpha: float) -> float:
    """Falling factorial power ``Gamma(t + 1) / Gamma(t - alpha + 1)``.

    For a non-negative integer *alpha* this is the finite product
    ``t (t - 1) ... (t - alpha + 1)``.

    >>> falling(5, 2)
    20.0
    """
    t = float(t)
    alpha = float(alpha)
    if _is_pole(t + 1.0) or _is_pole(t - alpha + 1.0):
        raise DomainError(f"falling({t}, {alpha}) hits a gamma pole")

    if _is_nonneg_int(alpha):
        result = 1.0
        for k in range(int(alpha)):
            result *= t - k
        return result

    return _gamma_ratio(t + 1.0, t - alpha + 1.0)


def rising(t: float, alpha: float) -> float:
    """Rising factorial power ``Gamma(t + alpha) / Gamma(t)``.

    >>> rising(2, 3)
    24.0
    """
    t = float(t)
    alpha = float(alpha)
    if _is_pole(t) or _is_pole(t + alpha):
        raise DomainError(f"rising({t}, {alpha}) hits a gamma pole")

    if _is_nonneg_int(alpha):
        result = 1.0
        for k in range(int(alpha)):
            result *= t + k
        return result

    return _gamma_ratio(t + alpha, t)

# }}}


# {{{ kernels


@dataclass(frozen=True)
class FractionalOrder:
    """Order ``0 < mu <= 1`` of a fractional difference."""

    mu: float

    def __post_init__(self) -> None:
        mu = float(self.mu)
        if not (math.isfinite(mu) and 0.0 < mu <= 1.0):
            raise ValidationError(f"mu out of (0,1]: {self.mu!r}")
        object.__setattr__(self, "mu", mu)

    def __float__(self) -> float:
        return self.mu


Order = Union[float, FractionalOrder]


def as_order(mu: Order) -> FractionalOrder:
    if isinstance(mu, FractionalOrder):
        return mu
    return FractionalOrder(mu)


class KernelKind(enum.Enum):
    GLWeights = "gl_weights"
    RLSumKernel = "rl_sum"
    RLDiffKernel = "rl_diff"


@dataclass(frozen=True)
class ToeplitzKernel:
    """Coefficient sequence ``coeffs[0..m]`` of a lower-triangular Toeplitz operator."""

    coeffs: np.ndarray
    kind: KernelKind
    mu: FractionalOrder

    def __post_init__(self) -> None:
        coeffs = np.array(self.coeffs, dtype=np.float64)
        coeffs.setflags(write=False)
        object.__setattr__(self, "coeffs", coeffs)

    def __len__(self) -> int:
        return self.coeffs.size

    def __getitem__(self, k):
        return self.coeffs[k]


def _check_count(m: int) -> int:
    if int(m) != m or m < 0:
        raise ValidationError(f"kernel length m must be a non-negative integer, got {m!r}")
    return int(m)


def _ratio_sequence(m: int, offset: int, mu: float) -> np.ndarray:
    """Sequence ``c[0] = 1, c[k] = c[k-1] ((k + offset) + mu) / k`` for ``k = 1..m``."""
    k = np.arange(1, m + 1, dtype=np.float64)
    return np.concatenate(([1.0], np.cumprod(((k + offset) + mu) / k)))


def gl_weights(mu: Order, m: int) -> ToeplitzKernel:
    """Grunwald-Letnikov weights ``w[s] = (-1)^s mu (mu - 1) ... (mu - s + 1) / s!``.

    Generated by ``w[s] = w[s - 1] (s - 1 - mu) / s``.
    """
    order = as_order(mu)
    m = _check_count(m)
    return ToeplitzKernel(_ratio_sequence(m, -1, -order.mu), KernelKind.GLWeights, order)


def rl_sum_kernel(mu: Order, m: int) -> ToeplitzKernel:
    """Kernel of the nabla left fractional sum of order *mu*.

    ``c[k] = (k + 1)^{rising (mu - 1)} / Gamma(mu)`` is the weight of ``x(t - k)``
    and obeys ``c[k] = c[k - 1] (k + mu - 1) / k`` with ``c[0] = 1``.
    """
    order = as_order(mu)
    m = _check_count(m)
    return ToeplitzKernel(_ratio_sequence(m, -1, order.mu), KernelKind.RLSumKernel, order)


def rl_diff_kernel(mu: Order, m: int) -> ToeplitzKernel:
    """Kernel of the Riemann-Liouville nabla left fractional difference (``n = 1``).

    This is ``e[k] = d[k] - d[k - 1]`` where ``d`` is the sum kernel of order
    ``1 - mu`` and ``d[-1] = 0``. At ``mu = 1`` the sum of order zero is
    undefined and the exact backward difference ``[1, -1, 0, ...]`` is returned.
    """
    order = as_order(mu)
    m = _check_count(m)
    if order.mu == 1.0:
        coeffs = np.zeros(m + 1)
        coeffs[0] = 1.0
        if m >= 1:
            coeffs[1] = -1.0
    else:
        d = _ratio_sequence(m, 0, -order.mu)
        coeffs = np.diff(d, prepend=0.0)
    return ToeplitzKernel(coeffs, KernelKind.RLDiffKernel, order)

# }}}
