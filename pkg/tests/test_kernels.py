import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from dfsl.errors import DomainError, ValidationError
from dfsl.kernels import (
    FractionalOrder,
    KernelKind,
    falling,
    gl_weights,
    log_gamma,
    rising,
    rl_diff_kernel,
    rl_sum_kernel,
)

MUS = (0.1, 0.2, 0.25, 0.3, 0.4, 0.5, 0.6, 0.7, 0.75, 0.8, 0.9)

orders = st.floats(min_value=1e-6, max_value=1.0, allow_nan=False, exclude_min=True)


# {{{ log_gamma

def test_log_gamma_examples():
    assert log_gamma(1) == pytest.approx(0.0, abs=1e-13)
    assert log_gamma(2) == pytest.approx(0.0, abs=1e-13)
    assert log_gamma(5) == pytest.approx(math.log(24.0), abs=1e-13)
    assert log_gamma(0.5) == pytest.approx(0.5 * math.log(math.pi), abs=1e-13)
    assert log_gamma(5) == pytest.approx(3.17805383, abs=1e-8)
    assert log_gamma(0.5) == pytest.approx(0.57236494, abs=1e-8)


def _reference_lgamma(x):
    with mpmath.workdps(40):
        return float(mpmath.loggamma(x))


def test_log_gamma_against_mpmath_small():
    for x in np.linspace(0.5, 30.0, 3001):
        assert abs(log_gamma(x) - _reference_lgamma(x)) <= 1e-13, x


def test_log_gamma_against_mpmath_large():
    # past ~30 an absolute 1e-13 is below the ulp of the value itself
    for x in np.geomspace(30.0, 1e4, 2000):
        ref = _reference_lgamma(x)
        assert abs(log_gamma(x) - ref) <= max(1e-13, 4 * np.spacing(abs(ref))), x


@pytest.mark.parametrize("x", [0.0, -1.0, -0.5, math.inf, math.nan])
def test_log_gamma_domain(x):
    with pytest.raises(DomainError):
        log_gamma(x)

# }}}


# {{{ falling / rising

def test_falling_examples():
    assert falling(5, 2) == 20.0
    assert falling(3, 3) == 6.0
    for t in (0.3, 2.0, 7.5, 40.0):
        assert falling(t, 0) == 1.0


def test_rising_examples():
    assert rising(2, 3) == 24.0
    assert rising(3, 0) == 1.0
    expected = 0.5 * 1.5 * 2.5 * 3.5 * math.sqrt(math.pi) / 6.0
    assert rising(4, 0.5) == pytest.approx(expected, rel=1e-13)
    assert rising(4, 0.5) == pytest.approx(1.93862140, abs=1e-8)


@pytest.mark.parametrize("t, alpha", [(3.5, 0.5), (10.0, 2.5), (2.0, -0.3), (0.5, 1.2),
                                      (-1.5, 0.25)])
def test_falling_matches_gamma_ratio(t, alpha):
    expected = math.gamma(t + 1) / math.gamma(t - alpha + 1)
    assert falling(t, alpha) == pytest.approx(expected, rel=1e-13)


@pytest.mark.parametrize("t, alpha", [(3.5, 0.5), (1.0, -0.7), (-0.5, 1.5), (-2.5, 0.75)])
def test_rising_matches_gamma_ratio(t, alpha):
    expected = math.gamma(t + alpha) / math.gamma(t)
    assert rising(t, alpha) == pytest.approx(expected, rel=1e-13)


@pytest.mark.parametrize("args", [(-1.0, 0.5), (2.0, 3.0)])
def test_falling_poles(args):
    with pytest.raises(DomainError):
        falling(*args)


@pytest.mark.parametrize("args", [(0.0, 1.5), (-2.0, 0.5), (1.5, -2.5)])
def test_rising_poles(args):
    with pytest.raises(DomainError):
        rising(*args)


@pytest.mark.parametrize("alpha", [0.1, 0.5, 1.0, 2.5])
def test_power_rules(alpha):
    for t in range(2, 51):
        lhs = falling(t + 1, alpha) - falling(t, alpha)
        assert lhs == pytest.approx(alpha * falling(t, alpha - 1), rel=1e-10)
        lhs = rising(t, alpha) - rising(t - 1, alpha)
        assert lhs == pytest.approx(alpha * rising(t, alpha - 1), rel=1e-10)

# }}}


# {{{ kernels

def test_order_validation():
    for bad in (0.0, -0.1, 1.0000001, 1.5, math.nan, math.inf):
        with pytest.raises(ValidationError, match=r"mu out of \(0,1\]"):
            FractionalOrder(bad)
    assert float(FractionalOrder(1)) == 1.0


def test_gl_weights_examples():
    assert gl_weights(1, 2).coeffs.tolist() == [1.0, -1.0, 0.0]
    assert gl_weights(0.3, 1).coeffs == pytest.approx([1.0, -0.3], abs=0)
    w = gl_weights(0.5, 2)
    assert w.kind is KernelKind.GLWeights
    assert w.coeffs == pytest.approx([1.0, -0.5, -0.125], abs=1e-16)


def _gl_direct(mu, s):
    """(-1)^s mu (mu - 1) ... (mu - s + 1) / s!, term by term."""
    num = math.prod(mu - j for j in range(s))
    return (-1) ** s * num / math.factorial(s)


@pytest.mark.parametrize("mu", MUS + (1.0,))
def test_gl_weights_direct_formula(mu):
    w = gl_weights(mu, 40).coeffs
    for s in range(41):
        assert w[s] == pytest.approx(_gl_direct(mu, s), rel=1e-12, abs=1e-300)


def test_rl_sum_kernel_examples():
    assert rl_sum_kernel(1, 3).coeffs.tolist() == [1.0, 1.0, 1.0, 1.0]
    assert rl_sum_kernel(0.5, 2).coeffs == pytest.approx([1.0, 0.5, 0.375], abs=1e-16)
    assert rl_sum_kernel(0.9, 1).coeffs == pytest.approx([1.0, 0.9], abs=0)


def test_rl_diff_kernel_examples():
    assert rl_diff_kernel(1, 2).coeffs.tolist() == [1.0, -1.0, 0.0]
    assert rl_diff_kernel(0.5, 2).coeffs == pytest.approx([1.0, -0.5, -0.125], abs=1e-16)
    assert rl_diff_kernel(0.25, 1).coeffs == pytest.approx([1.0, -0.25], abs=1e-16)


def test_kernels_are_immutable():
    w = gl_weights(0.5, 4)
    with pytest.raises(ValueError):
        w.coeffs[0] = 2.0


@pytest.mark.parametrize("m", [-1, 1.5])
def test_bad_length(m):
    with pytest.raises(ValidationError):
        gl_weights(0.5, m)


def test_zero_length_kernels():
    for f in (gl_weights, rl_sum_kernel, rl_diff_kernel):
        assert f(0.4, 0).coeffs.tolist() == [1.0]


@settings(max_examples=60, deadline=None)
@given(orders)
def test_kernel_identity(mu):
    e = rl_diff_kernel(mu, 512).coeffs
    w = gl_weights(mu, 512).coeffs
    assert np.abs(e - w).max() <= 1e-12


def _binom_product(a, n):
    """binom(a, n) as prod_{j<n} (a - j) / (j + 1)."""
    out = 1.0
    for j in range(n):
        out *= (a - j) / (j + 1)
    return out


@pytest.mark.parametrize("mu", [0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9])
def test_partial_sum_identity(mu):
    partial = np.cumsum(gl_weights(mu, 64).coeffs)
    for n in range(65):
        assert abs(partial[n] - (-1) ** n * _binom_product(mu - 1, n)) <= 1e-12


@pytest.mark.parametrize("mu", MUS)
def test_gl_sign_and_partial_sums(mu):
    w = gl_weights(mu, 200).coeffs
    assert np.all(w[1:] < 0)
    partial = np.cumsum(w)
    assert np.all(partial > 0)
    assert np.all(np.diff(partial) < 0)


@pytest.mark.parametrize("mu", MUS)
def test_rl_sum_kernel_positive_decreasing(mu):
    c = rl_sum_kernel(mu, 1000).coeffs
    assert np.all(c > 0)
    assert np.all(np.diff(c) < 0)


@pytest.mark.parametrize("mu", MUS + (1.0,))
def test_sum_kernel_gamma_ratio(mu):
    c = rl_sum_kernel(mu, 30).coeffs
    for k in range(31):
        expected = rising(k + 1, mu - 1) / math.gamma(mu)
        assert c[k] == pytest.approx(expected, rel=1e-10)


def test_kernels_do_not_overflow():
    for mu in (0.1, 0.5, 0.99):
        for f in (gl_weights, rl_sum_kernel, rl_diff_kernel):
            assert np.all(np.isfinite(f(mu, 5000).coeffs))


def test_mu_one_limit_is_continuous():
    e = rl_diff_kernel(1 - 1e-8, 64).coeffs
    assert np.abs(e - rl_diff_kernel(1.0, 64).coeffs).max() <= 1e-6

# }}}
