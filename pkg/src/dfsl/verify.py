"""Seeded, tolerance-bearing checks of the spectral properties and a suite runner.

Each check returns a :class:`CheckResult` whose status is ``"pass"`` exactly
when ``observed <= tolerance``. :func:`run_suite` sweeps the checks over orders,
sizes, both operator families and coefficient profiles and collects them in a
:class:`VerificationReport` that serializes to JSON.

Random test vectors are drawn uniformly from ``(-1, 1)`` with numpy's PCG64
generator. Each check gets its own seed, derived from the master seed and the
check name, and records it.
"""

from __future__ import annotations

import datetime as _dt
import json
import math
import zlib
from dataclasses import asdict, dataclass, field
from typing import Any, Callable, Iterable, Mapping

import numpy as np

from . import __version__
from .assembly import Coefficients, Form, assemble, sample_coefficients
from .eigensolve import (
    EigenDecomposition,
    congruence,
    generalized_symmetric_eigen,
    residual_check,
)
from .errors import ValidationError
from .fracops import (
    Grid,
    delta_left_diff_matrix,
    delta_right_diff_matrix,
    nabla_left_diff_matrix,
    nabla_right_diff_matrix,
    sbp_residual,
)
from .kernels import as_order, gl_weights, rl_diff_kernel

__all__ = [
    "PRNG",
    "CHECKS",
    "CheckResult",
    "VerificationReport",
    "SuiteConfig",
    "make_grid",
    "coefficient_profile",
    "build_problem",
    "check_self_adjointness",
    "check_orthogonality",
    "check_reality",
    "check_sbp",
    "check_kernel_identity",
    "check_classical_reduction",
    "check_cross_family",
    "run_suite",
]

PRNG = "numpy.random.PCG64"

TOL_STRUCTURAL = 1.0e-12
TOL_BILINEAR = 1.0e-10
TOL_SPECTRAL = 1.0e-8
TOL_CLASSICAL = 1.0e-10
TOL_EIGEN_AGREEMENT = 1.0e-9

CHECKS = (
    "kernel_identity",
    "sbp",
    "self_adjointness",
    "reality",
    "orthogonality",
    "classical_reduction",
    "cross_family",
)

ANCHORS = {
    ("sbp", "rl"): "summation by parts, R-L nabla left/right differences",
    ("sbp", "gl"): "summation by parts, G-L delta left/right differences",
    ("self_adjointness", "rl"): "self-adjointness of the R-L operator L1",
    ("self_adjointness", "gl"): "self-adjointness of the G-L operator L2",
    ("orthogonality", "rl"): "orthogonality of eigenfunctions of L1",
    ("orthogonality", "gl"): "orthogonality of eigenfunctions of L2",
    ("reality", "rl"): "reality of eigenvalues of L1",
    ("reality", "gl"): "reality of eigenvalues of L2",
    ("kernel_identity", None): "R-L nabla difference kernel equals G-L weights",
    ("classical_reduction", "rl"): "order one reduces L1 to the integer nabla/delta operator",
    ("classical_reduction", "gl"): "order one reduces L2 to the integer nabla/delta operator",
    ("cross_family", None): "L1 and L2 coincide on a unit grid",
}


@dataclass(frozen=True)
class CheckResult:
    name: str
    anchor: str
    status: str
    observed: float
    tolerance: float
    seed: int | None
    parameters: dict[str, Any]
    details: dict[str, Any] = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return self.status == "pass"

    def to_dict(self) -> dict[str, Any]:
        d = asdict(self)
        d["observed"] = _json_float(self.observed)
        d["details"] = {k: _json_float(v) if isinstance(v, float) else v
                        for k, v in self.details.items()}
        return d


def _json_float(x: float) -> float | None:
    return float(x) if math.isfinite(x) else None


def _result(name: str, anchor: str, observed: float, tolerance: float,
            seed: int | None, parameters: Mapping[str, Any],
            details: Mapping[str, Any] | None = None) -> CheckResult:
    observed = float(observed)
    status = "pass" if observed <= tolerance else "fail"
    return CheckResult(name, anchor, status, observed, float(tolerance), seed,
                       dict(parameters), dict(details or {}))


@dataclass
class VerificationReport:
    results: list[CheckResult]
    master_seed: int
    version: str = __version__
    timestamp: str = ""
    prng: str = PRNG
    config: dict[str, Any] = field(default_factory=dict)

    @property
    def summary(self) -> dict[str, int]:
        passed = sum(r.passed for r in self.results)
        return {"total": len(self.results), "passed": passed,
                "failed": len(self.results) - passed}

    @property
    def ok(self) -> bool:
        return all(r.passed for r in self.results)

    def to_dict(self) -> dict[str, Any]:
        return {
            "version": self.version,
            "timestamp": self.timestamp,
            "prng": self.prng,
            "master_seed": self.master_seed,
            "config": self.config,
            "summary": self.summary,
            "results": [r.to_dict() for r in self.results],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True, allow_nan=False) + "\n"


# {{{ problem construction

def make_grid(form: Form | str, N: int, h: float = 1.0) -> Grid:
    """Grid with *N* active points: ``{1, ..., N}`` (R-L) or ``{0, ..., N-1}`` (G-L)."""
    form = Form(form)
    if N < 1:
        raise ValidationError(f"grid size must be >= 1, got {N}")
    if form is Form.RL:
        return Grid.nabla(0, N + 1)
    return Grid.delta(N - 1, h)


def coefficient_profile(name: str, N: int) -> dict[str, Any]:
    """Named coefficient sets used by the suite.

    ``unit`` is ``p = 1, q = 0, r = 1``; ``variable`` has smooth non-constant
    ``p > 0``, sign-changing ``q`` and ``r[i] = 1 + i/N``.
    """
    if name == "unit":
        return {"p": 1.0, "q": 0.0, "r": 1.0}
    if name == "variable":
        x = np.arange(N) / N
        return {
            "p": (1.5 + 0.5 * np.cos(np.pi * x)).tolist(),
            "q": np.sin(2.0 * np.pi * x).tolist(),
            "r": (1.0 + x).tolist(),
        }
    raise ValidationError(f"unknown coefficient profile {name!r}")


def build_problem(form: Form | str, N: int, mu, coeffs=None, h: float = 1.0):
    grid = make_grid(form, N, h)
    if coeffs is None:
        coeffs = {}
    if isinstance(coeffs, str):
        coeffs = coefficient_profile(coeffs, N)
    if not isinstance(coeffs, Coefficients):
        coeffs = sample_coefficients(coeffs, grid)
    return assemble(form, coeffs, grid, mu)


def _params(form, N, mu, h, coeffs) -> dict[str, Any]:
    if isinstance(coeffs, str) or coeffs is None:
        label = coeffs or "unit"
    else:
        label = "custom"
    return {"form": Form(form).value, "N": int(N), "mu": float(as_order(mu).mu),
            "h": float(h), "coefficients": label}


def _rng(seed: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(seed))


def _norm_inf(A: np.ndarray) -> float:
    return float(np.abs(A).sum(axis=1).max()) if A.size else 0.0

# }}}


# {{{ checks

def check_self_adjointness(form, N, mu, coeffs=None, trials: int = 100, seed: int = 0,
                           h: float = 1.0, *, problem=None,
                           perturb: Callable[[np.ndarray], np.ndarray] | None = None,
                           name: str | None = None) -> CheckResult:
    """Normalized bilinear defect ``|<Mu, v> - <u, Mv>| / (|u| |v| ||M||_inf)``.

    *perturb* receives a writable copy of the assembled matrix and returns the
    matrix to test; it exists to plant defects in tests.
    """
    if problem is None:
        problem = build_problem(form, N, mu, coeffs, h)
    M = np.array(problem.matrix.entries)
    if perturb is not None:
        M = perturb(M)
    scale = _norm_inf(M) or 1.0
    rng = _rng(seed)
    worst = 0.0
    for _ in range(trials):
        u = rng.uniform(-1.0, 1.0, M.shape[0])
        v = rng.uniform(-1.0, 1.0, M.shape[0])
        denom = np.linalg.norm(u) * np.linalg.norm(v) * scale
        if denom == 0.0:
            continue
        worst = max(worst, abs(float((M @ u) @ v) - float(u @ (M @ v))) / denom)
    key = Form(form).value
    return _result(name or "self_adjointness", ANCHORS["self_adjointness", key], worst,
                   TOL_BILINEAR, seed, {**_params(form, N, mu, h, coeffs), "trials": trials})


def _gram_defect(decomp: EigenDecomposition, r: np.ndarray) -> float:
    X = decomp.vectors
    n = X.shape[1]
    if n < 2:
        return 0.0
    G = X.T @ (r[:, None] * X)
    G[np.diag_indices(n)] = 0.0
    return float(np.abs(G).max())


def check_orthogonality(form, N, mu, coeffs=None, h: float = 1.0, *, problem=None,
                        decomp: EigenDecomposition | None = None,
                        name: str | None = None) -> CheckResult:
    """Largest off-diagonal ``|<x_i, x_j>_r|`` over all eigenvector pairs."""
    if problem is None:
        problem = build_problem(form, N, mu, coeffs, h)
    r = problem.weight
    if decomp is None:
        decomp = generalized_symmetric_eigen(problem.matrix.entries, r)
    observed = _gram_defect(decomp, r)
    key = Form(form).value
    return _result(name or "orthogonality", ANCHORS["orthogonality", key], observed,
                   TOL_SPECTRAL, None, _params(form, N, mu, h, coeffs))


def check_reality(form, N, mu, coeffs=None, h: float = 1.0, *, problem=None,
                  decomp: EigenDecomposition | None = None,
                  perturb: Callable[[np.ndarray], np.ndarray] | None = None,
                  name: str | None = None) -> CheckResult:
    """Symmetry of the congruence ``D^-1/2 M D^-1/2`` together with the eigenpair residual.

    A symmetric congruence has a real spectrum, so reality is certified by
    ``max(symmetry defect, residual)`` being small.
    """
    if problem is None:
        problem = build_problem(form, N, mu, coeffs, h)
    M = np.array(problem.matrix.entries)
    if perturb is not None:
        M = perturb(M)
        decomp = None
    r = problem.weight
    S = congruence(M, r)
    symmetry = float(np.abs(S - S.T).max()) / (_norm_inf(S) or 1.0)
    details: dict[str, Any] = {"symmetry": symmetry}
    try:
        if decomp is None:
            decomp = generalized_symmetric_eigen(M, r)
        residual = residual_check(M, decomp, r)
    except ValueError as exc:
        residual = math.inf
        details["error"] = str(exc)
    details["residual"] = residual
    key = Form(form).value
    return _result(name or "reality", ANCHORS["reality", key], max(symmetry, residual),
                   TOL_SPECTRAL, None, _params(form, N, mu, h, coeffs), details)


def _left_right(form, N, mu, h):
    grid = make_grid(form, N, h)
    if Form(form) is Form.RL:
        return nabla_left_diff_matrix(grid, mu).entries, nabla_right_diff_matrix(grid, mu).entries
    return delta_left_diff_matrix(grid, mu).entries, delta_right_diff_matrix(grid, mu).entries


def check_sbp(form, N, mu, trials: int = 100, seed: int = 0, h: float = 1.0, *,
              operators: tuple[np.ndarray, np.ndarray] | None = None,
              perturb: Callable[[np.ndarray], np.ndarray] | None = None,
              name: str | None = None) -> CheckResult:
    """Normalized summation-by-parts defect of the left/right difference pair.

    *perturb* is applied to a copy of the right operator.
    """
    if operators is None:
        left, right = _left_right(form, N, mu, h)
    else:
        left, right = (np.asarray(a, dtype=np.float64) for a in operators)
    right = np.array(right)
    if perturb is not None:
        right = perturb(right)
    scale = _norm_inf(left) or 1.0
    rng = _rng(seed)
    worst = 0.0
    for _ in range(trials):
        u = rng.uniform(-1.0, 1.0, left.shape[0])
        v = rng.uniform(-1.0, 1.0, left.shape[0])
        denom = np.linalg.norm(u) * np.linalg.norm(v) * scale
        worst = max(worst, sbp_residual(left, right, u, v) / denom)
    key = Form(form).value
    params = {k: v for k, v in _params(form, N, mu, h, None).items() if k != "coefficients"}
    return _result(name or "sbp", ANCHORS["sbp", key], worst, TOL_STRUCTURAL, seed,
                   {**params, "trials": trials})


def check_kernel_identity(mu, m: int = 512, *, name: str | None = None) -> CheckResult:
    """Largest ``|rl_diff_kernel(mu)[k] - gl_weights(mu)[k]|`` for ``k <= m``."""
    e = rl_diff_kernel(mu, m).coeffs
    w = gl_weights(mu, m).coeffs
    observed = float(np.abs(e - w).max())
    return _result(name or "kernel_identity", ANCHORS["kernel_identity", None], observed,
                   TOL_STRUCTURAL, None, {"mu": float(as_order(mu).mu), "m": int(m)})


def classical_spectrum(N: int) -> np.ndarray:
    """``2 - 2 cos((2k - 1) pi / (2N + 1))``, ``k = 1..N``."""
    k = np.arange(1, N + 1)
    return 2.0 - 2.0 * np.cos((2 * k - 1) * np.pi / (2 * N + 1))


def check_classical_reduction(N: int, form="gl", *, name: str | None = None) -> CheckResult:
    """Order-one spectrum with ``p = 1, q = 0, r = 1, h = 1`` against its closed form."""
    problem = build_problem(form, N, 1.0, "unit", 1.0)
    decomp = generalized_symmetric_eigen(problem.matrix.entries, problem.weight)
    observed = float(np.abs(decomp.values - classical_spectrum(N)).max())
    key = Form(form).value
    return _result(name or "classical_reduction", ANCHORS["classical_reduction", key],
                   observed, TOL_CLASSICAL, None, _params(form, N, 1.0, 1.0, "unit"))


def check_cross_family(N: int, mu, coeffs=None, *, decomps=None,
                       name: str | None = None) -> CheckResult:
    """Entrywise and spectral agreement of ``L1`` and ``L2`` on a unit grid.

    The observed value is the matrix discrepancy; the eigenvalue discrepancy is
    folded in relative to its own tolerance so one number decides the status.
    """
    P1 = build_problem("rl", N, mu, coeffs, 1.0)
    P2 = build_problem("gl", N, mu, coeffs, 1.0)
    entries = float(np.abs(P1.matrix.entries - P2.matrix.entries).max())
    if decomps is None:
        decomps = (generalized_symmetric_eigen(P1.matrix.entries, P1.weight),
                   generalized_symmetric_eigen(P2.matrix.entries, P2.weight))
    spectrum = float(np.abs(decomps[0].values - decomps[1].values).max())
    observed = max(entries, spectrum * (TOL_STRUCTURAL / TOL_EIGEN_AGREEMENT))
    params = _params("rl", N, mu, 1.0, coeffs)
    del params["form"]
    return _result(name or "cross_family", ANCHORS["cross_family", None], observed,
                   TOL_STRUCTURAL, None, params,
                   {"matrix": entries, "eigenvalues": spectrum,
                    "eigenvalue_tolerance": TOL_EIGEN_AGREEMENT})

# }}}


# {{{ suite

DEFAULT_MUS = (0.1, 0.25, 0.5, 0.75, 0.9, 1.0)
DEFAULT_SIZES = (4, 16, 64)
DEFAULT_SEED = 20180327


@dataclass(frozen=True)
class SuiteConfig:
    """Parameter sweep of :func:`run_suite`.

    *coefficients* is either a tuple of profile names (see
    :func:`coefficient_profile`) or a single mapping of ``p``, ``q``, ``r``
    values applied to every problem.
    """

    mus: tuple[float, ...] = DEFAULT_MUS
    sizes: tuple[int, ...] = DEFAULT_SIZES
    forms: tuple[str, ...] = ("rl", "gl")
    coefficients: tuple[str, ...] | Mapping[str, Any] = ("unit", "variable")
    checks: tuple[str, ...] = CHECKS
    seed: int = DEFAULT_SEED
    trials: int = 100
    h: float = 1.0
    kernel_length: int = 512

    def __post_init__(self) -> None:
        unknown = set(self.checks) - set(CHECKS)
        if unknown:
            raise ValidationError(f"unknown checks: {sorted(unknown)}")
        for form in self.forms:
            Form(form)
        for mu in self.mus:
            as_order(mu)
        for N in self.sizes:
            if int(N) != N or N < 1:
                raise ValidationError(f"sizes must be positive integers, got {N!r}")

    def profiles(self) -> list[tuple[str, Any]]:
        if isinstance(self.coefficients, Mapping):
            return [("custom", dict(self.coefficients))]
        return [(name, name) for name in self.coefficients]

    def to_dict(self) -> dict[str, Any]:
        coeffs = (dict(self.coefficients) if isinstance(self.coefficients, Mapping)
                  else list(self.coefficients))
        return {"mus": list(self.mus), "sizes": list(self.sizes), "forms": list(self.forms),
                "coefficients": coeffs, "checks": list(self.checks), "seed": self.seed,
                "trials": self.trials, "h": self.h, "kernel_length": self.kernel_length}


def derive_seed(master: int, name: str) -> int:
    """Per-check seed, a pure function of the master seed and the check name."""
    ss = np.random.SeedSequence([int(master), zlib.crc32(name.encode())])
    return int(ss.generate_state(1, dtype=np.uint32)[0])


def _fmt_mu(mu: float) -> str:
    return repr(float(mu))


def _tasks(config: SuiteConfig) -> Iterable[tuple[str, Callable[[], CheckResult]]]:
    checks = set(config.checks)
    cache: dict[tuple, tuple] = {}

    def solved(form, N, mu, label, coeffs):
        h = config.h if Form(form) is Form.GL else 1.0
        key = (form, N, mu, label, h)
        if key not in cache:
            P = build_problem(form, N, mu, coeffs, h)
            cache[key] = (P, generalized_symmetric_eigen(P.matrix.entries, P.weight))
        return cache[key]

    if "kernel_identity" in checks:
        for mu in config.mus:
            name = f"kernel_identity[mu={_fmt_mu(mu)},m={config.kernel_length}]"
            yield name, lambda mu=mu, name=name: check_kernel_identity(
                mu, config.kernel_length, name=name)

    for form in config.forms:
        h = config.h if Form(form) is Form.GL else 1.0
        for N in config.sizes:
            for mu in config.mus:
                tag = f"{form},mu={_fmt_mu(mu)},N={N}"
                if "sbp" in checks:
                    name = f"sbp[{tag}]"
                    yield name, lambda form=form, N=N, mu=mu, h=h, name=name: check_sbp(
                        form, N, mu, config.trials, derive_seed(config.seed, name), h, name=name)
                for label, coeffs in config.profiles():
                    ctag = f"{tag},{label}"
                    if "self_adjointness" in checks:
                        name = f"self_adjointness[{ctag}]"
                        yield name, lambda form=form, N=N, mu=mu, h=h, label=label, \
                            coeffs=coeffs, name=name: check_self_adjointness(
                                form, N, mu, coeffs, config.trials,
                                derive_seed(config.seed, name), h,
                                problem=solved(form, N, mu, label, coeffs)[0], name=name)
                    if "reality" in checks:
                        name = f"reality[{ctag}]"
                        yield name, lambda form=form, N=N, mu=mu, h=h, label=label, \
                            coeffs=coeffs, name=name: check_reality(
                                form, N, mu, coeffs, h,
                                problem=solved(form, N, mu, label, coeffs)[0],
                                decomp=solved(form, N, mu, label, coeffs)[1], name=name)
                    if "orthogonality" in checks:
                        name = f"orthogonality[{ctag}]"
                        yield name, lambda form=form, N=N, mu=mu, h=h, label=label, \
                            coeffs=coeffs, name=name: check_orthogonality(
                                form, N, mu, coeffs, h,
                                problem=solved(form, N, mu, label, coeffs)[0],
                                decomp=solved(form, N, mu, label, coeffs)[1], name=name)

    if "classical_reduction" in checks:
        for form in config.forms:
            for N in config.sizes:
                name = f"classical_reduction[{form},N={N}]"
                yield name, lambda form=form, N=N, name=name: check_classical_reduction(
                    N, form, name=name)

    if "cross_family" in checks:
        for N in config.sizes:
            for mu in config.mus:
                for label, coeffs in config.profiles():
                    name = f"cross_family[mu={_fmt_mu(mu)},N={N},{label}]"
                    yield name, lambda N=N, mu=mu, label=label, coeffs=coeffs, name=name: \
                        check_cross_family(N, mu, coeffs, decomps=(
                            solved("rl", N, mu, label, coeffs)[1],
                            solved("gl", N, mu, label, coeffs)[1])
                            if config.h == 1.0 else None, name=name)


def _anchor_for(name: str) -> str:
    kind = name.split("[", 1)[0]
    for (k, form), anchor in ANCHORS.items():
        if k == kind and (form is None or f"[{form}," in name):
            return anchor
    return kind


def run_suite(config: SuiteConfig | None = None, *, timestamp: str | None = None) -> VerificationReport:
    """Run every configured check; failures and exceptions are recorded, never raised."""
    if config is None:
        config = SuiteConfig()
    results: list[CheckResult] = []
    seen: set[str] = set()
    for name, task in _tasks(config):
        if name in seen:
            continue
        seen.add(name)
        try:
            results.append(task())
        except Exception as exc:  # recorded as a failed check
            results.append(CheckResult(name, _anchor_for(name), "fail", math.inf, 0.0, None,
                                       {}, {"error": f"{type(exc).__name__}: {exc}"}))
    if timestamp is None:
        timestamp = _dt.datetime.now(_dt.timezone.utc).isoformat()
    return VerificationReport(results, config.seed, timestamp=timestamp, config=config.to_dict())

# }}}
