"""Command line interface.

::

    dfsl solve   --config problem.json --out results/ [--plot]
    dfsl verify  [--config sweep.json] --out results/ [--plot]
    dfsl kernels --mu 0.5 --m 32 --out results/

Exit codes: 0 success, 1 invalid input, 2 numerical failure, 3 a verification
check failed. Diagnostics go to standard error; data only goes to files.
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import sys
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Sequence

import numpy as np

from . import __version__
from .assembly import Coefficients, Form, assemble, sample_coefficients
from .eigensolve import generalized_symmetric_eigen, residual_check
from .errors import ConvergenceError, ValidationError
from .fracops import Grid
from .kernels import FractionalOrder, as_order, gl_weights, rl_diff_kernel, rl_sum_kernel
from .verify import CHECKS, DEFAULT_SEED, SuiteConfig, run_suite

__all__ = ["ConfigError", "RunSpec", "parse_config", "cmd_solve", "cmd_verify",
           "cmd_kernels", "format_float", "main"]

EXIT_OK = 0
EXIT_INVALID = 1
EXIT_NUMERICAL = 2
EXIT_CHECK_FAILED = 3

TOP_KEYS = {"form", "mu", "grid", "h", "p", "q", "r", "seed", "trials", "sweep"}
SWEEP_KEYS = {"mu", "N", "forms", "coefficients", "checks", "kernel_length"}


class ConfigError(ValidationError):
    """Malformed or schema-violating configuration document."""


def format_float(x: float) -> str:
    """17 significant digits: enough to round-trip any double."""
    return format(float(x), ".17g")


@dataclass(frozen=True)
class RunSpec:
    command: str
    form: Form | None = None
    mu: FractionalOrder | None = None
    grid: Grid | None = None
    coefficients: Coefficients | None = None
    seed: int = DEFAULT_SEED
    trials: int = 100
    sweep: SuiteConfig | None = None
    m: int | None = None
    raw: dict[str, Any] = field(default_factory=dict)

    def suite_config(self) -> SuiteConfig:
        if self.sweep is not None:
            return self.sweep
        return SuiteConfig(seed=self.seed, trials=self.trials)


# {{{ parsing

def _is_number(x) -> bool:
    return isinstance(x, (int, float)) and not isinstance(x, bool) and math.isfinite(x)


def _is_int(x) -> bool:
    return isinstance(x, int) and not isinstance(x, bool)


def _check_keys(obj: dict, allowed: set[str], where: str) -> None:
    for key in obj:
        if key not in allowed:
            raise ConfigError(f"unknown key {key!r} in {where}")


def _parse_mu(value) -> FractionalOrder:
    if not _is_number(value) or not (0.0 < value <= 1.0):
        raise ValidationError(f"mu out of (0,1]: {value!r}")
    return FractionalOrder(value)


def _parse_grid(form: Form, doc: dict) -> Grid:
    grid = doc.get("grid")
    if not isinstance(grid, dict):
        raise ConfigError("key 'grid' must be an object")
    if form is Form.RL:
        _check_keys(grid, {"a", "b"}, "grid (rl expects a, b)")
        a, b = grid.get("a"), grid.get("b")
        if not (_is_int(a) and _is_int(b)):
            raise ConfigError("key 'grid' needs integer 'a' and 'b' for form rl")
        if "h" in doc and doc["h"] != 1:
            raise ValidationError("the rl form lives on a unit lattice; h must be 1")
        return Grid.nabla(a, b)

    _check_keys(grid, {"n"}, "grid (gl expects n)")
    n = grid.get("n")
    if not _is_int(n) or n < 0:
        raise ConfigError("key 'grid' needs a non-negative integer 'n' for form gl")
    h = doc.get("h", 1.0)
    if not _is_number(h) or h <= 0:
        raise ValidationError(f"h must be a positive number, got {h!r}")
    return Grid.delta(n, float(h))


def _coefficient_values(doc: dict) -> dict[str, Any]:
    values = {}
    for key in ("p", "q", "r"):
        if key not in doc:
            continue
        v = doc[key]
        if _is_number(v):
            values[key] = float(v)
        elif isinstance(v, list) and all(_is_number(x) for x in v):
            values[key] = [float(x) for x in v]
        else:
            raise ConfigError(f"key {key!r} must be a number or a list of numbers")
    return values


def _parse_sweep(sweep: dict, doc: dict, seed: int, trials: int) -> SuiteConfig:
    _check_keys(sweep, SWEEP_KEYS, "sweep")
    kwargs: dict[str, Any] = {"seed": seed, "trials": trials}
    if "mu" in sweep:
        kwargs["mus"] = tuple(float(_parse_mu(m).mu) for m in _as_list(sweep["mu"], "sweep.mu"))
    if "N" in sweep:
        sizes = _as_list(sweep["N"], "sweep.N")
        if not all(_is_int(n) and n >= 1 for n in sizes):
            raise ValidationError("sweep.N must hold positive integers")
        kwargs["sizes"] = tuple(sizes)
    if "forms" in sweep:
        forms = _as_list(sweep["forms"], "sweep.forms")
        if not all(f in ("rl", "gl") for f in forms):
            raise ValidationError("sweep.forms entries must be 'rl' or 'gl'")
        kwargs["forms"] = tuple(forms)
    if "checks" in sweep:
        checks = _as_list(sweep["checks"], "sweep.checks")
        unknown = [c for c in checks if c not in CHECKS]
        if unknown:
            raise ConfigError(f"unknown checks {unknown} in sweep.checks")
        kwargs["checks"] = tuple(checks)
    if "coefficients" in sweep:
        profiles = _as_list(sweep["coefficients"], "sweep.coefficients")
        if not all(c in ("unit", "variable") for c in profiles):
            raise ValidationError("sweep.coefficients entries must be 'unit' or 'variable'")
        kwargs["coefficients"] = tuple(profiles)
    if "kernel_length" in sweep:
        m = sweep["kernel_length"]
        if not _is_int(m) or m < 0:
            raise ValidationError("sweep.kernel_length must be a non-negative integer")
        kwargs["kernel_length"] = m
    if "h" in doc:
        kwargs["h"] = float(doc["h"])
    values = _coefficient_values(doc)
    if values:
        kwargs["coefficients"] = values
    return SuiteConfig(**kwargs)


def _as_list(value, where: str) -> list:
    if isinstance(value, list):
        return value
    if isinstance(value, (int, float, str)) and not isinstance(value, bool):
        return [value]
    raise ConfigError(f"key {where!r} must be a value or a list")


def parse_config(text: str, command: str = "solve") -> RunSpec:
    """Parse and validate a JSON problem configuration.

    ``solve`` requires ``form``, ``mu`` and ``grid``. ``verify`` accepts either
    a ``sweep`` object, a single problem (``form``, ``mu``, ``grid``) or
    nothing at all for the default sweep.

    :raises ConfigError: malformed JSON (with line and column) or a schema violation.
    :raises ValidationError: a value outside its domain.
    """
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(
            f"malformed JSON at line {exc.lineno} column {exc.colno}: {exc.msg}") from None
    if not isinstance(doc, dict):
        raise ConfigError("configuration must be a JSON object")
    _check_keys(doc, TOP_KEYS, "configuration")

    seed = doc.get("seed", DEFAULT_SEED)
    if not _is_int(seed) or seed < 0:
        raise ConfigError("key 'seed' must be a non-negative integer")
    trials = doc.get("trials", 100)
    if not _is_int(trials) or trials < 1:
        raise ConfigError("key 'trials' must be a positive integer")

    problem_keys = {"form", "mu", "grid"}
    has_problem = bool(problem_keys & set(doc))
    if command == "solve" or (has_problem and "sweep" not in doc):
        missing = sorted(problem_keys - set(doc))
        if missing:
            raise ConfigError(f"missing required key {missing[0]!r}")
    if command == "solve" and "sweep" in doc:
        raise ConfigError("unknown key 'sweep' for command solve")

    form = mu = grid = coeffs = None
    if problem_keys <= set(doc):
        if doc["form"] not in ("rl", "gl"):
            raise ValidationError(f"form must be 'rl' or 'gl', got {doc['form']!r}")
        form = Form(doc["form"])
        mu = _parse_mu(doc["mu"])
        grid = _parse_grid(form, doc)
        coeffs = sample_coefficients(_coefficient_values(doc), grid)

    sweep = None
    if command == "verify":
        if "sweep" in doc:
            if not isinstance(doc["sweep"], dict):
                raise ConfigError("key 'sweep' must be an object")
            sweep = _parse_sweep(doc["sweep"], doc, seed, trials)
        elif form is not None:
            values = _coefficient_values(doc)
            sweep = SuiteConfig(
                mus=(mu.mu,), sizes=(grid.size,), forms=(form.value,),
                coefficients=values if values else ("unit", "variable"),
                seed=seed, trials=trials, h=grid.h)
        else:
            sweep = SuiteConfig(seed=seed, trials=trials,
                                **({"h": float(doc["h"])} if "h" in doc else {}))

    return RunSpec(command, form, mu, grid, coeffs, seed, trials, sweep, raw=doc)

# }}}


# {{{ commands

def _write_rows(path: Path, rows, header: Sequence[str] | None = None) -> None:
    with open(path, "w", encoding="utf-8", newline="") as f:
        writer = csv.writer(f, lineterminator="\n")
        if header is not None:
            writer.writerow(header)
        for row in rows:
            writer.writerow(row)


def cmd_solve(spec: RunSpec, out: Path, plot: bool = False) -> int:
    """Assemble, solve and write ``eigenvalues.csv``, ``eigenvectors.csv`` and ``manifest.json``."""
    problem = assemble(spec.form, spec.coefficients, spec.grid, spec.mu)
    decomp = generalized_symmetric_eigen(problem.matrix.entries, problem.weight)

    out.mkdir(parents=True, exist_ok=True)
    _write_rows(out / "eigenvalues.csv", ([format_float(v)] for v in decomp.values))
    _write_rows(out / "eigenvectors.csv",
                ([format_float(x) for x in row] for row in decomp.vectors))

    files = ["eigenvalues.csv", "eigenvectors.csv", "manifest.json"]
    if plot:
        from .plotting import plot_eigenfunctions, plot_spectrum
        plot_eigenfunctions(problem.grid.points, decomp, out / "eigenfunctions.png")
        plot_spectrum(decomp.values, out / "spectrum.png")
        files += ["eigenfunctions.png", "spectrum.png"]

    manifest = {
        "version": __version__,
        "command": "solve",
        "spec": spec.raw,
        "grid": problem.grid.to_dict(),
        "size": problem.size,
        "residuals": [float(x) for x in decomp.residuals],
        "max_scaled_residual": residual_check(problem, decomp),
        "sweeps": decomp.meta["sweeps"],
        "files": files,
    }
    with open(out / "manifest.json", "w", encoding="utf-8") as f:
        json.dump(manifest, f, indent=2, sort_keys=True)
        f.write("\n")
    return EXIT_OK


def cmd_verify(spec: RunSpec, out: Path, plot: bool = False) -> int:
    """Run the verification suite and write ``report.json``; exit 3 if any check fails."""
    report = run_suite(spec.suite_config())
    out.mkdir(parents=True, exist_ok=True)
    with open(out / "report.json", "w", encoding="utf-8") as f:
        f.write(report.to_json())
    if plot:
        from .plotting import plot_report
        plot_report(report, out / "report.png")
    return EXIT_OK if report.ok else EXIT_CHECK_FAILED


def cmd_kernels(spec: RunSpec, out: Path) -> int:
    """Write ``kernels.csv`` with columns ``k, gl_weight, rl_sum, rl_diff``."""
    m = spec.m
    w = gl_weights(spec.mu, m).coeffs
    c = rl_sum_kernel(spec.mu, m).coeffs
    e = rl_diff_kernel(spec.mu, m).coeffs
    out.mkdir(parents=True, exist_ok=True)
    _write_rows(out / "kernels.csv",
                ([str(k), format_float(w[k]), format_float(c[k]), format_float(e[k])]
                 for k in range(m + 1)),
                header=["k", "gl_weight", "rl_sum", "rl_diff"])
    return EXIT_OK

# }}}


class _Parser(argparse.ArgumentParser):
    # argparse uses 2 for usage errors, which here means a numerical failure
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_INVALID, f"{self.prog}: error: {message}\n")


def _build_parser() -> argparse.ArgumentParser:
    parser = _Parser(
        prog="dfsl", description="Discrete fractional Sturm-Liouville toolkit.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("solve", help="solve one eigenproblem")
    p.add_argument("--config", required=True, type=Path)
    p.add_argument("--out", required=True, type=Path)
    p.add_argument("--plot", action="store_true", help="also render PNG figures")

    p = sub.add_parser("verify", help="run the verification suite")
    p.add_argument("--config", type=Path, help="JSON sweep or problem; default sweep if omitted")
    p.add_argument("--out", required=True, type=Path)
    p.add_argument("--plot", action="store_true", help="also render a PNG summary")

    p = sub.add_parser("kernels", help="dump the coefficient sequences")
    p.add_argument("--mu", required=True, type=float)
    p.add_argument("--m", required=True, type=int)
    p.add_argument("--out", required=True, type=Path)
    return parser


def _error(msg: str) -> None:
    print(f"dfsl: error: {msg}", file=sys.stderr)


def main(argv: Sequence[str] | None = None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        if args.command == "kernels":
            if args.m < 0:
                raise ValidationError(f"m must be non-negative, got {args.m}")
            spec = RunSpec("kernels", mu=as_order(args.mu), m=args.m)
            return cmd_kernels(spec, args.out)

        text = "{}"
        if args.config is not None:
            try:
                text = args.config.read_text(encoding="utf-8")
            except OSError as exc:
                raise ConfigError(f"cannot read config: {exc}") from None
        spec = parse_config(text, args.command)
        if args.command == "solve":
            return cmd_solve(spec, args.out, args.plot)
        return cmd_verify(spec, args.out, args.plot)
    except ValidationError as exc:
        _error(str(exc))
        return EXIT_INVALID
    except ConvergenceError as exc:
        _error(str(exc))
        return EXIT_NUMERICAL


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
