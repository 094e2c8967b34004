import csv
import json

import numpy as np
import pytest

from dfsl import cli
from dfsl.assembly import Form
from dfsl.cli import ConfigError, format_float, main, parse_config
from dfsl.errors import ConvergenceError, ValidationError
from dfsl.verify import SuiteConfig


def write_config(tmp_path, doc, name="config.json"):
    path = tmp_path / name
    path.write_text(doc if isinstance(doc, str) else json.dumps(doc))
    return str(path)


def read_csv(path):
    with open(path, newline="") as f:
        return list(csv.reader(f))


# {{{ parsing

def test_parse_gl_problem():
    spec = parse_config('{"form": "gl", "mu": 0.5, "grid": {"n": 3}, "h": 0.5, "r": [1, 2, 3, 4]}')
    assert spec.form is Form.GL
    assert spec.mu.mu == 0.5
    assert spec.grid.size == 4 and spec.grid.h == 0.5
    assert spec.coefficients.r.tolist() == [1.0, 2.0, 3.0, 4.0]
    assert spec.coefficients.p.tolist() == [1.0] * 4


def test_parse_rl_problem():
    spec = parse_config('{"form": "rl", "mu": 1, "grid": {"a": 0, "b": 5}, "q": 2}')
    assert spec.grid.points.tolist() == [1.0, 2.0, 3.0, 4.0]
    assert spec.coefficients.q.tolist() == [2.0] * 4


@pytest.mark.parametrize("text, match", [
    ('{"form": "gl", "mu": 0.5, "grid": {"n": 3}, "colour": 1}', "unknown key 'colour'"),
    ('{"form": "gl", "mu": 0.5}', "missing required key 'grid'"),
    ('{"form": "rl", "mu": 0.5, "grid": {"n": 3}}', "unknown key"),
    ('{"form": "gl", "mu": 0.5, "grid": {"n": 3}, "sweep": {}}', "sweep"),
    ('[1, 2]', "JSON object"),
])
def test_parse_schema_errors(text, match):
    with pytest.raises(ConfigError, match=match):
        parse_config(text)


def test_parse_malformed_json_position():
    with pytest.raises(ConfigError, match="line 2 column"):
        parse_config('{"form": "gl",\n "mu": }')


@pytest.mark.parametrize("mu", [0, 1.5, -0.2, '"half"'])
def test_parse_bad_mu(mu):
    with pytest.raises(ValidationError, match=r"mu out of \(0,1\]"):
        parse_config(f'{{"form": "gl", "mu": {mu}, "grid": {{"n": 3}}}}')


def test_parse_bad_values():
    with pytest.raises(ValidationError, match="r must be positive"):
        parse_config('{"form": "gl", "mu": 0.5, "grid": {"n": 1}, "r": [1, 0]}')
    with pytest.raises(ValidationError, match="h must be"):
        parse_config('{"form": "gl", "mu": 0.5, "grid": {"n": 1}, "h": -1}')
    with pytest.raises(ValidationError, match="h must be 1"):
        parse_config('{"form": "rl", "mu": 0.5, "grid": {"a": 0, "b": 3}, "h": 0.5}')


def test_parse_verify_variants():
    default = parse_config("{}", "verify").suite_config()
    assert default == SuiteConfig()
    spec = parse_config('{"sweep": {"mu": [0.5], "N": [4], "forms": ["gl"], '
                        '"checks": ["sbp", "reality"]}, "seed": 9}', "verify")
    config = spec.suite_config()
    assert config.mus == (0.5,) and config.sizes == (4,) and config.forms == ("gl",)
    assert config.checks == ("sbp", "reality") and config.seed == 9
    single = parse_config('{"form": "rl", "mu": 0.3, "grid": {"a": 0, "b": 7}}', "verify")
    assert single.suite_config().sizes == (6,)
    with pytest.raises(ConfigError, match="unknown checks"):
        parse_config('{"sweep": {"checks": ["vibes"]}}', "verify")

# }}}


# {{{ solve

def test_solve_two_points(tmp_path, capsys):
    cfg = write_config(tmp_path, {"form": "gl", "mu": 1.0, "grid": {"n": 1}})
    out = tmp_path / "out"
    assert main(["solve", "--config", cfg, "--out", str(out)]) == 0
    rows = read_csv(out / "eigenvalues.csv")
    assert rows == [["0.38196601125010521"], ["2.6180339887498949"]]
    values = [float(r[0]) for r in rows]
    assert values == pytest.approx([(3 - 5 ** 0.5) / 2, (3 + 5 ** 0.5) / 2], abs=1e-15)
    vectors = np.array(read_csv(out / "eigenvectors.csv"), dtype=float)
    assert vectors.shape == (2, 2)
    np.testing.assert_allclose(vectors.T @ vectors, np.eye(2), atol=1e-14)
    manifest = json.loads((out / "manifest.json").read_text())
    assert manifest["spec"] == {"form": "gl", "mu": 1.0, "grid": {"n": 1}}
    assert manifest["max_scaled_residual"] <= 1e-8
    assert capsys.readouterr().out == ""


def test_solve_single_point(tmp_path):
    cfg = write_config(tmp_path, {"form": "gl", "mu": 0.5, "grid": {"n": 0}})
    out = tmp_path / "out"
    assert main(["solve", "--config", cfg, "--out", str(out)]) == 0
    assert (out / "eigenvalues.csv").read_text() == "1\n"


def test_solve_csv_round_trips_exactly(tmp_path):
    r = (1 + np.arange(12) / 12).tolist()
    cfg = write_config(tmp_path, {"form": "rl", "mu": 0.37, "grid": {"a": 0, "b": 13}, "r": r})
    out = tmp_path / "out"
    assert main(["solve", "--config", cfg, "--out", str(out)]) == 0
    spec = parse_config((tmp_path / "config.json").read_text())
    problem = cli.assemble(spec.form, spec.coefficients, spec.grid, spec.mu)
    decomp = cli.generalized_symmetric_eigen(problem.matrix.entries, problem.weight)
    values = np.array([float(v[0]) for v in read_csv(out / "eigenvalues.csv")])
    assert np.array_equal(values, decomp.values)
    vectors = np.array(read_csv(out / "eigenvectors.csv"), dtype=float)
    assert np.array_equal(vectors, decomp.vectors)
    assert b"\r" not in (out / "eigenvectors.csv").read_bytes()


def test_solve_invalid_r_writes_nothing(tmp_path, capsys):
    cfg = write_config(tmp_path, {"form": "gl", "mu": 0.5, "grid": {"n": 2}, "r": [1, -1, 1]})
    out = tmp_path / "out"
    assert main(["solve", "--config", cfg, "--out", str(out)]) == 1
    assert not out.exists()
    captured = capsys.readouterr()
    assert captured.out == ""
    assert "r must be positive" in captured.err


def test_solve_unparseable_config(tmp_path, capsys):
    cfg = write_config(tmp_path, "{not json")
    assert main(["solve", "--config", cfg, "--out", str(tmp_path / "o")]) == 1
    assert "malformed JSON" in capsys.readouterr().err


def test_missing_config_file(tmp_path):
    assert main(["solve", "--config", str(tmp_path / "nope.json"), "--out", str(tmp_path)]) == 1


def test_solve_convergence_failure(tmp_path, monkeypatch, capsys):
    def boom(*args, **kwargs):
        raise ConvergenceError("Jacobi did not converge", off_norm=1.0, sweeps=100)

    monkeypatch.setattr(cli, "generalized_symmetric_eigen", boom)
    cfg = write_config(tmp_path, {"form": "gl", "mu": 0.5, "grid": {"n": 4}})
    assert main(["solve", "--config", cfg, "--out", str(tmp_path / "o")]) == 2
    assert "converge" in capsys.readouterr().err


def test_usage_errors_are_invalid_input(capsys):
    with pytest.raises(SystemExit) as info:
        main(["solve"])
    assert info.value.code == 1

# }}}


# {{{ verify

def test_verify_subset(tmp_path, capsys):
    cfg = write_config(tmp_path, {"sweep": {"mu": [0.5, 1.0], "N": [4, 16]}})
    out = tmp_path / "out"
    assert main(["verify", "--config", cfg, "--out", str(out)]) == 0
    report = json.loads((out / "report.json").read_text())
    assert report["summary"]["failed"] == 0
    assert report["summary"]["total"] == len(report["results"]) > 0
    assert capsys.readouterr().out == ""


def test_verify_failure_exit_code(tmp_path, monkeypatch):
    real = cli.run_suite

    def tampered(config, **kwargs):
        report = real(config, **kwargs)
        bad = report.results[0]
        report.results[0] = type(bad)(**{**bad.__dict__, "status": "fail"})
        return report

    monkeypatch.setattr(cli, "run_suite", tampered)
    cfg = write_config(tmp_path, {"sweep": {"mu": [0.5], "N": [4], "checks": ["sbp"]}})
    assert main(["verify", "--config", cfg, "--out", str(tmp_path / "o")]) == 3


def test_verify_unparseable(tmp_path):
    cfg = write_config(tmp_path, '{"sweep": ')
    assert main(["verify", "--config", cfg, "--out", str(tmp_path / "o")]) == 1
    assert not (tmp_path / "o").exists()

# }}}


# {{{ kernels

def test_kernels_half(tmp_path):
    assert main(["kernels", "--mu", "0.5", "--m", "2", "--out", str(tmp_path)]) == 0
    rows = read_csv(tmp_path / "kernels.csv")
    assert rows[0] == ["k", "gl_weight", "rl_sum", "rl_diff"]
    data = np.array(rows[1:], dtype=float)
    np.testing.assert_allclose(data, [[0, 1, 1, 1], [1, -0.5, 0.5, -0.5],
                                      [2, -0.125, 0.375, -0.125]], atol=1e-16)


def test_kernels_mu_one_and_empty(tmp_path):
    assert main(["kernels", "--mu", "1", "--m", "1", "--out", str(tmp_path)]) == 0
    assert read_csv(tmp_path / "kernels.csv")[1:] == [["0", "1", "1", "1"], ["1", "-1", "1", "-1"]]
    assert main(["kernels", "--mu", "0.3", "--m", "0", "--out", str(tmp_path)]) == 0
    assert read_csv(tmp_path / "kernels.csv")[1:] == [["0", "1", "1", "1"]]


@pytest.mark.parametrize("args", [["--mu", "0", "--m", "3"], ["--mu", "0.5", "--m", "-1"]])
def test_kernels_invalid(tmp_path, args):
    out = tmp_path / "o"
    assert main(["kernels", *args, "--out", str(out)]) == 1
    assert not out.exists()

# }}}


def test_format_float():
    assert format_float(0.1) == "0.10000000000000001"
    assert float(format_float(np.pi)) == np.pi
    assert format_float(1.0) == "1"
