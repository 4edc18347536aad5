import csv
import io
import json
import math

import pytest

from shintani.cli import EXIT_FAIL, EXIT_INPUT, EXIT_OK, main, parse_complex, parse_points

BETA_PROBLEM = {
    "r": 1, "A": [[1]], "x": [0.5], "y": [0.5], "chi": [1],
    "s": [[{"re": 2, "im": 0}], [[3, 0]], [[0, 0]], [[-2, 0]], [1]],
    "variant": "NORMALIZED",
}


def write(tmp_path, data, name="p.json"):
    path = tmp_path / name
    path.write_text(json.dumps(data) if not isinstance(data, str) else data)
    return str(path)


def run(argv, capsys):
    code = main(argv)
    return code, capsys.readouterr()


def test_eval_beta_values(tmp_path, capsys):
    code, out = run(["eval", write(tmp_path, BETA_PROBLEM)], capsys)
    assert code == EXIT_OK
    report = json.loads(out.out)
    values = [complex(c["value"]["re"], c["value"]["im"]) for c in report["cases"]]
    assert values[0] == pytest.approx(3.6638623767088760602, abs=1e-12)
    assert values[1] == pytest.approx(7.7515691700749550439, abs=1e-12)
    assert values[2] == pytest.approx(0.5, abs=1e-14)
    assert values[3] == pytest.approx(-0.125, abs=1e-14)
    assert values[4] == pytest.approx(math.pi / 2, abs=1e-14)
    assert report["summary"] == {"cases": 5, "errors": 0, "passed": True}


def test_csv_matches_json(tmp_path, capsys):
    path = write(tmp_path, BETA_PROBLEM)
    _, js = run(["eval", path], capsys)
    _, cs = run(["eval", path, "--format", "csv"], capsys)
    rows = list(csv.DictReader(io.StringIO(cs.out)))
    cases = json.loads(js.out)["cases"]
    assert len(rows) == len(cases)
    for row, case in zip(rows, cases):
        assert float(row["value.re"]) == case["value"]["re"]
        assert float(row["value.im"]) == case["value"]["im"]
        assert row["method"] == case["method"]


def test_completed_factor_check(tmp_path, capsys):
    problem = dict(BETA_PROBLEM, s=[[[0.3, 0.7]]], variant="COMPLETED")
    code, out = run(["eval", write(tmp_path, problem)], capsys)
    assert code == EXIT_OK
    case = json.loads(out.out)["cases"][0]
    assert case["factor_check"] <= 1e-14
    assert "uncompleted" in case and "factor" in case


def test_out_file_and_determinism(tmp_path, capsys):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    argv = ["check", "fe", "--r", "1", "--samples", "5", "--seed", "3"]
    assert main(argv + ["--out", str(a)]) == EXIT_OK
    assert main(argv + ["--out", str(b)]) == EXIT_OK
    assert a.read_bytes() == b.read_bytes()
    assert capsys.readouterr().out == ""


@pytest.mark.parametrize("data", [
    "{not json",
    {"r": 1, "A": [[1]], "x": [0.5], "y": [0.5]},
    {"r": 2, "A": [[1, 2], [2, 4]], "x": [0.5, 0.5], "y": [0.5, 0.5], "chi": [0, 0], "s": [1, 1]},
    {"r": 1, "A": [[1]], "x": [0.5], "y": [0.5], "chi": [1], "s": [2], "extra": 1},
    {"r": 1, "A": [[1]], "x": [0.5], "y": [1.0], "chi": [1], "s": [2]},
    {"r": 1, "A": [[1]], "x": [0.5], "y": [0.5], "chi": [2], "s": [2]},
    {"r": 1, "A": [[1]], "x": [0.5], "y": [0.5], "chi": [1], "s": [2], "variant": "HALF"},
])
def test_invalid_problem_files(tmp_path, capsys, data):
    code, out = run(["eval", write(tmp_path, data)], capsys)
    assert code == EXIT_INPUT
    assert "invalid input" in out.err


def test_missing_file_and_bad_flags(tmp_path, capsys):
    assert main(["eval", str(tmp_path / "nope.json")]) == EXIT_INPUT
    with pytest.raises(SystemExit) as info:
        main(["check", "fe", "--quad-step", "2"])
    assert info.value.code == EXIT_INPUT
    with pytest.raises(SystemExit) as info:
        main(["check", "nonsense"])
    assert info.value.code == EXIT_INPUT
    assert main(["check", "derivative", "--r", "3"]) == EXIT_INPUT
    capsys.readouterr()


def test_evaluation_error_exits_one(tmp_path, capsys):
    problem = {"r": 2, "A": [[1, -1], [0.5, 2]], "x": [0.3, 0.6], "y": [0.2, 0.7],
               "chi": [0, 1], "s": [3, 3], "method": "dirichlet"}
    code, out = run(["eval", write(tmp_path, problem)], capsys)
    assert code == EXIT_FAIL
    case = json.loads(out.out)["cases"][0]
    assert case["status"] == "error" and "NonPositiveMatrix" in case["error"]


def test_impossible_tolerance_exits_one(capsys):
    code, out = run(["check", "fe", "--samples", "2", "--tol", "1e-300"], capsys)
    assert code == EXIT_FAIL
    assert json.loads(out.out)["summary"]["passed"] is False


def test_special_suite_exact_zeros(capsys):
    code, out = run(["check", "special", "--kmax", "2", "--seed", "7"], capsys)
    assert code == EXIT_OK
    cases = json.loads(out.out)["cases"]
    zeros = [c for c in cases if c["kind"] == "zero"]
    assert zeros and all(c["exact_zero"] for c in zeros)
    assert {c["kind"] for c in cases} == {"negative", "zero", "positive"}


def test_fe_suite_degree_two(capsys):
    code, out = run(["check", "fe", "--r", "2", "--samples", "50", "--seed", "42", "--tol", "1e-8"], capsys)
    assert code == EXIT_OK
    summary = json.loads(out.out)["summary"]
    assert summary["cases"] == 50 and summary["max_residual"] <= 1e-8


def test_oracle_suite_degree_one(capsys):
    code, out = run(["check", "oracle", "--r", "1"], capsys)
    assert code == EXIT_OK
    assert json.loads(out.out)["summary"]["max_residual"] <= 1e-9


@pytest.mark.parametrize("kind", ["fe", "fourier", "oracle", "derivative"])
def test_suites_pass_in_degree_two(kind, capsys):
    code, out = run(["check", kind, "--r", "2", "--samples", "2", "--seed", "42"], capsys)
    assert code == EXIT_OK
    summary = json.loads(out.out)["summary"]
    assert summary["passed"] and summary["cases"] == 2


def test_parse_helpers():
    assert parse_complex({"re": 1, "im": -2}) == 1 - 2j
    assert parse_complex([0.5, 3]) == 0.5 + 3j
    assert parse_complex(4) == 4
    pts = parse_points([[1, 2]], 2)
    assert len(pts) == 1 and list(pts[0]) == [1, 2]
    pts = parse_points([[1, 0.5]], 1)
    assert pts[0][0] == 1 + 0.5j
    # two [re, im] pairs form one point of degree two; several points nest once more
    assert len(parse_points([[1, 2], [3, 4]], 2)) == 1
    assert len(parse_points([[[1, 0], 2], [3, [4, 0]]], 2)) == 2
