import json
import math
import subprocess
import sys

import numpy as np
import pytest

from metric_coreset.cli import EXIT_ERROR, EXIT_OK, EXIT_VERIFY_FAILED, UsageError, main, parse_args
from metric_coreset.coreset import PipelineReport
from metric_coreset.cover import AssignmentMap
from metric_coreset.errors import DatasetError
from metric_coreset.io import (detect_format, dumps, format_coords, format_matrix, load_dataset,
                               parse_coords, parse_matrix)
from metric_coreset.metric import WeightedPointSet
from metric_coreset.verify import coreset_bounds


@pytest.fixture
def line_file(tmp_path):
    path = tmp_path / "pts.csv"
    path.write_text("# four points on a line\n0\n1\n\n10\n11\n")
    return path


@pytest.fixture
def blob_file(tmp_path):
    rng = np.random.default_rng(0)
    X = np.vstack([rng.normal(c, 0.5, size=(7, 2)) for c in ((0, 0), (6, 0))])
    path = tmp_path / "blobs.txt"
    path.write_text(format_coords(X))
    return path


def _json(capsys):
    return json.loads(capsys.readouterr().out)


def test_parse_args_defaults(tmp_path):
    cfg = parse_args(["solve", "--input", "pts.csv", "--objective", "median", "--k", "5",
                      "--eps", "0.25"])
    assert cfg.mode == "solve" and cfg.L is None
    assert cfg.resolve_L(1000) == round((1000 / 5) ** (1 / 3))
    assert parse_args(["--input", "x", "--k", "1"]).mode == "solve"
    assert parse_args(["--mode", "oracle", "--input", "x", "--k", "1"]).mode == "oracle"


@pytest.mark.parametrize("argv,needle", [
    (["--objective", "means", "--eps", "0.2"], "eps + eps^2 <= 1/8"),
    (["--eps", "1.5"], "(0, 1)"),
    (["--eps", "0"], "(0, 1)"),
    (["--m", "1", "--k", "2"], "--m"),
    (["--beta", "3"], "beta"),
    (["--bogus"], "unrecognized"),
    (["verify"], "--coreset"),
])
def test_parse_args_rejections(argv, needle):
    base = ["--input", "x", "--k", "1"]
    with pytest.raises(UsageError) as info:
        parse_args(base + argv)
    assert needle in str(info.value)


def test_unsafe_eps_allows_means():
    cfg = parse_args(["--input", "x", "--k", "1", "--objective", "means", "--eps", "0.2",
                      "--unsafe-eps"])
    assert cfg.unsafe_eps
    assert parse_args(["--input", "x", "--k", "1", "--t-solver", "bicriteria-seeding",
                       "--beta", "30"]).beta == 30


def test_usage_error_exit_code(capsys, line_file):
    assert main(["--input", str(line_file), "--k", "2", "--eps", "1.5"]) == EXIT_ERROR
    assert "(0, 1)" in capsys.readouterr().err


def test_solve_line_instance(capsys, line_file):
    rc = main(["solve", "--input", str(line_file), "--k", "2", "--eps", "0.25",
               "--final-solver", "brute-force"])
    assert rc == EXIT_OK
    out = _json(capsys)
    assert out["cost"] <= coreset_bounds("median", 0.25).ratio_alpha1 * 2.0
    assert out["n"] == 4
    PipelineReport.from_dict(out["report"])


def test_oracle_and_cover_modes(capsys, line_file):
    assert main(["oracle", "--input", str(line_file), "--k", "2"]) == EXIT_OK
    assert _json(capsys)["cost"] == 2.0
    assert main(["cover", "--input", str(line_file), "--k", "2", "--eps", "0.5",
                 "--t-solver", "brute-force"]) == EXIT_OK
    out = _json(capsys)
    assert out["R"] == 0.5 and out["coreset"]["weights"] == [1, 1, 1, 1]


@pytest.mark.parametrize("extra", [[], ["--rounds", "1"], ["--objective", "means", "--eps", "0.1"],
                                   ["--cover-policy", "seeded-random", "--seed-cover", "4"]])
def test_coreset_verify_round_trip(capsys, tmp_path, blob_file, extra):
    out = tmp_path / "c.json"
    base = ["--input", str(blob_file), "--k", "2"]
    assert main(["coreset", *base, "--eps", "0.2", "--output", str(out), *extra]) == EXIT_OK
    doc = json.loads(out.read_text())
    assert sum(doc["coreset"]["weights"]) == 14
    rc = main(["verify", *base, "--coreset", str(out)])
    result = _json(capsys)
    assert rc == EXIT_OK and result["passed"], result


def test_verify_detects_corrupted_weight(capsys, tmp_path, blob_file):
    out = tmp_path / "c.json"
    base = ["--input", str(blob_file), "--k", "2", "--eps", "0.2"]
    assert main(["coreset", *base, "--output", str(out)]) == EXIT_OK
    doc = json.loads(out.read_text())
    doc["coreset"]["weights"][0] += 1
    out.write_text(json.dumps(doc))
    capsys.readouterr()
    assert main(["verify", *base, "--coreset", str(out)]) == EXIT_VERIFY_FAILED
    result = _json(capsys)
    bounded = next(c for c in result["checks"] if c["name"] == "bounded")
    assert not bounded["passed"]
    assert bounded["witness"] == doc["coreset"]["ids"][0]


def test_verify_detects_partial_map(capsys, tmp_path, line_file):
    path = tmp_path / "c.json"
    m = AssignmentMap([0, 1, 2], [0, 0, 2])
    path.write_text(dumps({"coreset": m.weights().to_dict(), "assignment": m.to_dict(),
                           "k": 2, "eps": 0.25, "objective": "median"}))
    assert main(["verify", "--input", str(line_file), "--k", "2",
                 "--coreset", str(path)]) == EXIT_VERIFY_FAILED
    assert _json(capsys)["checks"][0]["witness"] == 3


def test_outputs_byte_identical(tmp_path, blob_file):
    texts = []
    for i, threads in enumerate((1, 1, 2)):
        out = tmp_path / f"s{i}.json"
        assert main(["solve", "--input", str(blob_file), "--k", "2", "--eps", "0.3",
                     "--l-partitions", "2", "--threads", str(threads),
                     "--output", str(out)]) == EXIT_OK
        texts.append(out.read_bytes())
    assert texts[0] == texts[1] == texts[2]


def test_missing_and_bad_input(capsys, tmp_path):
    assert main(["--input", str(tmp_path / "nope.csv"), "--k", "1"]) == EXIT_ERROR
    bad = tmp_path / "bad.csv"
    bad.write_text("1,2\n3\n")
    assert main(["--input", str(bad), "--k", "1"]) == EXIT_ERROR
    assert "bad.csv:2" in capsys.readouterr().err
    ok = tmp_path / "ok.csv"
    ok.write_text("1\n2\n")
    assert main(["--input", str(ok), "--k", "3"]) == EXIT_ERROR


def test_module_entry_point(line_file):
    proc = subprocess.run([sys.executable, "-m", "metric_coreset", "oracle", "--input",
                           str(line_file), "--k", "2"], capture_output=True, text=True)
    assert proc.returncode == 0 and json.loads(proc.stdout)["cost"] == 2.0
    helptext = subprocess.run([sys.executable, "-m", "metric_coreset", "--help"],
                              capture_output=True, text=True).stdout
    for flag in ("--l-partitions", "--t-solver", "--final-solver", "--unsafe-eps", "--threads",
                 "--seed-partition", "--seed-solver", "--seed-cover", "--beta", "--m"):
        assert flag in helptext


# dataset formats

def test_parse_coords_variants():
    X = parse_coords("# c\n1, 2\n3 4\n\n5,\t6\n")
    assert X.tolist() == [[1, 2], [3, 4], [5, 6]]
    with pytest.raises(DatasetError) as info:
        parse_coords("1 2\nx 3\n", "f.txt")
    assert str(info.value).startswith("f.txt:2")
    with pytest.raises(DatasetError):
        parse_coords("# nothing\n")


def test_parse_matrix():
    text = "matrix 3\n0\n1 0\n2 1 0\n"
    D = parse_matrix(text)
    assert D.tolist() == [[0, 1, 2], [1, 0, 1], [2, 1, 0]]
    assert detect_format(text) == "matrix" and detect_format("0 1\n") == "coords"
    for broken in ("matrix x\n", "matrix 2\n0\n", "matrix 2\n0\n1 1\n",
                   "matrix 2\n0\n1\n", "matrix 1\n0\n5\n"):
        with pytest.raises(DatasetError):
            parse_matrix(broken)


def test_format_round_trip(tmp_path):
    rng = np.random.default_rng(0)
    X = rng.normal(size=(6, 3))
    p = tmp_path / "x.txt"
    p.write_text(format_coords(X))
    assert np.array_equal(load_dataset(p).data, X)
    D = np.array([[0, 1.5, 2], [1.5, 0, 1], [2, 1, 0]])
    q = tmp_path / "d.txt"
    q.write_text(format_matrix(D))
    sp = load_dataset(q)
    assert sp.is_matrix and np.array_equal(sp.data, D)
    q.write_text("matrix 3\n0\n1 0\n9 1 0\n")
    with pytest.raises(DatasetError):
        load_dataset(q)


def test_serialization_round_trips():
    W = WeightedPointSet([1, 4, 9], [2, 1, 5])
    assert WeightedPointSet.from_dict(json.loads(dumps(W.to_dict()))) == W
    m = AssignmentMap([0, 1, 2], [1, 1, 2])
    assert AssignmentMap.from_dict(json.loads(dumps(m.to_dict()))) == m
    assert dumps({"b": 1, "a": math.pi}).index('"a"') < dumps({"b": 1, "a": 1}).index('"b"')
