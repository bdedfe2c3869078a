import csv
import json

import pytest

from toeplitz_boundary.cli import RunConfig, main, parse_complex, parse_grid, run
from toeplitz_boundary.errors import PreconditionError
from toeplitz_boundary.symbol import ising


@pytest.fixture
def spec_file(tmp_path):
    p = tmp_path / "ising.json"
    p.write_text(ising(0.5).to_json())
    return p


def read_csv(path):
    with open(path, newline="") as fh:
        return list(csv.reader(fh))


def test_gcbo_example(spec_file, tmp_path, capsys):
    out = tmp_path / "gcbo.csv"
    code = main(["gcbo", "--spec", str(spec_file), "--N-min", "1", "--N-max", "5", "--out", str(out)])
    assert code == 0
    rows = read_csv(out)
    assert rows[0] == ["N", "residual"]
    assert [int(r[0]) for r in rows[1:]] == [1, 2, 3, 4, 5]
    assert all(float(r[1]) < 1e-10 for r in rows[1:])
    assert "5 rows written" in capsys.readouterr().out


def test_gcbo_k_grid_columns(spec_file, tmp_path):
    out = tmp_path / "g.csv"
    assert main(["gcbo", "--spec", str(spec_file), "--k-grid", "0.1:0.3:0.1", "--N-max", "2",
                 "--out", str(out)]) == 0
    rows = read_csv(out)
    assert rows[0] == ["k", "N", "residual"] and len(rows) == 7


def test_missing_spec(tmp_path, capsys):
    code = main(["gcbo", "--spec", str(tmp_path / "nope.json"), "--out", str(tmp_path / "x.csv")])
    assert code == 1
    assert "spec_path" in capsys.readouterr().err
    assert not (tmp_path / "x.csv").exists()


def test_bad_arguments_exit_1(capsys):
    assert main(["minima", "--n", "2"]) == 1
    assert main(["no-such-command"]) == 1


def test_numeric_failure_exit_2(tmp_path, capsys):
    p = tmp_path / "s.json"
    p.write_text(ising(0.999).to_json())
    code = main(["gcbo", "--spec", str(p), "--N-max", "2", "--out", str(tmp_path / "c.csv")])
    assert code == 2
    assert "numerical failure" in capsys.readouterr().err


def test_minima_json(tmp_path):
    out = tmp_path / "m.json"
    assert main(["minima", "--a", "2,0", "--n", "2", "--format", "json", "--out", str(out)]) == 0
    doc = json.loads(out.read_text())
    assert doc["value"] == 0 and doc["unique"] is False
    assert doc["minimizers"] == [[1, 1], [2, 0]]
    assert doc["residue"] == 0 and doc["method"] == "lattice"


def test_minima_fraction_input(tmp_path):
    out = tmp_path / "m.csv"
    assert main(["minima", "--a", "9/4,1/4", "--n", "4", "--n-max", "7", "--out", str(out)]) == 0
    rows = read_csv(out)
    assert rows[0] == ["n", "value", "unique", "residue", "method", "minimizers"]
    assert [r[2] for r in rows[1:]] == ["0", "1", "0", "1"]


def test_selberg_deterministic(tmp_path):
    paths = [tmp_path / "a.json", tmp_path / "b.json"]
    for p in paths:
        assert main(["selberg", "--n", "2", "--alpha-plus", "0.5", "--alpha-minus", "0.5",
                     "--samples", "20000", "--seed", "7", "--format", "json", "--out", str(p)]) == 0
    assert paths[0].read_bytes() == paths[1].read_bytes()


def test_threads_do_not_change_output(spec_file, tmp_path):
    outs = []
    for t in ("1", "4"):
        p = tmp_path / f"t{t}.csv"
        main(["gcbo", "--spec", str(spec_file), "--k-grid", "0.1,0.2,0.3,0.4", "--threads", t,
              "--out", str(p)])
        outs.append(p.read_bytes())
    assert outs[0] == outs[1]


def test_no_temp_files_left(spec_file, tmp_path):
    main(["gcbo", "--spec", str(spec_file), "--out", str(tmp_path / "g.csv")])
    assert sorted(p.name for p in tmp_path.iterdir()) == ["g.csv", "ising.json"]


def test_probe_reduced_json(spec_file, tmp_path):
    out = tmp_path / "p.json"
    code = main(["probe", "--spec", str(spec_file), "--n", "2", "--route", "reduced",
                 "--mu-grid", "0.01,0.003,0.001,0.0003,0.0001", "--format", "json", "--out", str(out)])
    assert code == 0
    doc = json.loads(out.read_text())
    assert doc["pass"] is True and doc["predicted_exponent"] == -1.0
    assert len(doc["derivatives"]) == 5 and len(doc["derivatives"][0]) == 2


def test_run_validates_config():
    assert run(RunConfig("gcbo", format="xml")) == 1
    assert run(RunConfig("minima", threads=-1, params={"a": "0", "n": 1})) == 1


def test_parse_grid():
    assert parse_grid("0.1:0.5:0.1") == [0.1, 0.2, 0.3, 0.4, 0.5]
    assert parse_grid("0.2,0.3") == [0.2, 0.3]
    with pytest.raises(PreconditionError):
        parse_grid("0.5:0.1:0.1")


def test_parse_complex():
    assert parse_complex("0.3,0.1") == 0.3 + 0.1j
    assert parse_complex("0.3-0.1j") == 0.3 - 0.1j
    with pytest.raises(PreconditionError):
        parse_complex("abc")
