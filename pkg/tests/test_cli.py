import json

import pytest

from bec_steering.cli import main


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_depth_example(capsys, tmp_path):
    from bec_steering.bounds import reference_table

    path = tmp_path / "cs.csv"
    path.write_text(reference_table().to_csv())
    code, out, _ = run(capsys, "depth", "--ehz", "0.1572", "--r", "1.0", "--kind", "steering",
                       "--bounds-table", str(path))
    assert code == 0
    data = json.loads(out)
    assert data["result"]["n_lower_bound"] == 42
    assert data["provenance"]["command"] == "depth"
    assert "version" in data["provenance"]


def test_evolve_zero_time_is_beam_splitter(capsys):
    code, out, _ = run(capsys, "evolve", "--n", "2", "--k", "-1", "--chi", "1", "--t", "0")
    assert code == 0
    amps = json.loads(out)["result"]["amplitudes"]
    assert [a["re"] for a in amps] == pytest.approx([0.5, 0.5**0.5, 0.5])
    assert all(a["im"] == 0 for a in amps)


def test_csv_output_has_provenance_and_header(capsys):
    code, out, _ = run(capsys, "scan", "--n", "10", "--points", "4", "--t-max", "0.1")
    lines = out.splitlines()
    assert code == 0 and lines[0].startswith("# provenance:")
    assert lines[1].startswith("t,theta,var_sx")
    assert len(lines) == 6


def test_reruns_are_byte_identical(capsys, tmp_path, monkeypatch):
    monkeypatch.chdir(tmp_path)
    outs = []
    for workers in ("1", "2"):
        (tmp_path / workers).mkdir()
        monkeypatch.chdir(tmp_path / workers)
        path = tmp_path / workers / "scan.csv"
        assert main(["scan", "--n", "30", "--points", "9", "--workers", workers,
                     "--output", "scan.csv"]) == 0
        outs.append(path.read_bytes())
    assert outs[0] == outs[1]
    monkeypatch.chdir(tmp_path)
    path = tmp_path / "b.json"
    for _ in range(2):
        assert main(["bounds", "--two-s", "1-4", "--format", "json", "--output", "b.json"]) == 0
        outs.append(path.read_bytes())
    assert outs[2] == outs[3]


def test_invalid_arguments_exit_2_without_files(capsys, tmp_path):
    path = tmp_path / "never.json"
    assert main(["depth", "--ehz", "0.1", "--r", "0", "--output", str(path)]) == 2
    assert main(["evolve", "--n", "0", "--output", str(path)]) == 2
    assert main(["nonsense"]) == 2
    assert main(["depth", "--ehz", "0.1", "--r", "1", "--bounds-table", "missing.csv",
                 "--output", str(path)]) == 2
    assert not path.exists()
    assert list(tmp_path.iterdir()) == []
    assert "error" in capsys.readouterr().err


def test_uncertified_depth(capsys):
    code, out, _ = run(capsys, "depth", "--ehz", "0.6", "--r", "1")
    assert code == 0 and json.loads(out)["result"] == {"certified": False}


def test_crosscheck_and_optimize(capsys):
    code, out, _ = run(capsys, "crosscheck", "--n", "40", "--points", "20")
    assert code == 0 and json.loads(out)["result"]["passed"]
    code, out, _ = run(capsys, "crosscheck", "--n", "40", "--points", "5", "--tolerance", "0")
    assert code == 4
    code, out, _ = run(capsys, "optimize", "--n", "50", "--grid-points", "300")
    assert code == 0
    assert abs(json.loads(out)["result"]["ratio"] - 0.1951) < 2e-4


def test_table1_with_reference_table(capsys):
    code, out, _ = run(capsys, "table1", "--n", "50,100", "--bounds-table", "reference",
                       "--grid-points", "400")
    lines = out.splitlines()
    assert code == 0
    assert lines[1].split(",")[:1] == ["n_total"]
    assert [ln.split(",")[6] for ln in lines[2:]] == ["21", "42"]


def test_convergence_error_exit_code(capsys, monkeypatch):
    from bec_steering import cli
    from bec_steering.exceptions import ConvergenceError

    def boom(*a, **k):
        raise ConvergenceError("stuck", best=0.1)

    monkeypatch.setattr(cli, "build_table", boom)
    assert main(["bounds", "--two-s", "1-2"]) == 3
