import json

import numpy as np

from sdckit.cli import run
from sdckit.matcore import f_mat


def write_matrices(path, mats):
    path.write_text(json.dumps({"matrices": [np.asarray(m).tolist() for m in mats]}))


def test_gen_and_check_sdc(tmp_path, capsys):
    out = tmp_path / "a.json"
    assert run(["gen", "--n", "6", "--k", "0", "--m", "40", "--seed", "1",
                "-o", str(out)]) == 0
    assert run(["check-sdc", "-i", str(out)]) == 0
    out2 = tmp_path / "b.json"
    assert run(["gen", "--n", "6", "--k", "1", "--m", "40", "--seed", "1",
                "-o", str(out2)]) == 0
    assert run(["check-sdc", "-i", str(out2)]) == 10


def test_gen_idempotent(tmp_path):
    a = tmp_path / "a.json"
    b = tmp_path / "b.json"
    run(["gen", "--n", "5", "--k", "1", "--m", "30", "--seed", "3", "-o", str(a)])
    run(["gen", "--n", "5", "--k", "1", "--m", "30", "--seed", "3", "-o", str(b)])
    assert a.read_text() == b.read_text()


def test_rsdc_pipeline(tmp_path):
    inst = tmp_path / "inst.json"
    cert = tmp_path / "cert.json"
    run(["gen", "--n", "8", "--k", "2", "--m", "50", "--seed", "7", "-o", str(inst)])
    assert run(["rsdc1", "-i", str(inst), "-o", str(cert)]) == 0
    data = json.loads(cert.read_text())
    assert data["order_added"] == 1
    assert run(["rsdc2", "-i", str(inst), "-o", str(cert), "--strategy",
                "spread"]) == 0
    assert json.loads(cert.read_text())["order_added"] == 2


def test_canon_dump(tmp_path, capsys):
    path = tmp_path / "pair.json"
    write_matrices(path, [f_mat(2), np.diag([1.0, -1.0])])
    assert run(["canon", "-i", str(path)]) == 0
    out = json.loads(capsys.readouterr().out)
    assert out["r"] == 0 and out["k"] == 1


def test_check_asdc_dispatch(tmp_path, capsys):
    pair = tmp_path / "pair.json"
    write_matrices(pair, [f_mat(2), np.array([[0.0, 1.0], [1.0, 1.0]])])
    assert run(["check-asdc", "-i", str(pair)]) == 0
    assert "ASDC_not_SDC" in capsys.readouterr().out
    bad = tmp_path / "bad.json"
    write_matrices(bad, [f_mat(2), np.diag([1.0, -1.0])])
    assert run(["check-asdc", "-i", str(bad)]) == 10


def test_reformulate_and_verify(tmp_path):
    inst = tmp_path / "inst.json"
    ref = tmp_path / "ref.json"
    run(["gen", "--n", "6", "--k", "1", "--m", "40", "--seed", "2", "-o", str(inst)])
    assert run(["reformulate", "-i", str(inst), "--method", "rsdc2",
                "-o", str(ref)]) == 0
    assert run(["verify", "-i", str(inst), "-r", str(ref), "--samples",
                "30"]) == 0


def test_precondition_exit_code(tmp_path):
    pair = tmp_path / "sing.json"
    write_matrices(pair, [np.diag([1.0, 0.0]), np.eye(2)])
    assert run(["canon", "-i", str(pair)]) == 2


def test_malformed_input(tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    assert run(["check-sdc", "-i", str(bad)]) == 1
    missing = tmp_path / "missing.json"
    assert run(["check-sdc", "-i", str(missing)]) == 1


def test_counterexamples(tmp_path, capsys):
    out = tmp_path / "ce"
    assert run(["counterexamples", "-o", str(out)]) == 0
    assert (out / "seven_tuple.json").exists()
    assert run(["check-asdc", "-i", str(out / "seven_tuple.json")]) == 10


def test_bench(tmp_path):
    rep = tmp_path / "rep.csv"
    assert run(["bench", "--grid", "n=5;k=1", "--seeds", "1", "--m", "30",
                "--methods", "rsdc1,rsdc2", "-o", str(rep)]) == 0
    text = rep.read_text()
    assert text.startswith("n,k,seed,method")
    assert (tmp_path / "rep.json").exists()
