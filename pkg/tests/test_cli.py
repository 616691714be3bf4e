import json
import subprocess
import sys

import numpy as np
import pytest

from cohmismatch.cli import density_to_json, main, pure_to_json
from cohmismatch.extremal import worst_case_delta
from cohmismatch.states import haar_random_pure


def _write(tmp_path, name, obj):
    p = tmp_path / name
    p.write_text(json.dumps(obj))
    return str(p)


def _rows(path):
    lines = [line for line in open(path).read().splitlines() if not line.startswith("#")]
    head = lines[0].split(",")
    return head, [dict(zip(head, line.split(","))) for line in lines[1:]]


def test_analyze_pure(tmp_path, capsys):
    psi = haar_random_pure(3, 1)
    s = _write(tmp_path, "rho.json", density_to_json(psi.density()))
    p = _write(tmp_path, "psi.json", pure_to_json(psi))
    assert main(["analyze", s, p]) == 0
    out = json.loads(capsys.readouterr().out)
    assert out["c"] == pytest.approx(0.0, abs=1e-12)
    assert out["Delta_bound"] == pytest.approx(0.0, abs=1e-12)
    assert out["lower_bound"] == pytest.approx(0.0, abs=1e-12)
    assert out["delta_bound"] == pytest.approx(0.0, abs=1e-12)


def test_analyze_worst_case(tmp_path):
    rho, psi = worst_case_delta(4, 0.85, 0.6, seed=2)
    s = _write(tmp_path, "rho.json", density_to_json(rho))
    p = _write(tmp_path, "psi.json", pure_to_json(psi))
    out = tmp_path / "rep.json"
    assert main(["analyze", s, p, "--out", str(out)]) == 0
    rep = json.loads(out.read_text())
    assert rep["c"] == pytest.approx(rep["delta_bound"], abs=1e-10)
    assert rep["copies_general"] >= 2


def test_exit_codes(tmp_path):
    psi = haar_random_pure(3, 1)
    s = _write(tmp_path, "rho.json", density_to_json(psi.density()))
    p2 = _write(tmp_path, "psi2.json", pure_to_json(haar_random_pure(2, 1)))
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    assert main(["analyze", s, p2]) == 3
    assert main(["analyze", str(bad), p2]) == 2
    assert main(["analyze", str(tmp_path / "missing.json"), p2]) == 4
    assert main(["fig-eigvals", "--samples", "3", "--large-samples", "5"]) == 5
    with pytest.raises(SystemExit) as e:
        main(["fig-trdist", "--dims", "nonsense"])
    assert e.value.code == 2


def test_fig_trdist_bounds_and_determinism(tmp_path):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    for path in (a, b):
        assert main(["fig-trdist", "--samples", "200", "--dims", "2:16", "--seed", "4", "--out", str(path)]) == 0
    assert a.read_bytes() == b.read_bytes()
    _, rows = _rows(a)
    assert len(rows) == 200
    for r in rows:
        assert float(r["obs_error_general"]) <= float(r["bound_general"]) + 1e-12
        assert float(r["obs_error_eigenstate"]) <= float(r["bound_eigenstate"]) + 1e-12


def test_fig_trdist_worker_independent(tmp_path):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    main(["fig-trdist", "--samples", "50", "--seed", "9", "--out", str(a)])
    main(["fig-trdist", "--samples", "50", "--seed", "9", "--workers", "3", "--out", str(b)])
    assert a.read_bytes() == b.read_bytes()


def test_fig_eigvals(tmp_path):
    out = tmp_path / "e.csv"
    assert main(["fig-eigvals", "--samples", "300", "--large-samples", "20", "--dims-large", "2:128", "--out", str(out)]) == 0
    text = out.read_text()
    assert "# seed: 0" in text
    _, rows = _rows(out)
    small = [r for r in rows if r["dim_class"] == "small"]
    assert len(small) == 280
    for r in rows:
        c, bound = float(r["c"]), float(r["delta_bound"])
        assert c <= bound + 1e-10


def test_fig_commutators(tmp_path):
    out = tmp_path / "c.csv"
    assert main(["fig-commutators", "--samples", "300", "--dims", "2:16", "--out", str(out)]) == 0
    _, rows = _rows(out)
    for r in rows:
        assert float(r["lower"]) <= float(r["c"]) + 1e-12 <= float(r["upper"]) + 2e-12


def test_fig_noisemodel_json(tmp_path):
    out = tmp_path / "n.json"
    args = ["fig-noisemodel", "--qubits", "2", "--nu", "20", "--samples", "3", "--xi-grid", "0.1:1:3", "--format", "json", "--out", str(out)]
    assert main(args) == 0
    data = json.loads(out.read_text())
    assert data["metadata"]["seed"] == 0
    assert len(data["rows"]) == 9
    cols = data["columns"]
    for row in data["rows"]:
        r = dict(zip(cols, row))
        assert r["sigma2"] <= r["worst_case"]


def test_fig_noisemodel_config(tmp_path):
    cfg = _write(tmp_path, "cfg.json", {"qubits": [2], "gates": 10, "channel": "dephasing", "xi_grid": [0.2, 0.4], "samples": 2, "seed": 5})
    out = tmp_path / "n.csv"
    assert main(["fig-noisemodel", "--config", cfg, "--out", str(out)]) == 0
    _, rows = _rows(out)
    assert len(rows) == 4 and {r["channel"] for r in rows} == {"dephasing"}


def test_module_entry_point(tmp_path):
    r = subprocess.run([sys.executable, "-m", "cohmismatch", "--version"], capture_output=True, text=True)
    assert r.returncode == 0 and r.stdout.strip()
