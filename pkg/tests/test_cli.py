import csv
import io
import json
import math

import numpy as np
import pytest

from oddfield.cli import fieldmap_columns, main, parse_grid, ConfigError


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


@pytest.mark.parametrize("D, C", [(5, 1 / (4 * math.pi**2)), (7, 1 / (2 * math.pi**3))])
def test_constant(capsys, D, C):
    code, out, _ = run(capsys, "constant", "--dim", str(D))
    assert code == 0
    data = json.loads(out)
    assert data["C"] == pytest.approx(C, rel=1e-14)
    assert data["n"] == (D - 3) // 2
    assert data["field_prefactor"]["confirmed"] == "2n"


def test_constant_even_dimension_rejected(capsys):
    code, _, err = run(capsys, "constant", "--dim", "4")
    assert code == 2
    assert "dimension" in err


def test_unknown_suite(capsys):
    assert run(capsys, "verify", "--suite", "nonsense")[0] == 2


def test_bad_grid_value():
    with pytest.raises(ConfigError):
        parse_grid("x1=0:1", 5)
    with pytest.raises(ConfigError):
        parse_grid("9=0:1:3", 5)
    g = parse_grid("x2=-1:1:5", 5)
    assert (g.axis, g.count) == (2, 5)


def fieldmap(capsys, *extra):
    return run(capsys, "fieldmap", "--dim", "5", "--grid", "x1=-3:3:11", "--grid", "x2=-3:3:11",
               "--t", "2", *extra)


def test_fieldmap_grid(capsys):
    code, out, _ = fieldmap(capsys)
    assert code == 0
    rows = list(csv.reader(io.StringIO(out)))
    assert rows[0] == fieldmap_columns(5)
    assert len(rows) == 122
    assert all(len(r) == len(rows[0]) for r in rows)
    F_cols = [i for i, c in enumerate(rows[0]) if c.startswith("F")]
    live = [r for r in rows[1:] if r[-1] != "skipped"]
    assert live
    assert max(abs(float(r[i])) for r in live for i in F_cols) > 0
    # x1 varies slowest, x2 fastest
    assert [float(r[2]) for r in rows[1:12]] == pytest.approx(np.linspace(-3, 3, 11).tolist())
    assert len({r[1] for r in rows[1:12]}) == 1


def test_fieldmap_skips_source_point(capsys):
    code, out, _ = fieldmap(capsys)
    rows = list(csv.reader(io.StringIO(out)))
    centre = [r for r in rows[1:] if float(r[1]) == 0.0 and float(r[2]) == 0.0]
    assert centre[0][-2:] == ["skipped", "skipped"]
    assert centre[0][5] == ""


def test_fieldmap_deterministic(capsys, tmp_path, monkeypatch):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    monkeypatch.setenv("ODDFIELD_THREADS", "1")
    assert fieldmap(capsys, "--out", str(a))[0] == 0
    monkeypatch.setenv("ODDFIELD_THREADS", "4")
    assert fieldmap(capsys, "--out", str(b))[0] == 0
    assert a.read_bytes() == b.read_bytes()


def test_fieldmap_json(capsys):
    code, out, _ = run(capsys, "fieldmap", "--grid", "x1=1:2:3", "--format", "json")
    data = json.loads(out)
    assert code == 0 and len(data["rows"]) == 3 and data["columns"] == fieldmap_columns(5)


def test_bad_thread_count(capsys, monkeypatch):
    monkeypatch.setenv("ODDFIELD_THREADS", "zero")
    assert fieldmap(capsys)[0] == 2


def test_unwritable_output(capsys, tmp_path):
    target = tmp_path / "missing" / "out.json"
    assert run(capsys, "constant", "--out", str(target))[0] == 4


def test_verify_gauge(capsys):
    code, out, _ = run(capsys, "verify", "--suite", "gauge", "--dim", "5")
    assert code == 0
    checks = {c["name"]: c for c in json.loads(out)["suites"]["gauge"]}
    assert checks["chosen_sign"]["measured"] == "plus"
    assert any(name.startswith("gap_rel") for name in checks)


def test_potential_methods_agree(capsys):
    x = "2,1,0,0,0"
    vals = {}
    for method in ("closed", "fp_quadrature"):
        code, out, _ = run(capsys, "potential", "--x", x, "--method", method)
        assert code == 0
        vals[method] = np.array(json.loads(out)["A"])
    assert np.allclose(vals["closed"], vals["fp_quadrature"], rtol=1e-10)


def test_potential_closed_needs_uniform(capsys):
    code, _, _ = run(capsys, "potential", "--x", "0.5,2,0,0,0", "--worldline", "hyperbolic", "--method", "closed")
    assert code == 2


def test_potential_behind_horizon(capsys):
    code, _, err = run(capsys, "potential", "--x=-2,1,0,0,0", "--worldline", "hyperbolic")
    assert code == 3 and err


def test_potential_wrong_length(capsys):
    assert run(capsys, "potential", "--x", "1,2,3")[0] == 2


def test_gauge_report(capsys):
    code, out, _ = run(capsys, "gauge", "--x", "0.5,2,0.3,0,0", "--worldline", "hyperbolic", "--g", "1")
    data = json.loads(out)
    assert code == 0
    assert data["chosen_sign"] == "plus"
    assert data["gap_rel"] > 0.1
