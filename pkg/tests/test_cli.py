import csv
import io
import json

import pytest

from qlength.cli import run


def call(*argv):
    out, err = io.StringIO(), io.StringIO()
    code = run(list(argv), stdout=out, stderr=err)
    return code, out.getvalue(), err.getvalue()


def rows_csv(text):
    return list(csv.DictReader(io.StringIO(text)))


def test_length_box():
    code, out, _ = call("length", "--system", "box", "--n", "1", "--width", "1")
    assert code == 0
    row = rows_csv(out)[0]
    assert float(row["L2"]) == pytest.approx(0.626157, abs=1e-6)
    assert float(row["L4"]) == pytest.approx(0.6732, abs=1e-4)
    assert row["L2"] == "0.626157247"


def test_entangle_example():
    code, out, _ = call("entangle", "--object-cells", "5", "--object-lattice", "1.2000001",
                        "--ruler-cells", "2", "--ruler-lattice", "1", "--policy", "pairwise")
    assert code == 0
    rows = rows_csv(out)
    assert float(rows[0]["quantum_ratio"]) == pytest.approx(3.45, abs=0.01)
    assert float(rows[-1]["quantum_ratio"]) == pytest.approx(4.41, abs=0.01)
    assert sum(r["stage"] == "transfer" for r in rows) == 2


def test_ruler_optimal_si():
    code, out, _ = call("ruler", "--n", "2000000000", "--optimal", "--units", "si",
                        "--a0-meters", "1e-10", "--format", "json")
    env = json.loads(out)
    row = env["rows"][0]
    assert row["R_star"] == 44721
    assert row["delta_L"] == pytest.approx(2.236e-6, rel=1e-3)
    assert env["units"]["system"] == "si"


def test_json_parameter_echo_round_trips():
    argv = ["fill", "--n-max", "8", "--format", "json"]
    code, out, _ = call(*argv)
    env = json.loads(out)
    assert env["command"] == "fill"
    assert env["parameters"]["n_max"] == 8
    assert json.loads(json.dumps(env["parameters"])) == env["parameters"]


def test_output_is_deterministic():
    a = call("parse-check", "--n", "2", "3", "--format", "json")[1]
    b = call("parse-check", "--n", "2", "3", "--format", "json")[1]
    assert a == b
    env = json.loads(a)
    assert env["notes"] and all(r["coefficient_discrepancy"] for r in env["rows"])


def test_csv_header_stable():
    h1 = call("ruler", "--n", "100", "--r", "50")[1].splitlines()[0]
    h2 = call("ruler", "--n", "40", "--r", "2")[1].splitlines()[0]
    assert h1 == h2


def test_density_rows():
    code, out, _ = call("density", "--n-max", "1", "3", "--grid", "33")
    rows = rows_csv(out)
    assert len(rows) == 66
    assert {r["n_max"] for r in rows} == {"1", "3"}


def test_density_mixture_default_spacing():
    code, out, _ = call("density", "--kind", "mixture", "--segments", "2", "--grid", "65")
    assert code == 0
    assert float(rows_csv(out)[0]["spacing_over_a"]) == pytest.approx(0.626157, abs=1e-6)


def test_oracle_kinds():
    assert float(rows_csv(call("oracle", "--kind", "zeta", "--m", "5")[1])[0]["partial_sum"]) == pytest.approx(1.463611, abs=1e-6)
    assert rows_csv(call("oracle", "--kind", "sweep", "--n", "10000")[1])[0]["R"] == "100"
    x2 = float(rows_csv(call("oracle", "--kind", "box-x2", "--n", "1")[1])[0]["x2"])
    assert x2 == pytest.approx(0.282673, abs=1e-6)
    sp = float(rows_csv(call("oracle", "--kind", "spread", "--levels", "1", "2", "--grid", "64")[1])[0]["spread"])
    assert sp == pytest.approx(0.0516705, abs=1e-6)


def test_entangle_table_marks_empty_ruler(tmp_path):
    dest = tmp_path / "t.json"
    code, out, _ = call("entangle", "--table", "--format", "json", "--out", str(dest))
    assert code == 0 and out == ""
    env = json.loads(dest.read_text())
    finals = [r for r in env["rows"] if r["stage"] == "final"]
    assert [r["scenario"] for r in finals] == ["a", "b", "c", "d"]


def test_usage_error_exit_code():
    assert call("nonsense")[0] == 2
    assert call("ruler")[0] == 2


def test_computation_error_exit_code():
    code, out, err = call("ruler", "--n", "7")
    assert code == 1 and out == ""
    assert err.startswith("error: indivisible_segmentation:")
