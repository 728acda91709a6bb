import csv
import io
import json

import numpy as np
import pytest

from scoremix import cli, csvio
from scoremix.errors import DataError
from scoremix.murphy import FunctionalSpec


def run(capsys, *argv):
    code = cli.main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


@pytest.fixture
def data_csv(tmp_path):
    rng = np.random.default_rng(0)
    y = rng.normal(size=60)
    rows = np.column_stack([y, y + 0.3 * rng.normal(size=60), y + rng.normal(size=60)])
    p = tmp_path / "d.csv"
    with open(p, "w") as fh:
        fh.write("y,rst,ar\n")
        for r in rows:
            fh.write(",".join(csvio.fmt(v) for v in r) + "\n")
    return p


def write(tmp_path, text, name="in.csv"):
    p = tmp_path / name
    p.write_text(text)
    return p


def test_load_csv(tmp_path):
    d = csvio.load_csv(write(tmp_path, "y,rst,ar\n1,2,3\n4,5,6\n7,8,9\n"), FunctionalSpec.quantile(0.5))
    assert (d.n, d.l) == (3, 2) and d.names == ("rst", "ar")
    with pytest.raises(DataError, match="row 2, column 'ar'"):
        csvio.load_csv(write(tmp_path, "y,rst,ar\n1,2,3\n4,5,NaN\n"), FunctionalSpec.quantile(0.5))
    with pytest.raises(DataError, match="outcome"):
        csvio.load_csv(write(tmp_path, "a,b\n1,2\n"), FunctionalSpec.quantile(0.5))
    with pytest.raises(DataError, match="empty"):
        csvio.load_csv(write(tmp_path, ""), FunctionalSpec.quantile(0.5))
    with pytest.raises(DataError, match="0/1"):
        csvio.load_csv(write(tmp_path, "y,p\n0.5,0.2\n"), FunctionalSpec.probability())
    with pytest.raises(DataError, match="row 1, column 'p'"):
        csvio.load_csv(write(tmp_path, "y,p\n1,abc\n"), FunctionalSpec.probability())


def test_murphy_single_record(tmp_path, capsys):
    p = write(tmp_path, "y,x\n0,2\n")
    code, out, _ = run(capsys, "murphy", "--input", str(p))
    assert code == 0
    rows = list(csv.reader(io.StringIO(out)))
    assert rows[0] == ["theta", "x", "x_left"]
    assert rows[1:] == [["0", "0.5", "0"], ["2", "0", "0.5"]]


def test_murphy_json_matches_csv(data_csv, capsys):
    _, out_csv, _ = run(capsys, "murphy", "--input", str(data_csv), "--functional", "expectile", "--alpha", "0.3")
    _, out_json, _ = run(
        capsys, "murphy", "--input", str(data_csv), "--functional", "expectile", "--alpha", "0.3", "--format", "json"
    )
    rows = list(csv.DictReader(io.StringIO(out_csv)))
    doc = json.loads(out_json)
    assert doc["meta"]["alpha"] == 0.3 and len(doc["rows"]) == len(rows)
    for a, b in zip(rows, doc["rows"]):
        assert all(float(a[k]) == b[k] for k in a)


def test_csv_round_trip_is_bit_stable(data_csv, tmp_path, capsys):
    _, first, _ = run(capsys, "murphy", "--input", str(data_csv), "--functional", "expectile")
    # feed the emitted numbers back through the reader and formatter
    p = write(tmp_path, first, "curve.csv")
    header, values = csvio.read_table(p)
    buf = io.StringIO()
    csvio.write_csv(buf, header, values.tolist())
    assert buf.getvalue() == first


def test_murphy_svg(data_csv, capsys):
    code, out, _ = run(capsys, "murphy", "--input", str(data_csv), "--format", "svg")
    assert code == 0 and out.startswith("<svg") and out.count("<polyline") == 2
    assert "quantile(alpha=0.5)" in out and "href" not in out


def test_murphy_usage_errors(data_csv, capsys):
    assert run(capsys, "murphy", "--input", str(data_csv), "--columns", ",")[0] == 1
    assert run(capsys, "murphy", "--input", str(data_csv), "--alpha", "1.2")[0] == 1
    assert run(capsys, "murphy", "--input", str(data_csv), "--columns", "nope")[0] == 2
    assert run(capsys, "murphy", "--input", "/nonexistent.csv")[0] == 2
    assert run(capsys, "bogus")[0] == 1


def test_dominance(tmp_path, capsys):
    code, out, _ = run(capsys, "dominance", "--input", str(write(tmp_path, "y,a,b\n1,2,0\n")))
    doc = json.loads(out)
    assert code == 0 and doc["verdict"] == "no_dominance"
    assert doc["witness_first"] == 0.0 and doc["witness_second"] == 1.0
    assert [r["difference"] for r in doc["rows"]] == [-0.5, 0.5, 0.0]
    p = write(tmp_path, "y,a,b\n1,1,0\n2,2,3\n0,0,0.5\n")
    assert json.loads(run(capsys, "dominance", "--input", str(p))[1])["verdict"] == "first_dominates"
    p = write(tmp_path, "y,a,b\n1,0,0\n2,3,3\n")
    assert json.loads(run(capsys, "dominance", "--input", str(p))[1])["verdict"] == "equivalent"
    p = write(tmp_path, "y,a,b,c\n1,0,0,1\n")
    assert run(capsys, "dominance", "--input", str(p))[0] == 1


def test_dominance_agrees_with_difference_rows(data_csv, capsys):
    for f in ("quantile", "expectile"):
        doc = json.loads(run(capsys, "dominance", "--input", str(data_csv), "--functional", f)[1])
        diffs = np.array([r["difference"] for r in doc["rows"]])
        if doc["verdict"] == "first_dominates":
            assert diffs.max() <= 1e-12
        elif doc["verdict"] == "second_dominates":
            assert diffs.min() >= -1e-12
        elif doc["verdict"] == "no_dominance":
            assert diffs.min() < -1e-12 and diffs.max() > 1e-12


def test_dmtest(data_csv, tmp_path, capsys):
    code, out, _ = run(capsys, "dmtest", "--input", str(data_csv), "--hac-lags", "2", "--grid", "11")
    rows = list(csv.DictReader(io.StringIO(out)))
    assert code == 0 and len(rows) > 11
    assert all(float(r["lower"]) <= float(r["D_n"]) <= float(r["upper"]) for r in rows)
    code, out, _ = run(capsys, "dmtest", "--input", str(data_csv), "--columns", "rst,rst")
    rows = list(csv.DictReader(io.StringIO(out)))
    assert all(float(r["D_n"]) == float(r["lower"]) == float(r["upper"]) == 0 for r in rows)
    code, out, err = run(capsys, "dmtest", "--input", str(write(tmp_path, "y,a,b\n1,2,0\n")))
    rows = list(csv.DictReader(io.StringIO(out)))
    assert code == 0 and "refused" in err
    assert [r["D_n"] for r in rows] == ["-0.5", "0.5", "0"] and all(r["statistic"] == "" for r in rows)
    code, out, _ = run(capsys, "dmtest", "--input", str(data_csv), "--format", "svg")
    assert "<polygon" in out
    assert run(capsys, "dmtest", "--input", str(data_csv), "--hac-lags", "x")[0] == 1


def test_simulate_deterministic_and_perfect_minimal(capsys):
    args = ("simulate", "--functional", "expectile", "--grid", "5", "--draws", "20000", "--seed", "3")
    code, first, _ = run(capsys, *args)
    _, second, _ = run(capsys, *args)
    assert code == 0 and first == second
    rows = list(csv.DictReader(io.StringIO(first)))
    by_theta = {}
    for r in rows:
        by_theta.setdefault(r["theta"], {})[r["kind"]] = float(r["analytic"])
    for vals in by_theta.values():
        assert vals["perfect"] == min(vals.values())
    clim0 = [r for r in rows if r["kind"] == "climatological" and float(r["theta"]) == 0.0][0]
    assert float(clim0["analytic"]) == pytest.approx(0.564190, abs=1e-6)
    assert abs(float(clim0["mc_estimate"]) - 0.564190) <= 3 * float(clim0["mc_se"])
    assert run(capsys, "simulate", "--functional", "expectile", "--alpha", "0.3")[0] == 1
    code, out, _ = run(capsys, "simulate", "--functional", "probability", "--grid", "3", "--draws", "1000")
    assert code == 0 and all(r["analytic"] == "" for r in csv.DictReader(io.StringIO(out)))


def test_verify_mixture(capsys):
    code, out, err = run(capsys, "verify-mixture", "--family", "apl", "--pairs", "100")
    rows = list(csv.DictReader(io.StringIO(out)))
    assert code == 0 and len(rows) == 100 and max(float(r["abs_error"]) for r in rows) <= 1e-9
    code, out, _ = run(capsys, "verify-mixture", "--family", "brier", "--pairs", "20", "--format", "json")
    doc = json.loads(out)
    assert code == 0 and doc["failures"] == 0
    assert run(capsys, "verify-mixture", "--family", "homogeneous")[0] == 1
    assert run(capsys, "verify-mixture", "--family", "exp-bregman", "--param", "0.5", "--alpha", "0.2")[0] == 0


def test_crps_command(tmp_path, capsys):
    p = write(tmp_path, "y,m1,m2\n0,0,2\n1,3,3\n")
    code, out, _ = run(capsys, "crps", "--input", str(p))
    rows = list(csv.DictReader(io.StringIO(out)))
    assert code == 0
    assert [r["crps"] for r in rows] == ["0.5", "2"]
    assert [r["crps_threshold_integral"] for r in rows] == ["0.5", "2"]


def test_output_file(data_csv, tmp_path, capsys):
    target = tmp_path / "out.json"
    assert run(capsys, "murphy", "--input", str(data_csv), "--format", "json", "-o", str(target))[0] == 0
    assert "rows" in json.loads(target.read_text())
