import csv
import io
import json
import subprocess
import sys

import jsonschema
import pytest

from sigma_forge import cli
from sigma_forge.errors import ConfigError
from sigma_forge.target_geometry import sphere_graph_metric


def run_main(args, capsys):
    rc = cli.main(args)
    out = capsys.readouterr()
    return rc, out.out, out.err


def write(tmp_path, name, data):
    p = tmp_path / name
    p.write_text(json.dumps(data))
    return str(p)


FLAT = {
    "target": "custom",
    "dim": 2,
    "cutoff": 4,
    "chart": "normal",
    "metric_terms": [
        {"i": 0, "j": 0, "multi_index": [0, 0], "coeff": "1"},
        {"i": 1, "j": 1, "multi_index": [0, 0], "coeff": "1"},
    ],
}


def test_beta_sphere_json(capsys):
    rc, out, _ = run_main(["beta", "--target", "sphere", "--N", "3", "--cutoff", "6", "--format", "json"], capsys)
    assert rc == 0
    rep = json.loads(out)
    check = rep["checks"][0]
    assert check["ratio"]["exact"] == "1/3" and check["ratio"]["units"] == "1/(4pi)"
    assert check["ratio"]["float"] == pytest.approx(0.0265258, abs=1e-7)
    assert rep["status"] == "pass" and rep["seed"] == cli.DEFAULT_SEED
    jsonschema.validate(rep, cli._schema("report.json"))


def test_verify_on_model(capsys):
    rc, out, _ = run_main(["verify-on-model", "--N", "4", "--cutoff", "6"], capsys)
    rep = json.loads(out)
    assert rc == 0
    assert [c["check"] for c in rep["checks"]] == ["identity_I", "identity_II", "identity_III", "cme"]
    assert all(c["residual"] == "0" and c["status"] == "pass" for c in rep["checks"])


def test_verify_wick_x4(capsys):
    rc, out, _ = run_main(["verify-wick", "--dim", "1", "--max-degree", "4"], capsys)
    rep = json.loads(out)
    recs = rep["checks"][0]["records"]
    assert {"monomial": "x^4", "value": "3"}.items() <= next(r for r in recs if r["monomial"] == "x^4").items()
    assert rc == 0


def test_verify_qme_and_cohomology(capsys):
    rc, out, _ = run_main(["verify-qme-finite", "--models", "10"], capsys)
    assert rc == 0 and json.loads(out)["status"] == "pass"
    rc, out, _ = run_main(["cohomology", "--N", "3", "--cutoff", "4"], capsys)
    rep = json.loads(out)
    assert rc == 0
    dims = {c["target"].get("module"): c.get("dims") for c in rep["checks"] if c["check"] == "cohomology"}
    assert dims["trivial"] == [1, 0, 0, 1]


def test_cme_perturbed_metric_fails_with_report(tmp_path, capsys):
    g = sphere_graph_metric(3, 4)
    terms = []
    for (i, j), s in g.components().items():
        for e, c in s.terms.items():
            if i == j and e == (2, 0) and i == 0:
                c = c + 1
            terms.append({"i": i, "j": j, "multi_index": list(e), "coeff": str(c)})
            if i != j:
                terms.append({"i": j, "j": i, "multi_index": list(e), "coeff": str(c)})
    cfg = write(tmp_path, "pert.json", {"target": "custom", "dim": 2, "cutoff": 4, "chart": "graph", "metric_terms": terms})
    out = tmp_path / "r.json"
    rc, _, _ = run_main(["cme", "--config", cfg, "--output", str(out)], capsys)
    assert rc == 1
    rep = json.loads(out.read_text())
    assert rep["status"] == "fail" and rep["checks"][0]["residuals"]["invariance"] > 0


def test_custom_flat_beta_zero(tmp_path, capsys):
    rc, out, _ = run_main(["beta", "--config", write(tmp_path, "flat.json", FLAT)], capsys)
    rep = json.loads(out)
    assert rc == 0 and rep["checks"][0]["B"] == [["0", "0"], ["0", "0"]]


def test_custom_beta_not_proportional(tmp_path, capsys):
    cfg = dict(FLAT, metric_terms=FLAT["metric_terms"] + [{"i": 0, "j": 0, "multi_index": [0, 2], "coeff": "-1/3"}])
    rc, out, _ = run_main(["beta", "--config", write(tmp_path, "bent.json", cfg)], capsys)
    rec = json.loads(out)["checks"][0]
    # B = diag(1/3, 0), Ric = diag(1/3, 1/3): worst entry 1/3 - 1/9
    assert rc == 1 and rec["status"] == "fail" and rec["residual"] == "2/9"


def test_sphere_config_dispatch():
    data, metric = cli.load_target_config({"target": "sphere", "N": 3, "cutoff": 4, "chart": "graph"})
    assert metric.components() == sphere_graph_metric(3, 4).components()


@pytest.mark.parametrize(
    "mutate,needle",
    [
        (lambda d: d["metric_terms"][0].update(coeff="1/0"), "zero denominator"),
        (lambda d: d["metric_terms"].append({"i": 0, "j": 1, "multi_index": [1, 0], "coeff": "1/2"}), "asymmetric metric term at (0,1)"),
        (lambda d: d.pop("cutoff"), "cutoff"),
        (lambda d: d["metric_terms"][0].update(coeff="abc"), "coeff"),
        (lambda d: d["metric_terms"][0].update(coeff="-1"), "positive-definite"),
    ],
)
def test_invalid_configs_exit_2(tmp_path, capsys, mutate, needle):
    data = json.loads(json.dumps(FLAT))
    mutate(data)
    rc, out, err = run_main(["beta", "--config", write(tmp_path, "bad.json", data)], capsys)
    assert rc == 2 and out == ""
    assert needle in err


def test_other_config_errors(tmp_path, capsys):
    p = tmp_path / "broken.json"
    p.write_text("{not json")
    assert run_main(["beta", "--config", str(p)], capsys)[0] == 2
    assert run_main(["beta", "--config", str(tmp_path / "missing.json")], capsys)[0] == 2
    assert run_main(["verify-on-model", "--N", "3", "--cutoff", "5"], capsys)[0] == 2
    assert run_main(["beta", "--N", "3", "--cutoff", "2"], capsys)[0] == 2
    assert run_main(["cme", "--output", str(tmp_path / "no" / "dir.json")], capsys)[0] == 2


def test_thread_env(monkeypatch, capsys):
    assert cli.thread_count({}) == 1
    assert cli.thread_count({"SIGMA_FORGE_THREADS": "3"}) == 3
    for bad in ("0", "-2", "many"):
        with pytest.raises(ConfigError):
            cli.thread_count({"SIGMA_FORGE_THREADS": bad})
    monkeypatch.setenv("SIGMA_FORGE_THREADS", "x")
    assert run_main(["cme"], capsys)[0] == 2


def test_threads_do_not_change_output(monkeypatch, tmp_path, capsys):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    cli.main(["verify-on-model", "--N", "3", "--cutoff", "4", "-o", str(a)])
    monkeypatch.setenv("SIGMA_FORGE_THREADS", "4")
    cli.main(["verify-on-model", "--N", "3", "--cutoff", "4", "-o", str(b)])
    assert a.read_bytes() == b.read_bytes()


def test_csv_rendering(tmp_path, capsys):
    out = tmp_path / "r.csv"
    rc, _, _ = run_main(["verify-on-model", "--N", "3", "--cutoff", "4", "--format", "csv", "-o", str(out)], capsys)
    raw = out.read_bytes()
    assert rc == 0 and b"\r" not in raw
    rows = list(csv.reader(io.StringIO(raw.decode())))
    assert rows[0] == ["check", "target", "cutoff", "status", "residual", "notes"]
    assert [r[0] for r in rows[1:]] == ["identity_I", "identity_II", "identity_III", "cme"]
    assert all(r[3] == "pass" for r in rows[1:])


def test_json_round_trip(capsys):
    cfg, metric = cli.make_config(cli.build_parser().parse_args(["beta", "--N", "4", "--cutoff", "4"]))
    rep = cli.run(cfg, metric)
    text = cli.render_report(rep)
    assert json.loads(text) == json.loads(json.dumps(rep))
    assert cli.render_report(json.loads(text)) == text


def test_module_entry_point_byte_identical(tmp_path):
    outs = []
    for name in ("one.json", "two.json"):
        p = tmp_path / name
        r = subprocess.run([sys.executable, "-m", "sigma_forge", "verify-qme-finite", "--seed", "7", "--models", "5", "-o", str(p)], capture_output=True)
        assert r.returncode == 0, r.stderr
        outs.append(p.read_bytes())
    assert outs[0] == outs[1]
