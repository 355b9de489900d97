import hashlib
import json

import pytest

from dtasync.cli import PRESETS, main, parse_range, ConfigError


def run(args):
    return main([str(a) for a in args])


def write_config(path, **cfg):
    path.write_text(json.dumps(cfg))
    return path


def check_manifest(out):
    m = json.loads((out / "manifest.json").read_text())
    for entry in m["outputs"]:
        data = (out / entry["path"]).read_bytes()
        assert hashlib.sha256(data).hexdigest() == entry["sha256"]
    return m


def test_simulate_config_smoke_and_determinism(tmp_path):
    cfg = dict(scenario="simulate", network={"kind": "complete", "n": 50},
               params={"coupling": 1.5, "alpha": 0.5, "t_end": 20}, seeds=[3])
    outs = []
    for tag in "ab":
        out = tmp_path / tag
        assert run(["run", write_config(tmp_path / f"{tag}.json", out=str(out), **cfg)]) == 0
        check_manifest(out)
        outs.append((out / "series_seed3.csv").read_bytes())
    assert outs[0] == outs[1]
    assert outs[0].splitlines()[0] == b"t,R,psi"


def test_unknown_key_exit_2(tmp_path, capsys):
    cfg = write_config(tmp_path / "c.json", scenario="simulate", params={"lamda": 1.0})
    assert run(["--out", tmp_path / "o", "run", cfg]) == 2
    assert "lamda" in capsys.readouterr().err
    cfg = write_config(tmp_path / "d.json", scenario="simulate", lamda=1.0)
    assert run(["--out", tmp_path / "o", "run", cfg]) == 2


def test_usage_errors_exit_2(tmp_path):
    assert run(["bogus"]) == 2
    assert run(["--out", tmp_path, "sweep", "--values", "a:b"]) == 2


def test_runtime_error_exit_1(tmp_path, capsys):
    # alpha=1 has no finite threshold
    assert run(["--out", tmp_path, "lambda-c", "--mode", "self", "--alpha", "1.0"]) == 1
    assert "runtime failure" in capsys.readouterr().err


def test_lambda_c_json(tmp_path, capsys):
    assert run(["--out", tmp_path, "lambda-c", "--mode", "self", "--alpha", "0.5", "--beta", "1"]) == 0
    res = json.loads((tmp_path / "lambda_c.json").read_text())
    assert res["lambda_c"] == pytest.approx(1.2)
    assert res["closed_form"] == pytest.approx(1.2)
    assert abs(res["residual"]) < 1e-8


def test_generate_network_and_edge_list(tmp_path):
    out = tmp_path / "g"
    assert run(["--out", out, "generate-network", "--network", "watts-strogatz", "--n", 10, "--p", 0]) == 0
    assert json.loads((out / "result.json").read_text())["aspl"] == pytest.approx(5 / 3)
    el = tmp_path / "e.txt"
    el.write_text("0 1\n1 2\n")
    out = tmp_path / "h"
    assert run(["--out", out, "generate-network", "--network", "edge-list", "--edge-list", el,
                "--indexing", 0]) == 0
    assert json.loads((out / "result.json").read_text())["n"] == 3


def test_sweep_and_estimate(tmp_path):
    out = tmp_path / "s"
    assert run(["--out", out, "sweep", "--network", "watts-strogatz", "--n", 40, "--coupling", 1.5,
                "--t-end", 20, "--values", "0,0.5", "--seeds", 3]) == 0
    check_manifest(out)
    out = tmp_path / "e"
    assert run(["--out", out, "estimate-lambda-c", "--n", 100, "--t-end", 100, "--grid", "0.4:2.0:9",
                "--seeds", 3]) == 0
    assert (out / "lambda_c_table.csv").read_text().startswith("lambda,N,seed,R_mean")


@pytest.mark.parametrize("model", ["opinion", "stuart-landau"])
def test_simulate_models(tmp_path, model):
    out = tmp_path / model
    args = ["--out", out, "simulate", "--model", model, "--n", 30, "--t-end", 10, "--replicas", 2]
    if model == "opinion":
        args += ["--rho", 0.2]
    assert run(args) == 0
    assert len(json.loads((out / "result.json").read_text())["runs"]) == 2


def test_attention_demo(tmp_path):
    hist = tmp_path / "h.csv"
    hist.write_text("0,0\n1.5707963267948966,0\n")
    wq = tmp_path / "w.csv"
    wq.write_text("1\n0\n")
    assert run(["--out", tmp_path / "a", "attention-demo", "--history", hist, "--wq", wq, "--wk", wq]) == 0
    res = json.loads((tmp_path / "a" / "result.json").read_text())
    assert res["kernel_row"] == pytest.approx([0.5, 0.5])
    assert res["M"][0] == pytest.approx([0.5, 0.5])


def test_hopfield_map_and_recover(tmp_path, capsys):
    out = tmp_path / "m"
    assert run(["--out", out, "hopfield", "map", "--pattern", "K", "--eps", "0.2", "--alpha", "0:1:3"]) == 0
    assert len((out / "stability_K.csv").read_text().splitlines()) == 4
    out = tmp_path / "r"
    assert run(["--out", out, "hopfield", "recover", "--pattern", "K", "--steps", 500]) == 0
    assert "recovered" in capsys.readouterr().out
    assert json.loads((out / "result.json").read_text())["overlap"] > 0.99


def test_presets_registered():
    assert set(PRESETS) == {"fig3b", "fig3d", "fig4d", "fig4h", "fig5-style", "fig6-map"}


def test_fig6_preset(tmp_path):
    assert run(["--out", tmp_path, "preset", "fig6-map"]) == 0
    m = check_manifest(tmp_path)
    assert len(m["outputs"]) == 7


def test_parse_range():
    assert parse_range("0:1:3").tolist() == [0.0, 0.5, 1.0]
    assert parse_range("1,2").tolist() == [1.0, 2.0]
    with pytest.raises(ConfigError):
        parse_range("1:2")
