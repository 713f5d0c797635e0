import json
import shutil
from fractions import Fraction as F
from pathlib import Path

import pytest

from clearnet import check_section
from clearnet.cli import main
from clearnet.io import (
    FormatError, en_from_compact, load_network, network_from_json, network_to_json,
    payments_from_json, state_from_json,
)
from networks import net_a, net_b, net_c, net_d, net_e, net_f

DATA = Path(__file__).parent / "data"
GOLDEN = Path(__file__).parent / "golden"

GOLDEN_RUNS = [
    (["solve", "net_a.json"], "solve_net_a_least.json"),
    (["solve", "net_a.json", "--solver", "greatest"], "solve_net_a_greatest.json"),
    (["solve", "net_b.json"], "solve_net_b_least.json"),
    (["solve", "net_b.json", "--solver", "greatest"], "solve_net_b_greatest.json"),
    (["solve", "net_c.json", "--solver", "acyclic"], "solve_net_c_acyclic.json"),
    (["enumerate", "net_d.json"], "enumerate_net_d.json"),
]


def run(argv, capsys):
    code = main(argv)
    return code, capsys.readouterr().out


@pytest.mark.parametrize("builder", [net_a, net_b, net_c, net_d, net_e, net_f])
def test_network_json_round_trip(builder):
    net = builder()
    doc = network_to_json(net)
    back = network_from_json(json.loads(json.dumps(doc)))
    assert back == net
    assert network_to_json(back) == doc


def test_float_backend_load():
    net = load_network(DATA / "net_b.json", "float")
    assert net.backend == "float" and net.exogenous["1"] == 5.0


def test_compact_en():
    net = load_network(DATA / "net_a_compact.json")
    assert net == net_a()
    bounded = en_from_compact({"assets": {"1": "5", "2": "0"},
                               "liabilities": [[1, 2, "10"], [2, 1, "10"]]}, "bounded")
    assert bounded.spaces["1"].hi == 10
    with pytest.raises(FormatError, match="duplicate"):
        en_from_compact({"assets": ["1", "1"], "liabilities": [[1, 2, "1"], [1, 2, "2"]]})


@pytest.mark.parametrize("doc,match", [
    ({"version": "nope"}, "version"),
    ({"version": "clearnet-network/1"}, "malformed"),
    ({"version": "clearnet-network/1",
      "vertices": [{"id": "1", "space": {"blob": 1}, "exogenous": "0",
                    "aggregator": {"kind": "sum"}}]}, "space"),
])
def test_malformed_documents(doc, match):
    with pytest.raises(FormatError, match=match):
        network_from_json(doc)


@pytest.mark.parametrize("argv,golden", GOLDEN_RUNS, ids=[g for _, g in GOLDEN_RUNS])
def test_golden_reports(argv, golden, capsys, monkeypatch):
    monkeypatch.chdir(DATA)
    code, out = run(argv, capsys)
    assert code == 0
    assert out == (GOLDEN / golden).read_text(encoding="utf-8")


def test_solve_report_reloads_as_section(tmp_path, capsys):
    out = tmp_path / "r.json"
    assert main(["solve", str(DATA / "net_b.json"), "-o", str(out)]) == 0
    doc = json.loads(out.read_text())
    net = load_network(DATA / "net_b.json")
    assert check_section(net, state_from_json(net, doc["x"]), payments_from_json(net, doc["p"]))


def test_validation_failure_exit_code(tmp_path, capsys):
    doc = network_to_json(net_b())
    doc["edges"][0]["distributor"] = {"kind": "linear_capped", "slope": "1", "cap": "20"}
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps(doc))
    code, out = run(["solve", str(bad)], capsys)
    assert code == 1
    report = json.loads(out)
    assert report["error"] == "validation failed"
    assert "codomain-breach" in report["violations"][0]


def test_non_convergence_exit_code(tmp_path, capsys):
    path = tmp_path / "e.json"
    path.write_text(json.dumps(network_to_json(net_e())))
    code, out = run(["solve", str(path), "--max-iter", "40"], capsys)
    assert code == 2
    doc = json.loads(out)
    assert doc["diverged"] and doc["saturated"] == {"1": "inf", "2": "inf"}


def test_cycle_error_for_acyclic_solver(capsys):
    code, out = run(["solve", str(DATA / "net_a.json"), "--solver", "acyclic"], capsys)
    assert code == 1 and "cycle" in json.loads(out)["error"]


def test_banach_cli(tmp_path, capsys):
    path = tmp_path / "f.json"
    path.write_text(json.dumps(network_to_json(net_f())))
    code, out = run(["solve", str(path), "--solver", "banach"], capsys)
    doc = json.loads(out)
    assert code == 0 and doc["x"] == {"1": "4/3", "2": "2/3"} and doc["lipschitz"] == "0.5"


def test_seed_state(tmp_path, capsys):
    seed = tmp_path / "seed.json"
    seed.write_text(json.dumps({"1": "3", "2": "9", "3": "1"}))
    code, out = run(["solve", str(DATA / "net_c.json"), "--solver", "acyclic",
                     "--seed-state", str(seed)], capsys)
    assert code == 0 and json.loads(out)["x"] == {"1": "7", "2": "5", "3": "0"}


@pytest.mark.parametrize("jobs", ["1", "2"])
def test_directory_batch(tmp_path, capsys, jobs):
    for name in ("net_a.json", "net_b.json"):
        shutil.copy(DATA / name, tmp_path / name)
    code, out = run(["solve", str(tmp_path), "--jobs", jobs], capsys)
    doc = json.loads(out)
    assert code == 0
    assert doc["reports"]["net_b.json"]["x"] == {"1": "10", "2": "10"}
    assert doc["reports"]["net_a.json"]["x"] == {"1": "0", "2": "0"}


def test_verify_manifest(capsys):
    code, out = run(["verify", str(DATA / "manifest.json")], capsys)
    doc = json.loads(out)
    assert code == 0 and doc["passed"] and doc["count"] == 7


def test_verify_failure_exit_code(tmp_path, capsys):
    # target network built with the wrong factor: intertwining must fail
    shutil.copy(DATA / "net_b.json", tmp_path / "net_b.json")
    (tmp_path / "m.json").write_text(json.dumps({"samples": 10, "cases": [
        {"name": "wrong", "kind": "redenominate", "network": "net_b.json", "alpha": "2",
         "target": "net_b.json"}]}))
    code, out = run(["verify", str(tmp_path / "m.json")], capsys)
    assert code == 2 and json.loads(out)["failed"] == ["wrong"]


def test_en_command(capsys):
    code, out = run(["en", "--assets", "5,0", "--liability", "1:2:10",
                     "--liability", "2:1:10"], capsys)
    assert code == 0 and network_from_json(json.loads(out)) == net_b()
    code, out = run(["en", "--compact", str(DATA / "net_a_compact.json"),
                     "--presentation", "bounded"], capsys)
    assert json.loads(out)["vertices"][0]["space"] == {"interval": ["0", "10"]}


def test_backend_flag_float(capsys):
    code, out = run(["solve", str(DATA / "net_b.json"), "--backend", "float"], capsys)
    doc = json.loads(out)
    assert code == 0 and doc["x"] == {"1": "10", "2": "10"}
    assert doc["parameters"]["backend"] == "float"
    assert F(doc["x"]["1"]) == 10
