import json
import math

import pytest

from nlocal.cli import main

BELL = {"family": "bell", "index": "phi+"}
HALF_QUARTER = {
    "family": "explicit",
    "re": [[0.25, 0, 0, 0.0625], [0, 0.25, 0.1875, 0], [0, 0.1875, 0.25, 0], [0.0625, 0, 0, 0.25]],
}


@pytest.fixture
def write(tmp_path):
    def _write(name, obj):
        p = tmp_path / name
        p.write_text(obj if isinstance(obj, str) else json.dumps(obj))
        return str(p)

    return _write


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_analyze_star(write, capsys):
    path = write("star.json", {"topology": "star", "sources": [BELL, BELL, HALF_QUARTER]})
    code, out, _ = run(capsys, "analyze", path)
    rep = json.loads(out)
    assert code == 0
    assert rep["B"] == pytest.approx(1.01332, abs=1e-5)
    assert rep["violation"] is True
    assert rep["concurrences"] == pytest.approx([1, 1, 0], abs=1e-10)


def test_analyze_linear_with_separable_source(write, capsys):
    path = write("lin.json", {"topology": "linear", "sources": [BELL, HALF_QUARTER, BELL]})
    rep = json.loads(run(capsys, "analyze", path)[1])
    assert rep["violation"] is False


def test_analyze_malformed_json(write, capsys):
    path = write("bad.json", '{"topology": "star", "sources": [')
    code, _, err = run(capsys, "analyze", path)
    assert code == 1 and "line 1" in err


def test_analyze_names_bad_field(write, capsys):
    path = write("bad.json", {"topology": "star", "sources": [BELL, {"family": "x-state", "x1": 0.5, "x2": 0.2, "x3": 0.3, "x4": 0}, {"family": "werner"}]})
    code, _, err = run(capsys, "analyze", path)
    assert code == 1 and "sources[2].v" in err


def test_analyze_physicality_echo(write, capsys):
    path = write("bad.json", {"topology": "star", "sources": [BELL, {"family": "x-state", "x1": 0.5, "x2": 0.2, "x3": 0.3, "x4": 0, "y2": 0.3}]})
    code, _, err = run(capsys, "analyze", path)
    assert code == 1 and "y2^2 > x2*x3" in err and "sources[1]" in err


def test_analyze_round_trip_explicit(write, capsys, tmp_path):
    path = write("n.json", {"topology": "linear", "sources": [{"family": "werner", "v": 0.9}, {"family": "pure-schmidt", "C": 0.6}]})
    first = json.loads(run(capsys, "analyze", path)[1])
    from nlocal.network import network_from_descriptor

    net = network_from_descriptor(json.loads(open(path).read()))
    again = write("again.json", net.to_descriptor())
    second = json.loads(run(capsys, "analyze", again)[1])
    assert second["B"] == pytest.approx(first["B"], abs=1e-12)


def test_campaign_bytes_identical(tmp_path, capsys):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    for p in (a, b):
        code, _, _ = run(capsys, "campaign", "--claim", "conj1", "--n", "4", "--trials", "1000", "--seed", "7", "--format", "csv", "--out", str(p))
        assert code == 0
    assert a.read_bytes() == b.read_bytes()


def test_campaign_seed_from_environment(tmp_path, capsys, monkeypatch):
    monkeypatch.setenv("NLOCAL_SEED", "7")
    code, out_env, _ = run(capsys, "campaign", "--claim", "conj1", "--n", "3", "--trials", "20", "--format", "csv")
    monkeypatch.delenv("NLOCAL_SEED")
    _, out_flag, _ = run(capsys, "campaign", "--claim", "conj1", "--n", "3", "--trials", "20", "--format", "csv", "--seed", "7")
    assert code == 0 and out_env == out_flag


def test_campaign_violation_exit_code(write, capsys):
    path = write("probe.json", {"topology": "star", "sources": [BELL] * 4 + [{"family": "werner", "v": 0.34}]})
    code, out, err = run(capsys, "campaign", "--claim", "thm5", "--network", path, "--trials", "1")
    rep = json.loads(out)
    assert code == 2 and rep["violation_count"] == 1 and "violate" in err
    assert len(rep["violations"][0]["states"]) == 5


def test_unknown_claim_is_tool_failure(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["campaign", "--claim", "thm9"])
    assert exc.value.code == 1


def test_sweep_contains_example_row(capsys):
    code, out, _ = run(capsys, "sweep", "--family", "werner", "--n", "4", "--v-grid", "0:1:0.001", "--v-extra", "0.25554844", "--format", "csv")
    assert code == 0
    rows = [line.split(",") for line in out.splitlines()[1:]]
    assert len(rows) == 1002
    row = next(r for r in rows if float(r[1]) == 0.25554844)
    assert float(row[4]) == pytest.approx(0.0133, abs=5e-4)


def test_sweep_rejects_other_families(capsys):
    assert run(capsys, "sweep", "--family", "horodecki")[0] == 1


def test_regions_and_frontier(capsys):
    code, out, _ = run(capsys, "regions", "--topology", "star", "--n", "3", "--resolution", "11", "--format", "csv")
    assert code == 0 and len(out.splitlines()) == 1 + 11**3
    code, out, _ = run(capsys, "frontier", "--n", "3", "4", "--resolution", "21")
    curves = json.loads(out)
    assert code == 0 and set(curves) == {"linear", "star-3", "star-4"}


def test_optimize_bell_pair(write, capsys):
    path = write("bellpair2.json", {"topology": "linear", "sources": [BELL, BELL]})
    code, out, _ = run(capsys, "optimize", "--network", path)
    res = json.loads(out)
    assert code == 0 and res["value"] == pytest.approx(math.sqrt(2), abs=1e-6)


def test_families(capsys):
    code, out, _ = run(capsys, "families")
    tags = {f["family"] for f in json.loads(out)["families"]}
    assert code == 0 and {"werner", "rank2-bd", "x-state", "explicit"} <= tags


def test_vmax_mode_switch(write, capsys):
    path = write("b.json", {"topology": "linear", "sources": [BELL, BELL]})
    printed = json.loads(run(capsys, "analyze", path)[1])["measure"]["M"]
    exact = json.loads(run(capsys, "analyze", path, "--vmax-mode", "exact")[1])["measure"]["M"]
    assert printed == 1.0 and exact == pytest.approx(1.0, abs=1e-12)
