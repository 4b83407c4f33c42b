import json

import pytest

from splitkit.scenarios import REGISTRY, list_scenarios, run_scenario


def test_registry_listing():
    entries = list_scenarios()
    assert len(entries) >= 12
    ids = [e[0] for e in entries]
    assert len(set(ids)) == len(ids)
    assert all(anchor for _, _, anchor in entries)


def test_unknown_id_lists_available():
    with pytest.raises(KeyError) as exc:
        run_scenario("nope")
    assert "orthant-shift" in exc.value.args[0]


@pytest.mark.parametrize("sid", list(REGISTRY))
def test_scenario_passes(sid):
    rep = run_scenario(sid)
    assert rep.assertions
    for a in rep.assertions:
        assert a.provenance in ("PAPER", "TRIVIAL", "DERIVED")
        if a.provenance == "DERIVED":
            assert a.oracle
    failed = [a.name for a in rep.assertions if not a.passed]
    assert not failed, rep.to_text()


@pytest.mark.parametrize("sid", ["constants", "affine-normal-solve", "vfb-vdr-agree"])
def test_reports_are_deterministic(sid):
    assert run_scenario(sid).to_json() == run_scenario(sid).to_json()


def test_report_files(tmp_path):
    rep = run_scenario("map-feasible")
    rep.write(tmp_path)
    data = json.loads((tmp_path / "map-feasible.json").read_text())
    assert data["passed"] is True
    assert (tmp_path / "map-feasible.txt").read_text().startswith("scenario map-feasible: PASS")
    assert (tmp_path / "map-feasible__solve.csv").read_text().startswith("n,step_norm,")
