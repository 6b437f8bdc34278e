import json

import pytest

from defects.cli import main
from defects.scenario import ScenarioError, builtin_names, load_builtin, load_config, run_scenario

MANIFEST = {"edge-dislocation", "screw-dislocation", "book-form", "interface-1", "interface-2", "edge-disclination",
            "director-line-source", "frank-rules", "kinematics-rates", "regularization"}


def segment_config(reference=1.0, tolerance=1e-12, **extra):
    cfg = {
        "name": "tiny",
        "n": 3,
        "anchor": {"id": "tiny", "claim": "integral of dz along a unit segment"},
        "objects": {
            "L": {"family": "segment", "a": [0, 0, 0], "b": [0, 0, 1]},
            "dz": {"family": "dz_form"},
        },
        "checks": [{"name": "length", "kind": "integral", "chain": "@L", "form": "@dz",
                    "reference": reference, "tolerance": tolerance}],
    }
    cfg.update(extra)
    return cfg


@pytest.fixture
def reports(tmp_path, monkeypatch):
    out = tmp_path / "reports"
    monkeypatch.setenv("DEFECTS_REPORT_DIR", str(out))
    return out


def write(tmp_path, cfg, name="cfg.json"):
    p = tmp_path / name
    p.write_text(cfg if isinstance(cfg, str) else json.dumps(cfg))
    return str(p)


class TestList:
    def test_all(self, capsys):
        assert main(["list"]) == 0
        assert set(capsys.readouterr().out.split()) == MANIFEST

    def test_prefix(self, capsys):
        main(["list", "interface"])
        assert capsys.readouterr().out.split() == ["interface-1", "interface-2"]

    def test_no_match(self, capsys):
        assert main(["list", "zzz"]) == 0
        assert capsys.readouterr().out == ""

    def test_builtin_names_sorted(self):
        names = builtin_names()
        assert names == sorted(names)


class TestRun:
    def test_config_pass(self, tmp_path, reports, capsys):
        assert main(["run", write(tmp_path, segment_config())]) == 0
        out = capsys.readouterr().out
        assert "PASS" in out and "1/1" in out
        rep = json.loads((reports / "tiny.json").read_text())
        assert rep["schema_version"] == 1 and rep["pass"] is True
        assert rep["anchor"]["id"] == "tiny"
        row = rep["rows"][0]
        assert set(row) >= {"check", "value", "reference", "abs_err", "rel_err", "tolerance", "pass"}

    def test_config_fail_still_writes(self, tmp_path, reports):
        assert main(["run", write(tmp_path, segment_config(reference=2.0))]) == 1
        assert json.loads((reports / "tiny.json").read_text())["pass"] is False

    def test_quiet(self, tmp_path, reports, capsys):
        assert main(["run", "--quiet", write(tmp_path, segment_config())]) == 0
        assert capsys.readouterr().out == ""

    def test_builtin(self, reports):
        assert main(["run", "--quiet", "edge-disclination"]) == 0
        rep = json.loads((reports / "edge-disclination.json").read_text())
        assert rep["battery_hashes"] and rep["config_hash"]

    def test_csv(self, reports):
        assert main(["run", "--quiet", "--csv", "director-line-source"]) == 0
        csvs = sorted(reports.glob("director-line-source.*.csv"))
        assert csvs
        header = csvs[0].read_text().splitlines()[0].split(",")
        assert header[:2] == ["check", "form"] and "eps" in header

    def test_empty_checks(self, tmp_path, reports):
        assert main(["run", "--quiet", write(tmp_path, segment_config(checks=[]))]) == 0


class TestErrors:
    def test_bad_reference(self, tmp_path, reports, capsys):
        cfg = segment_config()
        cfg["checks"][0]["chain"] = "@missing"
        assert main(["run", write(tmp_path, cfg)]) == 2
        assert "missing" in capsys.readouterr().err
        assert not reports.exists()

    def test_invalid_json(self, tmp_path, capsys):
        assert main(["run", write(tmp_path, "{not json")]) == 2

    def test_missing_file(self, tmp_path):
        assert main(["run", str(tmp_path / "nope.json")]) == 2

    def test_unknown_builtin(self, capsys):
        assert main(["run", "no-such-scenario"]) == 2
        assert "no-such-scenario" in capsys.readouterr().err

    @pytest.mark.parametrize("patch", [
        {"kind": "no_such_check"},
        {"tolerance": 0.0},
        {"tolerance": -1.0},
    ])
    def test_bad_check(self, tmp_path, patch):
        cfg = segment_config()
        cfg["checks"][0].update(patch)
        assert main(["run", write(tmp_path, cfg)]) == 2

    def test_unknown_family(self, tmp_path, capsys):
        cfg = segment_config()
        cfg["objects"]["dz"] = {"family": "teapot"}
        assert main(["run", write(tmp_path, cfg)]) == 2
        assert "teapot" in capsys.readouterr().err

    def test_unused_object_must_resolve(self, tmp_path):
        cfg = segment_config()
        cfg["objects"]["orphan"] = {"family": "boundary", "of": "@ghost"}
        assert main(["run", write(tmp_path, cfg)]) == 2

    def test_missing_top_level(self):
        with pytest.raises(ScenarioError):
            load_config(json.dumps({"name": "x", "objects": {}}))

    def test_duplicate_check_names(self):
        cfg = segment_config()
        cfg["checks"].append(dict(cfg["checks"][0]))
        with pytest.raises(ScenarioError):
            load_config(json.dumps(cfg))


class TestDeterminism:
    def test_report_repeatable(self):
        a = run_scenario(load_builtin("edge-disclination")).to_json(with_timestamp=False)
        b = run_scenario(load_builtin("edge-disclination")).to_json(with_timestamp=False)
        assert a == b

    def test_config_hash_tracks_content(self):
        assert load_config(json.dumps(segment_config())).config_hash != \
            load_config(json.dumps(segment_config(reference=2.0))).config_hash

    def test_every_builtin_validates(self):
        for name in builtin_names():
            sc = load_builtin(name)
            assert sc.name == name and sc.config.get("anchor")
