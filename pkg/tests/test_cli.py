import json
import os

import numpy as np
import pytest

from hubbid import InputError, load_bid, load_manifest, load_scenario_set
from hubbid.cli import main
from hubbid.manifest import manifest_from_dict

FIXTURE = os.path.join(os.path.dirname(__file__), "..", "fixtures", "toyhub")


def fixture_path(*parts) -> str:
    return os.path.abspath(os.path.join(FIXTURE, *parts))


def variant_manifest(tmp_path, mutate=None, name="manifest.json") -> str:
    """Copy the fixture manifest into tmp with absolute input paths."""
    with open(fixture_path("manifest.json")) as fh:
        doc = json.load(fh)
    doc["hub"] = fixture_path(doc["hub"])
    doc["derating"] = fixture_path(doc["derating"])
    sc = doc["scenarios"]
    for key in ("forecast", "workload_forecast", "residual_dir"):
        sc[key] = fixture_path(sc[key])
    sc["imbalance"]["history"] = fixture_path(sc["imbalance"]["history"])
    doc["days"]["dir"] = fixture_path(doc["days"]["dir"])
    doc["output_dir"] = str(tmp_path / "out")
    if mutate is not None:
        mutate(doc)
    path = tmp_path / name
    path.write_text(json.dumps(doc, indent=2))
    return str(path)


# --- manifest parsing ---------------------------------------------------------------


def test_fixture_manifest_parses():
    man = load_manifest(fixture_path("manifest.json"))
    assert man.seed == 20250717
    assert man.scenarios.k == 6
    assert man.scenarios.flexible_totals[("a100", "CPU")] == 1500.0
    assert man.days.days == ("2025-07-17", "2025-07-18")
    assert man.evaluate.schemes == ("custom", "tou", "custom_noflex")
    assert man.solver.mip_gap == 1e-4
    assert man.bid.scheme == "custom"


def test_manifest_field_paths_in_errors():
    base = {
        "schema_version": 1,
        "hub": "hub.json",
        "output_dir": "out",
    }
    with pytest.raises(InputError, match=r"\$\.hub"):
        manifest_from_dict({"schema_version": 1, "output_dir": "out"})
    with pytest.raises(InputError, match="schema_version"):
        manifest_from_dict({"hub": "h", "output_dir": "out"})
    with pytest.raises(InputError, match="scenarios.k"):
        manifest_from_dict(
            dict(
                base,
                scenarios={
                    "forecast": "f",
                    "workload_forecast": "w",
                    "residual_dir": "r",
                    "imbalance": {"k_short": 1.2, "k_long": 0.6},
                    "k": "sixty",
                },
            )
        )
    with pytest.raises(InputError, match="imbalance.target"):
        manifest_from_dict(
            dict(
                base,
                scenarios={
                    "forecast": "f",
                    "workload_forecast": "w",
                    "residual_dir": "r",
                    "imbalance": {"history": "h.csv", "target": 1.5},
                },
            )
        )
    with pytest.raises(InputError, match="bid.scheme"):
        manifest_from_dict(dict(base, bid={"scheme": "spot"}))
    with pytest.raises(InputError, match="days.list"):
        manifest_from_dict(dict(base, days={"list": ["d1", "d1"]}))
    with pytest.raises(InputError, match="evaluate.jobs"):
        manifest_from_dict(dict(base, evaluate={"jobs": 0}))
    with pytest.raises(InputError, match="flexible_totals"):
        manifest_from_dict(
            dict(
                base,
                scenarios={
                    "forecast": "f",
                    "workload_forecast": "w",
                    "residual_dir": "r",
                    "imbalance": {"k_short": 1.2, "k_long": 0.6},
                    "flexible_totals": {"no-slash": 10.0},
                },
            )
        )


def test_day_overrides_and_seeds():
    man = load_manifest(fixture_path("manifest.json"))
    base = man.day_file("forecast.csv", "2025-07-17")
    override = man.day_file("forecast.csv", "2025-07-18")
    assert base == fixture_path("forecast.csv")
    assert override == fixture_path("days", "2025-07-18", "forecast.csv")
    assert man.day_seed("2025-07-17") == man.seed
    assert man.day_seed("2025-07-18") == man.seed + 1
    assert man.day_seed(None) == man.seed


# --- subcommands ---------------------------------------------------------------------


def test_scenarios_command_prints_count_and_checksum(tmp_path, capsys):
    man = variant_manifest(tmp_path)
    rc = main(["scenarios", man, "--days", "2025-07-17"])
    out = capsys.readouterr().out
    assert rc == 0
    assert "6 scenarios" in out
    assert "probability sum" in out
    sset = load_scenario_set(str(tmp_path / "out" / "2025-07-17" / "scenarios.json"))
    assert len(sset.scenarios) == 6
    assert sum(s.probability for s in sset.scenarios) == pytest.approx(1.0, abs=1e-9)


def test_scenarios_k1_yields_single_certain_scenario(tmp_path):
    man = variant_manifest(tmp_path)
    rc = main(["scenarios", man, "--days", "2025-07-17", "--k", "1"])
    assert rc == 0
    sset = load_scenario_set(str(tmp_path / "out" / "2025-07-17" / "scenarios.json"))
    assert len(sset.scenarios) == 1
    assert sset.scenarios[0].probability == pytest.approx(1.0)


def test_missing_residual_file_exits_2(tmp_path, capsys):
    def mutate(doc):
        doc["scenarios"]["residual_dir"] = str(tmp_path / "nowhere")

    man = variant_manifest(tmp_path, mutate)
    rc = main(["scenarios", man, "--days", "2025-07-17"])
    assert rc == 2
    assert "residual file not found" in capsys.readouterr().err


def test_bid_emits_artifacts(tmp_path, capsys):
    man = variant_manifest(tmp_path)
    rc = main(["bid", man, "--days", "2025-07-17", "--k", "3", "--write-lp"])
    assert rc == 0
    outdir = tmp_path / "out" / "2025-07-17"
    for name in ("bid.json", "bid.csv", "vcc_a100.csv", "vcc_v100.csv", "model.lp"):
        assert (outdir / name).exists(), name
    bid = load_bid(outdir / "bid.json")
    assert bid.scheme == "custom"
    assert bid.status in ("optimal", "limit")
    assert len(bid.day_ahead) == 24
    assert np.all(bid.day_ahead <= bid.caps + 1e-6)
    first = (outdir / "bid.csv").read_text().splitlines()[0]
    assert first == "step,day_ahead_kw"
    assert "expected=" in capsys.readouterr().out


def test_bid_tou_scheme_has_no_day_ahead_csv(tmp_path):
    man = variant_manifest(tmp_path)
    rc = main(["bid", man, "--days", "2025-07-17", "--k", "2", "--scheme", "tou"])
    assert rc == 0
    outdir = tmp_path / "out" / "2025-07-17"
    assert (outdir / "bid.json").exists()
    assert not (outdir / "bid.csv").exists()
    bid = load_bid(outdir / "bid.json")
    assert bid.scheme == "tou"
    assert bid.day_ahead is None


def test_validate_derating_pass(capsys):
    rc = main(["validate-derating", fixture_path("manifest.json")])
    out = capsys.readouterr().out
    assert rc == 0
    assert out.startswith("PASS")
    assert "1025.0 kWh" in out


def test_validate_derating_fail_exits_2(tmp_path, capsys):
    bad = tmp_path / "caps_bad.csv"
    lines = ["timestamp,cap_kw"] + [f"2025-07-17T{h:02d}:00:00+00:00,10.0" for h in range(24)]
    bad.write_text("\n".join(lines) + "\n")

    def mutate(doc):
        doc["derating"] = str(bad)

    man = variant_manifest(tmp_path, mutate)
    rc = main(["validate-derating", man])
    out = capsys.readouterr().out
    assert rc == 2
    assert out.startswith("FAIL")
    assert "below contractual minimum" in out


def test_infeasible_renewable_target_exits_3(tmp_path, capsys):
    rc = main(
        ["bid", fixture_path("manifest_scap1.json"), "--out", str(tmp_path / "o"), "--k", "3"]
    )
    err = capsys.readouterr().err
    assert rc == 3
    assert "infeasible" in err
    assert "renewable" in err


def test_unavailable_solver_exits_4(tmp_path, capsys, monkeypatch):
    monkeypatch.setenv("HUBBID_SOLVER", "/does/not/exist/cbc")
    man = variant_manifest(tmp_path)
    rc = main(["bid", man, "--days", "2025-07-17", "--k", "2"])
    assert rc == 4
    assert "solver failure" in capsys.readouterr().err


def test_evaluate_and_report_roundtrip(tmp_path, capsys):
    def mutate(doc):
        doc["evaluate"]["schemes"] = ["custom"]
        doc["evaluate"]["jobs"] = 1

    man = variant_manifest(tmp_path, mutate)
    rc = main(["evaluate", man, "--days", "2025-07-17", "--k", "2"])
    assert rc == 0
    report_path = tmp_path / "out" / "report_custom.json"
    assert report_path.exists()
    doc = json.loads(report_path.read_text())
    assert doc["scheme"] == "custom"
    assert len(doc["days"]) == 1
    capsys.readouterr()

    rc = main(["report", man])
    out = capsys.readouterr().out
    assert rc == 0
    assert "scheme custom" in out
    assert "ex_post_cost" in out

    rc = main(["report", man, "--format", "csv"])
    out = capsys.readouterr().out.splitlines()
    assert rc == 0
    assert out[0] == "scheme,metric,q25,mean,q75,std"


def test_report_before_evaluate_exits_2(tmp_path, capsys):
    man = variant_manifest(tmp_path)
    rc = main(["report", man])
    assert rc == 2
    assert "run 'evaluate' first" in capsys.readouterr().err


def test_unknown_day_rejected(tmp_path, capsys):
    man = variant_manifest(tmp_path)
    rc = main(["scenarios", man, "--days", "2025-01-01"])
    assert rc == 2
    assert "not in the manifest day list" in capsys.readouterr().err
