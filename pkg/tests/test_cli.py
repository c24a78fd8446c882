import json
import subprocess
import sys
from pathlib import Path

import pytest

from dwnls.cli import (
    SWEEP_COLUMNS,
    DeltaConfig,
    RunConfig,
    SolveConfig,
    build_config,
    config_hash,
    main,
    parse_value,
    read_config_file,
    run,
)
from dwnls.delta_well import DeltaWellParams, spectrum
from dwnls.errors import ConfigError


def run_in(tmp_path: Path, sub: str, params: dict, check=False, formats=("csv", "json", "svg"), name="out"):
    out = tmp_path / name
    status = run(RunConfig(sub, params, out, formats, check), stream=open("/dev/null", "w"))
    return status, out


def read_bytes(out: Path) -> dict[str, bytes]:
    return {p.name: p.read_bytes() for p in sorted(out.iterdir())}


class TestParsing:
    def test_scalars_and_lists(self):
        assert parse_value("3", int) == 3
        assert parse_value("-2.5", float) == -2.5
        assert parse_value("yes", bool) is True
        assert parse_value("0.1, 0.2,", list[float]) == [0.1, 0.2]
        assert parse_value("none", float | None) is None
        assert parse_value("-2", float | None) == -2.0

    @pytest.mark.parametrize("text,tp", [("abc", float), ("inf", float), ("maybe", bool), ("1.5", int)])
    def test_rejects(self, text, tp):
        with pytest.raises(ValueError):
            parse_value(text, tp)

    def test_unknown_key(self):
        with pytest.raises(ConfigError, match="unknown parameter"):
            build_config("diagram", {"sigma": "1", "bogus": "2"})

    def test_validation(self):
        with pytest.raises(ConfigError):
            build_config("diagram", {"sigma": "-1"})
        with pytest.raises(ConfigError):
            DeltaConfig(a=1.0)
        with pytest.raises(ConfigError):
            DeltaConfig(a=1.0, alpha=-1.0, beta=-1.0, hbar=1.0)
        with pytest.raises(ConfigError):
            SolveConfig(n_points=2000)

    def test_config_file(self, tmp_path):
        f = tmp_path / "run.cfg"
        f.write_text("# diagram settings\nsigma = 5\n\neta_min=-8  # lower end\n")
        assert read_config_file(f) == {"sigma": "5", "eta_min": "-8"}
        f.write_text("sigma 5\n")
        with pytest.raises(ConfigError):
            read_config_file(f)
        with pytest.raises(ConfigError):
            read_config_file(tmp_path / "missing.cfg")

    def test_hash_depends_on_values_only(self):
        a = build_config("diagram", {"sigma": "1"})
        b = build_config("diagram", {"sigma": "1.0", "n_eta": "400"})
        c = build_config("diagram", {"sigma": "2"})
        assert config_hash("diagram", a) == config_hash("diagram", b) != config_hash("diagram", c)


class TestSubcommands:
    def test_diagram_deterministic(self, tmp_path):
        params = {"sigma": "1", "eta_min": "-4", "eta_max": "4", "n_eta": "400"}
        s1, out1 = run_in(tmp_path, "diagram", params, check=True, name="one")
        s2, out2 = run_in(tmp_path, "diagram", params, check=True, name="two")
        assert s1 == s2 == 0
        assert read_bytes(out1) == read_bytes(out2)
        assert {"diagram.csv", "diagram.json", "diagram.svg", "manifest.json"} <= set(read_bytes(out1))

    def test_diagram_sigma_one_shape(self, tmp_path):
        _, out = run_in(tmp_path, "diagram", {"sigma": "1", "n_eta": "400"})
        doc = json.loads((out / "diagram.json").read_text())
        asym = [p for p in doc["branches"] if p["branch_label"] == "as"]
        assert min(abs(p["eta"]) for p in asym) > 2.0
        assert not any(p["branch_label"] in ("as1", "as2") for p in doc["branches"])

    def test_diagram_sigma_five_shape(self, tmp_path):
        _, out = run_in(tmp_path, "diagram", {"sigma": "5", "eta_min": "-8", "eta_max": "8", "n_eta": "801"})
        doc = json.loads((out / "diagram.json").read_text())
        as1 = [abs(p["eta"]) for p in doc["branches"] if p["branch_label"] == "as1"]
        as2 = [abs(p["eta"]) for p in doc["branches"] if p["branch_label"] == "as2"]
        assert min(as1) == pytest.approx(4.41, abs=0.02)
        assert max(as2) < 6.4 and max(as2) == pytest.approx(6.4, abs=0.02)

    def test_delta_example(self, tmp_path):
        status, out = run_in(tmp_path, "delta", {"a": "1", "alpha": "-2"}, check=True)
        assert status == 0
        doc = json.loads((out / "delta.json").read_text())
        sp = spectrum(DeltaWellParams(1.0, -2.0))
        assert doc["eigenvalues"] == [sp.e1, sp.e2]

    def test_format_filter_and_manifest(self, tmp_path):
        status, out = run_in(tmp_path, "delta", {"a": "1", "alpha": "-2"}, formats=("json",))
        assert status == 0
        assert sorted(p.name for p in out.iterdir()) == ["delta.json", "manifest.json"]
        manifest = json.loads((out / "manifest.json").read_text())
        assert [a["file"] for a in manifest["artifacts"]] == ["delta.json"]
        assert manifest["config_sha256"] == config_hash("delta", build_config("delta", {"a": "1", "alpha": "-2"}))

    @pytest.mark.parametrize(
        "sub,params",
        [
            ("roots", {"sigmas": "1,4", "n_grid": "20001"}),
            ("stability", {"sigma": "5", "eta": "-5", "probe": "true"}),
            ("dynamics", {"horizon": "5"}),
            ("solve", {"eta": "-3", "branch": "as", "hbar": "0.15"}),
        ],
    )
    def test_checks_pass(self, tmp_path, sub, params):
        status, out = run_in(tmp_path, sub, params, check=True)
        assert status == 0
        checks = json.loads((out / "manifest.json").read_text())["checks"]
        assert checks and all(c["passed"] for c in checks)

    def test_sweep_order_and_parallel_determinism(self, tmp_path):
        params = {"hbars": "0.15,0.1", "etas": "-1,-3", "workers": "2"}
        s1, par = run_in(tmp_path, "sweep", params, check=True, name="par")
        s2, ser = run_in(tmp_path, "sweep", {**params, "workers": "1"}, check=True, name="ser")
        assert s1 == s2 == 0
        rows = (par / "sweep.csv").read_text().splitlines()
        assert rows[0].split(",") == SWEEP_COLUMNS
        keys = [tuple(r.split(",")[:2]) for r in rows[1:]]
        assert keys == [("0.14999999999999999", "-1"), ("0.14999999999999999", "-3"),
                        ("0.10000000000000001", "-1"), ("0.10000000000000001", "-3")]
        assert (par / "sweep.csv").read_bytes() == (ser / "sweep.csv").read_bytes()


class TestExitCodes:
    def test_config_error(self, tmp_path):
        assert run_in(tmp_path, "delta", {"a": "1"})[0] == 2
        assert run_in(tmp_path, "diagram", {"nope": "1"})[0] == 2
        assert run_in(tmp_path, "diagram", {}, formats=("png",))[0] == 2
        assert run_in(tmp_path, "nosuch", {})[0] == 2

    def test_missing_branch_is_config_error(self, tmp_path):
        assert run_in(tmp_path, "solve", {"eta": "-1", "branch": "as"})[0] == 2

    def test_numerical_error(self, tmp_path):
        # hbar = 2 leaves a single bound state, so there is no doublet
        assert run_in(tmp_path, "solve", {"hbar": "2", "half_width": "10"})[0] == 3

    def test_check_failure(self, tmp_path):
        status, out = run_in(tmp_path, "dynamics", {"horizon": "5", "drift_tol": "1e-30"}, check=True)
        assert status == 1
        checks = json.loads((out / "manifest.json").read_text())["checks"]
        assert not checks[0]["passed"]

    def test_main_merges_file_and_arguments(self, tmp_path, capsys):
        cfg = tmp_path / "d.cfg"
        cfg.write_text("a = 0.4\nalpha = -2\n")
        out = tmp_path / "m"
        assert main(["delta", "a=1", "--config", str(cfg), "--out", str(out), "--check"]) == 0
        doc = json.loads((out / "delta.json").read_text())
        assert doc["a"] == 1.0 and doc["odd_state_exists"]
        assert "PASS" in capsys.readouterr().out

    def test_main_bad_pair(self, tmp_path):
        assert main(["delta", "a", "--out", str(tmp_path / "x")]) == 2


def test_console_script(tmp_path):
    proc = subprocess.run(
        [sys.executable, "-m", "dwnls.cli", "delta", "a=1", "alpha=-2", "--out", str(tmp_path / "c"), "--format", "json"],
        capture_output=True,
        text=True,
    )
    assert proc.returncode == 0 and "delta.json" in proc.stdout
