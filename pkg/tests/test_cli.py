import json

import numpy as np
import pytest
from hypothesis import given, strategies as st

from irs_discrete.chansim import ScenarioConfig, sample_channels, trial_rng
from irs_discrete.cli import parse_bits, run
from irs_discrete.errors import InvalidInputError
from irs_discrete.units import db_to_linear, dbm_to_watts, linear_to_db, watts_to_dbm


def solve_json(capsys, *argv):
    assert run(["-q", "solve", *argv]) == 0
    return json.loads(capsys.readouterr().out)


class TestEtaTable:
    def test_row_count(self, capsys):
        assert run(["eta-table", "--bits", "3"]) == 0
        lines = capsys.readouterr().out.strip().splitlines()
        assert lines[0] == "b,eta,eta_db"
        assert len(lines) - 1 == 4
        assert lines[-1].startswith("cont,1.000000")

    def test_writes_file(self, tmp_path, capsys):
        assert run(["eta-table", "--bits", "2", "--out", str(tmp_path)]) == 0
        assert (tmp_path / "eta_table.csv").read_text() == capsys.readouterr().out


class TestSolve:
    def test_no_irs_closed_form(self, capsys):
        doc = solve_json(capsys, "--n", "0", "--seed", "5", "--d", "30")
        cfg = ScenarioConfig(N=0, seed=5, d=30.0)
        ch = sample_channels(cfg, trial_rng(5, 0))
        want = cfg.gamma * cfg.sigma2 / np.linalg.norm(ch.h_d) ** 2
        assert doc["power_watts"] == pytest.approx(want, rel=1e-12)
        assert doc["no_irs_power_watts"] == pytest.approx(want, rel=1e-12)

    def test_irs_beats_direct_link_near_irs(self, capsys):
        doc = solve_json(capsys, "--n", "30", "--bits", "2")
        assert doc["power_watts"] < doc["no_irs_power_watts"]
        assert len(doc["theta"]) == 30 and all(0 <= k < 4 for k in doc["theta"])
        assert doc["config"]["b"] == 2

    def test_continuous(self, capsys):
        doc = solve_json(capsys, "--n", "5", "--bits", "cont")
        assert doc["config"]["b"] is None

    def test_config_file_and_flag_precedence(self, tmp_path, capsys):
        path = tmp_path / "scenario.yaml"
        path.write_text("N: 12\nM: 2\ngamma_db: 10\nb: cont\n")
        doc = solve_json(capsys, "--config", str(path), "--m", "3")
        assert doc["config"]["N"] == 12
        assert doc["config"]["M"] == 3
        assert doc["config"]["gamma_db"] == 10
        assert doc["config"]["b"] is None

    def test_config_unknown_key(self, tmp_path):
        path = tmp_path / "bad.yaml"
        path.write_text("antennas: 4\n")
        assert run(["-q", "solve", "--config", str(path)]) == 1

    def test_missing_config_file(self, tmp_path):
        assert run(["-q", "solve", "--config", str(tmp_path / "nope.yaml")]) == 1

    def test_infeasible_link_is_numeric_failure(self):
        assert run(["-q", "solve", "--n", "0", "--suppress-direct-link"]) == 2

    def test_invalid_value(self):
        assert run(["-q", "solve", "--n", "-3"]) == 1
        assert run(["-q", "solve", "--bits", "zero"]) == 1


class TestUsageErrors:
    def test_unknown_subcommand(self, capsys):
        assert run(["frobnicate"]) == 1
        assert "usage" in capsys.readouterr().err

    def test_unknown_flag(self):
        assert run(["eta-table", "--frob"]) == 1

    def test_missing_subcommand(self):
        assert run([]) == 1


class TestSweeps:
    def test_sweep_distance_reproducible(self, tmp_path):
        argv = ["-q", "sweep-distance", "--seed", "7", "--trials", "4", "--n", "6",
                "--d-values", "20,50", "--workers", "1"]
        assert run(argv + ["--out", str(tmp_path / "a")]) == 0
        assert run(argv + ["--out", str(tmp_path / "b")]) == 0
        a = (tmp_path / "a" / "sweep_distance.csv").read_bytes()
        b = (tmp_path / "b" / "sweep_distance.csv").read_bytes()
        assert a == b and a.count(b"\n") == 1 + 2 * 5 * 4
        doc = json.loads((tmp_path / "a" / "sweep_distance.json").read_text())
        assert doc["config"]["seed"] == 7
        assert doc["grid"]["d_values"] == [20.0, 50.0]

    def test_sweep_distance_bad_scheme(self, tmp_path):
        assert run(["-q", "sweep-distance", "--trials", "2", "--schemes", "sdr",
                    "--out", str(tmp_path)]) == 1

    def test_sweep_elements(self, tmp_path, capsys):
        assert run(["-q", "sweep-elements", "--trials", "3", "--n-values", "8,16",
                    "--b-values", "1", "--suppress-direct-link", "--workers", "1",
                    "--out", str(tmp_path)]) == 0
        doc = json.loads((tmp_path / "sweep_elements.json").read_text())
        assert doc["config"]["suppress_direct_link"] is True
        assert doc["config"]["M"] == 1
        assert "gap N=16 ao-1bit" in capsys.readouterr().out

    def test_verify_scaling(self, tmp_path, capsys):
        assert run(["-q", "verify-scaling", "--n", "16", "--trials", "200",
                    "--bits-list", "1,cont", "--n-values", "8,32,128",
                    "--slope-trials", "50", "--out", str(tmp_path)]) == 0
        doc = json.loads((tmp_path / "verify_scaling.json").read_text())
        assert [c["b"] for c in doc["checks"]] == [1, None]
        assert len(doc["slopes"]) == 2


class TestBoundaryConversions:
    @given(st.floats(-200, 200))
    def test_db_round_trip(self, x):
        assert float(linear_to_db(db_to_linear(x))) == pytest.approx(x, rel=1e-9, abs=1e-12)
        assert float(watts_to_dbm(dbm_to_watts(x))) == pytest.approx(x, rel=1e-9, abs=1e-12)

    @given(st.floats(1e-15, 1e6))
    def test_linear_round_trip(self, x):
        assert float(db_to_linear(linear_to_db(x))) == pytest.approx(x, rel=1e-9)
        assert float(dbm_to_watts(watts_to_dbm(x))) == pytest.approx(x, rel=1e-9)

    def test_reference_points(self):
        assert float(dbm_to_watts(-80)) == pytest.approx(1e-11)
        assert float(db_to_linear(20)) == pytest.approx(100.0)

    @pytest.mark.parametrize("text,want", [("1", 1), ("3", 3), ("cont", None), (None, None)])
    def test_parse_bits(self, text, want):
        assert parse_bits(text) == want

    def test_parse_bits_rejects(self):
        with pytest.raises(InvalidInputError):
            parse_bits("0")
