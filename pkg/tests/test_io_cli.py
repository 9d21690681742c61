import json
import os

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qwalk import PositionDistribution, WalkPlan, bloch_vectors, new_localized, position_distribution, run_walk
from qwalk.cli import main, run_scenario
from qwalk.config import ConfigError, Scenario, ScenarioName, parse_coin, parse_config
from qwalk.io import (
    distribution_csv,
    emit_bloch_json,
    emit_distribution_csv,
    emit_svg_plot,
    read_distribution_csv,
)


class TestCsv:
    def test_two_site_example(self):
        text = distribution_csv(PositionDistribution.from_mapping({-1: 0.5, 1: 0.5}))
        assert text == "site,probability,sigma_stat\n-1,0.5,\n1,0.5,\n"

    def test_parity_zeros_are_kept(self, tmp_path):
        p = position_distribution(run_walk(WalkPlan(3, new_localized(0, [1, 0]))))
        emit_distribution_csv(p, tmp_path / "d.csv")
        rows = (tmp_path / "d.csv").read_text().splitlines()[1:]
        assert len(rows) == p.sites.size
        assert rows[0].startswith("-4,0.0")

    @given(st.lists(st.floats(0, 1, allow_subnormal=True), min_size=1, max_size=30), st.integers(-50, 50))
    @settings(max_examples=50, deadline=None)
    def test_round_trip_exact(self, tmp_path_factory, weights, start):
        w = np.array(weights) + 1e-300
        p = w / w.sum()
        d = PositionDistribution(np.arange(start, start + p.size), p)
        path = tmp_path_factory.mktemp("csv") / "d.csv"
        emit_distribution_csv(d, path)
        back = read_distribution_csv(path)
        np.testing.assert_array_equal(back.sites, d.sites)
        np.testing.assert_allclose(back.probabilities, d.probabilities, rtol=0, atol=1e-15)
        assert back.sigma_stat is None

    def test_round_trip_with_sigma(self, tmp_path):
        d = PositionDistribution.from_counts([-2, 0, 2], [1, 7, 3])
        emit_distribution_csv(d, tmp_path / "d.csv")
        back = read_distribution_csv(tmp_path / "d.csv", shots=11)
        np.testing.assert_array_equal(back.probabilities, d.probabilities)
        np.testing.assert_array_equal(back.sigma_stat, d.sigma_stat)

    def test_write_error_has_path(self, tmp_path):
        with pytest.raises(OSError, match="missing"):
            emit_distribution_csv(PositionDistribution.from_mapping({0: 1.0}), tmp_path / "missing" / "d.csv")


class TestJsonSvg:
    def test_bloch_record_of_zero(self, tmp_path):
        emit_bloch_json(bloch_vectors(new_localized(0, [1, 0], halfwidth=0)), tmp_path / "b.json")
        records = json.loads((tmp_path / "b.json").read_text())
        assert records == [{"site": 0, "population": 1.0, "bx": 0.0, "by": 0.0, "bz": 1.0, "valid": True}]

    def test_svg_line_plot_two_series(self, tmp_path):
        path = emit_svg_plot("line", {"a": ([1, 2, 3], [1, 2, 3]), "b": ([1, 2, 3], [1, 1.4, 1.7])},
                             tmp_path / "s.svg", xlabel="steps N", ylabel="sigma")
        text = path.read_text()
        assert text.lstrip().startswith("<?xml") and "<svg" in text
        assert "href=\"http" not in text and "<image" not in text

    def test_svg_deterministic(self, tmp_path):
        series = {"p": ([-1, 0, 1], [0.25, 0.5, 0.25])}
        a = emit_svg_plot("bar", series, tmp_path / "a.svg").read_bytes()
        b = emit_svg_plot("bar", series, tmp_path / "b.svg").read_bytes()
        assert a == b

    def test_svg_unknown_kind(self, tmp_path):
        with pytest.raises(ValueError):
            emit_svg_plot("pie", {"p": ([0], [1])}, tmp_path / "x.svg")


class TestConfig:
    def test_defaults(self, tmp_path):
        f = tmp_path / "empty.cfg"
        f.write_text("")
        s = parse_config(f)
        assert (s.name, s.steps, s.initial, s.engine, s.seed) == (ScenarioName.WALK, 6, "symmetric", "exact", 0)

    def test_flag_overrides_file(self, tmp_path):
        f = tmp_path / "c.cfg"
        f.write_text("# comment\nsteps = 20\ndephase-p = 0.1\n")
        s = parse_config(f, {"steps": "12"})
        assert s.steps == 12 and s.dephase_p == 0.1

    def test_negative_steps(self):
        with pytest.raises(ConfigError, match="steps must be ≥ 1"):
            parse_config(None, {"steps": "-3"})

    def test_unknown_key_lists_valid_keys(self, tmp_path):
        f = tmp_path / "c.cfg"
        f.write_text("steps = 4\nspeed = 3\n")
        with pytest.raises(ConfigError, match=r"c\.cfg:2: unknown key 'speed'; valid keys: .*steps"):
            parse_config(f)

    def test_type_mismatch_has_line_number(self, tmp_path):
        f = tmp_path / "c.cfg"
        f.write_text("\nseed = abc\n")
        with pytest.raises(ConfigError, match=r"c\.cfg:2: seed"):
            parse_config(f)

    def test_detuning_needs_mc(self):
        with pytest.raises(ConfigError, match="mc"):
            parse_config(None, {"detuning_sigma": "0.3"})
        assert parse_config(None, {"detuning_sigma": "0.3", "engine": "mc"}).detuning_sigma == 0.3

    def test_coin_pulse_expressions(self):
        np.testing.assert_allclose(parse_coin("pulse:3pi/2,pi/2").matrix, -parse_coin("hadamard").matrix, atol=1e-15)
        with pytest.raises(ValueError):
            parse_coin("pulse:x")

    def test_command_round_trips(self):
        s = Scenario(name=ScenarioName.REVERSE, steps=5, engine="mc", shots=300, dephase_p=0.25, seed=9)
        argv = s.command()
        flags = dict(zip(argv[1::2], argv[2::2]))
        overrides = {k.lstrip("-").replace("-", "_"): v for k, v in flags.items()}
        overrides["scenario"] = argv[0]
        assert parse_config(None, overrides) == s


def data_files(root):
    return {p.name: p.read_bytes() for p in sorted(root.iterdir()) if p.name != "manifest.json"}


class TestCli:
    @pytest.mark.parametrize("argv", [
        ["walk"], ["classical", "--engine", "mc", "--shots", "500"], ["scaling", "--steps", "8"],
        ["tomography", "--steps", "4", "--dephase-p", "0.2"], ["reverse"], ["transport"],
        ["walk", "--engine", "mc", "--shots", "2000", "--detuning-sigma", "0.3", "--echo", "off"],
    ], ids=lambda a: "-".join(a[:2]))
    def test_runs_and_is_reproducible(self, tmp_path, argv):
        assert main(argv + ["--out", str(tmp_path / "a"), "--seed", "4"]) == 0
        assert main(argv + ["--out", str(tmp_path / "b"), "--seed", "4"]) == 0
        a, b = data_files(tmp_path / "a"), data_files(tmp_path / "b")
        assert a == b
        ma = json.loads((tmp_path / "a" / "manifest.json").read_text())
        mb = json.loads((tmp_path / "b" / "manifest.json").read_text())
        ma.pop("duration_s"), mb.pop("duration_s")
        assert ma == mb
        assert set(ma["outputs"]) == set(a)

    def test_manifest_command_reproduces_run(self, tmp_path):
        assert main(["reverse", "--engine", "mc", "--shots", "400", "--dephase-p", "0.5",
                     "--seed", "11", "--out", str(tmp_path / "a")]) == 0
        m = json.loads((tmp_path / "a" / "manifest.json").read_text())
        assert m["master_seed"] == 11 and m["parameters"]["dephase_p"] == 0.5
        assert main(m["command"][1:] + ["--out", str(tmp_path / "b")]) == 0
        assert data_files(tmp_path / "a") == data_files(tmp_path / "b")

    def test_walk_outputs(self, tmp_path):
        assert main(["walk", "--out", str(tmp_path)]) == 0
        d = read_distribution_csv(tmp_path / "distribution.csv")
        np.testing.assert_allclose(d.probabilities, d.probabilities[::-1], atol=1e-12)
        assert (tmp_path / "distribution.svg").exists()

    def test_plot_off(self, tmp_path):
        assert main(["walk", "--plot", "off", "--out", str(tmp_path)]) == 0
        assert not (tmp_path / "distribution.svg").exists()

    def test_reverse_report(self, tmp_path):
        assert main(["reverse", "--out", str(tmp_path)]) == 0
        report = json.loads((tmp_path / "refocus.json").read_text())
        assert report["refocused_fraction"] == pytest.approx(1.0, abs=1e-9)

    def test_env_default_output(self, tmp_path, monkeypatch):
        monkeypatch.setenv("QWALK_OUT", str(tmp_path / "env"))
        assert main(["transport", "--plot", "off"]) == 0
        assert (tmp_path / "env" / "transport.json").exists()

    def test_usage_error_exit_code(self, tmp_path, capsys):
        assert main(["walk", "--steps", "-3", "--out", str(tmp_path)]) == 2
        assert "steps must be ≥ 1" in capsys.readouterr().err

    def test_bad_config_file_exit_code(self, tmp_path, capsys):
        f = tmp_path / "c.cfg"
        f.write_text("bogus = 1\n")
        assert main(["walk", "--config", str(f), "--out", str(tmp_path)]) == 2
        assert "valid keys" in capsys.readouterr().err

    def test_argparse_errors_exit_2(self):
        with pytest.raises(SystemExit) as e:
            main(["walk", "--engine", "quantum"])
        assert e.value.code == 2

    def test_runtime_error_cleans_up(self, tmp_path, monkeypatch, capsys):
        import qwalk.cli as cli

        def boom(*a, **k):
            raise RuntimeError("disk on fire")

        monkeypatch.setattr(cli, "emit_json", boom)
        assert main(["walk", "--out", str(tmp_path)]) == 3
        assert "disk on fire" in capsys.readouterr().err
        assert list(tmp_path.iterdir()) == []

    def test_run_scenario_returns_manifest(self, tmp_path):
        m = run_scenario(Scenario(name=ScenarioName.CLASSICAL, steps=4, plot=False), tmp_path)
        assert m.outputs == ["distribution.csv"]
        assert m.scenario == "classical" and m.duration_s >= 0
        assert sorted(os.listdir(tmp_path)) == ["distribution.csv", "manifest.json"]
