import numpy as np
import pytest

from fringescale import ConfigError, field_from_array, read_field, write_field
from fringescale.cli import main
from fringescale.config import (
    echo_text,
    parse_config_text,
    parse_override,
    resolve,
)


class TestParse:
    def test_basic_lines(self):
        v = parse_config_text("grid.width = 128\ncarrier.fx = 0.2\n")
        assert v == {"grid.width": 128, "carrier.fx": 0.2}

    def test_comments_and_blanks(self):
        text = "# full line\n\ngrid.width = 64  # trailing\n   \n"
        assert parse_config_text(text) == {"grid.width": 64}

    def test_unknown_key_with_line_number(self):
        with pytest.raises(ConfigError, match=":3:.*grid.depth"):
            parse_config_text("\n\ngrid.depth = 3\n")

    def test_bad_value(self):
        with pytest.raises(ConfigError, match="bad value"):
            parse_config_text("grid.width = wide\n")

    def test_missing_equals(self):
        with pytest.raises(ConfigError, match="key = value"):
            parse_config_text("grid.width 64\n")

    def test_bool_spellings(self):
        assert parse_config_text("cwt.pad = off\n") == {"cwt.pad": False}
        assert parse_config_text("cwt.pad = YES\n") == {"cwt.pad": True}
        with pytest.raises(ConfigError):
            parse_config_text("cwt.pad = maybe\n")

    def test_float_list(self):
        v = parse_config_text("cwt.scales = 1, 2.5, 10\n")
        assert v["cwt.scales"] == (1.0, 2.5, 10.0)

    def test_override(self):
        assert parse_override("noise.seed=99") == ("noise.seed", 99)
        with pytest.raises(ConfigError):
            parse_override("noise.seed")
        with pytest.raises(ConfigError):
            parse_override("bogus.key=1")


class TestResolve:
    def test_defaults_materialize(self):
        rc = resolve({})
        assert rc.grid.width == 512 and rc.grid.height == 512
        assert rc.carrier.fx == 0.125
        # ridge band derives from the carrier frequency
        assert rc.demod.band_x == pytest.approx((0.025, 0.225))
        assert rc.raw["phantom.center_x"] == 256.0
        assert len(rc.cwt.scales) == 32
        assert rc.anchor is None
        assert rc.phantom is not None and rc.phantom.kind == "gaussian_plume"

    def test_band_follows_carrier(self):
        rc = resolve({"carrier.fx": 0.2})
        assert rc.demod.band_x == pytest.approx((0.1, 0.3))

    def test_explicit_band_wins(self):
        rc = resolve({"demod.band_x_lo": 0.05, "demod.band_x_hi": 0.3})
        assert rc.demod.band_x == (0.05, 0.3)

    def test_anchor_enabled_by_coords(self):
        rc = resolve({"demod.anchor_x0": 0, "demod.anchor_y0": 0,
                      "demod.anchor_w": 32, "demod.anchor_h": 32})
        assert rc.anchor == (0, 0, 32, 32)

    def test_scale_count_geomspace(self):
        rc = resolve({"cwt.scale_min": 2.0, "cwt.scale_max": 8.0,
                      "cwt.scale_count": 3})
        assert rc.cwt.scales == pytest.approx((2.0, 4.0, 8.0))

    def test_explicit_scales_win(self):
        rc = resolve({"cwt.scales": (2.0, 3.0), "cwt.scale_count": 7})
        assert rc.cwt.scales == (2.0, 3.0)

    def test_rng_pinned(self):
        with pytest.raises(ConfigError, match="philox4x64"):
            resolve({"noise.rng": "mt19937"})

    def test_input_files_must_pair(self):
        with pytest.raises(ConfigError, match="together"):
            resolve({"input.reference": "a.fgrid"})

    def test_domain_errors_become_config_errors(self):
        with pytest.raises(ConfigError):
            resolve({"carrier.fx": 0.7})
        with pytest.raises(ConfigError):
            resolve({"grid.width": 4})
        with pytest.raises(ConfigError):
            resolve({"cwt.threshold_mode": "odd"})
        with pytest.raises(ConfigError):
            resolve({"render.contour_levels": 0})

    def test_echo_reparse_fixpoint(self):
        rc = resolve({"carrier.fx": 0.2, "noise.seed": 7})
        echoed = parse_config_text(echo_text(rc))
        rc2 = resolve(echoed)
        assert rc2.raw == rc.raw

    def test_echo_contains_derived_band(self):
        text = echo_text(resolve({}))
        assert "demod.band_x_hi = 0.225" in text
        assert "noise.rng = philox4x64" in text
        # the derived low edge echoes the exact float used
        echoed = parse_config_text(text)
        assert echoed["demod.band_x_lo"] == 0.125 - 0.1


FAST = [
    "--set", "grid.width=64", "--set", "grid.height=64",
    "--set", "phantom.sigma_x=10", "--set", "phantom.sigma_y=10",
    "--set", "phantom.peak=1.0",
    "--set", "demod.window_sigma=5", "--set", "demod.step=0.025",
    "--set", "demod.band_x_lo=0.05", "--set", "demod.band_x_hi=0.2",
    "--set", "demod.band_y_lo=-0.05", "--set", "demod.band_y_hi=0.05",
    "--set", "cwt.scales=2,5",
]


class TestCliSynth:
    def test_writes_fields_and_echo(self, tmp_path):
        out = tmp_path / "run"
        assert main(["synth", "--out", str(out)] + FAST) == 0
        for name in ("reference.fgrid", "deformed.fgrid", "phase_true.fgrid",
                     "config_echo.txt"):
            assert (out / name).exists()
        f = read_field(out / "reference.fgrid")
        assert f.grid.shape == (64, 64)

    def test_config_file(self, tmp_path):
        cfg = tmp_path / "run.cfg"
        cfg.write_text("grid.width = 64\ngrid.height = 64\n"
                       "phantom.sigma_x = 10\nphantom.sigma_y = 10\n")
        out = tmp_path / "o"
        assert main(["synth", "--config", str(cfg), "--out", str(out)]) == 0
        echo = (out / "config_echo.txt").read_text()
        assert "grid.width = 64" in echo

    def test_unknown_key_exits_2(self, tmp_path, capsys):
        code = main(["synth", "--out", str(tmp_path), "--set", "nope=1"])
        assert code == 2
        assert "config error" in capsys.readouterr().err

    def test_bad_config_file_exits_2(self, tmp_path):
        assert main(["synth", "--config", str(tmp_path / "none.cfg"),
                     "--out", str(tmp_path)]) == 2

    def test_unknown_subcommand_exits_2(self):
        with pytest.raises(SystemExit) as ei:
            main(["transmogrify"])
        assert ei.value.code == 2


class TestCliDemodCwt:
    def test_demod_and_cwt_roundtrip(self, tmp_path):
        synth_out = tmp_path / "s"
        assert main(["synth", "--out", str(synth_out)] + FAST) == 0
        demod_out = tmp_path / "d"
        assert main(["demod", "--out", str(demod_out),
                     "--reference", str(synth_out / "reference.fgrid"),
                     "--deformed", str(synth_out / "deformed.fgrid")]
                    + FAST) == 0
        phase = read_field(demod_out / "phase.fgrid")
        assert phase.grid.shape == (64, 64)
        cwt_out = tmp_path / "c"
        assert main(["cwt", "--out", str(cwt_out),
                     "--phase", str(demod_out / "phase.fgrid")] + FAST) == 0
        manifest = (cwt_out / "manifest.txt").read_text().splitlines()
        assert manifest[0] == "planes 2"
        assert (cwt_out / "plane_000_alpha2.fgrid").exists()
        assert (cwt_out / "plane_001_alpha5.fgrid").exists()

    def test_demod_missing_inputs_exits_2(self, tmp_path):
        assert main(["demod", "--out", str(tmp_path)] + FAST) == 2

    def test_demod_missing_file_exits_3(self, tmp_path, capsys):
        code = main(["demod", "--out", str(tmp_path),
                     "--reference", str(tmp_path / "no.fgrid"),
                     "--deformed", str(tmp_path / "no2.fgrid")] + FAST)
        assert code == 3
        assert "i/o error" in capsys.readouterr().err

    def test_corrupt_fgrid_exits_3(self, tmp_path):
        bad = tmp_path / "bad.fgrid"
        bad.write_bytes(b"FGRID 1 64 64 0\n\x00\x00")
        assert main(["cwt", "--out", str(tmp_path / "o"),
                     "--phase", str(bad)] + FAST) == 3

    def test_all_masked_exits_4(self, tmp_path, capsys):
        f = field_from_array(np.zeros((64, 64)), np.zeros((64, 64), dtype=bool))
        p = tmp_path / "masked.fgrid"
        write_field(p, f)
        code = main(["cwt", "--out", str(tmp_path / "o"),
                     "--phase", str(p)] + FAST)
        assert code == 4
        assert "numeric error" in capsys.readouterr().err


class TestCliRender:
    def test_heatmap_and_contours(self, tmp_path):
        f = field_from_array(np.arange(64, dtype=float).reshape(8, 8))
        src = tmp_path / "f.fgrid"
        write_field(src, f)
        ppm = tmp_path / "f.ppm"
        assert main(["render", "--field", str(src), str(ppm)]) == 0
        assert ppm.read_bytes().startswith(b"P6")
        assert (tmp_path / "f.ppm.txt").exists()
        csv = tmp_path / "f.csv"
        assert main(["render", "--field", str(src), "--style", "contours",
                     "--levels", "3", str(csv)]) == 0
        assert csv.read_text().startswith("level,segment,x,y")

    def test_bad_levels_exits_2(self, tmp_path):
        f = field_from_array(np.zeros((8, 8)))
        src = tmp_path / "f.fgrid"
        write_field(src, f)
        assert main(["render", "--field", str(src), "--style", "contours",
                     "--levels", "0", str(tmp_path / "x.csv")]) == 2


class TestCliPipeline:
    def test_outputs_and_counts(self, tmp_path):
        out = tmp_path / "p"
        assert main(["pipeline", "--out", str(out)] + FAST) == 0
        fgrids = sorted(q.name for q in out.glob("*.fgrid"))
        assert fgrids == ["deformed.fgrid", "phase.fgrid", "phase_true.fgrid",
                          "plane_000_alpha2.fgrid", "plane_001_alpha5.fgrid",
                          "reference.fgrid"]
        assert (out / "manifest.txt").exists()
        assert (out / "config_echo.txt").exists()
        assert (out / "phase.ppm").exists()
        assert (out / "phase_contours.csv").exists()
        # display-scale renders exist for the nearest grid scales
        assert (out / "plane_000_alpha2.ppm").exists()
        assert (out / "plane_001_alpha5.ppm").exists()

    def test_default_scale_grid_plane_count(self, tmp_path):
        out = tmp_path / "p"
        pairs = list(zip(FAST[::2], FAST[1::2]))
        args = [a for flag, val in pairs if val != "cwt.scales=2,5"
                for a in (flag, val)]
        assert main(["pipeline", "--out", str(out)] + args) == 0
        planes = list(out.glob("plane_*.fgrid"))
        assert len(planes) == 32
        manifest = (out / "manifest.txt").read_text().splitlines()
        assert manifest[0] == "planes 32"

    def test_deterministic_outputs(self, tmp_path):
        a, b = tmp_path / "a", tmp_path / "b"
        noisy = FAST + ["--set", "noise.sigma=0.05", "--set", "noise.seed=42"]
        assert main(["pipeline", "--out", str(a)] + noisy) == 0
        assert main(["pipeline", "--out", str(b)] + noisy) == 0
        for name in ("reference.fgrid", "deformed.fgrid", "phase.fgrid",
                     "plane_000_alpha2.fgrid"):
            assert (a / name).read_bytes() == (b / name).read_bytes()

    def test_input_files_instead_of_phantom(self, tmp_path):
        synth_out = tmp_path / "s"
        assert main(["synth", "--out", str(synth_out)] + FAST) == 0
        out = tmp_path / "p"
        args = FAST + [
            "--set", f"input.reference={synth_out / 'reference.fgrid'}",
            "--set", f"input.deformed={synth_out / 'deformed.fgrid'}",
        ]
        assert main(["pipeline", "--out", str(out)] + args) == 0
        assert (out / "phase.fgrid").exists()
        assert not (out / "phase_true.fgrid").exists()
