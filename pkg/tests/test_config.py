import math

import pytest
from hypothesis import given
from hypothesis import strategies as st

from clockinterf.config import (
    DEFAULT_CONFIG_TEXT,
    ConfigError,
    RunConfig,
    SweepSpec,
    parse_config,
    parse_config_text,
    parse_value,
)


def test_defaults_text_matches_defaults():
    assert parse_config_text(DEFAULT_CONFIG_TEXT) == RunConfig()


def test_empty_file_gives_defaults(tmp_path):
    path = tmp_path / "empty.ini"
    path.write_text("# nothing here\n")
    assert parse_config(path) == RunConfig()


def test_missing_file(tmp_path):
    with pytest.raises(ConfigError, match="cannot read"):
        parse_config(tmp_path / "nope.ini")


@pytest.mark.parametrize("text, kind, expected", [
    ("10us", "time", 1.0e-5),
    ("10 µs", "time", 1.0e-5),
    ("16 ms", "time", 0.016),
    ("2.5e-3", "time", 2.5e-3),
    ("4 um", "length", 4e-6),
    ("0.1 µm", "length", 1e-7),
    ("3 mm", "length", 3e-3),
    ("0.01 G/um", "gradient", 1e4),
    ("1 G/cm", "gradient", 100.0),
    ("25 MHz", "rate", 2 * math.pi * 25e6),
    ("100 rad/s", "rate", 100.0),
    ("90 deg", "angle", math.pi / 2),
    ("pi/2", "angle", math.pi / 2),
    ("-pi", "angle", -math.pi),
    ("0.9*pi", "angle", 0.9 * math.pi),
    ("3 pi/4 rad", "angle", 3 * math.pi / 4),
    ("250 mrad", "angle", 0.25),
    ("86.909180527 amu", "mass", 86.909180527 * 1.66053906660e-27),
    ("2e9 rad/s/m", "rate_gradient", 2e9),
])
def test_units(text, kind, expected):
    assert parse_value(text, kind) == pytest.approx(expected, rel=1e-15)


def test_microseconds_exact():
    assert parse_config_text("[sequence]\nT_R = 10us\n").sequence.T_R == 1.0e-5


@given(st.integers(0, 10**6))
def test_integer_microseconds_exact(n):
    assert parse_value(f"{n} us", "time") == float(f"{n}e-6")


@pytest.mark.parametrize("text, kind, match", [
    ("10 um", "time", "not a time unit"),
    ("3 kg", "length", "not a length unit"),
    ("fast", "time", "cannot parse"),
    ("2 deg", "number", "not a number unit"),
    ("pi/2 deg", "angle", "cannot follow"),
    ("2.5", "int", "integer"),
])
def test_unit_errors(text, kind, match):
    with pytest.raises(ConfigError, match=match):
        parse_value(text, kind)


def test_range_error_names_key():
    with pytest.raises(ConfigError, match=r"clock\.theta \(line 3\).*got 4\.0"):
        parse_config_text("# c\n[clock]\ntheta = 4.0\n")


def test_unknown_key_line():
    with pytest.raises(ConfigError, match=r"unknown key sequence\.T_X \(line 4\)"):
        parse_config_text("[sequence]\nT_R = 1 us\n\nT_X = 2\n")


def test_unknown_section():
    with pytest.raises(ConfigError, match=r"unknown section \[magic\]"):
        parse_config_text("[magic]\nx = 1\n")


def test_syntax_error():
    with pytest.raises(ConfigError, match="parse error.*line 2"):
        parse_config_text("[sequence]\nthis is not a key value pair\n")


def test_duplicate_key():
    with pytest.raises(ConfigError, match="parse error"):
        parse_config_text("[sequence]\nT_R = 1us\nT_R = 2us\n")


@pytest.mark.parametrize("text, match", [
    ("[sequence]\nv_max = 1.2\n", "sequence.v_max"),
    ("[sequence]\nT_G = -1 us\n", "sequence.T_G"),
    ("[sequence]\ndephasing = magic\n", "sequence.dephasing"),
    ("[packet]\ndelta = 0\n", "packet.delta"),
    ("[packet]\ngrid_points = 8\n", "packet.grid_points"),
    ("[noise]\nn_shots = 1\n", "noise.n_shots"),
    ("[noise]\natom_number = 0\n", "noise.atom_number"),
    ("[grid]\nC_values = 0, 1.5\n", "grid.C_values"),
    ("[multilevel]\nspins = 0.5, 0.3\n", "multilevel.spins"),
    ("[multilevel]\ntheta = 4\n", "multilevel.theta"),
])
def test_validation(text, match):
    with pytest.raises(ConfigError, match=match):
        parse_config_text(text)


def test_zeeman_rate_derived():
    cfg = parse_config_text("[zeeman]\ndz = 8 um\n")
    assert cfg.sequence.delta_omega == pytest.approx(2 * RunConfig().sequence.delta_omega)


def test_gravity_mode():
    cfg = parse_config_text("[sequence]\ndephasing = gravity\nT_sep = 1 ms\n[zeeman]\ndz = 1 um\n")
    assert cfg.delta_phi() == pytest.approx(1.714e-17, rel=1e-3)


def test_clock_theta_and_lists():
    cfg = parse_config_text(
        "[clock]\ntheta = pi/3\n[grid]\nD_I_values = 0, 0.5, 1\n[multilevel]\nspins = 1/2, 3/2, 8\n"
    )
    assert cfg.theta == pytest.approx(math.pi / 3)
    assert cfg.D_I_values == (0.0, 0.5, 1.0)
    assert cfg.spins == (0.5, 1.5, 8.0)


class TestSweep:
    def test_parse(self):
        cfg = parse_config_text(
            "[sweep]\nparameter = T_G\nstart = 0 us\nstop = 20 us\nsteps = 5\n"
        )
        assert cfg.sweep == SweepSpec("T_G", 0.0, 2e-5, 5)
        assert cfg.sweep.values() == pytest.approx([0, 5e-6, 1e-5, 1.5e-5, 2e-5])

    def test_endpoints_inclusive(self):
        values = SweepSpec("delta_phi", 0.0, math.pi, 7).values()
        assert values[0] == 0.0
        assert values[-1] == math.pi

    def test_steps(self):
        with pytest.raises(ConfigError, match="sweep.steps"):
            parse_config_text("[sweep]\nparameter = T_G\nstart = 0\nstop = 1 us\nsteps = 1\n")

    def test_units_follow_parameter(self):
        with pytest.raises(ConfigError, match="not a time unit"):
            parse_config_text("[sweep]\nparameter = T_R\nstart = 0 rad\nstop = 1 us\nsteps = 3\n")
        cfg = parse_config_text("[sweep]\nparameter = delta_phi\nstart = 0\nstop = pi\nsteps = 3\n")
        assert cfg.sweep.stop == math.pi

    def test_parameter_must_match_experiment(self):
        cfg = parse_config_text("[sweep]\nparameter = T_G\nstart = 0\nstop = 1 us\nsteps = 3\n")
        assert cfg.sweep_for("visibility-vs-TG").parameter == "T_G"
        with pytest.raises(ConfigError, match="sweeps 'T_R'"):
            cfg.sweep_for("population-transfer")

    def test_default_population_sweep(self):
        sweep = RunConfig().sweep_for("population-transfer")
        values = sweep.values()
        assert values[0] == 0.0 and values[-1] == pytest.approx(110e-6)
        assert values[1] - values[0] == pytest.approx(2e-6)


def test_overrides():
    cfg = RunConfig().with_overrides(seed=5, n_shots=20, output_dir="x", noiseless=True)
    assert (cfg.seed, cfg.n_shots, cfg.output_dir, cfg.noiseless) == (5, 20, "x", True)
    assert math.isinf(cfg.noise.atom_number)
    with pytest.raises(ConfigError, match="n_shots"):
        RunConfig().with_overrides(n_shots=1)


def test_to_dict_is_json_safe():
    import json
    d = RunConfig().with_overrides(noiseless=True).to_dict()
    json.dumps(d, allow_nan=False)
    assert d["noise"]["atom_number"] is None
