"""Config parsing: units, validation, lossless round trips."""
import pytest

from qmemsim.config import (
    Config,
    ConfigError,
    config_hash,
    config_to_dict,
    example_template,
    format_quantity,
    load_config,
    parse_config,
    parse_quantity,
    save_config,
)
from qmemsim.jjfet import Logistic


def minimal_raw():
    return {
        "cell": {
            "z0": "50 ohm",
            "eps_eff": 6.45,
            "c_in": "20 fF",
            "c_couple": "40 fF",
            "tcr_half_len": "4.2 mm",
            "sc_len": "4.3 mm",
            "jj": {"i_c_max": "1.496 uA"},
        }
    }


class TestQuantityParsing:
    def test_microamp(self):
        errors = []
        assert parse_quantity("1.496 uA", "current", "k", errors) == pytest.approx(1.496e-6)
        assert errors == []

    def test_compact_form(self):
        errors = []
        assert parse_quantity("220pH", "inductance", "k", errors) == pytest.approx(220e-12)
        assert errors == []

    def test_missing_unit_names_key(self):
        errors = []
        parse_quantity("220", "inductance", "cell.l_j", errors)
        assert errors and "cell.l_j" in errors[0]

    def test_bare_number_rejected(self):
        errors = []
        parse_quantity(220, "inductance", "k", errors)
        assert errors and "missing unit" in errors[0]

    def test_unknown_suffix_rejected(self):
        errors = []
        parse_quantity("220 kH", "inductance", "k", errors)
        assert errors and "unknown unit" in errors[0]

    def test_wrong_family_rejected(self):
        errors = []
        parse_quantity("220 pH", "capacitance", "k", errors)
        assert errors and "expected a capacitance" in errors[0]

    def test_format_round_trip_exact(self):
        for value, family in [
            (4.071985827864012e-3, "length"),
            (500e-12, "inductance"),
            (1.4959362654633412e-6, "current"),
            (6.55e9, "frequency"),
            (5e-11, "time"),
        ]:
            errors = []
            back = parse_quantity(format_quantity(value, family), family, "k", errors)
            assert errors == []
            assert back == value  # bit-exact


class TestParseConfig:
    def test_minimal_with_defaults(self):
        cfg = parse_config(minimal_raw())
        assert cfg.cell.z0 == 50.0
        assert cfg.cell.jj.r_off == 1000.0
        assert cfg.cell.jj.c_j == pytest.approx(1e-15)
        assert cfg.sweep.coarse_step == pytest.approx(2e6)
        assert cfg.calibration is None

    def test_unknown_key_rejected(self):
        raw = minimal_raw()
        raw["cell"]["banana"] = 1
        with pytest.raises(ConfigError, match="banana"):
            parse_config(raw)

    def test_all_violations_reported(self):
        raw = minimal_raw()
        raw["cell"]["c_in"] = "20"
        raw["cell"]["sc_len"] = "4.3 GHz"
        raw["extra"] = {}
        with pytest.raises(ConfigError) as err:
            parse_config(raw)
        message = str(err.value)
        assert "c_in" in message
        assert "sc_len" in message
        assert "extra" in message

    def test_unphysical_value_rejected(self):
        raw = minimal_raw()
        raw["cell"]["tcr_half_len"] = "-4.2 mm"
        with pytest.raises(ConfigError, match="cell"):
            parse_config(raw)

    def test_logistic_gate_shape(self):
        raw = minimal_raw()
        raw["cell"]["jj"]["gate"] = {
            "v_pinch": "-1500 mV",
            "v_on": "0 mV",
            "shape": {"logistic": 4.0},
        }
        cfg = parse_config(raw)
        assert isinstance(cfg.cell.jj.gate.shape, Logistic)
        assert cfg.cell.jj.gate.v_pinch == pytest.approx(-1.5)

    def test_decreasing_array_targets_rejected(self):
        raw = minimal_raw()
        raw["array"] = {"targets": ["6.65 GHz", "6.55 GHz"]}
        with pytest.raises(ConfigError, match="increasing"):
            parse_config(raw)

    def test_calibration_section(self):
        raw = minimal_raw()
        raw["calibration"] = {"f_sc": "6.55 GHz", "l_anchor": "220 pH", "q_c": 2000.0}
        cfg = parse_config(raw)
        assert cfg.calibration.f_sc == pytest.approx(6.55e9)
        assert cfg.calibration.tcr_target == pytest.approx(6.55e9)


class TestRoundTrip:
    def make_config(self):
        raw = minimal_raw()
        raw["calibration"] = {"f_sc": "6.55 GHz", "l_anchor": "220 pH", "q_c": 2000.0}
        raw["array"] = {"targets": ["6.55 GHz", "6.65 GHz", "6.7 GHz", "6.75 GHz"]}
        return parse_config(raw)

    def test_save_load_is_lossless(self, tmp_path):
        cfg = self.make_config()
        path = tmp_path / "cfg.json"
        save_config(cfg, path)
        back = load_config(path)
        assert back == cfg

    def test_dict_round_trip_preserves_awkward_floats(self, tmp_path):
        # calibrated-geometry floats exercise the exactness nudging
        cfg = Config(
            cell=example_template().__class__(
                z0=50.0, eps_eff=6.45, c_in=1.9234747795929519e-14,
                tcr_half_len=4.071985827864012e-3,
                jj=example_template().jj, c_couple=4e-14,
                sc_len=4.269908981863058e-3, line_atten=5e-4,
            )
        )
        back = parse_config(config_to_dict(cfg))
        assert back.cell == cfg.cell

    def test_hash_is_stable(self, tmp_path):
        cfg = self.make_config()
        assert config_hash(cfg) == config_hash(self.make_config())

    def test_invalid_json_reported(self, tmp_path):
        path = tmp_path / "broken.json"
        path.write_text("{not json")
        with pytest.raises(ConfigError, match="JSON"):
            load_config(path)
