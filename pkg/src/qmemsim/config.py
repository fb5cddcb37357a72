"""Configuration files with explicit unit suffixes.

Configs are JSON.  Every dimensioned value is a string with a mandatory
unit suffix from a fixed table ("220 pH", "6.55 GHz"); unknown suffixes
and unknown keys are rejected, and validation reports every violation at
once, not just the first.  Dimensionless values (eps_eff, quality
factors, amplitudes) are plain numbers; the attenuation constant carries
its unit in the key name (nepers/m).
"""
from __future__ import annotations

import hashlib
import json
import math
from dataclasses import dataclass, field

from .calibrate import CalibrationTargets
from .cell import MemoryCell
from .jjfet import GateModel, JjFet, Linear, Logistic, critical_current_for_inductance

#: suffix -> (decimal exponent of the scale, unit family); all scales are
#: exact powers of ten so values are converted by shifting the decimal
#: exponent and doing a single correctly-rounded string-to-float pass,
#: which keeps file round trips bit-exact.
UNIT_TABLE = {
    "pH": (-12, "inductance"),
    "nH": (-9, "inductance"),
    "fF": (-15, "capacitance"),
    "pF": (-12, "capacitance"),
    "GHz": (9, "frequency"),
    "MHz": (6, "frequency"),
    "ns": (-9, "time"),
    "ps": (-12, "time"),
    "uA": (-6, "current"),
    "mV": (-3, "voltage"),
    "ohm": (0, "resistance"),
    "mm": (-3, "length"),
    "um": (-6, "length"),
}

#: preferred suffix per family when writing configs
_CANONICAL = {
    "inductance": "pH",
    "capacitance": "fF",
    "frequency": "GHz",
    "time": "ns",
    "current": "uA",
    "voltage": "mV",
    "resistance": "ohm",
    "length": "mm",
}


class ConfigError(ValueError):
    """Invalid configuration; the message lists every violation found."""


def _scaled_float(num_text: str, exp10: int) -> float:
    """num_text * 10^exp10 in one correctly-rounded conversion."""
    t = num_text.strip().lower()
    if "e" in t:
        mant, e = t.split("e", 1)
        exp10 += int(e)
    else:
        mant = t
    if not mant or mant in ("+", "-", ".", "+.", "-."):
        raise ValueError(num_text)
    return float(f"{mant}e{exp10}")


def parse_quantity(text, family: str, key: str, errors: list[str]) -> float:
    """Parse 'value unit' into SI units, checking the unit family."""
    if isinstance(text, (int, float)) and not isinstance(text, bool):
        errors.append(f"{key}: missing unit suffix (got bare number {text!r})")
        return math.nan
    if not isinstance(text, str):
        errors.append(f"{key}: expected a 'value unit' string, got {text!r}")
        return math.nan
    parts = text.replace("µ", "u").split()
    if len(parts) == 1:
        # allow the compact form "220pH"
        for suffix in UNIT_TABLE:
            if parts[0].endswith(suffix) and parts[0] != suffix:
                parts = [parts[0][: -len(suffix)], suffix]
                break
    if len(parts) != 2:
        errors.append(f"{key}: expected 'value unit', got {text!r}")
        return math.nan
    num_text, suffix = parts
    if suffix not in UNIT_TABLE:
        errors.append(f"{key}: unknown unit {suffix!r} (allowed: {', '.join(UNIT_TABLE)})")
        return math.nan
    exp10, fam = UNIT_TABLE[suffix]
    if fam != family:
        errors.append(f"{key}: unit {suffix!r} is a {fam}, expected a {family}")
        return math.nan
    try:
        value = _scaled_float(num_text, exp10)
    except (ValueError, OverflowError):
        errors.append(f"{key}: cannot parse number {num_text!r}")
        return math.nan
    if not math.isfinite(value):
        errors.append(f"{key}: value {text!r} overflows")
        return math.nan
    return value


def format_quantity(value: float, family: str) -> str:
    """Serialize an SI value losslessly in the family's canonical unit.

    The printed decimal, re-parsed through the exponent-shifting
    conversion, reproduces the exact float; the shortest faithful text
    wins, falling back to the exponent-shifted repr of the value (which
    is faithful by construction).
    """
    value = float(value)
    suffix = _CANONICAL[family]
    exp10 = UNIT_TABLE[suffix][0]
    s = value / (10.0 ** exp10)
    candidates = [f"{s:.{d}g}" for d in range(1, 18)]
    faithful = [c for c in candidates if _scaled_float(c, exp10) == value]
    if faithful:
        best = min(faithful, key=lambda c: (len(c), "e" in c))
        return f"{best} {suffix}"
    mant = repr(value)
    if "e" in mant:
        head, e = mant.split("e", 1)
        shifted = f"{head}e{int(e) - exp10}"
    else:
        shifted = f"{mant}e{-exp10}"
    return f"{shifted} {suffix}"


def _expect_number(raw, key: str, errors: list[str]) -> float:
    if isinstance(raw, bool) or not isinstance(raw, (int, float)):
        errors.append(f"{key}: expected a plain number, got {raw!r}")
        return math.nan
    return float(raw)


def _check_keys(raw: dict, allowed, where: str, errors: list[str]):
    for k in raw:
        if k not in allowed:
            errors.append(f"{where}: unknown key {k!r}")


# ------------------------- config model -------------------------


@dataclass(frozen=True)
class SweepSettings:
    band: tuple[float, float] = (5.8e9, 7.4e9)
    coarse_step: float = 2e6
    min_depth_db: float = 0.01


@dataclass(frozen=True)
class ModeMapSettings:
    l_min: float = 10e-12
    l_max: float = 500e-12
    points: int = 61


@dataclass(frozen=True)
class DynamicsSettings:
    dt_fraction_of_guard: float = 0.25
    rf_amplitude: float = 1.0
    gate_rise: float = 50e-12


@dataclass(frozen=True)
class Config:
    cell: MemoryCell
    calibration: CalibrationTargets | None = None
    sweep: SweepSettings = field(default_factory=SweepSettings)
    modemap: ModeMapSettings = field(default_factory=ModeMapSettings)
    dynamics: DynamicsSettings = field(default_factory=DynamicsSettings)
    array_targets: tuple[float, ...] = ()
    array_q_c: float = 2000.0


def _parse_gate(raw, errors) -> GateModel:
    allowed = {"v_pinch", "v_on", "shape"}
    _check_keys(raw, allowed, "cell.jj.gate", errors)
    v_pinch = parse_quantity(raw.get("v_pinch", "-2000 mV"), "voltage", "cell.jj.gate.v_pinch", errors)
    v_on = parse_quantity(raw.get("v_on", "0 mV"), "voltage", "cell.jj.gate.v_on", errors)
    shape_raw = raw.get("shape", "linear")
    shape: Linear | Logistic = Linear()
    if isinstance(shape_raw, str):
        if shape_raw != "linear":
            errors.append("cell.jj.gate.shape: expected 'linear' or {'logistic': steepness}")
    elif isinstance(shape_raw, dict) and set(shape_raw) == {"logistic"}:
        k = _expect_number(shape_raw["logistic"], "cell.jj.gate.shape.logistic", errors)
        if not math.isnan(k) and k > 0:
            shape = Logistic(steepness=k)
        elif not math.isnan(k):
            errors.append("cell.jj.gate.shape.logistic: steepness must be positive")
    else:
        errors.append("cell.jj.gate.shape: expected 'linear' or {'logistic': steepness}")
    if errors:
        return GateModel(-2.0, 0.0)
    try:
        return GateModel(v_pinch=v_pinch, v_on=v_on, shape=shape)
    except ValueError as exc:
        errors.append(f"cell.jj.gate: {exc}")
        return GateModel(-2.0, 0.0)


def _parse_jj(raw, errors) -> JjFet:
    allowed = {"i_c_max", "c_j", "r_off", "r_sub", "gate"}
    _check_keys(raw, allowed, "cell.jj", errors)
    kw = dict(
        i_c_max=parse_quantity(raw.get("i_c_max", "1 uA"), "current", "cell.jj.i_c_max", errors),
        c_j=parse_quantity(raw.get("c_j", "1 fF"), "capacitance", "cell.jj.c_j", errors),
        r_off=parse_quantity(raw.get("r_off", "1000 ohm"), "resistance", "cell.jj.r_off", errors),
        r_sub=parse_quantity(raw.get("r_sub", "1000000 ohm"), "resistance", "cell.jj.r_sub", errors),
        gate=_parse_gate(raw.get("gate", {}), errors),
    )
    if any(isinstance(v, float) and math.isnan(v) for v in kw.values()):
        return JjFet(i_c_max=1e-6)
    try:
        return JjFet(**kw)
    except ValueError as exc:
        errors.append(f"cell.jj: {exc}")
        return JjFet(i_c_max=1e-6)


def _parse_cell(raw, errors) -> MemoryCell:
    allowed = {
        "z0", "eps_eff", "line_atten_np_per_m", "c_in", "c_couple",
        "tcr_half_len", "sc_len", "jj",
    }
    _check_keys(raw, allowed, "cell", errors)
    kw = dict(
        z0=parse_quantity(raw.get("z0", "50 ohm"), "resistance", "cell.z0", errors),
        eps_eff=_expect_number(raw.get("eps_eff", 6.45), "cell.eps_eff", errors),
        c_in=parse_quantity(raw.get("c_in", "20 fF"), "capacitance", "cell.c_in", errors),
        c_couple=parse_quantity(raw.get("c_couple", "40 fF"), "capacitance", "cell.c_couple", errors),
        tcr_half_len=parse_quantity(raw.get("tcr_half_len", "4.2 mm"), "length", "cell.tcr_half_len", errors),
        sc_len=parse_quantity(raw.get("sc_len", "4.3 mm"), "length", "cell.sc_len", errors),
        line_atten=_expect_number(raw.get("line_atten_np_per_m", 5e-4), "cell.line_atten_np_per_m", errors),
        jj=_parse_jj(raw.get("jj", {}), errors),
    )
    if any(isinstance(v, float) and math.isnan(v) for v in kw.values()):
        return _fallback_cell()
    try:
        return MemoryCell(**kw)
    except ValueError as exc:
        errors.append(f"cell: {exc}")
        return _fallback_cell()


def _fallback_cell() -> MemoryCell:
    return MemoryCell(
        z0=50.0, eps_eff=6.45, c_in=20e-15, tcr_half_len=4.2e-3,
        jj=JjFet(i_c_max=1e-6), c_couple=40e-15, sc_len=4.3e-3,
    )


def parse_config(raw: dict) -> Config:
    """Validate a parsed JSON dict; raises ConfigError listing all faults."""
    errors: list[str] = []
    if not isinstance(raw, dict):
        raise ConfigError("config root must be a JSON object")
    allowed = {"cell", "calibration", "sweep", "modemap", "dynamics", "array"}
    _check_keys(raw, allowed, "config", errors)

    cell = _parse_cell(raw.get("cell", {}), errors)

    calibration = None
    if "calibration" in raw:
        c = raw["calibration"]
        _check_keys(c, {"f_sc", "l_anchor", "q_c", "f_tcr_on"}, "calibration", errors)
        f_sc = parse_quantity(c.get("f_sc", "6.55 GHz"), "frequency", "calibration.f_sc", errors)
        l_anchor = parse_quantity(c.get("l_anchor", "220 pH"), "inductance", "calibration.l_anchor", errors)
        q_c = _expect_number(c.get("q_c", 2000.0), "calibration.q_c", errors)
        f_tcr = None
        if "f_tcr_on" in c:
            f_tcr = parse_quantity(c["f_tcr_on"], "frequency", "calibration.f_tcr_on", errors)
        if not any(math.isnan(x) for x in (f_sc, l_anchor, q_c)):
            try:
                calibration = CalibrationTargets(f_sc=f_sc, l_anchor=l_anchor, q_c=q_c, f_tcr_on=f_tcr)
            except ValueError as exc:
                errors.append(f"calibration: {exc}")

    sweep = SweepSettings()
    if "sweep" in raw:
        s = raw["sweep"]
        _check_keys(s, {"band", "coarse_step", "min_depth_db"}, "sweep", errors)
        band = s.get("band", ["5.8 GHz", "7.4 GHz"])
        if not (isinstance(band, list) and len(band) == 2):
            errors.append("sweep.band: expected a [lo, hi] pair")
            band = ["5.8 GHz", "7.4 GHz"]
        lo = parse_quantity(band[0], "frequency", "sweep.band[0]", errors)
        hi = parse_quantity(band[1], "frequency", "sweep.band[1]", errors)
        step = parse_quantity(s.get("coarse_step", "2 MHz"), "frequency", "sweep.coarse_step", errors)
        depth = _expect_number(s.get("min_depth_db", 0.01), "sweep.min_depth_db", errors)
        if not any(math.isnan(x) for x in (lo, hi, step, depth)):
            if not lo < hi:
                errors.append("sweep.band: lo must be below hi")
            else:
                sweep = SweepSettings(band=(lo, hi), coarse_step=step, min_depth_db=depth)

    modemap = ModeMapSettings()
    if "modemap" in raw:
        m = raw["modemap"]
        _check_keys(m, {"l_min", "l_max", "points"}, "modemap", errors)
        l_min = parse_quantity(m.get("l_min", "10 pH"), "inductance", "modemap.l_min", errors)
        l_max = parse_quantity(m.get("l_max", "500 pH"), "inductance", "modemap.l_max", errors)
        pts = m.get("points", 61)
        if not isinstance(pts, int) or pts < 2:
            errors.append("modemap.points: expected an integer >= 2")
            pts = 61
        if not any(math.isnan(x) for x in (l_min, l_max)):
            if not 0 < l_min < l_max:
                errors.append("modemap: requires 0 < l_min < l_max")
            else:
                modemap = ModeMapSettings(l_min=l_min, l_max=l_max, points=pts)

    dynamics = DynamicsSettings()
    if "dynamics" in raw:
        d = raw["dynamics"]
        _check_keys(d, {"dt_fraction_of_guard", "rf_amplitude", "gate_rise"}, "dynamics", errors)
        frac = _expect_number(d.get("dt_fraction_of_guard", 0.25), "dynamics.dt_fraction_of_guard", errors)
        amp = _expect_number(d.get("rf_amplitude", 1.0), "dynamics.rf_amplitude", errors)
        rise = parse_quantity(d.get("gate_rise", "50 ps"), "time", "dynamics.gate_rise", errors)
        if not any(math.isnan(x) for x in (frac, amp, rise)):
            if not 0 < frac <= 1:
                errors.append("dynamics.dt_fraction_of_guard: must lie in (0, 1]")
            elif rise < 0:
                errors.append("dynamics.gate_rise: must be non-negative")
            else:
                dynamics = DynamicsSettings(dt_fraction_of_guard=frac, rf_amplitude=amp, gate_rise=rise)

    array_targets: tuple[float, ...] = ()
    array_q_c = 2000.0
    if "array" in raw:
        a = raw["array"]
        _check_keys(a, {"targets", "q_c"}, "array", errors)
        targets_raw = a.get("targets", [])
        if not isinstance(targets_raw, list):
            errors.append("array.targets: expected a list")
            targets_raw = []
        targets = [
            parse_quantity(t, "frequency", f"array.targets[{i}]", errors)
            for i, t in enumerate(targets_raw)
        ]
        array_q_c = _expect_number(a.get("q_c", 2000.0), "array.q_c", errors)
        if targets and not any(math.isnan(t) for t in targets):
            if any(b <= a_ for a_, b in zip(targets, targets[1:])):
                errors.append("array.targets: must be strictly increasing")
            else:
                array_targets = tuple(targets)

    if errors:
        raise ConfigError("invalid configuration:\n  - " + "\n  - ".join(errors))
    return Config(
        cell=cell,
        calibration=calibration,
        sweep=sweep,
        modemap=modemap,
        dynamics=dynamics,
        array_targets=array_targets,
        array_q_c=array_q_c,
    )


def load_config(path) -> Config:
    """Read and validate a JSON config file."""
    with open(path, "r", encoding="utf-8") as fh:
        try:
            raw = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"not valid JSON: {exc}") from exc
    return parse_config(raw)


def config_to_dict(cfg: Config) -> dict:
    """Serialize a Config back to its JSON form (lossless round trip)."""
    cell = cfg.cell
    jj = cell.jj
    shape = "linear" if isinstance(jj.gate.shape, Linear) else {"logistic": jj.gate.shape.steepness}
    out = {
        "cell": {
            "z0": format_quantity(cell.z0, "resistance"),
            "eps_eff": cell.eps_eff,
            "line_atten_np_per_m": cell.line_atten,
            "c_in": format_quantity(cell.c_in, "capacitance"),
            "c_couple": format_quantity(cell.c_couple, "capacitance"),
            "tcr_half_len": format_quantity(cell.tcr_half_len, "length"),
            "sc_len": format_quantity(cell.sc_len, "length"),
            "jj": {
                "i_c_max": format_quantity(jj.i_c_max, "current"),
                "c_j": format_quantity(jj.c_j, "capacitance"),
                "r_off": format_quantity(jj.r_off, "resistance"),
                "r_sub": format_quantity(jj.r_sub, "resistance"),
                "gate": {
                    "v_pinch": format_quantity(jj.gate.v_pinch, "voltage"),
                    "v_on": format_quantity(jj.gate.v_on, "voltage"),
                    "shape": shape,
                },
            },
        },
        "sweep": {
            "band": [
                format_quantity(cfg.sweep.band[0], "frequency"),
                format_quantity(cfg.sweep.band[1], "frequency"),
            ],
            "coarse_step": format_quantity(cfg.sweep.coarse_step, "frequency"),
            "min_depth_db": cfg.sweep.min_depth_db,
        },
        "modemap": {
            "l_min": format_quantity(cfg.modemap.l_min, "inductance"),
            "l_max": format_quantity(cfg.modemap.l_max, "inductance"),
            "points": cfg.modemap.points,
        },
        "dynamics": {
            "dt_fraction_of_guard": cfg.dynamics.dt_fraction_of_guard,
            "rf_amplitude": cfg.dynamics.rf_amplitude,
            "gate_rise": format_quantity(cfg.dynamics.gate_rise, "time"),
        },
    }
    if cfg.calibration is not None:
        cal = {
            "f_sc": format_quantity(cfg.calibration.f_sc, "frequency"),
            "l_anchor": format_quantity(cfg.calibration.l_anchor, "inductance"),
            "q_c": cfg.calibration.q_c,
        }
        if cfg.calibration.f_tcr_on is not None:
            cal["f_tcr_on"] = format_quantity(cfg.calibration.f_tcr_on, "frequency")
        out["calibration"] = cal
    if cfg.array_targets:
        out["array"] = {
            "targets": [format_quantity(t, "frequency") for t in cfg.array_targets],
            "q_c": cfg.array_q_c,
        }
    return out


def save_config(cfg: Config, path):
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(config_to_dict(cfg), fh, indent=2, sort_keys=True)
        fh.write("\n")


def config_hash(cfg: Config) -> str:
    """Stable hash of the resolved configuration."""
    blob = json.dumps(config_to_dict(cfg), sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(blob.encode("utf-8")).hexdigest()


# ------------------------- shipped example -------------------------


def example_template() -> MemoryCell:
    """Uncalibrated template cell the example config is derived from."""
    return MemoryCell(
        z0=50.0,
        eps_eff=6.45,
        c_in=20e-15,
        tcr_half_len=4.2e-3,
        jj=JjFet(i_c_max=critical_current_for_inductance(220e-12)),
        c_couple=40e-15,
        sc_len=4.3e-3,
        line_atten=5e-4,
    )


def example_config(calibrated: bool = True) -> Config:
    """The shipped example: four-cell band plan, 220 pH anchor, 1 kohm OFF.

    With calibrated=True (default) the cell geometry is solved for the
    6.55 GHz target so spectra and mode maps reproduce the anchored
    behavior out of the box.
    """
    targets = CalibrationTargets(f_sc=6.55e9, l_anchor=220e-12, q_c=2000.0)
    cell = example_template()
    if calibrated:
        from .calibrate import calibrate_geometry

        cell = calibrate_geometry(targets, cell)
    return Config(
        cell=cell,
        calibration=targets,
        array_targets=(6.55e9, 6.65e9, 6.70e9, 6.75e9),
        array_q_c=2000.0,
    )
