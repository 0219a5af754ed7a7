"""Scenario documents, built-in tariffs/battery, and synthetic daily profiles.

Scenario document format (UTF-8 JSON object, ``format_version`` 1)::

    {
      "format_version": 1,                       required, must be 1
      "name": "summer-sunny-weekday-low",        optional string
      "metadata": {"season": "summer",           optional; season in {summer, winter},
                   "weather": "sunny",           weather in {sunny, cloudy},
                   "day_type": "weekday",        day_type in {weekday, weekend},
                   "synthetic": true},           synthetic is a bool
      "horizon": 24,                             optional int, defaults to len(load)
      "load": [...],                             required, kWh per hour
      "generation": [...],                       required, kWh per hour
      "tariff": {"energy_price": [...],          required; cents/kWh per hour
                 "demand_rate": 20.0},           cents/kW
               or {"builtin": "summer", "demand_level": "low"},
      "battery": {"capacity": 1.8,               required; kWh
                  "charge_limit": 0.6,           kW
                  "discharge_limit": 0.6,        kW
                  "nominal_capacity": 2.0}       optional, informational
               or "builtin",
      "initial_charge": 0.0,                     optional, kWh, default 0
      "cyclic": false                            optional, default false
    }

Unknown keys are rejected at every level. :func:`write_scenario` always emits
the inline tariff and battery forms, keys in the order above, two-space
indentation, arrays on one line, and floats in shortest round-trip form, so
``parse_scenario(write_scenario(s)) == s`` holds exactly.

The synthetic profiles are NOT measured data. They only mimic the shape of a
residential day (two load peaks, evening dominant; PV bell around solar noon)
so the algorithms have something realistic to chew on.
"""

from __future__ import annotations

import csv
import io
import json
import os
from typing import Iterator, Union

import numpy as np

from .domain import BatterySpec, Scenario, ScenarioMeta, Tariff, validate_scenario

FORMAT_VERSION = 1

SEASONS = ("summer", "winter")
WEATHERS = ("sunny", "cloudy")
DAY_TYPES = ("weekday", "weekend")
DEMAND_LEVELS = ("low", "high")

# cents/kWh for hour h -> h+1, h = 0..23
SUMMER_PRICES = (5, 5, 5, 5, 5, 5, 5, 10, 10, 10, 10, 15,
                 15, 15, 15, 15, 15, 10, 10, 5, 5, 5, 5, 5)
WINTER_PRICES = (5, 5, 5, 5, 5, 5, 5, 15, 15, 15, 15, 10,
                 10, 10, 10, 10, 10, 15, 15, 5, 5, 5, 5, 5)
DEMAND_RATES = {"low": 20.0, "high": 30.0}  # cents/kW

PV_DC_RATING_KW = 3.0
PV_DERATE = 0.77
CLOUDY_FACTOR = 0.3
DEFAULT_DAILY_LOAD = {"summer": 16.0, "winter": 22.0}  # kWh


class ScenarioFormatError(ValueError):
    """Malformed scenario document; ``field`` names the offending key path."""

    def __init__(self, message: str, field: str = "", line: int | None = None):
        self.field = field
        self.line = line
        where = []
        if line is not None:
            where.append(f"line {line}")
        if field:
            where.append(f"field '{field}'")
        prefix = f"{', '.join(where)}: " if where else ""
        super().__init__(prefix + message)


def builtin_tariff(season: str, demand_level: str) -> Tariff:
    """Three-level seasonal TOU prices with a low or high demand rate."""
    if season not in SEASONS:
        raise ValueError(f"season must be one of {SEASONS}, got {season!r}")
    if demand_level not in DEMAND_LEVELS:
        raise ValueError(f"demand_level must be one of {DEMAND_LEVELS}, got {demand_level!r}")
    prices = SUMMER_PRICES if season == "summer" else WINTER_PRICES
    return Tariff(np.array(prices, dtype=float), DEMAND_RATES[demand_level])


def builtin_battery() -> BatterySpec:
    """2 kWh pack run over 1.8 kWh of usable range at 0.6 kW either way."""
    return BatterySpec(capacity=1.8, charge_limit=0.6, discharge_limit=0.6,
                       nominal_capacity=2.0)


def _bump(h: np.ndarray, center: float, width: float) -> np.ndarray:
    return np.exp(-0.5 * ((h - center) / width) ** 2)


def synth_profile(season: str, weather: str, day_type: str,
                  scale: float | None = None, seed: int = 0) -> tuple[np.ndarray, np.ndarray]:
    """Synthetic hourly load and PV generation for one day (kWh per hour).

    Args:
        season: ``summer`` or ``winter``.
        weather: ``sunny`` or ``cloudy``; cloudy cuts PV output by 70%.
        day_type: ``weekday`` or ``weekend``; weekends get a later, flatter morning.
        scale: daily load total in kWh (defaults per season).
        seed: noise seed. The same seed gives the same noise for every weather,
            so a cloudy day is exactly a dimmed copy of the sunny one.
    """
    if season not in SEASONS or weather not in WEATHERS or day_type not in DAY_TYPES:
        raise ValueError(f"unknown profile ({season}, {weather}, {day_type})")
    if scale is None:
        scale = DEFAULT_DAILY_LOAD[season]
    rng = np.random.default_rng(seed)
    h = np.arange(24) + 0.5

    if day_type == "weekday":
        morning = 0.55 * _bump(h, 7.5, 1.1)
    else:
        morning = 0.45 * _bump(h, 9.5, 2.0)
    evening = 1.0 * _bump(h, 19.0, 1.8)
    base = 0.30 if season == "summer" else 0.40
    load = (base + morning + evening) * rng.lognormal(0.0, 0.05, 24)
    load *= scale / load.sum()

    if season == "summer":
        noon, width, sunrise, sunset, strength = 13.5, 3.0, 6.0, 21.0, 1.0
    else:
        noon, width, sunrise, sunset, strength = 12.5, 2.0, 8.0, 17.0, 0.55
    peak = PV_DC_RATING_KW * PV_DERATE * strength
    daylight = (h > sunrise) & (h < sunset)
    gen = np.where(daylight, peak * _bump(h, noon, width), 0.0)
    gen *= rng.lognormal(0.0, 0.05, 24)
    if weather == "cloudy":
        gen *= CLOUDY_FACTOR
    return load, gen


def builtin_scenario(season: str, weather: str, day_type: str, demand_level: str,
                     seed: int = 0, scale: float | None = None) -> Scenario:
    load, gen = synth_profile(season, weather, day_type, scale, seed)
    return Scenario(
        load=load,
        generation=gen,
        tariff=builtin_tariff(season, demand_level),
        battery=builtin_battery(),
        initial_charge=0.0,
        name=f"{season}-{weather}-{day_type}-{demand_level}",
        meta=ScenarioMeta(season=season, weather=weather, day_type=day_type, synthetic=True),
    )


def case_grid() -> Iterator[tuple[int, str, str, str, str]]:
    """The 16 (case, rate, season, weather, day type) combinations in table order."""
    case = 1
    for level in DEMAND_LEVELS:
        for season in SEASONS:
            for weather in WEATHERS:
                for day_type in DAY_TYPES:
                    yield case, level, season, weather, day_type
                    case += 1


def builtin_cases(seed: int = 0) -> list[Scenario]:
    """Synthetic stand-ins for the 16 cases.

    Low/high-rate twins share a profile, and sunny/cloudy twins share load.
    """
    out = []
    for case, level, season, weather, day_type in case_grid():
        profile_seed = seed + 2 * SEASONS.index(season) + DAY_TYPES.index(day_type)
        s = builtin_scenario(season, weather, day_type, level, seed=profile_seed)
        out.append(s.replace(name=f"case{case:02d}-{s.name}"))
    return out


# --- documents --------------------------------------------------------------

_TOP_KEYS = ("format_version", "name", "metadata", "horizon", "load", "generation",
             "tariff", "battery", "initial_charge", "cyclic")
_META_KEYS = {"season": SEASONS, "weather": WEATHERS, "day_type": DAY_TYPES, "synthetic": None}
_BATTERY_KEYS = ("capacity", "charge_limit", "discharge_limit", "nominal_capacity")


def _number(value, field: str) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ScenarioFormatError(f"expected a number, got {type(value).__name__}", field)
    return float(value)


def _numbers(value, field: str) -> np.ndarray:
    if not isinstance(value, list):
        raise ScenarioFormatError(f"expected an array of numbers, got {type(value).__name__}", field)
    return np.array([_number(v, f"{field}[{i}]") for i, v in enumerate(value)], dtype=float)


def _check_keys(obj, allowed, field: str):
    if not isinstance(obj, dict):
        raise ScenarioFormatError(f"expected an object, got {type(obj).__name__}", field)
    unknown = sorted(set(obj) - set(allowed))
    if unknown:
        where = f"{field}.{unknown[0]}" if field else unknown[0]
        raise ScenarioFormatError("unknown field", where)


def _require(obj: dict, key: str, field: str):
    if key not in obj:
        raise ScenarioFormatError("missing required field", f"{field}.{key}" if field else key)
    return obj[key]


def _parse_tariff(obj) -> Tariff:
    if isinstance(obj, dict) and "builtin" in obj:
        _check_keys(obj, ("builtin", "demand_level"), "tariff")
        season = _require(obj, "builtin", "tariff")
        level = _require(obj, "demand_level", "tariff")
        if season not in SEASONS:
            raise ScenarioFormatError(f"must be one of {SEASONS}", "tariff.builtin")
        if level not in DEMAND_LEVELS:
            raise ScenarioFormatError(f"must be one of {DEMAND_LEVELS}", "tariff.demand_level")
        return builtin_tariff(season, level)
    _check_keys(obj, ("energy_price", "demand_rate"), "tariff")
    return Tariff(
        _numbers(_require(obj, "energy_price", "tariff"), "tariff.energy_price"),
        _number(_require(obj, "demand_rate", "tariff"), "tariff.demand_rate"),
    )


def _parse_battery(obj) -> BatterySpec:
    if obj == "builtin":
        return builtin_battery()
    _check_keys(obj, _BATTERY_KEYS, "battery")
    nominal = obj.get("nominal_capacity")
    return BatterySpec(
        capacity=_number(_require(obj, "capacity", "battery"), "battery.capacity"),
        charge_limit=_number(_require(obj, "charge_limit", "battery"), "battery.charge_limit"),
        discharge_limit=_number(_require(obj, "discharge_limit", "battery"),
                                "battery.discharge_limit"),
        nominal_capacity=None if nominal is None else _number(nominal, "battery.nominal_capacity"),
    )


def _parse_meta(obj) -> ScenarioMeta:
    _check_keys(obj, _META_KEYS, "metadata")
    kwargs = {}
    for key, choices in _META_KEYS.items():
        if key not in obj:
            continue
        val = obj[key]
        if choices is None:
            if not isinstance(val, bool):
                raise ScenarioFormatError("expected true or false", f"metadata.{key}")
        elif val not in choices:
            raise ScenarioFormatError(f"must be one of {choices}", f"metadata.{key}")
        kwargs[key] = val
    return ScenarioMeta(**kwargs)


def parse_scenario(document: Union[bytes, str]) -> Scenario:
    """Parse and validate a scenario document.

    Raises:
        ScenarioFormatError: bad JSON (with line number), missing, unknown or
            mistyped fields.
        ScenarioValidationError: the parsed scenario breaks an invariant.
    """
    if isinstance(document, bytes):
        document = document.decode("utf-8")
    try:
        doc = json.loads(document)
    except json.JSONDecodeError as exc:
        raise ScenarioFormatError(f"syntax error: {exc.msg} (column {exc.colno})",
                                  line=exc.lineno) from None
    _check_keys(doc, _TOP_KEYS, "")
    version = _require(doc, "format_version", "")
    if version != FORMAT_VERSION or isinstance(version, bool):
        raise ScenarioFormatError(f"unsupported version {version!r}", "format_version")

    name = doc.get("name", "")
    if not isinstance(name, str):
        raise ScenarioFormatError("expected a string", "name")
    horizon = doc.get("horizon")
    if horizon is not None and (isinstance(horizon, bool) or not isinstance(horizon, int)):
        raise ScenarioFormatError("expected an integer", "horizon")
    cyclic = doc.get("cyclic", False)
    if not isinstance(cyclic, bool):
        raise ScenarioFormatError("expected true or false", "cyclic")

    s = Scenario(
        load=_numbers(_require(doc, "load", ""), "load"),
        generation=_numbers(_require(doc, "generation", ""), "generation"),
        tariff=_parse_tariff(_require(doc, "tariff", "")),
        battery=_parse_battery(_require(doc, "battery", "")),
        initial_charge=_number(doc.get("initial_charge", 0.0), "initial_charge"),
        horizon=horizon,
        cyclic=cyclic,
        name=name,
        meta=_parse_meta(doc.get("metadata", {})),
    )
    return validate_scenario(s)


def _dump(value) -> str:
    return json.dumps(value, separators=(", ", ": "))


def _floats(arr) -> list[float]:
    return [float(v) for v in arr]


def write_scenario(s: Scenario) -> bytes:
    """Serialize a valid scenario; the output parses back to an equal value."""
    validate_scenario(s)
    meta = {k: getattr(s.meta, k) for k in ("season", "weather", "day_type")
            if getattr(s.meta, k) is not None}
    meta["synthetic"] = s.meta.synthetic
    battery = {
        "capacity": s.battery.capacity,
        "charge_limit": s.battery.charge_limit,
        "discharge_limit": s.battery.discharge_limit,
    }
    if s.battery.nominal_capacity is not None:
        battery["nominal_capacity"] = s.battery.nominal_capacity
    fields = [
        ("format_version", FORMAT_VERSION),
        ("name", s.name),
        ("metadata", meta),
        ("horizon", s.horizon),
        ("load", _floats(s.load)),
        ("generation", _floats(s.generation)),
        ("tariff", {"energy_price": _floats(s.tariff.energy_price),
                    "demand_rate": s.tariff.demand_rate}),
        ("battery", battery),
        ("initial_charge", s.initial_charge),
        ("cyclic", s.cyclic),
    ]
    body = ",\n".join(f"  {_dump(k)}: {_dump(v)}" for k, v in fields)
    return ("{\n" + body + "\n}\n").encode("utf-8")


def load_scenario(path: Union[str, os.PathLike]) -> Scenario:
    with open(path, "rb") as fh:
        return parse_scenario(fh.read())


def save_scenario(path: Union[str, os.PathLike], s: Scenario) -> None:
    with open(path, "wb") as fh:
        fh.write(write_scenario(s))


# --- profile CSV ------------------------------------------------------------

PROFILE_HEADER = ("hour", "load_kwh", "gen_kwh")


def read_profile_csv(source: Union[str, os.PathLike, io.TextIOBase],
                     rows: int = 24) -> tuple[np.ndarray, np.ndarray]:
    """Read ``hour,load_kwh,gen_kwh`` rows (hours 0..rows-1 in order)."""
    if isinstance(source, (str, os.PathLike)):
        with open(source, newline="") as fh:
            return read_profile_csv(fh, rows)
    reader = csv.reader(source)
    header = next(reader, None)
    if header is None or tuple(c.strip() for c in header) != PROFILE_HEADER:
        raise ScenarioFormatError(f"header must be {','.join(PROFILE_HEADER)}", line=1)
    load, gen = [], []
    for lineno, row in enumerate(reader, start=2):
        if not row or all(not c.strip() for c in row):
            continue
        if len(row) != 3:
            raise ScenarioFormatError(f"expected 3 columns, got {len(row)}", line=lineno)
        try:
            hour = int(row[0])
            load.append(float(row[1]))
            gen.append(float(row[2]))
        except ValueError as exc:
            raise ScenarioFormatError(str(exc), line=lineno) from None
        if hour != len(load) - 1:
            raise ScenarioFormatError(f"expected hour {len(load) - 1}, got {hour}", "hour",
                                      line=lineno)
    if len(load) != rows:
        raise ScenarioFormatError(f"expected {rows} data rows, got {len(load)}")
    return np.array(load), np.array(gen)


def scenario_from_profile(load, generation, season: str, demand_level: str,
                          name: str = "", initial_charge: float = 0.0) -> Scenario:
    s = Scenario(
        load=load,
        generation=generation,
        tariff=builtin_tariff(season, demand_level),
        battery=builtin_battery(),
        initial_charge=initial_charge,
        name=name,
        meta=ScenarioMeta(season=season),
    )
    return validate_scenario(s)
