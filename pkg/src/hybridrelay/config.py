"""Flat key-value run configuration and the figure presets."""
from __future__ import annotations

import json
import math
from dataclasses import dataclass
from typing import Optional

from .channel import RsiCoefficient, RsiFixed, SystemParams, db_to_linear
from .policy import BaselineKind
from .simulator import BufferMode

__all__ = ["ConfigError", "PRESETS", "POLICY_KINDS", "NUMERIC_KEYS", "RunConfig", "load_config", "params_from_values", "preset_points"]


class ConfigError(ValueError):
    pass


POLICY_KINDS = ("optimal",) + tuple(k.value for k in BaselineKind)

# physical parameters that may be swept or set numerically
NUMERIC_KEYS = (
    "p1_db", "p1", "p2_db", "p2", "sigma2_r", "sigma2_d",
    "i_r", "k_r", "omega1", "omega2", "r0", "gamma0",
)
# keys that cancel each other: setting one in a later layer drops the other
_ALTERNATIVES = {"p1": "p1_db", "p1_db": "p1", "p2": "p2_db", "p2_db": "p2", "i_r": "k_r", "k_r": "i_r"}

_SETTINGS = {
    "policy": str, "sweep_var": str, "sweep_start": float, "sweep_stop": float, "sweep_step": float,
    "series_var": str, "series_values": None, "horizon": int, "seed": int, "buffer": str,
    "warmup": int, "simulate": None, "format": str, "out": str, "jobs": int,
}

_BASE = {
    "sigma2_r": 1.0, "sigma2_d": 1.0, "omega1": 0.8, "omega2": 0.6, "i_r": 5.0,
    "policy": "optimal", "horizon": 1_000_000, "seed": 0, "buffer": "ideal",
    "simulate": False, "format": "csv", "jobs": 1,
}

PRESETS = {
    "fig3a": {**_BASE, "p1_db": 25.0, "p2_db": 25.0, "r0": 2.0,
              "sweep_var": "r0", "sweep_start": 0.25, "sweep_stop": 10.0, "sweep_step": 0.25},
    "fig3b": {**_BASE, "p1_db": 23.75, "p2_db": 25.0, "r0": 2.0,
              "sweep_var": "r0", "sweep_start": 0.25, "sweep_stop": 10.0, "sweep_step": 0.25},
    "fig3c": {**_BASE, "p1_db": 25.0, "p2_db": 30.0, "r0": 2.0,
              "sweep_var": "r0", "sweep_start": 0.25, "sweep_stop": 10.0, "sweep_step": 0.25},
    # I_r = 5 is an extra curve between non-RSI and the strong-RSI level 20
    "fig4": {**_BASE, "p1_db": 30.0, "p2_db": 30.0, "r0": 2.0, "i_r": 20.0,
             "series_var": "i_r", "series_values": [0.0, 5.0, 20.0],
             "sweep_var": "r0", "sweep_start": 0.5, "sweep_stop": 12.0, "sweep_step": 0.5},
    # RSI level unstated for this figure; the strong level I_R = P2 is used
    "fig5": {**{k: v for k, v in _BASE.items() if k != "i_r"}, "k_r": 1.0,
             "p1_db": 30.0, "p2_db": 30.0, "omega1": 0.8, "omega2": 0.8, "r0": 4.0,
             "sweep_var": "p1_db", "sweep_start": 0.0, "sweep_stop": 60.0, "sweep_step": 2.5},
    "fig6": {**{k: v for k, v in _BASE.items() if k != "i_r"}, "k_r": 1.0,
             "series_var": "k_r", "series_values": [0.0, 0.01, 1.0],
             "p1_db": 30.0, "p2_db": 30.0, "omega1": 0.8, "omega2": 0.8, "r0": 4.0,
             "sweep_var": "p2_db", "sweep_start": 0.0, "sweep_stop": 60.0, "sweep_step": 1.0},
}


def _parse_bool(v) -> bool:
    if isinstance(v, bool):
        return v
    s = str(v).strip().lower()
    if s in ("1", "true", "yes", "on"):
        return True
    if s in ("0", "false", "no", "off"):
        return False
    raise ConfigError(f"not a boolean: {v!r}")


def _parse_list(v) -> list:
    if isinstance(v, (list, tuple)):
        return [float(x) for x in v]
    return [float(x) for x in str(v).split(",") if x.strip()]


def _coerce(key: str, value):
    try:
        if key in NUMERIC_KEYS:
            out = float(value)
            if not math.isfinite(out):
                raise ValueError
            return out
        if key not in _SETTINGS:
            raise ConfigError(f"unknown config key {key!r}")
        kind = _SETTINGS[key]
        if key == "simulate":
            return _parse_bool(value)
        if key == "series_values":
            return _parse_list(value)
        if kind is int:
            f = float(value)
            if f != int(f):
                raise ValueError
            return int(f)
        return kind(value)
    except ConfigError:
        raise
    except (TypeError, ValueError):
        raise ConfigError(f"bad value for {key}: {value!r}") from None


def _merge(base: dict, layer: dict) -> dict:
    keys = list(layer)
    for k in keys:
        alt = _ALTERNATIVES.get(k)
        if alt is not None and alt in layer:
            raise ConfigError(f"{k} and {alt} are mutually exclusive")
    out = dict(base)
    for k in keys:
        alt = _ALTERNATIVES.get(k)
        if alt is not None:
            out.pop(alt, None)
        out[k] = _coerce(k, layer[k])
    return out


def params_from_values(values: dict) -> SystemParams:
    """Build :class:`SystemParams` from a flat mapping of physical keys."""
    def power(name):
        if name in values:
            return float(values[name])
        if f"{name}_db" in values:
            return db_to_linear(values[f"{name}_db"])
        raise ConfigError(f"missing {name} or {name}_db")

    if "k_r" in values:
        rsi = RsiCoefficient(float(values["k_r"]))
    else:
        rsi = RsiFixed(float(values.get("i_r", 0.0)))
    try:
        return SystemParams(
            p1=power("p1"),
            p2=power("p2"),
            sigma2_r=float(values.get("sigma2_r", 1.0)),
            sigma2_d=float(values.get("sigma2_d", 1.0)),
            rsi=rsi,
            omega1=float(values.get("omega1", 1.0)),
            omega2=float(values.get("omega2", 1.0)),
            r0=float(values.get("r0", 1.0)),
            gamma0_override=values.get("gamma0"),
        )
    except (TypeError, ValueError) as exc:
        raise ConfigError(str(exc)) from None


@dataclass(frozen=True)
class RunConfig:
    values: dict

    def __post_init__(self):
        v = self.values
        if v.get("policy", "optimal") not in POLICY_KINDS:
            raise ConfigError(f"policy must be one of {POLICY_KINDS}, got {v.get('policy')!r}")
        try:
            BufferMode(v.get("buffer", "ideal"))
        except ValueError:
            raise ConfigError(f"buffer must be ideal or strict, got {v.get('buffer')!r}") from None
        if v.get("format", "csv") not in ("csv", "json"):
            raise ConfigError(f"format must be csv or json, got {v.get('format')!r}")
        if v.get("horizon", 1) < 1:
            raise ConfigError("horizon must be >= 1")
        if v.get("seed", 0) < 0:
            raise ConfigError("seed must be >= 0")
        params_from_values(v)
        if "sweep_var" in v:
            self.sweep_values()
        if "series_var" in v:
            if v["series_var"] not in NUMERIC_KEYS:
                raise ConfigError(f"series_var must be one of {NUMERIC_KEYS}")
            if not v.get("series_values"):
                raise ConfigError("series_values is empty")
            if v["series_var"] == v.get("sweep_var"):
                raise ConfigError("series_var and sweep_var must differ")

    @property
    def params(self) -> SystemParams:
        return params_from_values(self.values)

    def get(self, key, default=None):
        return self.values.get(key, default)

    @property
    def policy_kind(self) -> str:
        return self.values.get("policy", "optimal")

    def sweep_values(self) -> list:
        v = self.values
        var = v.get("sweep_var")
        if var not in NUMERIC_KEYS:
            raise ConfigError(f"sweep_var must be one of {NUMERIC_KEYS}, got {var!r}")
        for k in ("sweep_start", "sweep_stop", "sweep_step"):
            if k not in v:
                raise ConfigError(f"missing {k}")
        start, stop, step = v["sweep_start"], v["sweep_stop"], v["sweep_step"]
        if step <= 0:
            raise ConfigError("sweep_step must be > 0")
        if stop < start:
            raise ConfigError("empty sweep: sweep_stop < sweep_start")
        n = int(math.floor((stop - start) / step + 1e-9)) + 1
        return [round(start + i * step, 10) for i in range(n)]

    def series(self) -> list:
        """``[(series_var, value)]`` pairs; a single ``(None, None)`` without a series."""
        var = self.values.get("series_var")
        if var is None:
            return [(None, None)]
        return [(var, float(x)) for x in self.values["series_values"]]

    def point_values(self, series_var=None, series_value=None, sweep_value=None) -> dict:
        """Physical values at one sweep point."""
        layer = {}
        if series_var is not None:
            layer[series_var] = series_value
        if sweep_value is not None:
            layer[self.values["sweep_var"]] = sweep_value
        out = dict(self.values)
        for k, val in layer.items():
            alt = _ALTERNATIVES.get(k)
            if alt is not None:
                out.pop(alt, None)
            out[k] = val
        return out


def load_config(preset: Optional[str] = None, path: Optional[str] = None, overrides=(), **flags) -> RunConfig:
    """Layer a preset, a JSON file, ``key=value`` overrides and explicit flags.

    Later layers win; setting ``p1`` drops an inherited ``p1_db`` (and the
    same for ``p2``/``p2_db`` and ``i_r``/``k_r``).
    """
    values: dict = {}
    if preset is not None:
        if preset not in PRESETS:
            raise ConfigError(f"unknown preset {preset!r}; choose from {sorted(PRESETS)}")
        values = dict(PRESETS[preset])
    if path is not None:
        with open(path) as fh:
            try:
                doc = json.load(fh)
            except json.JSONDecodeError as exc:
                raise ConfigError(f"{path}: {exc}") from None
        if not isinstance(doc, dict) or any(isinstance(x, dict) for x in doc.values()):
            raise ConfigError(f"{path}: expected a flat JSON object")
        values = _merge(values, doc)
    layer = {}
    for item in overrides:
        key, sep, val = item.partition("=")
        if not sep:
            raise ConfigError(f"override must be key=value, got {item!r}")
        layer[key.strip()] = val.strip()
    values = _merge(values, layer)
    values = _merge(values, {k: v for k, v in flags.items() if v is not None})
    return RunConfig(values)


def preset_points(names=None):
    """Every (name, physical values) point of the figure presets' sweeps."""
    for name in names or PRESETS:
        cfg = RunConfig(dict(PRESETS[name]))
        for series_var, series_value in cfg.series():
            for x in cfg.sweep_values():
                yield name, cfg.point_values(series_var, series_value, x)
