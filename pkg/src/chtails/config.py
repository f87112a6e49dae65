"""Run configuration: a strict JSON document with fixed sections.

Unknown keys, duplicate keys, wrong types and out-of-range values are all
rejected with an error naming the offending key.
"""

from __future__ import annotations

import dataclasses
import json
from dataclasses import dataclass, field, fields

from .dynamics import TimeStepConfig
from .grid import Grid1D
from .initial_data import KINDS, InitialData

__all__ = [
    "EXPERIMENTS",
    "ConfigError",
    "ScenarioConfig",
    "DiagnosticsConfig",
    "Tolerances",
    "OutputConfig",
    "RunConfig",
    "parse_config",
    "dump_config",
    "load_config",
]

EXPERIMENTS = ("persistence", "compact_support", "unique_continuation", "peakon",
               "fast_decay", "optimal_decay")


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class ScenarioConfig:
    experiment: str
    kind: str | None = None
    amplitude: float = 0.25
    center: float = 0.0
    width: float | None = None
    theta: float = 0.5
    c: float = 1.0
    epsilon: float = 0.1
    mu: float = 0.5
    t1: float = 0.5

    def __post_init__(self):
        if self.experiment not in EXPERIMENTS:
            raise ConfigError(f"scenario.experiment must be one of {EXPERIMENTS}, "
                              f"got {self.experiment!r}")
        if self.kind is not None and self.kind not in KINDS:
            raise ConfigError(f"scenario.kind must be one of {KINDS}, got {self.kind!r}")
        if not 0.0 < self.theta < 1.0:
            raise ConfigError(f"theta must be in (0,1), got {self.theta}")
        if self.width is not None and self.width <= 0:
            raise ConfigError(f"scenario.width must be positive, got {self.width}")
        if self.epsilon <= 0:
            raise ConfigError(f"scenario.epsilon must be positive, got {self.epsilon}")
        if self.mu <= 0:
            raise ConfigError(f"scenario.mu must be positive, got {self.mu}")
        if self.t1 <= 0:
            raise ConfigError(f"scenario.t1 must be positive, got {self.t1}")

    @property
    def default_kind(self) -> str:
        return {
            "persistence": "sech_tail",
            "compact_support": "compact_bump",
            "unique_continuation": "compact_bump",
            "peakon": "smoothed_peakon",
            "fast_decay": "gaussian",
            "optimal_decay": "exp_tail",
        }[self.experiment]

    def initial_data(self) -> InitialData:
        kind = self.kind or self.default_kind
        width = self.width if self.width is not None else _DEFAULT_WIDTH.get(kind, 2.0)
        return InitialData(
            kind=kind, amplitude=self.amplitude,
            center=self.center, width=width, theta=self.theta, c=self.c,
            epsilon=self.epsilon,
        )


@dataclass(frozen=True)
class DiagnosticsConfig:
    # right window is [x_max - margin - width, x_max - margin], left mirrored
    tail_margin: float = 45.0
    tail_width: float = 10.0
    weight_N: float = 40.0
    support_threshold: float = 1e-8

    def __post_init__(self):
        if self.tail_margin < 0:
            raise ConfigError("diagnostics.tail_margin must be >= 0")
        for name in ("tail_width", "weight_N"):
            if getattr(self, name) <= 0:
                raise ConfigError(f"diagnostics.{name} must be positive")
        if not 0.0 < self.support_threshold < 1.0:
            raise ConfigError("diagnostics.support_threshold must be in (0,1)")


@dataclass(frozen=True)
class Tolerances:
    slope_tol: float = 0.05
    r2_min: float = 0.999
    e_match_tol: float = 0.005
    e0_rel_tol: float = 1e-6
    dE_match_tol: float = 0.01
    monotone_eps: float = 1e-10
    support_pad_cells: int = 3
    support_rel: float = 1e-8
    value_floor: float = 1e-13
    persistence_slope_tol: float = 0.02
    uc_match_tol: float = 0.02
    peakon_distance_tol: float = 0.02
    peakon_shape_tol: float = 0.02
    conservation_rel_tol: float = 1e-6
    operator_rel_tol: float = 1e-4
    temporal_order: float = 4.0
    temporal_order_tol: float = 0.2
    spatial_order_min: float = 1.8
    kernel_stability_tol: float = 0.05

    def __post_init__(self):
        for f in fields(self):
            if not getattr(self, f.name) > 0:
                raise ConfigError(f"tolerances.{f.name} must be > 0")
        if self.r2_min >= 1.0:
            raise ConfigError("tolerances.r2_min must be < 1")


@dataclass(frozen=True)
class OutputConfig:
    directory: str = "ch_tails_out"
    profiles: bool = False


@dataclass(frozen=True)
class RunConfig:
    grid: Grid1D
    time: TimeStepConfig
    scenario: ScenarioConfig
    diagnostics: DiagnosticsConfig = field(default_factory=DiagnosticsConfig)
    tolerances: Tolerances = field(default_factory=Tolerances)
    output: OutputConfig = field(default_factory=OutputConfig)

    def to_dict(self) -> dict:
        return {name: dataclasses.asdict(getattr(self, name)) for name in _SECTIONS}

    def replace(self, **sections) -> "RunConfig":
        """Copy with per-section overrides.

        Each override is either a mapping of field updates, as in
        ``replace(time={"t_end": 0.5})``, or a whole section instance.
        """
        new = {}
        for name, cls in _SECTIONS.items():
            cur = getattr(self, name)
            upd = sections.pop(name, None)
            if isinstance(upd, cls):
                new[name] = upd
            else:
                new[name] = dataclasses.replace(cur, **upd) if upd else cur
        if sections:
            raise ConfigError(f"unknown section(s): {sorted(sections)}")
        return RunConfig(**new)


_SECTIONS = {
    "grid": Grid1D,
    "time": TimeStepConfig,
    "scenario": ScenarioConfig,
    "diagnostics": DiagnosticsConfig,
    "tolerances": Tolerances,
    "output": OutputConfig,
}

_DEFAULT_WIDTH = {"compact_bump": 2.0, "gaussian": 1.0}

_GRID_DEFAULTS = {"x_min": -60.0, "x_max": 60.0, "n": 8192}


def _reject_duplicates(pairs):
    out = {}
    for k, v in pairs:
        if k in out:
            raise ConfigError(f"duplicate key '{k}'")
        out[k] = v
    return out


def _coerce(section: str, key: str, value, annotation: str):
    where = f"{section}.{key}"
    ann = annotation.replace(" ", "")
    if ann == "bool":
        if not isinstance(value, bool):
            raise ConfigError(f"{where} must be a boolean")
        return value
    if isinstance(value, bool):
        raise ConfigError(f"{where} must be a number, got a boolean")
    if ann == "int":
        if isinstance(value, float) and value.is_integer():
            value = int(value)
        if not isinstance(value, int):
            raise ConfigError(f"{where} must be an integer, got {value!r}")
        return value
    if ann in ("float", "float|None"):
        if value is None and ann == "float|None":
            return None
        if not isinstance(value, (int, float)):
            raise ConfigError(f"{where} must be a number, got {value!r}")
        return float(value)
    if ann in ("str", "str|None"):
        if value is None and ann == "str|None":
            return None
        if not isinstance(value, str):
            raise ConfigError(f"{where} must be a string, got {value!r}")
        return value
    raise AssertionError(f"unhandled annotation {annotation}")


def _build(section: str, cls, raw) -> object:
    if not isinstance(raw, dict):
        raise ConfigError(f"section '{section}' must be an object")
    known = {f.name: f for f in fields(cls) if f.init}
    for key in raw:
        if key not in known:
            raise ConfigError(f"unknown key '{section}.{key}'")
    kwargs = {}
    for name, f in known.items():
        if name in raw:
            kwargs[name] = _coerce(section, name, raw[name], str(f.type))
        elif section == "grid":
            kwargs[name] = _GRID_DEFAULTS[name]
        elif f.default is dataclasses.MISSING and f.default_factory is dataclasses.MISSING:
            raise ConfigError(f"missing required key '{section}.{name}'")
    try:
        return cls(**kwargs)
    except ConfigError:
        raise
    except ValueError as exc:
        raise ConfigError(f"{section}: {exc}") from None


def parse_config(text: str) -> RunConfig:
    """Parse a JSON run configuration; omitted keys take their defaults."""
    try:
        doc = json.loads(text, object_pairs_hook=_reject_duplicates)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"invalid JSON: {exc}") from None
    if not isinstance(doc, dict):
        raise ConfigError("configuration must be a JSON object")
    for key in doc:
        if key not in _SECTIONS:
            raise ConfigError(f"unknown key '{key}'")
    if "scenario" not in doc:
        raise ConfigError("missing required key 'scenario'")
    built = {name: _build(name, cls, doc.get(name, {})) for name, cls in _SECTIONS.items()}
    return RunConfig(**built)


def dump_config(cfg: RunConfig) -> str:
    return json.dumps(cfg.to_dict(), indent=2) + "\n"


def load_config(path) -> RunConfig:
    with open(path, encoding="utf-8") as fh:
        return parse_config(fh.read())
