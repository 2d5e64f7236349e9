"""Run configuration: a flat TOML file of ``key = value`` pairs.

Rates, couplings and detunings are written in units of gamma; ``gamma``
itself and ``D`` are in rad/s, ``n_density`` in atoms/cm^3, ``lambda1`` in
cm and ``delta_phi`` in radians.  Complex
couplings may be given as strings such as ``"0.3+0.1j"``.  Tables and
arrays are rejected; every key must be one of :data:`DEFAULTS`.

Values are stored exactly as read, so :meth:`RunConfig.to_toml` re-emits a
file that parses back to an identical configuration.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from pathlib import Path

try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib

from .core import GAMMA_DEFAULT, ParameterError, StoplightError, SystemParams
from .susceptibility import QuadratureSpec


class ConfigError(StoplightError, ValueError):
    pass


DEFAULTS = {
    "gamma": GAMMA_DEFAULT,
    "Gamma12": 0.0,
    "Gamma13": 0.0,
    "Gamma23": 1e-3,
    "G": 0.3,
    "Omega": 1e-3,
    "g_probe": 1e-6,
    "Delta1": -50.0,
    "Delta2": -50.0,
    "Delta3": 0.0,
    "delta_phi": 0.0,
    "n_density": 1e12,
    "D": 1.33e9,
    "lambda1": 780.241e-7,
    "dipole_convention": "linewidth",
    "d13_sq": 0.0,
    "sweep_variable": "Omega",
    "sweep_start": 1e-4,
    "sweep_stop": 1e-2,
    "sweep_count": 200,
    "sweep_scale": "log",
    "quad_scheme": "trapezoid",
    "quad_nodes": 4001,
    "quad_cutoff_sigmas": 8.0,
    "quad_check": False,
    "fd_step": 1e-7,
    "bracket_lo": 1e-3,
    "bracket_hi": 3e-3,
    "output_path": "-",
    "output_format": "csv",
}

# keys scaled by gamma when building SystemParams
GAMMA_UNITS = ("Gamma12", "Gamma13", "Gamma23", "Delta1", "Delta2", "Delta3")
COMPLEX_GAMMA_UNITS = ("G", "Omega", "g_probe")
ABSOLUTE = ("gamma", "delta_phi", "n_density", "D", "lambda1")

STRING_CHOICES = {
    "dipole_convention": ("linewidth", "branch"),
    "sweep_variable": ("Delta1", "Omega", "G", "n"),
    "sweep_scale": ("linear", "log"),
    "quad_scheme": ("trapezoid", "gauss-hermite"),
    "output_format": ("csv", "json"),
}
INTEGER_KEYS = ("sweep_count", "quad_nodes")
BOOL_KEYS = ("quad_check",)
FREE_STRING_KEYS = ("output_path",)

# the sweep variable's value is written under this column name
SWEEP_COLUMNS = {
    "Delta1": "delta1_over_gamma",
    "Omega": "omega_over_gamma",
    "G": "g_over_gamma",
    "n": "n_per_cm3",
}


def _coerce(key, value):
    if key not in DEFAULTS:
        raise ConfigError(f"unknown configuration key {key!r}")
    if isinstance(value, (dict, list)):
        raise ConfigError(f"{key}: nested tables and arrays are not allowed")
    if key in STRING_CHOICES:
        if value not in STRING_CHOICES[key]:
            raise ConfigError(f"{key}: expected one of {STRING_CHOICES[key]}, got {value!r}")
        return value
    if key in FREE_STRING_KEYS:
        if not isinstance(value, str):
            raise ConfigError(f"{key}: expected a string, got {value!r}")
        return value
    if key in BOOL_KEYS:
        if not isinstance(value, bool):
            raise ConfigError(f"{key}: expected true or false, got {value!r}")
        return value
    if key in INTEGER_KEYS:
        if isinstance(value, bool) or not isinstance(value, int):
            raise ConfigError(f"{key}: expected an integer, got {value!r}")
        return value
    if key in COMPLEX_GAMMA_UNITS and isinstance(value, str):
        try:
            number = complex(value.replace(" ", ""))
        except ValueError:
            raise ConfigError(f"{key}: malformed complex number {value!r}") from None
        if not (math.isfinite(number.real) and math.isfinite(number.imag)):
            raise ConfigError(f"{key}: must be finite, got {value!r}")
        return value
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigError(f"{key}: expected a number, got {value!r}")
    if not math.isfinite(value):
        raise ConfigError(f"{key}: must be finite, got {value!r}")
    return float(value)


def parse_scalar(text):
    """Parse the right-hand side of ``--set key=value`` as a TOML value.

    Bare words that are not valid TOML are taken as strings.
    """
    try:
        return tomllib.loads(f"v = {text}")["v"]
    except tomllib.TOMLDecodeError:
        return text


def _toml_value(value):
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, int):
        return str(value)
    if isinstance(value, float):
        return repr(value)
    return '"' + value.replace("\\", "\\\\").replace('"', '\\"') + '"'


@dataclass(frozen=True)
class SweepSpec:
    variable: str
    start: float
    stop: float
    count: int
    scale: str


@dataclass(frozen=True)
class OutputSpec:
    path: str
    format: str


class RunConfig:
    """Resolved configuration with defaults filled in."""

    def __init__(self, values=None):
        merged = dict(DEFAULTS)
        for key, value in (values or {}).items():
            merged[key] = _coerce(key, value)
        self.values = merged
        self._validate()

    @classmethod
    def from_toml(cls, text, overrides=()):
        try:
            data = tomllib.loads(text)
        except tomllib.TOMLDecodeError as exc:
            raise ConfigError(f"malformed configuration: {exc}") from None
        for key, value in overrides:
            data[key] = value
        return cls(data)

    @classmethod
    def load(cls, path=None, overrides=()):
        text = ""
        if path is not None:
            try:
                text = Path(path).read_text()
            except OSError as exc:
                raise ConfigError(f"cannot read configuration {path}: {exc.strerror}") from None
        return cls.from_toml(text, overrides)

    def with_values(self, **changes) -> "RunConfig":
        return RunConfig({**self.values, **changes})

    def __getitem__(self, key):
        return self.values[key]

    def __eq__(self, other):
        return isinstance(other, RunConfig) and self.values == other.values

    def _validate(self):
        v = self.values
        if v["sweep_count"] < 2:
            raise ConfigError("sweep_count must be at least 2")
        if not v["sweep_start"] < v["sweep_stop"]:
            raise ConfigError("sweep_start must be below sweep_stop")
        if v["sweep_scale"] == "log" and not v["sweep_start"] > 0:
            raise ConfigError("sweep_start must be positive for a log sweep")
        if not v["fd_step"] > 0:
            raise ConfigError("fd_step must be positive")
        if v["d13_sq"] < 0:
            raise ConfigError("d13_sq must be non-negative (0 derives it from gamma)")
        try:
            self.params
            self.quad
        except ParameterError as exc:
            raise ConfigError(str(exc)) from None

    @property
    def gamma(self) -> float:
        return self.values["gamma"]

    @property
    def params(self) -> SystemParams:
        v = self.values
        gam = v["gamma"]
        kwargs = {key: v[key] for key in ABSOLUTE}
        kwargs.update({key: v[key] * gam for key in GAMMA_UNITS})
        for key in COMPLEX_GAMMA_UNITS:
            kwargs[key] = complex(str(v[key]).replace(" ", "")) * gam
        kwargs["dipole_convention"] = v["dipole_convention"]
        kwargs["d13_sq"] = v["d13_sq"] or None
        return SystemParams(**kwargs)

    @property
    def quad(self) -> QuadratureSpec:
        v = self.values
        return QuadratureSpec(v["quad_scheme"], v["quad_nodes"], v["quad_cutoff_sigmas"], v["quad_check"])

    @property
    def fd_step(self) -> float:
        return self.values["fd_step"] * self.gamma

    @property
    def sweep(self) -> SweepSpec:
        v = self.values
        return SweepSpec(v["sweep_variable"], v["sweep_start"], v["sweep_stop"],
                         v["sweep_count"], v["sweep_scale"])

    @property
    def bracket(self):
        """Stopping-field search bracket [rad/s]."""
        return self.values["bracket_lo"] * self.gamma, self.values["bracket_hi"] * self.gamma

    @property
    def output(self) -> OutputSpec:
        return OutputSpec(self.values["output_path"], self.values["output_format"])

    def to_toml(self) -> str:
        return "".join(f"{key} = {_toml_value(self.values[key])}\n" for key in DEFAULTS)
