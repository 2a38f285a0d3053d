"""Experiment configuration: dataclasses, YAML parsing, overrides, validation.

Defaults follow the reference simulation setup: 0.1 x 0.1 km^2 cell, 30 m
minimum distance, ULA with 2-wavelength spacing at 2.6 GHz, aperture
N = 23.0610 m (99 antennas in 3 subarrays), K = 32 users in 2 groups,
path loss Omega = 4, nu = 3, noise -50 dBm, T = 5 iterations.
"""

import dataclasses
from dataclasses import dataclass, field, fields

import numpy as np
import yaml

from .errors import ConfigurationError
from .geometry import antennas_for_length, build_geometry

EXPERIMENTS = ("convergence", "se_vs_m", "ber", "flops")
DEFAULT_METHODS = ["direct", "gs", "jor", "cg", "jacpcg"]


@dataclass
class GeometryConfig:
    M: int | None = None          # derived from N when omitted
    N: float = 23.0610            # target aperture [m]
    S: int = 3
    carrier_hz: float = 2.6e9
    spacing_wavelengths: float = 2.0


@dataclass
class UsersConfig:
    K: int = 32
    L: int = 2
    cell_side: float = 100.0      # [m]
    min_dist: float = 30.0        # [m]


@dataclass
class ChannelConfig:
    omega: float = 4.0
    nu: float = 3.0
    rho: float = 0.5
    vr_mu_frac: float = 0.1       # mu_l = vr_mu_frac * N
    vr_sigma: float = 0.1
    vr_interpretation: str = "linear-mean"
    normalize_gain: bool = True   # calibrate mean per-user gain (see gain_ref_m)
    gain_ref_m: int = 99          # antenna count at which mean gain is unity
    gain_exponent: float = 2.0    # gain ~ (M / gain_ref_m)^exponent; 2 models
                                  # per-antenna power budget plus aperture gain


@dataclass
class PowerConfig:
    sigma2_dbm: float = -50.0
    snr_db: float = 5.0           # normalized transmit power [dB]; xi = 1/SNR

    @property
    def sigma2_watts(self) -> float:
        return 10.0 ** (self.sigma2_dbm / 10.0) / 1000.0

    @property
    def snr_linear(self) -> float:
        return 10.0 ** (self.snr_db / 10.0)

    @property
    def xi(self) -> float:
        return 1.0 / self.snr_linear

    @property
    def tx_power_watts(self) -> float:
        return self.sigma2_watts * self.snr_linear


@dataclass
class SolverConfig:
    method: str = "jacpcg"
    T: int = 5
    omega: float = 1.0            # JOR relaxation (1 = classical Jacobi)
    eps: float | None = None      # None = fixed-T mode
    w0: str = "zero"
    pcg_variant: str = "textbook"  # PCG inner products: "textbook" | "algorithm"


@dataclass
class RunConfig:
    seed: int = 0
    trials: int = 50
    experiment: str = "convergence"
    workers: int = 1
    methods: list = field(default_factory=lambda: list(DEFAULT_METHODS))
    t_max: int = 5
    m_grid: list = field(default_factory=lambda: [99, 132, 165, 198, 231, 264])
    k_grid: list = field(default_factory=lambda: [5, 10, 15, 20, 25, 30])
    snr_grid_db: list = field(default_factory=lambda: [0.0, 2.0, 4.0, 6.0, 8.0, 10.0])
    bits_per_point: int = 1_000_000
    symbols_per_channel: int = 512


@dataclass
class ExperimentConfig:
    geometry: GeometryConfig = field(default_factory=GeometryConfig)
    users: UsersConfig = field(default_factory=UsersConfig)
    channel: ChannelConfig = field(default_factory=ChannelConfig)
    power: PowerConfig = field(default_factory=PowerConfig)
    solver: SolverConfig = field(default_factory=SolverConfig)
    run: RunConfig = field(default_factory=RunConfig)


_SECTIONS = {f.name: f.type for f in fields(ExperimentConfig)}


def _coerce(value, target, path):
    if value is None:
        return None
    if target is float and isinstance(value, (int, float)):
        return float(value)
    if target is int:
        if isinstance(value, bool) or not isinstance(value, int):
            raise ConfigurationError(f"{path}: expected integer, got {value!r}")
        return value
    if target is bool and isinstance(value, bool):
        return value
    if target is str and isinstance(value, str):
        return value
    if target is list and isinstance(value, list):
        return list(value)
    raise ConfigurationError(
        f"{path}: expected {getattr(target, '__name__', target)}, got {value!r}")


_FIELD_TYPES = {
    # optional / union fields need explicit base types
    ("geometry", "M"): int,
    ("solver", "eps"): float,
}


def _fill_section(section_obj, data: dict, section: str):
    valid = {f.name: f for f in fields(section_obj)}
    for key, value in data.items():
        if key not in valid:
            raise ConfigurationError(f"unknown config key {section}.{key}")
        ftype = _FIELD_TYPES.get((section, key))
        if ftype is None:
            default = getattr(type(section_obj)(), key)
            ftype = list if isinstance(default, list) else type(default)
            if default is None:
                ftype = object
        if ftype is object:
            coerced = value
        else:
            coerced = _coerce(value, ftype, f"{section}.{key}")
        setattr(section_obj, key, coerced)
    return section_obj


def config_from_dict(data: dict | None) -> ExperimentConfig:
    """Build a validated config from a (possibly empty) nested dict."""
    cfg = ExperimentConfig()
    if data is None:
        data = {}
    if not isinstance(data, dict):
        raise ConfigurationError(f"config document must be a mapping, got {type(data)}")
    for section, content in data.items():
        if section not in _SECTIONS:
            raise ConfigurationError(f"unknown config section {section!r}")
        if content is None:
            continue
        if not isinstance(content, dict):
            raise ConfigurationError(f"section {section!r} must be a mapping")
        _fill_section(getattr(cfg, section), content, section)
    validate(cfg)
    return cfg


def parse_config(text: str) -> ExperimentConfig:
    """Parse a YAML config document; empty text yields the full default config."""
    try:
        data = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        raise ConfigurationError(f"malformed YAML: {exc}") from exc
    return config_from_dict(data)


def load_config(path: str) -> ExperimentConfig:
    with open(path, "r", encoding="utf-8") as fh:
        return parse_config(fh.read())


def apply_overrides(cfg: ExperimentConfig, overrides) -> ExperimentConfig:
    """Apply `section.key=value` overrides (values parsed as YAML scalars)."""
    for item in overrides:
        if "=" not in item:
            raise ConfigurationError(f"override {item!r} is not of the form key=value")
        path, raw = item.split("=", 1)
        parts = path.split(".")
        if len(parts) != 2:
            raise ConfigurationError(
                f"override key {path!r} must be section.key")
        section, key = parts
        if section not in _SECTIONS:
            raise ConfigurationError(f"unknown config section {section!r}")
        try:
            value = yaml.safe_load(raw)
        except yaml.YAMLError as exc:
            raise ConfigurationError(f"{path}: cannot parse {raw!r}: {exc}") from exc
        _fill_section(getattr(cfg, section), {key: value}, section)
    validate(cfg)
    return cfg


def resolved_antenna_count(cfg: ExperimentConfig) -> int:
    """Configured M, or the largest S-divisible count fitting the aperture N."""
    g = cfg.geometry
    if g.M is not None:
        return g.M
    spacing = g.spacing_wavelengths * (3.0e8 / g.carrier_hz)
    return antennas_for_length(g.N, g.S, spacing)


def build_geometry_from_config(cfg: ExperimentConfig, M: int | None = None):
    g = cfg.geometry
    return build_geometry(M if M is not None else resolved_antenna_count(cfg),
                          g.S, g.carrier_hz, g.spacing_wavelengths)


def validate(cfg: ExperimentConfig) -> None:
    g, u, ch, p, s, r = (cfg.geometry, cfg.users, cfg.channel, cfg.power,
                         cfg.solver, cfg.run)
    if g.S <= 0:
        raise ConfigurationError(f"geometry.S must be positive, got {g.S}")
    if g.M is not None and (g.M <= 0 or g.M % g.S != 0):
        raise ConfigurationError(
            f"geometry.M={g.M} must be a positive multiple of S={g.S}")
    if g.carrier_hz <= 0 or g.spacing_wavelengths <= 0:
        raise ConfigurationError("geometry.carrier_hz and spacing must be positive")
    if u.K <= 0 or u.L <= 0 or u.K % u.L != 0:
        raise ConfigurationError(
            f"users.K={u.K} must be a positive multiple of users.L={u.L}")
    if u.cell_side <= 0:
        raise ConfigurationError("users.cell_side must be positive")
    if u.min_dist >= np.hypot(u.cell_side, u.cell_side):
        raise ConfigurationError("users.min_dist exceeds the cell diagonal")
    if not 0.0 <= ch.rho < 1.0:
        raise ConfigurationError(f"channel.rho must lie in [0, 1), got {ch.rho}")
    if ch.omega <= 0 or ch.nu < 0:
        raise ConfigurationError("channel.omega must be > 0 and channel.nu >= 0")
    if ch.vr_sigma <= 0:
        raise ConfigurationError("channel.vr_sigma must be positive")
    if ch.vr_interpretation not in ("log-mean", "linear-mean"):
        raise ConfigurationError(
            f"channel.vr_interpretation must be 'log-mean' or 'linear-mean', "
            f"got {ch.vr_interpretation!r}")
    if ch.gain_ref_m <= 0:
        raise ConfigurationError(
            f"channel.gain_ref_m must be positive, got {ch.gain_ref_m}")
    if ch.gain_exponent < 0:
        raise ConfigurationError(
            f"channel.gain_exponent must be >= 0, got {ch.gain_exponent}")
    if s.T < 1:
        raise ConfigurationError(f"solver.T must be >= 1, got {s.T}")
    if s.omega <= 0:
        raise ConfigurationError(f"solver.omega must be positive, got {s.omega}")
    if s.eps is not None and s.eps <= 0:
        raise ConfigurationError(f"solver.eps must be positive or null, got {s.eps}")
    if s.method not in ("direct", "gs", "jor", "cg", "jacpcg"):
        raise ConfigurationError(f"unknown solver.method {s.method!r}")
    if s.pcg_variant not in ("textbook", "algorithm"):
        raise ConfigurationError(
            f"solver.pcg_variant must be 'textbook' or 'algorithm', "
            f"got {s.pcg_variant!r}")
    if r.experiment not in EXPERIMENTS:
        raise ConfigurationError(
            f"run.experiment must be one of {EXPERIMENTS}, got {r.experiment!r}")
    if r.trials < 1 or r.workers < 1 or r.t_max < 1:
        raise ConfigurationError("run.trials, run.workers and run.t_max must be >= 1")
    if r.bits_per_point < 1 or r.symbols_per_channel < 1:
        raise ConfigurationError("run.bits_per_point and symbols_per_channel must be >= 1")
    for name, grid in (("m_grid", r.m_grid), ("k_grid", r.k_grid),
                       ("snr_grid_db", r.snr_grid_db), ("methods", r.methods)):
        if not grid:
            raise ConfigurationError(f"run.{name} must be non-empty")
    for m in r.methods:
        if m not in ("direct", "gs", "jor", "cg", "jacpcg"):
            raise ConfigurationError(f"unknown method {m!r} in run.methods")
    for M in r.m_grid:
        if M % g.S != 0:
            raise ConfigurationError(
                f"run.m_grid entry {M} is not divisible by S={g.S}")


def config_to_dict(cfg: ExperimentConfig) -> dict:
    return dataclasses.asdict(cfg)
