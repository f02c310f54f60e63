#!/usr/bin/env python3

"""options.py: Run configuration.

A run is described by one YAML document. Every key is optional and falls back
to the defaults below; unknown keys are rejected so that typos do not pass
silently.

    schema_version: 1
    device:      {state_table, iv_samples, r_prog, v_set, v_stop, fit_window}
    design:      {v_eq, c1, alpha, beta}
    circuit:     {r, r_n, l, c1, c2}          # explicit component overrides
    integration: {method, init, dt, t_end, t_transient, record_stride,
                  soa_policy, abs_tol, rel_tol, max_events}
    analysis:    {r_vis_fraction, cluster_tol, max_clusters, lambda_periodic,
                  fixed_point_tol, dead_band, min_samples, d0, lyapunov}
    sweep:       {mode, n_points, r_factors, r_range, sigma, init_sigma, workers}
    seed: 0
    output: memchua_output
    prefix: ""
"""

import dataclasses
import logging
import os

from dataclasses import dataclass, field
from typing import Optional, Tuple

import yaml

from memchua.analysis import AnalysisConfig, SweepSettings
from memchua.design import DesignSpec
from memchua.errors import ConfigError
from memchua.integrate import IntegrationConfig


__author__ = "MemChua developers"
__copyright__ = "Copyright 2024-2026, MemChua Project"
__credits__ = ["MemChua developers"]
__license__ = "BSD-3"
__version__ = "1.0.0"
__maintainer__ = "MemChua developers"
__email__ = "memchua-dev@users.noreply.github.com"
__status__ = "Production"


logger = logging.getLogger(f"MemChua {__version__}")

SCHEMA_VERSION = 1
CONFIG_ENVVAR = "MEMCHUA_CONFIG"

# Defaults resolved against the integration section
INTEGRATION_DEFAULTS = {"record_stride": 10}


@dataclass(frozen=True)
class DeviceOptions:
    state_table: Optional[str] = None
    iv_samples: Optional[str] = None
    r_prog: Optional[float] = None
    v_set: float = 1.2
    v_stop: float = 2.6
    fit_window: Optional[Tuple[float, float]] = None


@dataclass(frozen=True)
class CircuitOverrides:
    r: Optional[float] = None
    r_n: Optional[float] = None
    l: Optional[float] = None
    c1: Optional[float] = None
    c2: Optional[float] = None

    @property
    def given(self):
        return {k: v for k, v in dataclasses.asdict(self).items() if v is not None}


@dataclass(frozen=True)
class SimulationOptions:
    method: str = "rk4"
    init: Tuple[float, float, float] = (0.1, 0.0, 0.0)


@dataclass(frozen=True)
class RunConfig:
    device: DeviceOptions = field(default_factory=DeviceOptions)
    design: DesignSpec = field(default_factory=DesignSpec)
    circuit: CircuitOverrides = field(default_factory=CircuitOverrides)
    simulation: SimulationOptions = field(default_factory=SimulationOptions)
    integration: IntegrationConfig = field(
        default_factory=lambda: IntegrationConfig(**INTEGRATION_DEFAULTS)
    )
    analysis: AnalysisConfig = field(default_factory=AnalysisConfig)
    sweep: SweepSettings = field(default_factory=SweepSettings)
    seed: int = 0
    output: str = "memchua_output"
    prefix: str = ""

    def override(self, **changes):
        return dataclasses.replace(
            self, **{k: v for k, v in changes.items() if v is not None}
        )


TUPLE_KEYS = {"fit_window", "init", "r_factors", "r_range"}


def _section(cls, data, name, defaults=None):
    if data is None:
        data = {}
    if not isinstance(data, dict):
        raise ConfigError(f"Section {name!r} must be a mapping")

    known = {f.name for f in dataclasses.fields(cls)}
    unknown = set(data) - known
    if unknown:
        raise ConfigError(f"Unknown key(s) in section {name!r}: {', '.join(sorted(unknown))}")

    values = dict(defaults or {})
    try:
        for key, value in data.items():
            if key in TUPLE_KEYS and value is not None:
                value = tuple(float(v) for v in value)
            values[key] = value
        return cls(**values)
    except (TypeError, ValueError) as err:
        raise ConfigError(f"Invalid section {name!r}: {err}")


def _resolve(path, base_dir):
    if path is None:
        return None
    path = os.path.expanduser(str(path))
    if not os.path.isabs(path):
        path = os.path.join(base_dir, path)
    if not os.path.isfile(path):
        raise ConfigError(f"Referenced file does not exist: {path}")
    return path


def load_config(config_file=None) -> RunConfig:
    """Read a RunConfig from YAML; no file means all defaults."""

    if config_file is None:
        return RunConfig()

    try:
        with open(config_file) as file:
            data = yaml.safe_load(file)
    except (OSError, yaml.YAMLError) as err:
        raise ConfigError(f"Could not read config {config_file}: {err}")

    if data is None:
        data = {}
    if not isinstance(data, dict):
        raise ConfigError("Config document must be a mapping")

    version = data.pop("schema_version", None)
    if version != SCHEMA_VERSION:
        raise ConfigError(
            f"Unsupported schema_version {version!r}, expected {SCHEMA_VERSION}"
        )

    sections = {
        "device": DeviceOptions,
        "design": DesignSpec,
        "circuit": CircuitOverrides,
        "analysis": AnalysisConfig,
        "sweep": SweepSettings,
    }
    top_level = {"seed", "output", "prefix"}
    unknown = set(data) - set(sections) - top_level - {"integration"}
    if unknown:
        raise ConfigError(f"Unknown config section(s): {', '.join(sorted(unknown))}")

    built = {name: _section(cls, data.get(name), name) for name, cls in sections.items()}

    integration = data.get("integration") or {}
    if not isinstance(integration, dict):
        raise ConfigError("Section 'integration' must be a mapping")
    integration = dict(integration)
    simulation = {k: integration.pop(k) for k in ("method", "init") if k in integration}
    built["simulation"] = _section(SimulationOptions, simulation, "integration")
    built["integration"] = _section(
        IntegrationConfig, integration, "integration", INTEGRATION_DEFAULTS
    )

    base_dir = os.path.dirname(os.path.abspath(config_file))
    device = built["device"]
    built["device"] = dataclasses.replace(
        device,
        state_table=_resolve(device.state_table, base_dir),
        iv_samples=_resolve(device.iv_samples, base_dir),
    )

    for key in top_level:
        if key in data:
            built[key] = data[key]

    config = RunConfig(**built)
    if config.simulation.method not in ("rk4", "adaptive"):
        raise ConfigError(f"Unknown integration method {config.simulation.method!r}")
    if len(config.simulation.init) != 3:
        raise ConfigError("integration.init needs three values (v1, v2, iL)")

    logger.debug(f"Loaded configuration from {config_file}")
    return config
