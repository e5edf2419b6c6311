"""Deterministic system-level simulator of dynamic LSA spectrum sharing."""

__version__ = "0.1.0"

from .lsa_control import IGNORE, LIMIT_POWER, POLICIES, SHUTDOWN, EvacuationEvent
from .runner import RunResult, simulate
from .scenario import (
    AirplaneState,
    CellSite,
    ConfigError,
    Deployment,
    ScenarioConfig,
    UE,
    airplane_state,
    build_deployment,
    default_config,
    load_config,
)

__all__ = [
    "__version__",
    "AirplaneState",
    "CellSite",
    "ConfigError",
    "Deployment",
    "EvacuationEvent",
    "IGNORE",
    "LIMIT_POWER",
    "POLICIES",
    "RunResult",
    "ScenarioConfig",
    "SHUTDOWN",
    "UE",
    "airplane_state",
    "build_deployment",
    "default_config",
    "load_config",
    "simulate",
]
