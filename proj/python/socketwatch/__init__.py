"""Smart socket activity monitoring."""

from ._core import (
    ConfigError,
    EngineError,
    ParseError,
    PatternEngine,
    ScenarioError,
    SmartSocket,
    StoreError,
    __version__,
    bin_of,
    parse_message,
    read_log,
    replay_alarms,
    serialize_config,
    serialize_notification,
    simulate,
)

__all__ = [
    "ConfigError",
    "EngineError",
    "ParseError",
    "PatternEngine",
    "ScenarioError",
    "SmartSocket",
    "StoreError",
    "bin_of",
    "parse_message",
    "read_log",
    "replay_alarms",
    "serialize_config",
    "serialize_notification",
    "simulate",
]
