"""Streaming dictionary matching in small space.

Build a matcher with ``engine_build(patterns, EngineConfig(...))`` and feed
it one character (an int 0..255) at a time with ``push``; every call
returns the events for the current position.
"""

from .engine import (
    ConfigError,
    DictionaryPlan,
    EngineConfig,
    EngineStats,
    MatchEvent,
    StreamMatcher,
    StreamOverflowError,
    engine_arrive,
    engine_build,
    engine_stats,
)

__all__ = [
    "ConfigError",
    "DictionaryPlan",
    "EngineConfig",
    "EngineStats",
    "MatchEvent",
    "StreamMatcher",
    "StreamOverflowError",
    "engine_arrive",
    "engine_build",
    "engine_stats",
]

__version__ = "0.1.0"
