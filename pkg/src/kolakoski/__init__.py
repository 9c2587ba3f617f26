"""Logarithmic-space streaming and digit census of Kolakoski sequences."""

from .census import Census, DecadeRow, Deviation, SymbolCensus, decade_rows, format_deviation
from .engine import CursorCell, KolakoskiEngine, RunEvent, WorkProfile, new_engine, restore
from .persistence import CheckpointState, load, save, snapshot
from .sequence import (
    CLASSICAL,
    SequenceParams,
    brute_prefix,
    fan_word,
    rl_decode,
    rl_encode,
)

__version__ = "0.1.0"

__all__ = [
    "CLASSICAL",
    "Census",
    "CheckpointState",
    "CursorCell",
    "DecadeRow",
    "Deviation",
    "KolakoskiEngine",
    "RunEvent",
    "SequenceParams",
    "SymbolCensus",
    "WorkProfile",
    "brute_prefix",
    "decade_rows",
    "fan_word",
    "format_deviation",
    "load",
    "new_engine",
    "restore",
    "rl_decode",
    "rl_encode",
    "save",
    "snapshot",
]
