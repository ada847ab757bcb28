"""Serializers for hybrid automata."""

from .jsonfmt import emit_json, load_json, read_json
from .spaceex import emit_cfg, emit_spaceex

__all__ = ["emit_spaceex", "emit_cfg", "emit_json", "load_json", "read_json"]
