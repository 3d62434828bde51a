"""Canonical JSON serialization shared by the CLI and the HTTP service.

Keys are sorted and floats rounded to at most six fractional digits so
the same logical value always serializes to the same bytes; golden files
and dual-path (library vs endpoint) comparisons rely on that.
"""

from __future__ import annotations

import json
import math


def _normalize(value):
    if isinstance(value, float):
        if not math.isfinite(value):
            raise ValueError(f"cannot canonically serialize {value!r}")
        rounded = round(value, 6)
        return 0.0 if rounded == 0 else rounded  # fold -0.0
    if isinstance(value, dict):
        return {str(k): _normalize(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_normalize(v) for v in value]
    return value


def dumps(obj) -> str:
    return json.dumps(_normalize(obj), sort_keys=True, ensure_ascii=False)


def dump_bytes(obj) -> bytes:
    return dumps(obj).encode("utf-8")
