"""Canonical JSON writer for model files and prediction output.

The stdlib ``json`` module no longer allows overriding float formatting, and
the model-file contract wants every float as a 17-significant-digit decimal
(the shortest width guaranteed to round-trip any double exactly). This small
dumper walks plain Python/numpy structures and emits deterministic bytes:
insertion-ordered keys, fixed separators, ``%.17g`` floats.
"""

from __future__ import annotations

import json
import math

import numpy as np


def _format_float(value: float) -> str:
    if not math.isfinite(value):
        raise ValueError(f"non-finite value cannot be serialized: {value}")
    return format(value, ".17g")


def dumps(obj, indent: int = 0) -> str:
    """Serialize ``obj`` to a canonical JSON string."""
    pad = " " * indent
    inner = " " * (indent + 2)
    if obj is None:
        return "null"
    if isinstance(obj, bool):
        return "true" if obj else "false"
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        return _format_float(float(obj))
    if isinstance(obj, str):
        return json.dumps(obj)
    if isinstance(obj, np.ndarray):
        obj = obj.tolist()
    if isinstance(obj, (list, tuple)):
        if not obj:
            return "[]"
        items = [dumps(item, indent + 2) for item in obj]
        return "[\n" + ",\n".join(inner + i for i in items) + "\n" + pad + "]"
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [
            f"{inner}{json.dumps(str(k))}: {dumps(v, indent + 2)}"
            for k, v in obj.items()
        ]
        return "{\n" + ",\n".join(items) + "\n" + pad + "}"
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def dump_bytes(obj) -> bytes:
    """Canonical JSON document as UTF-8 bytes with a trailing newline."""
    return (dumps(obj) + "\n").encode("utf-8")


def format_float(value: float) -> str:
    """Public float formatting used wherever text output must be deterministic."""
    return _format_float(float(value))
