"""Canonical JSON: sorted keys, fixed 6-decimal floats, UTF-8.

Scene documents and keyword exports must be byte-identical across runs
with identical inputs, so everything that lands on disk or on the wire
goes through this writer instead of ``json.dumps`` defaults.
"""

from __future__ import annotations

import json

__all__ = ["canonical_json", "canonical_bytes"]


def canonical_json(obj) -> str:
    out: list[str] = []
    _write(obj, out)
    return "".join(out)


def canonical_bytes(obj) -> bytes:
    return (canonical_json(obj) + "\n").encode("utf-8")


def _write(obj, out: list[str]) -> None:
    if obj is None:
        out.append("null")
    elif obj is True:
        out.append("true")
    elif obj is False:
        out.append("false")
    elif isinstance(obj, int):
        out.append(str(obj))
    elif isinstance(obj, float):
        if obj != obj or obj in (float("inf"), float("-inf")):
            raise ValueError("canonical JSON cannot encode non-finite floats")
        out.append(f"{obj:.6f}")
    elif isinstance(obj, str):
        out.append(json.dumps(obj, ensure_ascii=False))
    elif isinstance(obj, (list, tuple)):
        out.append("[")
        for i, item in enumerate(obj):
            if i:
                out.append(",")
            _write(item, out)
        out.append("]")
    elif isinstance(obj, dict):
        out.append("{")
        for i, key in enumerate(sorted(obj)):
            if not isinstance(key, str):
                raise TypeError(f"canonical JSON keys must be strings, got {type(key).__name__}")
            if i:
                out.append(",")
            out.append(json.dumps(key, ensure_ascii=False))
            out.append(":")
            _write(obj[key], out)
        out.append("}")
    else:
        raise TypeError(f"canonical JSON cannot encode {type(obj).__name__}")
