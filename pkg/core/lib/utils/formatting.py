"""
Deterministic text output: JSON with fixed 17-significant-digit floats.
"""

import json
import math
from typing import Any

import numpy as np
from pydantic import BaseModel


def format_float(x: float) -> str:
    if not math.isfinite(x):
        return "null"
    text = f"{x:.17g}"
    if "e" not in text and "." not in text and "n" not in text:
        text += ".0"
    return text


def to_plain(obj: Any) -> Any:
    """Pydantic models, numpy scalars/arrays and complex numbers to JSON-ready Python values."""
    if isinstance(obj, BaseModel):
        return to_plain(obj.model_dump())
    if isinstance(obj, dict):
        return {str(k): to_plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [to_plain(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return to_plain(obj.tolist())
    if isinstance(obj, (complex, np.complexfloating)):
        return {"re": float(obj.real), "im": float(obj.imag)}
    if isinstance(obj, np.bool_):
        return bool(obj)
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, np.floating):
        return float(obj)
    return obj


class ReportEncoder(json.JSONEncoder):
    """json.JSONEncoder that prints floats through `format_float`."""

    def iterencode(self, o, _one_shot=False):
        encoder = json.encoder.py_encode_basestring_ascii if self.ensure_ascii else json.encoder.py_encode_basestring
        indent = " " * self.indent if isinstance(self.indent, int) else self.indent
        return json.encoder._make_iterencode(
            {} if self.check_circular else None, self.default, encoder, indent, format_float,
            self.key_separator, self.item_separator, self.sort_keys, self.skipkeys, _one_shot)(o, 0)


def dumps_report(obj: Any, indent: int = 2) -> str:
    return json.dumps(to_plain(obj), cls=ReportEncoder, indent=indent, ensure_ascii=False) + "\n"
