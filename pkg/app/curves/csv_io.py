"""Curve CSV: header `param,x,y`, one row per node, 17 significant digits."""

from pathlib import Path
from typing import Union

import numpy as np
import pandas as pd

from core.errors import ConfigError
from app.curves.models import ParamTag, SampledCurve

FLOAT_FORMAT = "%.17g"


def write_csv(curve: SampledCurve, path: Union[str, Path]) -> Path:
    path = Path(path)
    param = curve.params if curve.params is not None else np.linspace(0.0, 1.0, len(curve))
    frame = pd.DataFrame({"param": param, "x": curve.points[:, 0], "y": curve.points[:, 1]})
    path.parent.mkdir(parents=True, exist_ok=True)
    frame.to_csv(path, index=False, float_format=FLOAT_FORMAT)
    return path


def read_csv(path: Union[str, Path], tag: ParamTag = "uniform-t") -> SampledCurve:
    path = Path(path)
    if not path.is_file():
        raise ConfigError(f"curve file not found: {path}")
    frame = pd.read_csv(path, float_precision="round_trip")
    if list(frame.columns) != ["param", "x", "y"]:
        raise ConfigError(f"{path}: expected header param,x,y, got {','.join(frame.columns)}")
    pts = frame[["x", "y"]].to_numpy(dtype=float)
    closed = bool(len(pts) > 2 and np.array_equal(pts[0], pts[-1]))
    return SampledCurve(points=pts, param=tag, closed=closed, params=frame["param"].to_numpy(dtype=float))
