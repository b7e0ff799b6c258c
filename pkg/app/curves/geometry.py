from typing import Iterable, Sequence

import numpy as np

from app.curves.models import SampledCurve


def segment(a: Sequence[float], b: Sequence[float], n: int = 2) -> SampledCurve:
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    t = np.linspace(0.0, 1.0, n)
    return SampledCurve(points=a + t[:, None] * (b - a), param="constant-speed",
                        params=t * float(np.linalg.norm(b - a)))


def circle(center: Sequence[float], radius: float, n: int, turns: int = 1,
           ccw: bool = True, start_angle: float = 0.0) -> SampledCurve:
    """Closed polygon with n nodes per turn, first node repeated at the end of each turn."""
    sign = 1.0 if ccw else -1.0
    theta = start_angle + sign * np.linspace(0.0, 2.0 * np.pi * turns, n * turns + 1)
    pts = np.asarray(center, dtype=float) + radius * np.column_stack([np.cos(theta), np.sin(theta)])
    return SampledCurve(points=pts, param="constant-speed", closed=True)


def concatenate(curves: Iterable[SampledCurve], tol: float = 1e-12) -> SampledCurve:
    """Join curves end to start; a repeated joint node is kept once."""
    parts = []
    for c in curves:
        pts = np.asarray(c.points)
        if parts and np.linalg.norm(parts[-1][-1] - pts[0]) <= tol:
            pts = pts[1:]
        elif parts:
            raise ValueError("curves do not join")
        parts.append(pts)
    pts = np.vstack(parts)
    closed = bool(np.linalg.norm(pts[0] - pts[-1]) <= tol)
    return SampledCurve(points=pts, param="uniform-t", closed=closed)


def reverse(curve: SampledCurve) -> SampledCurve:
    params = None
    if curve.params is not None:
        params = curve.params[-1] - curve.params[::-1]
    return SampledCurve(points=curve.points[::-1], param=curve.param, closed=curve.closed, params=params)
