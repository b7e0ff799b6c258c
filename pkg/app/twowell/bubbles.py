import math
from typing import Sequence

import numpy as np

from app.curves.geometry import concatenate, segment
from app.curves.models import SampledCurve

ARC_NODES = 256


def bubble_semicircle(well: Sequence[float], eps: float, arc_nodes: int = ARC_NODES,
                      side: str = "left", radial_nodes: int = 64) -> SampledCurve:
    """
    Closed half-disc through the well with P = eps: up the vertical diameter, around the arc, back to the well.

    The polygonal arc radius is enlarged so the enclosed area is exactly pi r^2 / 2 with r = sqrt(2|eps|/pi);
    eps < 0 reverses the orientation.
    """
    if eps == 0.0:
        raise ValueError("a bubble needs eps != 0")
    c = np.asarray(well, dtype=float)
    k = arc_nodes
    r = math.sqrt(2.0 * abs(eps) / math.pi)
    R = r * math.sqrt(math.pi / (k * math.sin(math.pi / k)))
    sweep = np.linspace(0.5 * math.pi, 1.5 * math.pi, k + 1)
    if side == "right":
        sweep = np.linspace(0.5 * math.pi, -0.5 * math.pi, k + 1)
    arc = c + R * np.column_stack([np.cos(sweep), np.sin(sweep)])
    arc[0] = c + (0.0, R)
    arc[-1] = c + (0.0, -R)
    loop = concatenate([
        segment(c, arc[0], radial_nodes),
        SampledCurve(points=arc),
        segment(arc[-1], c, radial_nodes),
    ])
    # the left half traversed this way is counter-clockwise, the right half clockwise
    ccw = side == "left"
    if (eps > 0) != ccw:
        loop = SampledCurve(points=loop.points[::-1], closed=True)
    return SampledCurve(points=loop.points, param="uniform-t", closed=True)


def detect_bubbles(curve: SampledCurve, wells: Sequence[Sequence[float]], radius: float) -> int:
    """
    Excursions that start at distance >= radius from a well, come within radius/2 of it and leave to
    distance >= radius again. A monotone passage into or out of a well is not counted.
    """
    pts = np.asarray(curve.points)
    count = 0
    for w in np.asarray(wells, dtype=float):
        d = np.linalg.norm(pts - w, axis=1)
        state = "inside" if d[0] < radius else "out"
        for dist in d[1:]:
            if state == "out" and dist <= 0.5 * radius:
                state = "dipped"
            elif state == "dipped" and dist >= radius:
                count += 1
                state = "out"
            elif state == "inside" and dist >= radius:
                state = "out"
    return count


def epsilon_threshold(c0: float, c1: float, r_minus: float) -> float:
    """eps0 = (c0/c1) (pi/(2+pi)) r_-^2: below it a bubble costs more than it saves."""
    if min(c0, c1, r_minus) <= 0.0:
        raise ValueError("c0, c1 and r_minus must be positive")
    return c0 / c1 * (math.pi / (2.0 + math.pi)) * r_minus**2


def bubble_energy_bound(c1: float, eps: float) -> float:
    return c1 * (math.pi + 2.0) * (2.0 / math.pi) * abs(eps)
