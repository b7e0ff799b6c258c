"""
Minimizing sequences for F = |p|^q, q > 1, that spend the constraint on ever smaller circles:
the energy tends to 1/(1+q) and no minimizer exists.
"""

import math
from typing import Tuple

import numpy as np

from app.curves.functionals import energy
from app.curves.geometry import circle, concatenate, segment
from app.curves.models import SampledCurve
from app.potentials.models import Potential

SEGMENT_NODES = 2001


def power_well(q: float) -> Potential:
    return Potential(kind="radial-power", wells=[(0.0, 0.0)], params={"q_prime": 2.0 * q})


def closed_form_energy(q: float, A: float, j: int) -> float:
    r = math.sqrt(abs(A) / (math.pi * j))
    return 1.0 / (1.0 + q) + 2.0 * abs(A) * r ** (q - 1.0)


def nonexistence_sequence(q: float, A: float, j: int, points_per_circle: int = 512) -> Tuple[SampledCurve, float]:
    """
    (1,0) -> (r_j,0), j circles of radius r_j = sqrt(|A|/(pi j)) about the well, then into the well.

    The polygon radius is enlarged so each j-gon encloses exactly pi r_j^2.
    """
    if q <= 1.0:
        raise ValueError("nonexistence needs q > 1")
    if j < 1 or A == 0.0:
        raise ValueError("need j >= 1 and A != 0")
    k = points_per_circle
    r = math.sqrt(abs(A) / (math.pi * j))
    R = r * math.sqrt(2.0 * math.pi / (k * math.sin(2.0 * math.pi / k)))
    loops = circle((0.0, 0.0), R, k, turns=j, ccw=A > 0)
    curve = concatenate([
        segment((1.0, 0.0), (R, 0.0), SEGMENT_NODES),
        loops,
        segment((R, 0.0), (0.0, 0.0), SEGMENT_NODES),
    ])
    return curve, energy(curve, power_well(q))
