"""
Degenerate length E and momentum P of polylines.

E uses the midpoint value of F on each chord; P is the trapezoid rule for -y dx, which is exact on
polylines, so P is additive over concatenation and flips sign under reversal.
"""

import numpy as np

from app.curves.models import SampledCurve
from app.potentials.models import Potential
from app.potentials.potential import conformal_factor


def energy(curve: SampledCurve, pot: Potential) -> float:
    F = conformal_factor(pot, curve.midpoints)
    return float(np.sum(F * np.linalg.norm(curve.chords, axis=1)))


def segment_energies(curve: SampledCurve, pot: Potential) -> np.ndarray:
    return conformal_factor(pot, curve.midpoints) * np.linalg.norm(curve.chords, axis=1)


def momentum(curve: SampledCurve) -> float:
    x = curve.points[:, 0]
    y = curve.points[:, 1]
    return float(-0.5 * np.sum((y[1:] + y[:-1]) * np.diff(x)))


def euclidean_length(curve: SampledCurve) -> float:
    return float(np.sum(np.linalg.norm(curve.chords, axis=1)))


def speed_defect(curve: SampledCurve, pot: Potential) -> float:
    """max |F(mid)|dgamma|/dl - 1| over segments; needs `params` to hold the degenerate arclength."""
    if curve.params is None:
        raise ValueError("speed_defect needs the degenerate arclength in curve.params")
    dl = np.diff(curve.params)
    seg = segment_energies(curve, pot)
    # increments below 1e-8 of the span are not resolved by the stored params (the closing segment into the well among them)
    keep = dl > 1e-8 * abs(curve.params[-1] - curve.params[0])
    return float(np.max(np.abs(seg[keep] / dl[keep] - 1.0))) if np.any(keep) else 0.0
