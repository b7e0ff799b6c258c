import math
from typing import Iterable, Optional, Sequence

import numpy as np
import pandas as pd
from scipy.linalg import solve_continuous_lyapunov

from app.curves.functionals import momentum
from app.curves.models import SampledCurve
from app.onewell import analytic_flow
from app.onewell.linear_flow import (
    constraint_offset,
    local_start,
    quadratic_flow,
    reduced_radius,
)
from app.potentials.models import Potential, WellData
from app.series.linear_op import lambda_matrix


def jensen_lower_bound(p0_radius: float, A_tilde: float) -> float:
    """E >= sqrt(|p0|^4 + 16 A~^2) / 2 for radial competitors in W = |p|^2."""
    return 0.5 * math.sqrt(p0_radius**4 + 16.0 * A_tilde**2)


def euclidean_length_bound(well: WellData, p0: Sequence[float], beta: float) -> float:
    """
    L0 = 2 lambda_max(P) ||Lambda_beta|| sqrt(cond P) |p0| with Lambda^T P + P Lambda = -I, from
    |gamma(t)| <= sqrt(cond P) |p0| exp(-t / (2 lambda_max(P))).
    """
    p = local_start(well, p0)
    Lam = lambda_matrix(well.lambda1, well.lambda2, beta)
    P = solve_continuous_lyapunov(Lam.T, -np.eye(2))
    ev = np.linalg.eigvalsh(0.5 * (P + P.T))
    return 2.0 * ev[-1] * np.linalg.norm(Lam, 2) * math.sqrt(ev[-1] / ev[0]) * float(np.linalg.norm(p))


def attainable_sweep(well: WellData, p0: Sequence[float], betas: Iterable[float], n: int = 4000,
                     gbeta=None, pot: Optional[Potential] = None) -> pd.DataFrame:
    """
    beta -> (A~, P, L_beta). Quadratic wells use the closed form for A~ and measure P on the sampled flow;
    with a g_beta series both come from the integrated flow.
    """
    rows = []
    C = constraint_offset(well if gbeta is None else gbeta.well, p0)
    for beta in betas:
        if gbeta is None:
            local, ell = quadratic_flow(well, p0, beta, n)
            rt = float(reduced_radius(well, local_start(well, p0)))
            A_tilde = rt / math.tan(beta) / (well.lambda1 + well.lambda2)
            pts = well.to_global(local)
            L = float(ell[-1])
        else:
            flow = analytic_flow.integrate(gbeta.at_beta(beta, pot), p0, n, pot)
            A_tilde = flow.A_tilde
            pts = gbeta.well.to_global(flow.local)
            L = float(flow.ell[-1])
        rows.append({"beta": float(beta), "A_tilde": A_tilde, "P": momentum(SampledCurve(points=pts)),
                     "A": A_tilde + C, "L_beta": L})
    return pd.DataFrame(rows, columns=["beta", "A_tilde", "P", "A", "L_beta"])
