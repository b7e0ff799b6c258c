from app.series.homog import HomogPoly, dot_gradients
from app.series.linear_op import L_matrix, apply_L, lambda_matrix, solve_L
from app.series.gbeta import (
    GBetaSeries,
    eikonal_residual,
    estimate_validity_radius,
    for_potential,
    gbeta_coefficients,
    gbeta_radial,
    radial_series,
    radial_taylor_coefficients,
    residual_Wexp,
)
