from app.onewell.models import ApproachSpectrum, CertificateReport, OneWellSolution
from app.onewell.linear_flow import (
    approach_spectrum,
    beta_from_multiplier,
    constraint_offset,
    multiplier_from_beta,
    omega1_integral,
    radial_spiral,
    reduced_radius,
    solve_beta,
    transform_constraint,
)
from app.onewell.solver import geodesic, isoperimetric, level_set_points
from app.onewell.certificate import area_preserving_perturbation, calibration_certificate, calibration_integral
from app.onewell.nonexistence import closed_form_energy, nonexistence_sequence, power_well
from app.onewell.bounds import attainable_sweep, euclidean_length_bound, jensen_lower_bound
