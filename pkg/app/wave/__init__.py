from app.wave.models import (
    ConservedReport,
    SecondVariationReport,
    SpectralReport,
    SpeedLimits,
    TravelingWaveProfile,
)
from app.wave.profile import (
    decaying_subspace,
    equipartition_residual,
    grafted_tail,
    hamiltonian_energy,
    linearization,
    nodal_equipartition,
    ode_residual,
    to_profile,
)
from app.wave.speed import estimate_speed, manufactured_linear_solution, nu_from_multiplier, profile_from_samples
from app.wave.spectrum import closed_form_roots, regime_boundaries, speed_limits, speed_spectrum
from app.wave.conserved import conserved_checks
from app.wave.second_variation import second_variation_spectrum
from app.wave.sweep import a_nu_sweep
