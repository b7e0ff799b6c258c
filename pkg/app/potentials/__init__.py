from app.potentials.models import HypothesisCheck, HypothesisReport, Potential, WellData
from app.potentials.potential import (
    conformal_factor,
    evaluate,
    evaluate_many,
    from_config,
    gradient,
    hessian,
    load_potential,
    quadratic_from_well,
    radial_to_series,
    separable_example,
    value,
    well_data,
)
from app.potentials.hypotheses import HypothesisGrid, apriori_bound, check_hypotheses
