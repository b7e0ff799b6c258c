from app.twowell.models import MinimizerOptions, MinimizerResult, StartOutcome, TwoWellProblem
from app.twowell.bubbles import bubble_energy_bound, bubble_semicircle, detect_bubbles, epsilon_threshold
from app.twowell.minimizer import (
    ALState,
    AreaConstrainedMinimizer,
    constrained_minimize,
    energy_and_gradient,
    energy_hessian,
    momentum_gradient,
    momentum_hessian,
)
from app.twowell.solver import (
    TwoWellSolver,
    aminimize,
    axis_heteroclinic,
    build_starts,
    direction_field_error,
    make_problem,
    minimize,
)
