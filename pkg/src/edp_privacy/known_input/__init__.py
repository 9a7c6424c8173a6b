"""Known-input attack: link known records, sample a consistent rotation, score the breach risk."""

from .attack import (
    BreachReport,
    input_output_attack,
    input_output_attack_general,
    known_input_attack,
    known_input_attack_general,
)
from .estimation import (
    BreachProbabilityInputs,
    ConstraintSetSampler,
    breach_probability,
    cap_fraction,
    constraint_set_sampler,
    gamma_ratio,
    sample_uniform_estimator,
    sine_integral,
)
from .linking import (
    Assignment,
    LinkingProblem,
    LinkResult,
    candidate_set,
    find_maximal_uniquely_valid,
    is_uniquely_valid,
    is_valid_assignment,
)

__all__ = [
    "Assignment",
    "BreachProbabilityInputs",
    "BreachReport",
    "ConstraintSetSampler",
    "LinkResult",
    "LinkingProblem",
    "breach_probability",
    "candidate_set",
    "cap_fraction",
    "constraint_set_sampler",
    "find_maximal_uniquely_valid",
    "gamma_ratio",
    "input_output_attack",
    "input_output_attack_general",
    "is_uniquely_valid",
    "is_valid_assignment",
    "known_input_attack",
    "known_input_attack_general",
    "sample_uniform_estimator",
    "sine_integral",
]
