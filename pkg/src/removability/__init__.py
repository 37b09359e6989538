"""Removability of isolated singularities of mappings with finite distortion.

Model maps and their dilatations, majorant fields and spherical means, the
divergence criterion at a puncture, ring moduli and capacities, and a
reproducible report runner.
"""

from .criterion import (
    calderon_check,
    classify_divergence,
    criterion_integral,
    extremal_eta,
    removability_verdict,
    verify_extremality,
    weighted_ring_integral,
)
from .differential import (
    complex_dilatation,
    inner_dilatation,
    jacobian,
    orlicz_energy,
    sample_dilatation,
    singular_values,
)
from .errors import (
    DomainError,
    IncompleteInputError,
    InvalidDimensionError,
    NotApplicableError,
    RemovabilityError,
    ResolutionError,
    UnsupportedVariantError,
    ValidationError,
)
from .fields import (
    Anisotropic,
    FromMap,
    LogPower,
    PowerLog,
    RadialFunction,
    TabulatedRadial,
    ball_Lp_norm,
    fmo_classify,
    fmo_oscillation,
    sphere_Lnorm,
    spherical_mean,
)
from .geometry import AnnulusSpec, annulus_rule, ball_rule, sphere_rule, unit_ball_volume, unit_sphere_area
from .maps import (
    ExpIntegral,
    PlanarPower,
    PlanarShear,
    PowerShift,
    Radial,
    TabulatedProfile,
    Twist,
    eval_map,
    extendable_ground_truth,
    limit_set_at_boundary,
    limit_set_at_zero,
    profile_limit_at_zero,
)
from .modulus import (
    duality_report,
    image_sphere_family_modulus,
    lower_Q_check_radial,
    ring_capacity,
    ring_curve_modulus,
    sphere_family_modulus,
    variational_radial_modulus_oracle,
)
from .phi import Power, PowerLogPhi, TabulatedPhi
from .report import ReportBundle, run_job
from .suite import reproduce_paper

__version__ = "0.1.0"
