"""Random solutions of the (fractional) Airy equation: spectral models, special
functions, field simulation, exact covariances and phi-sub-Gaussian supremum bounds."""

from .errors import ConfigError, DomainError, InfeasibleBetaError, InvalidPhiError, RangeError, ToleranceError
from .spectral import (
    Family,
    HolderReport,
    SpectralModel,
    abs_moment,
    c_beta,
    covariance_eta,
    density,
)
from .special import AiryEval, airy_ai, airy_ai_alpha, airy_integral, fundamental_solution
from .simulation import FieldEnsemble, SpaceTimeGrid, SynthesisPlan, plan_synthesis, synthesize
from .covariance import (
    conserved_quantities,
    dispersive_decay,
    empirical_cov,
    msq_increment,
    psd_check,
    theoretical_cov,
)
from .bounds import (
    BoundContext,
    PhiFunction,
    bound_context,
    entropy_factor_a1,
    increment_tail_bound,
    phi_star,
    rv_tail_bound,
    sigma_tilde,
    sup_tail_bound,
)
from .montecarlo import ExceedanceEstimate, compare_report, empirical_modulus, estimate_sup_exceedance

__version__ = "0.1.0"
