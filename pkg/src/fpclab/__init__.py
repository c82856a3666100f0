"""Outage probability and transmission capacity of random wireless networks
under fractional power control.

Three evaluators share one parameter model: Monte-Carlo simulation
(:mod:`fpclab.simulate`), dominant-interferer lower bounds and Jensen
approximations (:mod:`fpclab.analytic`). :mod:`fpclab.optimize` searches the
power-control exponent and :mod:`fpclab.cli` drives everything from JSON.
"""

from .analytic import (
    BoundResult,
    NetworkParams,
    PowerControlPolicy,
    density_fpc,
    density_ub_pathloss,
    kappa,
    loss_factor_fpc,
    outage_jensen_cp,
    outage_jensen_fpc,
    outage_lb_ci,
    outage_lb_cp,
    outage_lb_fpc,
    outage_lb_pathloss,
    shot_noise_tail_lb,
    transmission_capacity,
)
from .errors import (
    BracketError,
    ConfigError,
    ConvergenceError,
    DivergenceError,
    DomainError,
    FPCError,
    InfeasibleError,
)
from .fading import (
    ClampedRayleigh,
    Deterministic,
    FadingModel,
    Rayleigh,
    fractional_moment,
    parse_fading,
    power_normalizer,
)
from .optimize import (
    ObjectiveSpec,
    Optimum,
    RobustnessBand,
    SweepResult,
    convexity_witness,
    optimal_exponent,
    robustness_band,
    sweep,
)
from .simulate import OutageEstimate, SimConfig, estimate_outage, shot_noise_tail_mc

__version__ = "0.1.0"
