"""Online convex optimization on lp-balls (p > 2): leader- and mirror-style
learners with fixed, adaptive, and coordinate-wise regularization, the
adversarial constructions that witness their regret floors, bandit
environments, and a conformance harness that checks every bound as an
executable inequality.
"""

from .geometry import BallSpec, check_uniform_convexity, dual_exponent, linear_minimizer_on_ball, lp_norm, sample_ball
from .harness import RegretTrace, make_learner, run_bandit, run_full_info, sweep
from .learners import (
    FTRLAdaptive,
    FTRLCoordwise,
    FTRLPower,
    OMDAdaptive,
    OMDPower,
    adaptive_regret_bound,
    adaptive_switch_round,
    ftrl_regret_bound,
    ftrl_step_size,
    lower_bound_value,
    omd_adaptive_regret_bound,
    omd_adaptive_switch_round,
    omd_regret_bound,
    omd_step_size,
    trajectory_regret_bound,
)
from .projection import ENGINE, bregman_project
from .regularizers import RegSpec, bregman, conjugate_grad, phi_eval, phi_grad
from .adversaries import make_adversary

__version__ = "0.1.0"
