"""Capacity regions and strong-converse exponents of state-dependent channels.

The heavy lifting lives in the C++ extension ``sdcexp._core``; this package
re-exports its public surface.
"""

from sdcexp._core import (  # noqa: F401
    Channel,
    Code,
    GuardError,
    Joint5,
    Membership,
    OptimizerError,
    RatePoint,
    SpecError,
    SupportCurve,
    ThetaParams,
    TiltParams,
    __version__,
    boundary,
    c_mu,
    c_tilde,
    f_of,
    f_sup,
    g_n_exhaustive,
    gp_capacity,
    gp_tradeoff_objective,
    lambda_to_theta,
    load_channel,
    marginal,
    mc_pc,
    membership,
    mutual_info,
    omega_q,
    omega_slope_at_zero,
    omega_W,
    pc_exact,
    signed_slack,
    theta_to_lambda,
    verify_main_theorem,
)
