"""Chain calculus on finite weighted metric spaces.

Thin re-export of the compiled extension; every report comes back as a plain
dict with the same keys the CLI writes to its JSON result envelopes.
"""

from ._core import (  # noqa: F401
    Chain,
    ChainCalcError,
    ChainFamily,
    FunctionClass,
    Space,
    __version__,
    ball_pi_audit,
    bmc_audit,
    chain_components,
    chain_length,
    chain_modulus,
    chain_potential,
    chain_width,
    check_curve_consistency,
    closed_ball_mass,
    distance_scales,
    doubling_constant,
    eb_pipeline,
    energy_ladder,
    generate_space,
    is_weak_exceptional,
    keith_modulus_ladder,
    lambda_integral,
    leibniz_gradient,
    make_chain,
    minimal_gradient,
    minimal_weak_gradient,
    minkowski_profile,
    open_ball_mass,
    open_ball_members,
    pointwise_pi_check,
    potential_gradient_check,
    riemann_sum,
    riesz_weights,
    slope_field,
    snowflake,
    validate_space,
    verify_upper_gradient,
)
