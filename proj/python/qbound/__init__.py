"""Quantile-based SDF bounds, risk-neutral extraction and risk adjustments."""

from ._qbound import (
    Distribution,
    Measure,
    QboundError,
    crash_prob_log_utility,
    default_tau_grid,
    disaster_bounds,
    dominance_test,
    feasible_lb,
    fit_black_scholes_chain,
    hj_bound,
    joint_normal_bounds,
    kernel_cdf,
    lognormal_distribution,
    lognormal_efficiency,
    pareto_bounds,
    qr_fit,
    risk_adjustment,
)

__all__ = [
    "Distribution",
    "Measure",
    "QboundError",
    "crash_prob_log_utility",
    "default_tau_grid",
    "disaster_bounds",
    "dominance_test",
    "feasible_lb",
    "fit_black_scholes_chain",
    "hj_bound",
    "joint_normal_bounds",
    "kernel_cdf",
    "lognormal_distribution",
    "lognormal_efficiency",
    "pareto_bounds",
    "qr_fit",
    "risk_adjustment",
]
