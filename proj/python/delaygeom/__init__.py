"""Delay metrics of Poisson cellular networks."""

from ._core import (
    NetworkParams,
    Sinr,
    Sir,
    SirAsnr,
    active_probability,
    beta_shape,
    char_fn,
    conditional_coverage,
    critical_threshold,
    db_to_linear,
    dbm_to_watt,
    f1,
    f1_curve,
    f1_riemann,
    f2,
    f3,
    hyp2f1,
    local_delay,
    packet_loss,
    regularized_incomplete_beta,
    script_f,
    simulate,
)

__all__ = [
    "NetworkParams",
    "Sinr",
    "Sir",
    "SirAsnr",
    "active_probability",
    "beta_shape",
    "char_fn",
    "conditional_coverage",
    "critical_threshold",
    "db_to_linear",
    "dbm_to_watt",
    "f1",
    "f1_curve",
    "f1_riemann",
    "f2",
    "f3",
    "hyp2f1",
    "local_delay",
    "packet_loss",
    "regularized_incomplete_beta",
    "script_f",
    "simulate",
]
