"""Success probability of multi-layer aerial networks.

Analytic evaluation (quadrature) and Monte Carlo estimation share one
network description::

    import aerostp
    net = aerostp.NetworkSpec([aerostp.LayerSpec(1e-5, 100.0)])
    value, err = aerostp.total_stp(net)
"""

from ._core import (
    ChannelParams,
    DomainError,
    Environment,
    Error,
    LayerSpec,
    LinkClass,
    LosModel,
    NetworkSpec,
    NonConvergenceError,
    NumericalConsistencyError,
    SimConfig,
    UndefinedDistributionError,
    UnsupportedCaseError,
    ValidationError,
    __version__,
    association_probability,
    conditional_stp,
    density_upper_bound,
    env_probability,
    iso_total_density,
    los_probability,
    mainlink_pdf,
    nearest_ccdf,
    optimal_density,
    simulate,
    sweep_1d,
    total_stp,
)

__all__ = [name for name in dir() if not name.startswith("_")]
