"""Thermodynamics of the coin in a discrete-time quantum walk on the line."""

from .harness import (
    ConfigError,
    ExperimentConfig,
    RunSummary,
    SweepFailure,
    ThermoNotJustified,
    check,
    reproduce_figure,
    run,
    sweep,
    write_csv,
)
from .reduced import (
    BlochVector,
    bloch,
    from_bloch,
    reduce,
    spectrum,
    von_neumann_entropy,
)
from .thermo import (
    DegenerateDynamics,
    DegenerateTemperature,
    SupportMismatch,
    ThermoContext,
    TimeSeriesRecord,
    alpha_of,
    build_context,
    heat_cumulative,
    internal_energy,
    relative_entropy,
    rotation_diagnostic,
    sgen_asymptotic,
    sgen_balance,
    sgen_relent,
)
from .walk import (
    ChiralitySpec,
    CoinParams,
    Gaussian,
    InitialStateSpec,
    Localized,
    Uniform,
    WalkerState,
    build_coin,
    build_initial_state,
    evolve,
    step,
)

__version__ = "0.1.0"
