"""Joint MRT / discrete-phase IRS beamforming for transmit power minimization."""

from .analysis import (
    ScalingLawParams,
    eta,
    eta_db,
    power_gain_slope,
    pr_closed_form,
    pr_monte_carlo,
)
from .chansim import (
    ScenarioConfig,
    derived_distances,
    path_gain,
    sample_channels,
    sample_unit_variance_channels,
    trial_rng,
)
from .errors import (
    DegenerateChannelError,
    InfeasibleLinkError,
    InstanceTooLargeError,
    InvalidInputError,
    IRSError,
    NumericalError,
)
from .model import (
    Beamformer,
    ChannelRealization,
    LinkBudget,
    PhaseShiftVector,
    combined_channel,
    mrt_beamformer,
    receive_snr,
    required_power,
)
from .solver import (
    SolveResult,
    SolverWorkspace,
    ao_discrete,
    build_workspace,
    continuous_phase_solution,
    discrete_update,
    exhaustive_search,
    quantize_phases,
    solve_p1,
    zeta,
)

__version__ = "0.1.0"
