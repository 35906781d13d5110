"""Noisy classical and quantum limit-cycle oscillators under heterodyne monitoring.

Simulation library plus a scenario CLI covering classical van-der-Pol
Langevin dynamics, Lindblad master equations for quantum van-der-Pol
oscillators and spins-1/2, their heterodyne quantum trajectories, and
the phase-space and spectral measures of synchronization.
"""

__version__ = "0.1.0"

from ._kernels import backend_name
from .classical import (
    CoupledPhaseParams,
    VdpParams,
    classical_spectrum,
    fit_lorentzian,
    histogram_phase,
    histogram_xy,
    observed_frequency_difference,
    simulate_coupled_phases,
    simulate_vdp,
)
from .heterodyne import (
    ChannelMismatchError,
    HeterodyneRecord,
    MonitoredChannel,
    evolve_sme,
    evolve_sme_ensemble,
    heterodyne_current,
    measured_phase_distribution,
    measured_spectrum,
)
from .linalg import (
    TruncationWarning,
    assert_density,
    coherent_ket,
    expect,
    fock_operators,
    identity,
    ket_to_dm,
    pauli_operators,
    spin_coherent_ket,
    tensor,
    trace_distance,
)
from .lindblad import (
    LindbladModel,
    Liouvillian,
    StepSizeError,
    SteadyStateError,
    build_qvdp_model,
    build_spin_model,
    build_two_qvdp_model,
    build_two_spin_model,
    correlation_spectrum,
    evolve_expectations,
    evolve_me,
    steady_state,
)
from .phasespace import (
    PhaseDistribution,
    PhaseGrid,
    QSurface,
    husimi_q_boson,
    husimi_q_spin,
    phase_diff_dist_boson,
    phase_diff_dist_spins,
    phase_dist_boson,
    phase_dist_spin,
)
from .records import HistogramDist, SpectrumSeries, TrajectoryRecord, bin_averaged
