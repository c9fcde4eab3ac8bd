"""Simulation toolkit for coherent population transfer in multilevel RWA systems.

Builds rotating-wave Hamiltonians for tripod (3+1) and N+N ladder level
schemes driven by shaped pulses, computes dressed-state spectra and adiabatic
transfer analytics, integrates the time-dependent Schrodinger equation, and
sweeps pulse area / level splitting to map the transfer yield. Frequencies are
expressed in units of 1/tau0 and times in units of tau0 (hbar = 1).
"""

__version__ = "0.1.0"

from .model import (
    LevelScheme,
    PulseArea,
    PulseSpec,
    StateVector,
    TimeGrid,
    pulse_area,
    pulse_value,
)
from .hamiltonian import RwaHamiltonian, build_ladder, build_tripod, evaluate
from .spectral import (
    DressedBranches,
    TrackingError,
    analytic_tripod_eigenvalues,
    dressed_spectrum,
    tlds_gap,
    track_branches,
)
from .adiabatic import (
    AdiabaticResult,
    AreaExpansionReport,
    SmallIntensityArea,
    adiabatic_amplitudes,
    area_expansion_report,
    area_small_intensity,
    area_symmetric_tripod,
    generalized_area,
    tls_population,
)
from .propagator import (
    PropagationError,
    Trajectory,
    final_population,
    propagate,
    propagate_batch,
    recommended_steps_per_tau0,
)
from .sweep import (
    AxisSpec,
    ScanGrid,
    ScanSpec,
    scan_area,
    scan_area_delta,
    visibility,
)

__all__ = [
    "AdiabaticResult",
    "AreaExpansionReport",
    "AxisSpec",
    "DressedBranches",
    "LevelScheme",
    "PropagationError",
    "PulseArea",
    "PulseSpec",
    "RwaHamiltonian",
    "ScanGrid",
    "ScanSpec",
    "SmallIntensityArea",
    "StateVector",
    "TimeGrid",
    "TrackingError",
    "Trajectory",
    "adiabatic_amplitudes",
    "analytic_tripod_eigenvalues",
    "area_expansion_report",
    "area_small_intensity",
    "area_symmetric_tripod",
    "build_ladder",
    "build_tripod",
    "dressed_spectrum",
    "evaluate",
    "final_population",
    "generalized_area",
    "propagate",
    "propagate_batch",
    "pulse_area",
    "pulse_value",
    "recommended_steps_per_tau0",
    "scan_area",
    "scan_area_delta",
    "tlds_gap",
    "tls_population",
    "track_branches",
    "visibility",
]
