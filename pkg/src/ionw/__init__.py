"""Three trapped ions coupled to a red-sideband cavity mode: exact dynamics and
multipartite entanglement (global and partial K-way negativities)."""

__version__ = "0.1.0"

from .dynamics import (
    AmplitudeSet,
    Preparation,
    SimulationConfig,
    SpectralData,
    amplitudes_excited,
    amplitudes_ground,
    block_hamiltonian,
    composite_state,
    evolve,
    probabilities,
    spectral_unitary,
    w1_generation_time,
    w2_peak_probability,
)
from .entanglement import (
    NegativityReport,
    TransposeSpec,
    analytic_negativities,
    density_from_pure,
    entanglement_report,
    negativity,
    partial_kway_negativities,
    partial_transpose,
)
from .errors import ValidationError
