"""Entanglement of topological edge modes in two SSH chains coupled to a qubit."""

__version__ = "0.1.0"

from .entanglement import (  # noqa: E402
    ComponentClass,
    DensityMatrix,
    Outcome,
    ProjectedState,
    component_filter,
    density_matrix,
    fidelity,
    negativity,
    partial_transpose,
    project_qubit,
    projected_negativities,
)
from .ensemble import (  # noqa: E402
    EnergyWindow,
    EnsembleReport,
    SweepConfig,
    derive_energy_window,
    max_negativity_sweep,
    track_eigenindex,
    uniqueness_check,
    window_mean_negativity,
    window_nonempty_probability,
)
from .model import (  # noqa: E402
    ChainSpec,
    CompositeHamiltonian,
    CompositeSpec,
    DisorderMode,
    DisorderRealization,
    DisorderSpec,
    build_composite,
    build_ssh_matrix,
    dispersive_shift,
    sample_disorder,
)
from .spectra import (  # noqa: E402
    Eigensystem,
    diagonalize_composite,
    edge_mode_profiles,
    eigh,
    mid_gap_splitting,
    ssh_spectrum,
)
from .units import units_convert  # noqa: E402
