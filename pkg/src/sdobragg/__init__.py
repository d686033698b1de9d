"""Spin-dependent optical-lattice beam splitter, Bragg ladder dynamics,
and Aharonov-Casher interferometry for F = 1 alkali atoms."""

__version__ = "0.1.0"

from .bragg_dynamics import (KERNEL_BACKEND, LadderState, PulseSpec,
                             analytic_br, analytic_bs, bs_coupling,
                             bs_unitaries, ladder_energy_offset, max_timestep,
                             propagate_chain, propagate_chain_traj,
                             recoil_energy)
from .errors import NumericalError
from .interferometer import (FieldConfig, InterferometerResult, ac_phase_exact,
                             ac_phase_linear, ac_phase_m, ac_propagator,
                             lande_g_factor, mz_block_matrix,
                             mz_pipeline_numerical, run_interferometer,
                             w_matrices)
from .polarizability import (AtomSpecies, DataFileError, NearResonanceWarning,
                             TransitionLine, find_scalar_zero, load_species,
                             pulse_rabi_frequency, reduced_polarizability,
                             reflector_geometry, scalar_polarizability,
                             scan_polarizability, vector_polarizability,
                             wigner6j)
from .spin_algebra import (expectation, identity, is_hermitian, is_unitary,
                           mat_exp_antihermitian, quadrupole, spin_operators,
                           spin_state)

__all__ = [
    "KERNEL_BACKEND", "LadderState", "PulseSpec", "analytic_br", "analytic_bs",
    "bs_coupling", "bs_unitaries", "ladder_energy_offset", "max_timestep",
    "propagate_chain", "propagate_chain_traj", "recoil_energy",
    "NumericalError",
    "FieldConfig", "InterferometerResult", "ac_phase_exact", "ac_phase_linear",
    "ac_phase_m", "ac_propagator", "lande_g_factor", "mz_block_matrix",
    "mz_pipeline_numerical", "run_interferometer", "w_matrices",
    "AtomSpecies", "DataFileError", "NearResonanceWarning", "TransitionLine",
    "find_scalar_zero", "load_species", "pulse_rabi_frequency",
    "reduced_polarizability", "reflector_geometry", "scalar_polarizability",
    "scan_polarizability", "vector_polarizability", "wigner6j",
    "expectation", "identity", "is_hermitian", "is_unitary",
    "mat_exp_antihermitian", "quadrupole", "spin_operators", "spin_state",
    "__version__",
]
