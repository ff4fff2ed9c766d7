"""Phonon tunneling and synthetic gauge fields in microtrap arrays."""

from ._core import (
    BrokenCycle,
    CapacityError,
    ConfigError,
    ConfigurationError,
    DomainError,
    Error,
    IntegrationFailure,
    InvalidGeometry,
    bessel_j,
    dressed_factor,
    eigensystem,
    experiment_names,
    gauge_transform,
    ladder_spectrum,
    link_transfer_point,
    plaquette_experiment,
    plaquette_flux,
    preset_document,
    rhombic_ladder_matrix,
    run_config,
    square_lattice_matrix,
    version,
)

__version__ = version()

__all__ = [
    "BrokenCycle",
    "CapacityError",
    "ConfigError",
    "ConfigurationError",
    "DomainError",
    "Error",
    "IntegrationFailure",
    "InvalidGeometry",
    "bessel_j",
    "dressed_factor",
    "eigensystem",
    "experiment_names",
    "gauge_transform",
    "ladder_spectrum",
    "link_transfer_point",
    "plaquette_experiment",
    "plaquette_flux",
    "preset_document",
    "rhombic_ladder_matrix",
    "run_config",
    "square_lattice_matrix",
    "version",
]
