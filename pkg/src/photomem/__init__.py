"""Photon-memory entanglement from a pumped cavity coupled to an ensemble memory."""

__version__ = "0.1.0"

from .model import (
    AfcParams,
    InstabilityError,
    MemoryModel,
    ParameterError,
    SystemParams,
    afc_effective_params,
    stability_threshold,
)
from .scattering import ScatteringMatrix, decompose_circuit, scattering_matrix
from .gaussian import CovarianceMatrix, covariance_from_scattering, eof_two_mode
from .metrics import entanglement_rate, heralding_efficiency, photon_flux

__all__ = [
    "AfcParams",
    "CovarianceMatrix",
    "InstabilityError",
    "MemoryModel",
    "ParameterError",
    "ScatteringMatrix",
    "SystemParams",
    "afc_effective_params",
    "covariance_from_scattering",
    "decompose_circuit",
    "entanglement_rate",
    "eof_two_mode",
    "heralding_efficiency",
    "photon_flux",
    "scattering_matrix",
    "stability_threshold",
]
