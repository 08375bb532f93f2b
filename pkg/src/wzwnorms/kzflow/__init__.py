"""Reduced four-point KZ system: series at the singular points, transport, norm extraction."""

from .frobenius import FrobeniusBasis, FrobeniusError, frobenius_basis
from .gauss import gauss_connection_matrix
from .norm import (connection_matrix, norm_via_kz, seed_vector, series_connection_matrix,
                   singlet_vector)
from .system import ReducedKZSystem, ResonanceError, channel_vectors, reduce_four_point
from .transport import (TransportError, circle_transport, monodromy_eigenvalues, transport,
                        transport_info)

__all__ = [
    "FrobeniusBasis", "FrobeniusError", "ReducedKZSystem", "ResonanceError", "TransportError",
    "channel_vectors", "circle_transport", "connection_matrix", "frobenius_basis",
    "gauss_connection_matrix", "monodromy_eigenvalues", "norm_via_kz", "reduce_four_point",
    "seed_vector", "series_connection_matrix", "singlet_vector", "transport", "transport_info",
]
