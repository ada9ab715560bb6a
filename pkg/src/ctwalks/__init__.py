"""Continuous-time walks on graphs and their short-time power laws.

The package simulates classical diffusive, coherent, chiral,
rotating-frame and dissipative walks on small graphs, predicts the
short-time behavior of their transition amplitudes from shortest-path
combinatorics, and verifies every prediction against exact propagation
with rigorous truncation envelopes.
"""

from .asymptotics import (
    AsymptoticPrediction,
    ErrorEnvelope,
    FitResult,
    default_fit_window,
    error_bound,
    fit_exponent,
    leading_amplitude_series,
    path_amplitude,
    path_amplitude_series,
    predict,
    timescale,
    transition_entry_series,
    transition_probability_series,
)
from .errors import (
    AccuracyError,
    CapacityError,
    DomainError,
    InputError,
    PathOverflowError,
    WalkError,
)
from .gauge import GaugeResult, gauge_trivialize
from .generators import (
    Generator,
    InteractionGenerator,
    RotatingFrameGenerator,
    StaticGenerator,
    chiral_adjacency,
    chiral_hamiltonian,
    ctqw_generator,
    ctrw_generator,
    gaussian_potential,
    interaction_picture,
    rotating_frame_generator,
)
from .graphs import (
    Graph,
    PathSet,
    adjacency_matrix,
    binary_tree,
    cycle_graph,
    diamond_with_chord,
    distances_and_counts,
    enumerate_shortest_paths,
    load_graph,
    path_graph,
    random_connected_graph,
    random_tree,
    standard_matrices,
    star_graph,
)
from .lindblad import (
    LGraphGeometry,
    QswLindbladian,
    build_lindbladian,
    evolve_density,
    lgraph_geometry,
    rho_short_time,
)
from .linalg import PropagationResult, hs_inner, propagate, spectral_norm

__version__ = "0.1.0"

__all__ = [
    "AsymptoticPrediction",
    "AccuracyError",
    "CapacityError",
    "DomainError",
    "ErrorEnvelope",
    "FitResult",
    "GaugeResult",
    "Generator",
    "Graph",
    "InputError",
    "InteractionGenerator",
    "LGraphGeometry",
    "PathOverflowError",
    "PathSet",
    "PropagationResult",
    "QswLindbladian",
    "RotatingFrameGenerator",
    "StaticGenerator",
    "WalkError",
    "adjacency_matrix",
    "binary_tree",
    "build_lindbladian",
    "chiral_adjacency",
    "chiral_hamiltonian",
    "ctqw_generator",
    "ctrw_generator",
    "cycle_graph",
    "default_fit_window",
    "diamond_with_chord",
    "distances_and_counts",
    "enumerate_shortest_paths",
    "error_bound",
    "evolve_density",
    "fit_exponent",
    "gauge_trivialize",
    "gaussian_potential",
    "hs_inner",
    "interaction_picture",
    "leading_amplitude_series",
    "lgraph_geometry",
    "load_graph",
    "path_amplitude",
    "path_amplitude_series",
    "path_graph",
    "predict",
    "propagate",
    "random_connected_graph",
    "random_tree",
    "rho_short_time",
    "rotating_frame_generator",
    "spectral_norm",
    "standard_matrices",
    "star_graph",
    "timescale",
    "transition_entry_series",
    "transition_probability_series",
]
