"""Exact Riemann solver for the Chaplygin-pressure Aw-Rascle model with Coulomb-like friction."""
from .exact import (
    DeltaShock,
    SampleKind,
    SamplePoint,
    TransportKind,
    TransportPattern,
    TwoContacts,
    delta_path,
    entropy_check,
    sample,
    solve,
    solve_transport,
)
from .model import (
    DomainError,
    Frame,
    InconsistencyError,
    ModelParams,
    NotApplicableError,
    RiemannSetup,
    State,
    eigenvalues,
    frame_convert,
    pressure,
)
from .phase_plane import Region, classify, j1_curve, thresholds

__version__ = "0.1.0"

__all__ = [
    "DeltaShock",
    "DomainError",
    "Frame",
    "InconsistencyError",
    "ModelParams",
    "NotApplicableError",
    "Region",
    "RiemannSetup",
    "SampleKind",
    "SamplePoint",
    "State",
    "TransportKind",
    "TransportPattern",
    "TwoContacts",
    "classify",
    "delta_path",
    "eigenvalues",
    "entropy_check",
    "frame_convert",
    "j1_curve",
    "pressure",
    "sample",
    "solve",
    "solve_transport",
    "thresholds",
]
