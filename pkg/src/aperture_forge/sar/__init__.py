"""Synthetic aperture radar: scene simulation, focusing, adaptive and
tomographic imaging, speckle handling, and link-budget metrics."""

from .scene import (
    PhaseHistory,
    PointScene,
    SarGeometry,
    Scatterer,
    sar_resolutions,
    simulate_phase_history,
    slant_range_history,
)
from .focus import (
    SarImage,
    backproject,
    chirp_scaling_focus,
    curvature_factor,
    omega_k_focus,
    range_distortion,
)
from .tomo import project_image, tomographic_reconstruct
from .capon import (
    CaponProblem,
    capon_image,
    conventional_image,
    linear_phase_steering,
    matched_image,
    synthesize_capon_data,
)
from .speckle import SpeckledImage, apply_speckle, lee_filter
from .qsar import (
    QsarParams,
    detection_error_probabilities,
    qsar_metrics,
    snr_linear,
)

__all__ = [
    "PhaseHistory",
    "PointScene",
    "SarGeometry",
    "Scatterer",
    "SarImage",
    "CaponProblem",
    "SpeckledImage",
    "QsarParams",
    "slant_range_history",
    "simulate_phase_history",
    "sar_resolutions",
    "backproject",
    "omega_k_focus",
    "chirp_scaling_focus",
    "curvature_factor",
    "range_distortion",
    "tomographic_reconstruct",
    "project_image",
    "capon_image",
    "conventional_image",
    "matched_image",
    "linear_phase_steering",
    "synthesize_capon_data",
    "apply_speckle",
    "lee_filter",
    "qsar_metrics",
    "snr_linear",
    "detection_error_probabilities",
]
