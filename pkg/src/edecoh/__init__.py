"""Electron matter-wave decoherence over conducting surfaces.

Simulates far-field nano-grating diffraction of electrons that pass over a
conducting or semiconducting plate, under four competing decoherence
models, and extracts the transverse coherence length from the simulated
patterns the same way the measurement does (peak spacing over peak FWHM
times the grating period).
"""

__version__ = "0.1.0"

from .analysis import (
    FitParams,
    FitResult,
    LineOut,
    build_diffractogram,
    coherence_length,
    extract_lineouts,
    fit_lineout,
    fwhm_of_peak,
)
from .coherence import (
    CoherenceNumerics,
    DensityMatrixGrid,
    FarFieldPattern,
    GratingSpec,
    PureStateSet,
    apply_decoherence,
    decompose,
    extract_offdiagonal_width,
    far_field,
    grating_transmit,
    initial_density_matrix,
    pattern_for_height,
)
from .models import (
    BeamSpec,
    MaterialSpec,
    ModelId,
    expint,
    expint_oracle,
    gamma_for_separation,
    gold,
    howie_probability,
    silicon,
    tau_buhmann,
    tau_machnikowski,
    tau_zurek,
    thermal_de_broglie,
)
from .pipeline import (
    CoherenceCurve,
    ScenarioConfig,
    load_config,
    models_table,
    run_scenario,
    synth_image,
)
from .trajectory import (
    GeometrySpec,
    TrajectoryEnsemble,
    TrajectoryRecord,
    detector_histogram,
    find_cut_height,
    propagate_ensemble,
    propagate_over_surface,
    sample_initial_conditions,
)

__all__ = [
    "__version__",
    "BeamSpec",
    "MaterialSpec",
    "ModelId",
    "silicon",
    "gold",
    "thermal_de_broglie",
    "tau_zurek",
    "tau_buhmann",
    "howie_probability",
    "tau_machnikowski",
    "expint",
    "expint_oracle",
    "gamma_for_separation",
    "GeometrySpec",
    "TrajectoryRecord",
    "TrajectoryEnsemble",
    "sample_initial_conditions",
    "propagate_over_surface",
    "propagate_ensemble",
    "find_cut_height",
    "detector_histogram",
    "DensityMatrixGrid",
    "PureStateSet",
    "GratingSpec",
    "FarFieldPattern",
    "CoherenceNumerics",
    "initial_density_matrix",
    "apply_decoherence",
    "extract_offdiagonal_width",
    "decompose",
    "grating_transmit",
    "far_field",
    "pattern_for_height",
    "LineOut",
    "FitParams",
    "FitResult",
    "fit_lineout",
    "fwhm_of_peak",
    "coherence_length",
    "extract_lineouts",
    "build_diffractogram",
    "ScenarioConfig",
    "CoherenceCurve",
    "load_config",
    "run_scenario",
    "models_table",
    "synth_image",
]
