"""Spectral interference simulator for shaped-pump photon-pair sources.

Models a pair source pumped by several phase-locked spectral
components: the pump autoconvolution fixes which signal and idler
channels are coupled, a multimode squeezed state supplies multi-pair
amplitudes as matrix permanents, and a detection chain with loss and
threshold detectors turns them into coincidence counts that can be
compared against the distinguishable-photon baseline.
"""

from .detection import (
    ContrastReport,
    CountReport,
    DetectionModel,
    apply_detection,
    classical_fourfold_prediction,
    interference_contrast,
    normalize_to_least_efficient,
)
from .fock import OccupationPattern, TruncatedState, expand, pattern_probability, sample_events
from .gaussian import (
    GaussianPairState,
    OutcomePattern,
    from_jsa,
    n_pair_amplitude,
    n_pair_probability,
    quantum_outcome_table,
)
from .jsa import (
    FrequencyGrid,
    JsaMatrix,
    PumpAutoconvolution,
    PumpSpectrum,
    autoconvolve,
    build_jsa,
    default_grid,
    three_pump_matrix,
)
from .outcomes import OutcomeTable, pattern_key, pattern_string
from .permanent import (
    BACKEND,
    abs_squared_matrix,
    permanent,
    permanent_naive,
    submatrix,
)
from .scenario import (
    PumpComponent,
    ScenarioConfig,
    SweepSpec,
    bundled_config_names,
    load_bundled_config,
    phase_sweep,
    run_scenario,
    verify_oracle,
)

__version__ = "0.1.0"

__all__ = [
    "BACKEND",
    "ContrastReport",
    "CountReport",
    "DetectionModel",
    "FrequencyGrid",
    "GaussianPairState",
    "JsaMatrix",
    "OccupationPattern",
    "OutcomePattern",
    "OutcomeTable",
    "PumpAutoconvolution",
    "PumpComponent",
    "PumpSpectrum",
    "ScenarioConfig",
    "SweepSpec",
    "TruncatedState",
    "abs_squared_matrix",
    "apply_detection",
    "autoconvolve",
    "build_jsa",
    "bundled_config_names",
    "classical_fourfold_prediction",
    "default_grid",
    "expand",
    "from_jsa",
    "interference_contrast",
    "load_bundled_config",
    "n_pair_amplitude",
    "n_pair_probability",
    "normalize_to_least_efficient",
    "pattern_key",
    "pattern_probability",
    "pattern_string",
    "permanent",
    "permanent_naive",
    "phase_sweep",
    "quantum_outcome_table",
    "run_scenario",
    "sample_events",
    "submatrix",
    "three_pump_matrix",
    "verify_oracle",
    "__version__",
]
