"""Gate-tunable superconducting qubits coupled to 3D microwave cavities:
spectrum solvers, dispersive-coupling models, resonator and time-domain
fitters, and reproducible synthetic data.
"""

from .errors import (
    ConfigError,
    CqedkitError,
    FitError,
    FitInitError,
    InputDataError,
    NoDipError,
    NoResonanceError,
    NoSolutionError,
    NotConvergedError,
    SolverError,
    TruncationError,
)
from .spectra import (
    CavityGeometry,
    QubitParams,
    QubitSpectrum,
    gatemon_levels,
    infer_transmission,
    te_mode_frequency,
    transmon_levels,
)
from .coupling import (
    DispersiveSystem,
    GateSweepModel,
    SweepPoint,
    SweepResult,
    anti_crossing,
    coupling_from_shift,
    critical_photon_number,
    dispersive_shift_transmon,
    dispersive_shift_two_level,
    gate_sweep,
    mean_photon_number,
    nanowire_profile,
    power_dependence,
    purcell_induced_cavity_loss,
)
from .lm import FitResult, lm_minimize, numeric_jacobian
from .fitters import (
    ComplexTrace,
    ResonatorFit,
    derive_qi,
    fit_lorentzian,
    fit_rabi,
    fit_reflection,
    initial_guess_reflection,
    lorentzian_model,
    rabi_model,
    reflection_model,
    subtract_background,
)
from .synth import (
    Map2D,
    SynthSpec,
    synth_gate_map,
    synth_power_map,
    synth_rabi,
    synth_reflection,
    synth_two_tone,
)

__version__ = "0.1.0"

__all__ = [
    "CavityGeometry",
    "ComplexTrace",
    "ConfigError",
    "CqedkitError",
    "DispersiveSystem",
    "FitError",
    "FitInitError",
    "FitResult",
    "GateSweepModel",
    "InputDataError",
    "Map2D",
    "NoDipError",
    "NoResonanceError",
    "NoSolutionError",
    "NotConvergedError",
    "QubitParams",
    "QubitSpectrum",
    "ResonatorFit",
    "SolverError",
    "SweepPoint",
    "SweepResult",
    "SynthSpec",
    "TruncationError",
    "anti_crossing",
    "coupling_from_shift",
    "critical_photon_number",
    "derive_qi",
    "dispersive_shift_transmon",
    "dispersive_shift_two_level",
    "fit_lorentzian",
    "fit_rabi",
    "fit_reflection",
    "gate_sweep",
    "gatemon_levels",
    "infer_transmission",
    "initial_guess_reflection",
    "lm_minimize",
    "lorentzian_model",
    "mean_photon_number",
    "nanowire_profile",
    "numeric_jacobian",
    "power_dependence",
    "purcell_induced_cavity_loss",
    "rabi_model",
    "reflection_model",
    "subtract_background",
    "synth_gate_map",
    "synth_power_map",
    "synth_rabi",
    "synth_reflection",
    "synth_two_tone",
    "te_mode_frequency",
    "transmon_levels",
]
