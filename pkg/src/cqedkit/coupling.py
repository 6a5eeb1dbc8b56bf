"""Qubit-cavity coupling model: dispersive shifts, anti-crossings, gate
sweeps, power dependence, and qubit-induced cavity loss.

Sign convention throughout: delta = f_bare - f_qubit (cavity minus qubit),
in MHz. Cavity frequencies are GHz, couplings and linewidths MHz.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np
from scipy.interpolate import PchipInterpolator

from .errors import CqedkitError
from .spectra import QubitParams, QubitSpectrum, gatemon_levels, transmon_levels

PLANCK_J_S = 6.62607015e-34

# |delta| > DISPERSIVE_FACTOR * g counts as dispersive; below that the
# hybridized branches are the meaningful observables.
DISPERSIVE_FACTOR = 10.0


@dataclass
class DispersiveSystem:
    """Bare cavity plus qubit spectrum and loss rates."""

    f_bare_ghz: float
    g_mhz: float
    qubit: QubitSpectrum | None = None
    kappa_mhz: float = 1.0
    gamma_q_mhz: float = 0.0

    def __post_init__(self):
        if self.f_bare_ghz <= 0:
            raise ValueError("f_bare_ghz must be positive")
        if self.g_mhz <= 0:
            raise ValueError("g_mhz must be positive")
        if self.kappa_mhz <= 0:
            raise ValueError("kappa_mhz must be positive")
        if self.gamma_q_mhz < 0:
            raise ValueError("gamma_q_mhz must be non-negative")

    @property
    def delta_mhz(self) -> float:
        """Detuning f_bare - f01 in MHz."""
        if self.qubit is None:
            raise ValueError("system has no qubit spectrum attached")
        return self.f_bare_ghz * 1e3 - self.qubit.f01

    @property
    def is_dispersive(self) -> bool:
        return abs(self.delta_mhz) > DISPERSIVE_FACTOR * self.g_mhz


def dispersive_shift_two_level(g: float, delta: float) -> float:
    """Two-level dispersive cavity shift chi = g^2/delta (MHz)."""
    if delta == 0:
        raise ValueError("delta = 0 is resonant; use anti_crossing instead")
    if abs(delta) < DISPERSIVE_FACTOR * g:
        warnings.warn(
            f"|delta| = {abs(delta):.3g} MHz < 10 g; dispersive result unreliable",
            stacklevel=2,
        )
    return g * g / delta


def dispersive_shift_transmon(g: float, delta: float, alpha: float) -> float:
    """Multi-level shift chi = g^2 * alpha / (delta * (delta + alpha)) (MHz).

    Reduces to the two-level g^2/delta as |alpha| grows. The straddle point
    delta = -alpha is a pole of the model and is rejected.
    """
    if delta == 0:
        raise ValueError("delta = 0 is resonant; use anti_crossing instead")
    if delta + alpha == 0:
        raise ValueError("delta = -alpha sits on the straddle-point pole")
    return g * g * alpha / (delta * (delta + alpha))


def coupling_from_shift(chi: float, delta: float) -> float:
    """Invert the two-level shift: g = sqrt(chi * delta) (MHz)."""
    if chi * delta <= 0:
        raise ValueError(
            f"chi and delta must share a sign, got chi={chi:g}, delta={delta:g}"
        )
    return math.sqrt(chi * delta)


def anti_crossing(f_bare_ghz: float, f_q_ghz: float, g_mhz: float):
    """Hybridized branch frequencies (f_plus, f_minus) in GHz.

    Eigenvalues of the 2x2 single-excitation block; the minimum splitting
    2g occurs at resonance.
    """
    if g_mhz <= 0:
        raise ValueError("g_mhz must be positive")
    mean = (f_bare_ghz + f_q_ghz) / 2.0
    split = math.hypot((f_bare_ghz - f_q_ghz) / 2.0, g_mhz / 1e3)
    return mean + split, mean - split


def critical_photon_number(g_mhz: float, delta_mhz: float) -> float:
    """n_crit = (delta / 2g)^2, where the dispersive picture breaks down."""
    if g_mhz <= 0:
        raise ValueError("g_mhz must be positive")
    return (delta_mhz / (2.0 * g_mhz)) ** 2


def mean_photon_number(
    power_dbm, f_ghz: float, kappa_mhz: float, attenuation_db: float = 0.0
):
    """Steady-state one-port photon number n = P/(h f kappa).

    ``attenuation_db`` is the line attenuation between the stated source
    power and the cavity port; it is configuration, not physics.
    """
    p_watt = 1e-3 * np.power(10.0, (np.asarray(power_dbm, float) - attenuation_db) / 10.0)
    return p_watt / (PLANCK_J_S * f_ghz * 1e9 * kappa_mhz * 1e6)


def power_dependence(
    system: DispersiveSystem,
    powers_dbm,
    attenuation_db: float = 0.0,
    width_efolds: float = 1.0,
) -> np.ndarray:
    """Apparent cavity frequency f_C(P) in GHz across the power crossover.

    Phenomenological model: the dispersive shift chi is weighted by a
    logistic in log photon number centered on n_crit, giving
    f_bare + chi at n << n_crit and the bare frequency at n >> n_crit.
    """
    delta = system.delta_mhz
    chi = dispersive_shift_two_level(system.g_mhz, delta)
    n_crit = critical_photon_number(system.g_mhz, delta)
    n_bar = mean_photon_number(
        powers_dbm, system.f_bare_ghz, system.kappa_mhz, attenuation_db
    )
    weight = 1.0 / (1.0 + (n_bar / n_crit) ** (1.0 / width_efolds))
    return system.f_bare_ghz + chi / 1e3 * weight


def purcell_induced_cavity_loss(
    g_mhz: float,
    delta_mhz: float,
    gamma_q_mhz: float,
    f_c_ghz: float,
    q_i_intrinsic: float,
) -> float:
    """Effective internal Q with the qubit-induced loss channel added.

    kappa_ind = (g/delta)^2 * gamma_q is added to the intrinsic loss rate:
    Q_i_eff = f_C / (f_C/Q_i + kappa_ind), everything in MHz.
    """
    if delta_mhz == 0:
        raise ValueError("delta = 0: inverse-Purcell formula needs detuning")
    if q_i_intrinsic <= 0:
        raise ValueError("q_i_intrinsic must be positive")
    kappa_ind = (g_mhz / delta_mhz) ** 2 * gamma_q_mhz
    f_c_mhz = f_c_ghz * 1e3
    return f_c_mhz / (f_c_mhz / q_i_intrinsic + kappa_ind)


@dataclass
class GateSweepModel:
    """Sampled map from gate voltage to EJ (MHz) or channel transmission.

    Evaluation interpolates the table (monotone cubic by default, so no
    overshoot between samples) and holds the end values outside its range.
    """

    voltages: np.ndarray
    values: np.ndarray
    maps_to: str = "ej"  # "ej" or "transmission"
    kind: str = "pchip"  # "pchip" or "linear"

    def __post_init__(self):
        self.voltages = np.asarray(self.voltages, dtype=float)
        self.values = np.asarray(self.values, dtype=float)
        if self.voltages.ndim != 1 or self.voltages.shape != self.values.shape:
            raise ValueError("voltages and values must be 1-D arrays of equal length")
        if self.voltages.size < 2:
            raise ValueError("need at least two table samples")
        if not np.all(np.diff(self.voltages) > 0):
            raise ValueError("V_G samples must be strictly increasing")
        if self.maps_to not in ("ej", "transmission"):
            raise ValueError(f"maps_to must be 'ej' or 'transmission', got {self.maps_to!r}")
        if self.kind not in ("pchip", "linear"):
            raise ValueError(f"kind must be 'pchip' or 'linear', got {self.kind!r}")
        if np.any(self.values < 0):
            raise ValueError("mapped values must be non-negative")
        if self.maps_to == "transmission" and np.any(self.values > 1):
            raise ValueError("transmissions must lie in [0, 1]")
        if self.kind == "pchip":
            self._interp = PchipInterpolator(self.voltages, self.values)
        else:
            self._interp = None

    def __call__(self, v):
        v = np.clip(v, self.voltages[0], self.voltages[-1])
        if self._interp is not None:
            out = self._interp(v)
        else:
            out = np.interp(v, self.voltages, self.values)
        hi = 1.0 if self.maps_to == "transmission" else np.inf
        return np.clip(out, 0.0, hi)


def nanowire_profile(
    seed: int,
    v_min: float = -2.0,
    v_max: float = 10.0,
    n: int = 41,
    v_pinch: float = 0.0,
    max_value: float = 20000.0,
    maps_to: str = "ej",
    wiggle: float = 0.2,
) -> GateSweepModel:
    """Seeded synthetic gate response: smooth turn-on plus bounded wiggles.

    Zero below ``v_pinch``, then a smoothstep ramp toward ``max_value``
    modulated by a smoothed random walk of relative amplitude ``wiggle``.
    Stands in for a semiconductor-junction response where no measured
    table is available.
    """
    rng = np.random.default_rng(seed)
    v = np.linspace(v_min, v_max, n)
    v_on = v_pinch + 0.6 * (v_max - v_pinch)
    s = np.clip((v - v_pinch) / (v_on - v_pinch), 0.0, 1.0)
    ramp = s * s * (3.0 - 2.0 * s)
    walk = np.cumsum(rng.standard_normal(n))
    walk = np.convolve(walk, np.ones(5) / 5.0, mode="same")
    peak = np.max(np.abs(walk))
    if peak > 0:
        walk /= peak
    values = max_value * ramp * (1.0 + wiggle * walk * s)
    values = np.maximum(values, 0.0)
    if maps_to == "transmission":
        values = np.clip(values, 0.0, 1.0)
    return GateSweepModel(v, values, maps_to=maps_to)


@dataclass
class SweepPoint:
    """One gate point of a sweep; NaN marks fields without meaning there."""

    vg: float
    f_q_mhz: float
    chi_mhz: float
    f_c_ghz: float
    f_plus_ghz: float
    f_minus_ghz: float
    regime: str  # "pinch_off", "dispersive", or "hybridized"


@dataclass
class SweepResult:
    """Gate sweep output plus the system constants needed to resynthesize it."""

    points: list[SweepPoint] = field(default_factory=list)
    f_bare_ghz: float = 0.0
    g_mhz: float = 0.0
    kappa_mhz: float = 1.0
    gamma_q_mhz: float = 0.0

    CSV_COLUMNS = ("V_G", "f_Q_MHz", "chi_MHz", "f_C_GHz", "f_plus_GHz", "f_minus_GHz")

    def to_records(self) -> list[dict]:
        return [
            {
                "V_G": p.vg,
                "f_Q_MHz": p.f_q_mhz,
                "chi_MHz": p.chi_mhz,
                "f_C_GHz": p.f_c_ghz,
                "f_plus_GHz": p.f_plus_ghz,
                "f_minus_GHz": p.f_minus_ghz,
            }
            for p in self.points
        ]

    def column(self, name: str) -> np.ndarray:
        attr = {
            "V_G": "vg",
            "f_Q_MHz": "f_q_mhz",
            "chi_MHz": "chi_mhz",
            "f_C_GHz": "f_c_ghz",
            "f_plus_GHz": "f_plus_ghz",
            "f_minus_GHz": "f_minus_ghz",
        }[name]
        return np.array([getattr(p, attr) for p in self.points], dtype=float)


def gate_sweep(
    model: GateSweepModel,
    params: QubitParams,
    system: DispersiveSystem,
    voltages=None,
    check: bool = True,
) -> SweepResult:
    """Sweep the gate table and record qubit and cavity observables.

    Per point: the junction value from ``model`` replaces EJ (or the single
    channel transmission) in ``params``, the spectrum is solved, and either
    the dispersive shift (|delta| > 10 g) or the hybridized anti-crossing
    branches are reported. Pinch-off points (EJ = 0 or T = 0) leave the
    bare cavity: f_C = f_bare, chi = 0.

    ``voltages`` defaults to the model's own sample grid. Points are
    returned ordered by V_G no matter how they were evaluated.
    """
    if voltages is None:
        voltages = model.voltages
    voltages = np.sort(np.asarray(voltages, dtype=float))
    is_transmon_sweep = model.maps_to == "ej"
    if is_transmon_sweep != params.is_transmon:
        raise ValueError("sweep table maps_to does not match the qubit variant")

    points = []
    for v in voltages:
        value = float(model(v))
        if value <= 0.0:
            points.append(
                SweepPoint(
                    vg=float(v),
                    f_q_mhz=math.nan,
                    chi_mhz=0.0,
                    f_c_ghz=system.f_bare_ghz,
                    f_plus_ghz=math.nan,
                    f_minus_ghz=math.nan,
                    regime="pinch_off",
                )
            )
            continue
        try:
            if is_transmon_sweep:
                p = QubitParams(ec=params.ec, ej=value, ng=params.ng)
                spectrum = transmon_levels(p, check=check)
            else:
                p = QubitParams(
                    ec=params.ec, gap=params.gap, transmissions=(value,), ng=params.ng
                )
                spectrum = gatemon_levels(p, check=check)
        except CqedkitError as exc:
            raise type(exc)(f"V_G = {v:g}: {exc}") from exc
        f01 = spectrum.f01
        f_q_ghz = f01 / 1e3
        delta = system.f_bare_ghz * 1e3 - f01
        f_plus, f_minus = anti_crossing(system.f_bare_ghz, f_q_ghz, system.g_mhz)
        if abs(delta) > DISPERSIVE_FACTOR * system.g_mhz:
            chi = system.g_mhz**2 / delta
            points.append(
                SweepPoint(
                    vg=float(v),
                    f_q_mhz=f01,
                    chi_mhz=chi,
                    f_c_ghz=system.f_bare_ghz + chi / 1e3,
                    f_plus_ghz=f_plus,
                    f_minus_ghz=f_minus,
                    regime="dispersive",
                )
            )
        else:
            # near resonance a single shifted line is meaningless; report
            # the branch that carries the cavity character
            f_c = f_plus if f01 <= system.f_bare_ghz * 1e3 else f_minus
            points.append(
                SweepPoint(
                    vg=float(v),
                    f_q_mhz=f01,
                    chi_mhz=math.nan,
                    f_c_ghz=f_c,
                    f_plus_ghz=f_plus,
                    f_minus_ghz=f_minus,
                    regime="hybridized",
                )
            )
    return SweepResult(
        points=points,
        f_bare_ghz=system.f_bare_ghz,
        g_mhz=system.g_mhz,
        kappa_mhz=system.kappa_mhz,
        gamma_q_mhz=system.gamma_q_mhz,
    )
