"""Qubit spectra and rectangular-cavity eigenmodes.

Two junction models share the same charging term 4*EC*(n - ng)^2:

* transmon: cosine Josephson potential, solved in the charge basis as the
  usual tridiagonal Cooper-pair-box Hamiltonian,
* gate-tunable junction ("gatemon"): channel potential
  U(phi) = -gap * sum_i sqrt(1 - T_i * sin^2(phi/2)) on the periodic phase
  interval [0, 2pi), solved spectrally by Fourier transform of U into the
  charge basis.

All energies are frequencies in MHz (E/h). Cavity frequencies are GHz.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.linalg import eigvalsh, eigvalsh_tridiagonal
from scipy.optimize import brentq

from .errors import NoSolutionError, TruncationError

SPEED_OF_LIGHT = 299792458.0  # m/s

DEFAULT_N_CUT = 30    # charge cutoff, matrix dimension 2*n_cut + 1
DEFAULT_GRID_N = 201  # phase-grid points, odd
F01_CONVERGENCE_MHZ = 0.01  # refinement check threshold


@dataclass
class QubitParams:
    """Junction and charging parameters, energies in MHz.

    Exactly one variant must be populated: ``ej`` for a tunnel junction,
    or ``gap`` plus ``transmissions`` for a few-channel semiconductor one.
    """

    ec: float
    ej: float | None = None
    gap: float | None = None
    transmissions: tuple[float, ...] | None = None
    ng: float = 0.0

    def __post_init__(self):
        if self.ec <= 0:
            raise ValueError(f"ec must be positive, got {self.ec}")
        has_ej = self.ej is not None
        has_channels = self.gap is not None or self.transmissions is not None
        if has_ej == has_channels:
            raise ValueError("populate exactly one of ej or (gap, transmissions)")
        if has_ej and self.ej < 0:
            raise ValueError(f"ej must be non-negative, got {self.ej}")
        if has_channels:
            if self.gap is None or self.transmissions is None:
                raise ValueError("gap and transmissions must be given together")
            if self.gap < 0:
                raise ValueError(f"gap must be non-negative, got {self.gap}")
            self.transmissions = tuple(float(t) for t in self.transmissions)
            if not self.transmissions:
                raise ValueError("need at least one channel transmission")
            for t in self.transmissions:
                if not 0.0 <= t <= 1.0:
                    raise ValueError(f"transmission {t} outside [0, 1]")

    @property
    def is_transmon(self) -> bool:
        return self.ej is not None


@dataclass
class QubitSpectrum:
    """Lowest eigenenergies (MHz) of a qubit Hamiltonian, sorted ascending."""

    levels: np.ndarray

    def __post_init__(self):
        self.levels = np.asarray(self.levels, dtype=float)
        if self.levels.ndim != 1 or self.levels.size < 3:
            raise ValueError("need at least three levels")

    @property
    def f01(self) -> float:
        return float(self.levels[1] - self.levels[0])

    @property
    def f12(self) -> float:
        return float(self.levels[2] - self.levels[1])

    @property
    def f02(self) -> float:
        # defined as the sum so f02 == f01 + f12 holds exactly
        return self.f01 + self.f12

    @property
    def alpha(self) -> float:
        return self.f12 - self.f01

    def to_dict(self) -> dict:
        return {
            "units": "MHz",
            "levels": [float(e) for e in self.levels],
            "f01": self.f01,
            "f12": self.f12,
            "f02": self.f02,
            "alpha": self.alpha,
        }


@dataclass
class CavityGeometry:
    """Rectangular box dimensions (meters) and a TE mode-index triple."""

    length_a: float
    width_b: float
    height_d: float
    m: int = 1
    n: int = 0
    p: int = 1

    def __post_init__(self):
        for name in ("length_a", "width_b", "height_d"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be positive")
        idx = (self.m, self.n, self.p)
        if any(int(i) != i or i < 0 for i in idx):
            raise ValueError(f"mode indices must be non-negative integers, got {idx}")
        if sum(i == 0 for i in idx) > 1:
            raise ValueError(f"invalid TE triple {idx}: at most one index may be zero")


def _transmon_eigvals(ec: float, ej: float, ng: float, n_cut: int) -> np.ndarray:
    n = np.arange(-n_cut, n_cut + 1)
    diag = 4.0 * ec * (n - ng) ** 2
    off = np.full(2 * n_cut, -ej / 2.0)
    return eigvalsh_tridiagonal(diag, off)


def transmon_levels(
    params: QubitParams,
    n_cut: int = DEFAULT_N_CUT,
    n_levels: int = 6,
    check: bool = True,
) -> QubitSpectrum:
    """Diagonalize H = 4*EC*(n-ng)^2 - (EJ/2)*sum(|n><n+1| + h.c.).

    Parameters
    ----------
    params : QubitParams, EJ variant.
    n_cut : charge cutoff; the matrix dimension is 2*n_cut + 1.
    n_levels : number of eigenenergies kept in the result.
    check : when True, re-solve with 2*n_cut and require f01 to move by
        less than 0.01 MHz, raising TruncationError otherwise.
    """
    if not params.is_transmon:
        raise ValueError("transmon_levels needs the EJ variant of QubitParams")
    if n_cut < 10:
        raise ValueError(f"n_cut must be at least 10, got {n_cut}")
    vals = _transmon_eigvals(params.ec, params.ej, params.ng, n_cut)
    if check:
        ref = _transmon_eigvals(params.ec, params.ej, params.ng, 2 * n_cut)
        drift = abs((vals[1] - vals[0]) - (ref[1] - ref[0]))
        if drift >= F01_CONVERGENCE_MHZ:
            raise TruncationError(
                f"f01 moved {drift:.4g} MHz when n_cut doubled from {n_cut}; "
                "increase n_cut"
            )
    return QubitSpectrum(vals[:n_levels])


def _gatemon_eigvals(
    ec: float, gap: float, transmissions, ng: float, grid_n: int
) -> np.ndarray:
    # channel potential sampled on the periodic grid phi_j = 2*pi*j/N
    phi = 2.0 * np.pi * np.arange(grid_n) / grid_n
    u = np.zeros(grid_n)
    for t in transmissions:
        u -= gap * np.sqrt(1.0 - t * np.sin(phi / 2.0) ** 2)
    # Fourier coefficients of U give the charge-basis matrix elements
    # <k|U|k'> = c[(k - k') mod N]; spectrally exact for the sampled U
    c = np.fft.fft(u) / grid_n
    half = (grid_n - 1) // 2
    k = np.arange(-half, half + 1)
    h = np.diag(4.0 * ec * (k - ng) ** 2).astype(complex)
    h += c[(k[:, None] - k[None, :]) % grid_n]
    return eigvalsh(h)


def gatemon_levels(
    params: QubitParams,
    grid_n: int = DEFAULT_GRID_N,
    n_levels: int = 6,
    check: bool = True,
) -> QubitSpectrum:
    """Diagonalize 4*EC*(n-ng)^2 - gap*sum_i sqrt(1 - T_i sin^2(phi/2)).

    The potential is 2pi-periodic, so the problem is set up in the charge
    basis with the potential entering through its discrete Fourier
    transform on a ``grid_n``-point phase grid (odd, >= 101).

    With all T_i = 0 the potential is flat and the free-rotor spectrum
    (degenerate pairs at 4*EC*k^2 plus a constant) is returned as is.

    check : when True, re-solve on a 2*grid_n+1 grid and require f01 to
        move by less than 0.01 MHz, raising TruncationError otherwise.
    """
    if params.is_transmon:
        raise ValueError("gatemon_levels needs the (gap, transmissions) variant")
    if grid_n < 101 or grid_n % 2 == 0:
        raise ValueError(f"grid_n must be odd and at least 101, got {grid_n}")
    args = (params.ec, params.gap, params.transmissions, params.ng)
    vals = _gatemon_eigvals(*args, grid_n)
    if check:
        ref = _gatemon_eigvals(*args, 2 * grid_n + 1)
        drift = abs((vals[1] - vals[0]) - (ref[1] - ref[0]))
        if drift >= F01_CONVERGENCE_MHZ:
            raise TruncationError(
                f"f01 moved {drift:.4g} MHz under grid refinement from {grid_n}; "
                "increase grid_n"
            )
    return QubitSpectrum(vals[:n_levels])


def infer_transmission(
    alpha: float,
    ec: float,
    gap: float,
    ng: float = 0.0,
    grid_n: int = DEFAULT_GRID_N,
    t_min: float = 1e-3,
) -> float:
    """Invert the single-channel anharmonicity curve alpha(T).

    Root-find on the exact diagonalization, so the result reproduces
    ``alpha`` when fed back through gatemon_levels. The nominal band for a
    junction deep in its transmon regime is (-EC, -EC/4); the attainable
    interval at the given gap is computed numerically and a target outside
    it raises NoSolutionError carrying that interval.

    Returns the channel transmission T in (0, 1].
    """

    def alpha_at(t: float) -> float:
        p = QubitParams(ec=ec, gap=gap, transmissions=(t,), ng=ng)
        return gatemon_levels(p, grid_n=grid_n, check=False).alpha

    alpha_hi = alpha_at(1.0)      # least negative end
    alpha_lo = alpha_at(t_min)    # most negative end
    if not (alpha_lo <= alpha <= alpha_hi):
        raise NoSolutionError(
            f"alpha = {alpha:.6g} MHz outside the attainable interval "
            f"[{alpha_lo:.6g}, {alpha_hi:.6g}] MHz for gap = {gap:.6g} MHz "
            f"(T swept over [{t_min:g}, 1])",
            attainable=(alpha_hi, alpha_lo),
        )
    t = brentq(lambda x: alpha_at(x) - alpha, t_min, 1.0, xtol=1e-12, rtol=1e-15)
    return float(t)


def te_mode_frequency(geom: CavityGeometry) -> float:
    """Analytic TE(m,n,p) eigenfrequency of a rectangular cavity, in GHz."""
    root = np.sqrt(
        (geom.m / geom.length_a) ** 2
        + (geom.n / geom.width_b) ** 2
        + (geom.p / geom.height_d) ** 2
    )
    return SPEED_OF_LIGHT / 2.0 * root / 1e9
