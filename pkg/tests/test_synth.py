"""Synthetic data generators: spec validation, reproducibility, and the
geometry of the generated features against their ground truth.
"""

import numpy as np
import pytest

from cqedkit import (
    DispersiveSystem,
    Map2D,
    QubitSpectrum,
    SweepPoint,
    SweepResult,
    SynthSpec,
    fit_reflection,
    gate_sweep,
    nanowire_profile,
    subtract_background,
    synth_gate_map,
    synth_power_map,
    synth_rabi,
    synth_reflection,
    synth_two_tone,
)
from cqedkit import io
from cqedkit.coupling import QubitParams, dispersive_shift_two_level
from cqedkit.errors import ConfigError

REFL_TRUTH = {"a_re": 1.0, "a_im": 0.0, "ql": 6000.0, "qc": 12000.0,
              "theta": 0.1, "f_r_ghz": 5.2816}
REFL_GRID = {"f_min_ghz": 5.2728, "f_max_ghz": 5.2904, "n_f": 401}


def _refl_spec(**over):
    kw = dict(kind="reflection_trace", seed=11, snr_db=35.0,
              truth=dict(REFL_TRUTH), grid=dict(REFL_GRID))
    kw.update(over)
    return SynthSpec(**kw)


def _sweep(points):
    return SweepResult(points=points, f_bare_ghz=5.443, g_mhz=100.0,
                       kappa_mhz=1.2, gamma_q_mhz=0.3)


def _dispersive_point(vg, f_q_mhz, f_c_ghz):
    return SweepPoint(vg=vg, f_q_mhz=f_q_mhz, chi_mhz=0.0, f_c_ghz=f_c_ghz,
                      f_plus_ghz=float("nan"), f_minus_ghz=float("nan"),
                      regime="dispersive")


class TestSpecValidation:
    def test_unknown_kind(self):
        with pytest.raises(ConfigError, match="unknown synth kind"):
            _refl_spec(kind="hologram")

    def test_missing_grid_key(self):
        grid = dict(REFL_GRID)
        del grid["n_f"]
        with pytest.raises(ConfigError, match="missing"):
            _refl_spec(grid=grid)

    def test_missing_truth_key(self):
        truth = dict(REFL_TRUTH)
        del truth["ql"]
        with pytest.raises(ConfigError, match="missing"):
            _refl_spec(truth=truth)

    def test_single_point_axis_rejected(self):
        with pytest.raises(ConfigError, match="at least 2"):
            _refl_spec(grid={**REFL_GRID, "n_f": 1})

    def test_nonfinite_snr_rejected(self):
        with pytest.raises(ConfigError, match="snr_db must be finite"):
            _refl_spec(snr_db=float("inf"))

    def test_negative_seed_rejected(self):
        with pytest.raises(ConfigError, match="seed"):
            _refl_spec(seed=-1)

    def test_inverted_axis_rejected(self):
        spec = _refl_spec(grid={"f_min_ghz": 5.3, "f_max_ghz": 5.2, "n_f": 101})
        with pytest.raises(ConfigError, match="must exceed"):
            spec.axis("f")

    def test_kind_mismatch_at_generator(self):
        with pytest.raises(ConfigError, match="not rabi_trace"):
            synth_rabi(_refl_spec())


def test_axis_endpoints_exact():
    spec = _refl_spec()
    f = spec.axis("f")
    assert f[0] == 5.2728 and f[-1] == 5.2904 and f.size == 401
    t = SynthSpec(kind="rabi_trace", seed=1, snr_db=None,
                  truth={"A": 1, "T_R": 260, "omega": 0.2, "B": 0, "a": 0, "b": 0},
                  grid={"t_max_ns": 1000.0, "n_t": 251}).axis("t")
    assert t[0] == 0.0 and t[-1] == 1000.0 and t.size == 251


def test_reflection_deterministic_and_seed_sensitive():
    a = synth_reflection(_refl_spec())
    b = synth_reflection(_refl_spec())
    c = synth_reflection(_refl_spec(seed=12))
    assert np.array_equal(a.values, b.values)
    assert not np.array_equal(a.values, c.values)


def test_reflection_metadata_carries_spec():
    spec = _refl_spec()
    trace = synth_reflection(spec)
    assert trace.metadata == spec.to_dict()


def test_reflection_self_inversion():
    # the generator and the fitter share the forward model, so a clean
    # trace must round-trip well inside the noise-set error bars
    fit = fit_reflection(synth_reflection(_refl_spec(snr_db=40.0)))
    assert fit.ql == pytest.approx(6000.0, rel=0.02)
    assert fit.qc == pytest.approx(12000.0, rel=0.02)
    assert fit.f_r_ghz == pytest.approx(5.2816, abs=1e-4)


def test_rabi_noiseless_matches_model_exactly():
    spec = SynthSpec(kind="rabi_trace", seed=3, snr_db=None,
                     truth={"A": 1.0, "T_R": 260.0, "omega": 0.2, "B": 0.3,
                            "a": -2e-4, "b": 0.1},
                     grid={"t_max_ns": 1000.0, "n_t": 251})
    t, y = synth_rabi(spec)
    from cqedkit.fitters import rabi_model
    assert np.array_equal(y, rabi_model(t, 1.0, 260.0, 0.2, 0.3, -2e-4, 0.1))


def test_noise_rms_tracks_snr():
    spec_hi = _refl_spec(snr_db=40.0, seed=7)
    spec_lo = _refl_spec(snr_db=20.0, seed=7)
    clean = synth_reflection(_refl_spec(snr_db=None)).values
    for spec, expect in ((spec_hi, 1e-2), (spec_lo, 1e-1)):
        resid = synth_reflection(spec).values - clean
        rms = float(np.sqrt(np.mean(np.abs(resid) ** 2)))
        assert rms == pytest.approx(expect, rel=0.15)


def test_map_csv_round_trip_bytes_identical(tmp_path):
    pts = [_dispersive_point(v, 4500.0, 5.444) for v in (0.5, 1.0, 1.5)]
    spec = SynthSpec(kind="gate_map", seed=21, snr_db=30.0, truth={},
                     grid={"f_min_ghz": 5.43, "f_max_ghz": 5.46, "n_f": 61,
                           "v_min": 0.5, "v_max": 1.5, "n_v": 3})
    m = synth_gate_map(spec, _sweep(pts))
    p1, p2 = tmp_path / "a.csv", tmp_path / "b.csv"
    io.write_map_csv(p1, m)
    io.write_map_csv(p2, synth_gate_map(spec, _sweep(pts)))
    assert p1.read_bytes() == p2.read_bytes()
    back = io.read_map_csv(p1)
    assert np.allclose(back.grid, m.grid)


def test_row_noise_streams_stable_under_truncation():
    # dropping trailing gate points must not change the rows kept
    pts = [_dispersive_point(v, 4500.0 + 10 * v, 5.444) for v in range(6)]
    spec = SynthSpec(kind="two_tone_map", seed=29, snr_db=25.0, truth={},
                     grid={"f_min_ghz": 4.3, "f_max_ghz": 4.8, "n_f": 201,
                           "v_min": 0, "v_max": 5, "n_v": 6})
    full = synth_two_tone(spec, _sweep(pts))
    part = synth_two_tone(spec, _sweep(pts[:3]))
    assert np.array_equal(full.grid[:3], part.grid)


class TestGateMap:
    GRID = {"f_min_ghz": 5.30, "f_max_ghz": 5.58, "n_f": 1401,
            "v_min": 0.0, "v_max": 2.0, "n_v": 3}

    def _map(self, points):
        spec = SynthSpec(kind="gate_map", seed=1, snr_db=None, truth={},
                         grid=dict(self.GRID))
        return synth_gate_map(spec, _sweep(points))

    def test_dispersive_row_dip_at_shifted_cavity(self):
        m = self._map([_dispersive_point(0.0, 4500.0, 5.4531)])
        f_dip = m.fast_values[np.argmin(m.grid[0])]
        assert f_dip == pytest.approx(5.4531, abs=2e-4)

    def test_pinch_off_row_dip_at_bare_cavity(self):
        pt = SweepPoint(vg=0.0, f_q_mhz=float("nan"), chi_mhz=float("nan"),
                        f_c_ghz=5.443, f_plus_ghz=float("nan"),
                        f_minus_ghz=float("nan"), regime="pinch_off")
        m = self._map([pt])
        f_dip = m.fast_values[np.argmin(m.grid[0])]
        assert f_dip == pytest.approx(5.443, abs=2e-4)

    def test_hybridized_row_has_both_branches(self):
        pt = SweepPoint(vg=0.0, f_q_mhz=5443.0, chi_mhz=float("nan"),
                        f_c_ghz=float("nan"), f_plus_ghz=5.543,
                        f_minus_ghz=5.343, regime="hybridized")
        m = self._map([pt])
        row, f = m.grid[0], m.fast_values
        upper = f > 5.443
        assert f[upper][np.argmin(row[upper])] == pytest.approx(5.543, abs=2e-4)
        assert f[~upper][np.argmin(row[~upper])] == pytest.approx(5.343, abs=2e-4)
        # on resonance the branches share the dip weight equally
        assert np.min(row[upper]) == pytest.approx(np.min(row[~upper]), rel=0.02)


def test_gate_map_tracks_real_sweep():
    model = nanowire_profile(seed=3, v_min=-2.0, v_max=10.0, n=25,
                             v_pinch=0.0, max_value=20000.0, maps_to="ej")
    system = DispersiveSystem(f_bare_ghz=5.443, g_mhz=100.0, kappa_mhz=1.2,
                              gamma_q_mhz=0.3)
    sweep = gate_sweep(model, QubitParams(ec=190.0, ej=9500.0), system)
    spec = SynthSpec(kind="gate_map", seed=2, snr_db=None, truth={},
                     grid={"f_min_ghz": 5.30, "f_max_ghz": 5.58, "n_f": 2801,
                           "v_min": -2.0, "v_max": 10.0, "n_v": 25})
    m = synth_gate_map(spec, sweep)
    df = m.fast_values[1] - m.fast_values[0]
    for i, pt in enumerate(sweep.points):
        if pt.regime != "dispersive":
            continue
        f_dip = m.fast_values[np.argmin(m.grid[i])]
        assert abs(f_dip - pt.f_c_ghz) <= df


class TestTwoTone:
    GRID = {"f_min_ghz": 3.9, "f_max_ghz": 4.4, "n_f": 2001,
            "v_min": 0.0, "v_max": 1.0, "n_v": 2}

    def _map(self, truth, points=None):
        spec = SynthSpec(kind="two_tone_map", seed=1, snr_db=None,
                         truth=truth, grid=dict(self.GRID))
        if points is None:
            points = [_dispersive_point(v, 4200.0, 5.444) for v in (0.0, 1.0)]
        return synth_two_tone(spec, _sweep(points))

    def test_dip_at_qubit_frequency(self):
        m = self._map({})
        assert m.fast_values[np.argmin(m.grid[0])] == pytest.approx(4.2, abs=1e-3)

    def test_two_photon_dip_at_half_anharmonicity(self):
        m = self._map({"two_photon": True, "alpha_mhz": -200.0, "depth": 0.5})
        row, f = m.grid[0], m.fast_values
        lower = f < 4.15
        f2 = f[lower][np.argmin(row[lower])]
        assert f2 == pytest.approx(4.2 - 0.1, abs=1e-3)
        # half depth by default
        assert np.min(row[lower]) == pytest.approx(0.75, abs=0.01)

    def test_two_photon_depth_override(self):
        m = self._map({"two_photon": True, "alpha_mhz": -200.0, "depth": 0.5,
                       "two_photon_depth": 0.4})
        row, f = m.grid[0], m.fast_values
        assert np.min(row[f < 4.15]) == pytest.approx(0.6, abs=0.01)

    def test_two_photon_requires_alpha(self):
        with pytest.raises(ConfigError, match="alpha_mhz"):
            self._map({"two_photon": True})

    def test_pinched_off_row_is_flat(self):
        pt = SweepPoint(vg=0.0, f_q_mhz=float("nan"), chi_mhz=float("nan"),
                        f_c_ghz=5.443, f_plus_ghz=float("nan"),
                        f_minus_ghz=float("nan"), regime="pinch_off")
        m = self._map({}, points=[pt, _dispersive_point(1.0, 4200.0, 5.444)])
        assert np.all(m.grid[0] == 1.0)


def test_two_tone_background_removed_by_median_subtraction():
    pts = [_dispersive_point(float(v), 4000.0 + 60.0 * v, 5.444)
           for v in range(7)]
    grid = {"f_min_ghz": 3.9, "f_max_ghz": 4.5, "n_f": 1201,
            "v_min": 0.0, "v_max": 6.0, "n_v": 7}
    with_bg = synth_two_tone(
        SynthSpec(kind="two_tone_map", seed=1, snr_db=None,
                  truth={"background_amp": 0.05, "background_period_ghz": 0.13},
                  grid=grid),
        _sweep(pts))
    without_bg = synth_two_tone(
        SynthSpec(kind="two_tone_map", seed=1, snr_db=None, truth={}, grid=grid),
        _sweep(pts))
    # the shared ripple dominates the raw rows away from the dips
    assert np.ptp(with_bg.grid[0][with_bg.fast_values > 4.1]) > 0.05
    # a background common to all rows drops out of the median exactly
    assert np.allclose(subtract_background(with_bg.grid),
                       subtract_background(without_bg.grid), atol=1e-12)
    row0 = subtract_background(with_bg.grid)[0]
    assert np.min(row0) == pytest.approx(-0.5, abs=0.01)


class TestPowerMap:
    def _system(self, gamma_q=50.0):
        return DispersiveSystem(
            f_bare_ghz=5.443, g_mhz=100.0,
            qubit=QubitSpectrum(levels=[0.0, 4400.0, 8590.0]),
            kappa_mhz=1.2, gamma_q_mhz=gamma_q,
        )

    def _map(self, system, snr_db=None):
        spec = SynthSpec(kind="power_map", seed=17, snr_db=snr_db, truth={},
                         grid={"f_min_ghz": 5.425, "f_max_ghz": 5.470,
                               "n_f": 901, "p_min_dbm": -150.0,
                               "p_max_dbm": -90.0, "n_p": 25})
        return synth_power_map(spec, system)

    def test_dip_migrates_dressed_to_bare(self):
        system = self._system()
        m = self._map(system)
        chi_ghz = dispersive_shift_two_level(100.0, system.delta_mhz) / 1e3
        f_low = m.fast_values[np.argmin(m.grid[0])]
        f_high = m.fast_values[np.argmin(m.grid[-1])]
        assert f_low == pytest.approx(5.443 + chi_ghz, abs=2e-4)
        assert f_high == pytest.approx(5.443, abs=2e-4)
        # monotone walk between the two endpoints
        dips = m.fast_values[np.argmin(m.grid, axis=1)]
        assert np.all(np.diff(dips) <= 1e-12)

    def test_low_power_line_broader(self):
        m = self._map(self._system(gamma_q=50.0))
        half = 1.0 - 0.4  # half of the default 0.8 depth
        widths = np.sum(m.grid < half, axis=1)
        assert widths[0] > widths[-1]

    def test_needs_attached_qubit(self):
        system = DispersiveSystem(f_bare_ghz=5.443, g_mhz=100.0)
        with pytest.raises(ConfigError, match="qubit"):
            self._map(system)


def test_map2d_shape_mismatch():
    with pytest.raises(ValueError, match="shape"):
        Map2D("V", np.arange(3.0), "f", np.arange(4.0), np.zeros((3, 5)))
