"""Command-line interface.

Verbs: fit-resonator, fit-lorentzian, fit-rabi, simulate-qubit,
simulate-cavity, sweep-gate, synth, pipeline.

Exit codes: 0 on success, 1 for input problems (bad arguments, unreadable
or malformed files, config errors), 2 when a solver or fit fails or the
pipeline misses a tolerance. Results print to stdout; --out writes the
machine-readable artifact and --plot an SVG rendering where offered.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import sys

import numpy as np

from . import config as cfgmod
from . import io, svgplot
from .coupling import gate_sweep
from .errors import InputDataError, SolverError
from .fitters import (
    ComplexTrace,
    fit_lorentzian,
    fit_rabi,
    fit_reflection,
    lorentzian_model,
    rabi_model,
    reflection_model,
)
from .spectra import gatemon_levels, te_mode_frequency, transmon_levels
from .synth import (
    SynthSpec,
    synth_gate_map,
    synth_power_map,
    synth_rabi,
    synth_reflection,
    synth_two_tone,
)


class _Parser(argparse.ArgumentParser):
    # argparse exits 2 on usage errors; bad arguments are input errors here
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(1)


def _emit_json(payload: dict, out) -> None:
    """Write the result JSON to --out, or print it to stdout without one."""
    if out:
        print(f"wrote {io.write_json(out, payload)}")
    else:
        print(json.dumps(io.sanitize_json(payload), indent=2, sort_keys=True))


def _print_params(result) -> None:
    for name in result.names:
        print(f"{name} = {result.param(name):.10g} +/- {result.error(name):.4g}")
    print(f"chi2 = {result.chi2:.6g}  iterations = {result.iterations}")


def cmd_fit_resonator(args) -> int:
    trace = io.read_complex_trace(args.data)
    fit = fit_reflection(trace, delay=args.delay)
    if args.out:
        print(f"f_r = {fit.f_r_ghz:.9g} GHz")
        print(f"Ql = {fit.ql:.6g} +/- {fit.errors['ql']:.3g}")
        print(f"Qc = {fit.qc:.6g} +/- {fit.errors['qc']:.3g}")
        print(f"Qi = {fit.qi:.6g} +/- {fit.errors['qi']:.3g}")
        print(f"theta = {fit.theta:.6g} rad")
        if fit.tau_ns is not None:
            print(f"tau = {fit.tau_ns:.6g} ns")
        print(f"residual rms = {fit.residual_rms:.4g}")
    _emit_json(fit.to_dict(), args.out)
    model = reflection_model(
        trace.freqs_ghz,
        fit.a,
        fit.ql,
        fit.qc,
        fit.theta,
        fit.f_r_ghz,
        fit.tau_ns or 0.0,
    )
    if args.residuals:
        resid = ComplexTrace(trace.freqs_ghz, trace.values - model)
        print(f"wrote {io.write_complex_trace(args.residuals, resid)}")
    if args.plot:
        svgplot.line_plot(
            args.plot,
            trace.freqs_ghz,
            [("data", np.abs(trace.values)), ("fit", np.abs(model))],
            xlabel="frequency (GHz)",
            ylabel="|S21|",
            title="reflection fit",
        )
        print(f"wrote {io.resolve_out_path(args.plot)}")
    return 0


def cmd_fit_lorentzian(args) -> int:
    freqs, mags = io.read_magnitude_trace(args.data)
    result = fit_lorentzian(freqs, mags)
    if args.out:
        _print_params(result)
    _emit_json(result.to_dict(), args.out)
    if args.plot:
        svgplot.line_plot(
            args.plot,
            freqs,
            [("data", mags), ("fit", lorentzian_model(freqs, *result.params))],
            xlabel="frequency (GHz)",
            ylabel="magnitude (dB)",
            title="Lorentzian fit",
        )
        print(f"wrote {io.resolve_out_path(args.plot)}")
    return 0


def cmd_fit_rabi(args) -> int:
    t, y = io.read_rabi_trace(args.data)
    result = fit_rabi(t, y)
    if args.out:
        _print_params(result)
        f_mhz = result.param("omega") / (2.0 * np.pi) * 1e3
        print(f"Rabi frequency = {f_mhz:.6g} MHz, decay T_R = {result.param('T_R'):.6g} ns")
    _emit_json(result.to_dict(), args.out)
    if args.plot:
        svgplot.line_plot(
            args.plot,
            t,
            [("data", y), ("fit", rabi_model(t, *result.params))],
            xlabel="time (ns)",
            ylabel="signal",
            title="Rabi fit",
        )
        print(f"wrote {io.resolve_out_path(args.plot)}")
    return 0


def _solve_spectrum(cfg):
    params = cfgmod.qubit_params(cfg)
    opts = cfgmod.solver_options(cfg)
    if params.is_transmon:
        return params, transmon_levels(params, **{k: v for k, v in opts.items() if k == "n_cut"})
    return params, gatemon_levels(params, **{k: v for k, v in opts.items() if k == "grid_n"})


def cmd_simulate_qubit(args) -> int:
    cfg = cfgmod.load_config(args.config)
    params, spectrum = _solve_spectrum(cfg)
    print(f"variant = {'transmon' if params.is_transmon else 'gatemon'}")
    print(f"f01 = {spectrum.f01:.6f} MHz")
    print(f"f12 = {spectrum.f12:.6f} MHz")
    print(f"alpha = {spectrum.alpha:.6f} MHz")
    if args.out:
        print(f"wrote {io.write_json(args.out, spectrum.to_dict())}")
    if args.plot:
        levels = np.asarray(spectrum.levels[:6], dtype=float)
        idx = np.arange(levels.size, dtype=float)
        svgplot.line_plot(
            args.plot,
            idx,
            [("E_k - E_0", levels - levels[0])],
            xlabel="level index",
            ylabel="energy (MHz)",
            title="qubit spectrum",
        )
        print(f"wrote {io.resolve_out_path(args.plot)}")
    return 0


def cmd_simulate_cavity(args) -> int:
    cfg = cfgmod.load_config(args.config)
    geom = cfgmod.cavity_geometry(cfg)
    f_ghz = te_mode_frequency(geom)
    print(f"TE{geom.m}{geom.n}{geom.p} = {f_ghz:.9g} GHz")
    if args.out:
        payload = {
            "f_ghz": f_ghz,
            "mode": [geom.m, geom.n, geom.p],
            "geometry_mm": {
                "length_a": geom.length_a * 1e3,
                "width_b": geom.width_b * 1e3,
                "height_d": geom.height_d * 1e3,
            },
        }
        print(f"wrote {io.write_json(args.out, payload)}")
    return 0


def _run_sweep(cfg, voltages=None):
    model = cfgmod.gate_model(cfg)
    params = cfgmod.qubit_params(cfg)
    system = cfgmod.dispersive_system(cfg)
    if voltages is None:
        voltages = cfgmod.sweep_voltages(cfg)
    return gate_sweep(model, params, system, voltages=voltages)


def _sweep_json(sweep) -> dict:
    return {
        "f_bare_ghz": sweep.f_bare_ghz,
        "g_mhz": sweep.g_mhz,
        "kappa_mhz": sweep.kappa_mhz,
        "gamma_q_mhz": sweep.gamma_q_mhz,
        "points": [dict(rec, regime=p.regime) for rec, p in zip(sweep.to_records(), sweep.points)],
    }


def cmd_sweep_gate(args) -> int:
    cfg = cfgmod.load_config(args.config)
    sweep = _run_sweep(cfg)
    regimes = {}
    for p in sweep.points:
        regimes[p.regime] = regimes.get(p.regime, 0) + 1
    breakdown = ", ".join(f"{k}: {v}" for k, v in sorted(regimes.items()))
    print(f"{len(sweep.points)} gate points ({breakdown})")
    chi = sweep.column("chi_MHz")
    finite = chi[np.isfinite(chi)]
    if finite.size:
        print(f"chi range = [{finite.min():.6g}, {finite.max():.6g}] MHz")
    if args.out:
        print(f"wrote {io.write_sweep_csv(args.out, sweep)}")
    if args.json:
        print(f"wrote {io.write_json(args.json, _sweep_json(sweep))}")
    if args.plot:
        vg = sweep.column("V_G")
        series = [
            ("f_C", sweep.column("f_C_GHz")),
            ("f_plus", sweep.column("f_plus_GHz")),
            ("f_minus", sweep.column("f_minus_GHz")),
            ("f_Q", sweep.column("f_Q_MHz") / 1e3),
        ]
        svgplot.line_plot(
            args.plot,
            vg,
            series,
            xlabel="V_G (V)",
            ylabel="frequency (GHz)",
            title="gate sweep",
        )
        print(f"wrote {io.resolve_out_path(args.plot)}")
    return 0


def cmd_synth(args) -> int:
    cfg = cfgmod.load_config(args.config)
    spec = cfgmod.synth_spec(cfg)
    if args.seed is not None:
        spec = dataclasses.replace(spec, seed=args.seed)
    out = args.out or f"{spec.kind}.csv"
    out_path = io.resolve_out_path(out)
    truth_path = args.truth or out_path.with_suffix(".truth.json")

    if spec.kind == "reflection_trace":
        trace = synth_reflection(spec)
        io.write_complex_trace(out_path, trace)
        if args.plot:
            svgplot.line_plot(
                args.plot,
                trace.freqs_ghz,
                [("|S21|", np.abs(trace.values))],
                xlabel="frequency (GHz)",
                ylabel="|S21|",
                title="synthetic reflection",
            )
    elif spec.kind == "rabi_trace":
        t, y = synth_rabi(spec)
        io.write_rabi_trace(out_path, t, y)
        if args.plot:
            svgplot.line_plot(
                args.plot, t, [("y", y)], xlabel="time (ns)", ylabel="signal",
                title="synthetic Rabi trace",
            )
    else:
        if spec.kind == "power_map":
            _, spectrum = _solve_spectrum(cfg)
            system = cfgmod.dispersive_system(cfg, qubit=spectrum)
            m = synth_power_map(spec, system)
        else:
            # evaluate the sweep on the map's own gate axis
            sweep = _run_sweep(cfg, voltages=spec.axis("v"))
            m = synth_gate_map(spec, sweep) if spec.kind == "gate_map" else synth_two_tone(spec, sweep)
        io.write_map_csv(out_path, m)
        if args.plot:
            svgplot.heatmap(
                args.plot,
                m.slow_values,
                m.fast_values,
                m.grid,
                xlabel=m.fast_name,
                ylabel=m.slow_name,
                title=f"synthetic {spec.kind}",
            )
    io.write_json(truth_path, spec.to_dict())
    print(f"wrote {out_path}")
    print(f"wrote {io.resolve_out_path(truth_path)}")
    if args.plot:
        print(f"wrote {io.resolve_out_path(args.plot)}")
    return 0


def cmd_pipeline(args) -> int:
    """Config-driven end-to-end run: cavity, qubit, sweep, synth, fit.

    The synthetic reflection trace is generated at the dispersive cavity
    frequency and refit; recovered Ql, Qc, f_r must land inside the
    configured tolerances or the run fails with exit code 2. Exceptions
    carry the label of the stage they interrupted.
    """
    cfg = cfgmod.load_config(args.config)
    opts = cfgmod.pipeline_options(cfg)
    tolerances = {"ql_rel": 0.02, "qc_rel": 0.05, "f_r_mhz": 0.5}
    tolerances.update(opts["tolerances"])
    seed = args.seed if args.seed is not None else opts["seed"]
    workdir = args.workdir or "."
    art = lambda name: str(io.resolve_out_path(f"{workdir}/{name}"))
    stages = []
    failures = []
    checks = []

    def stage(name, status, **details):
        stages.append({"name": name, "status": status, "details": details})
        mark = "ok" if status == "ok" else "FAIL"
        pretty = ", ".join(f"{k}={v:.6g}" if isinstance(v, float) else f"{k}={v}"
                           for k, v in details.items())
        print(f"[{name}] {mark}: {pretty}")

    def finish() -> int:
        passed = not failures
        report = {
            "passed": passed,
            "stages": stages,
            "checks": checks,
            "tolerances": tolerances,
            "failures": failures,
        }
        report_path = io.write_json(art("report.json"), report)
        print(f"wrote {report_path}")
        print("PASS" if passed else "FAIL: " + "; ".join(failures))
        return 0 if passed else 2

    current = "cavity"
    try:
        if "cavity" in cfg:
            f_bare = te_mode_frequency(cfgmod.cavity_geometry(cfg))
        else:
            f_bare = cfgmod.dispersive_system(cfg).f_bare_ghz
        stage("cavity", "ok", f_bare_ghz=f_bare)

        current = "qubit"
        _, spectrum = _solve_spectrum(cfg)
        stage("qubit", "ok", f01_mhz=spectrum.f01, alpha_mhz=spectrum.alpha)

        current = "sweep"
        sweep = _run_sweep(cfg)
        sweep_csv = art("sweep.csv")
        io.write_sweep_csv(sweep_csv, sweep)
        io.write_json(art("sweep.json"), _sweep_json(sweep))
        n_disp = sum(p.regime == "dispersive" for p in sweep.points)
        stage("sweep", "ok", points=len(sweep.points), dispersive=n_disp,
              csv=sweep_csv)

        current = "synth"
        system = cfgmod.dispersive_system(cfg, qubit=spectrum)
        chi_mhz = system.g_mhz**2 / system.delta_mhz
        f_c = system.f_bare_ghz + chi_mhz / 1e3
        ql_true = f_c * 1e3 / system.kappa_mhz
        truth = {
            "a_re": 1.0,
            "a_im": 0.0,
            "ql": ql_true,
            "qc": 2.0 * ql_true,
            "theta": 0.1,
            "f_r_ghz": f_c,
        }
        span = 12.0 * system.kappa_mhz / 1e3
        spec = SynthSpec(
            kind="reflection_trace",
            seed=seed,
            snr_db=40.0,
            truth=truth,
            grid={"f_min_ghz": f_c - span, "f_max_ghz": f_c + span, "n_f": 401},
        )
        trace = synth_reflection(spec)
        io.write_complex_trace(art("trace.csv"), trace)
        io.write_json(art("trace.truth.json"), spec.to_dict())
        stage("synth", "ok", f_r_ghz=f_c, ql=ql_true, snr_db=40.0)

        current = "fit"
        fit = fit_reflection(trace)
        io.write_json(art("fit.json"), fit.to_dict())
        deviations = {
            "ql_rel": abs(fit.ql - truth["ql"]) / truth["ql"],
            "qc_rel": abs(fit.qc - truth["qc"]) / truth["qc"],
            "f_r_mhz": abs(fit.f_r_ghz - truth["f_r_ghz"]) * 1e3,
        }
        fit_ok = True
        for name, err in deviations.items():
            ok = err <= tolerances[name]
            checks.append(
                {"name": name, "ok": ok, "deviation": err, "tolerance": tolerances[name]}
            )
            print(f"  {name}: {'ok' if ok else 'FAIL'} "
                  f"(deviation {err:.4g}, tolerance {tolerances[name]:g})")
            if not ok:
                fit_ok = False
                failures.append(
                    f"{name}: deviation {err:.4g} exceeds tolerance {tolerances[name]:g}"
                )
        stage("fit", "ok" if fit_ok else "fail", ql=fit.ql, qc=fit.qc,
              f_r_ghz=fit.f_r_ghz, qi=fit.qi)
    except SolverError as exc:
        stage(current, "fail", error=str(exc))
        failures.append(f"{current}: {exc}")
    except InputDataError as exc:
        # missing or malformed stage input: label it, record it, exit as
        # an input error (code 1) after the report is written
        stage(current, "fail", error=str(exc))
        failures.append(f"{current}: {exc}")
        finish()
        raise InputDataError(f"pipeline stage {current}: {exc}") from exc

    return finish()


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="cqedkit", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, func, help_text, data=False, needs_config=False):
        p = sub.add_parser(name, help=help_text)
        if data:
            p.add_argument("data", help="input CSV file")
        if needs_config:
            p.add_argument("--config", required=True, help="YAML run configuration")
        p.add_argument("--out", help="write the machine-readable result here")
        p.set_defaults(func=func)
        return p

    p = add("fit-resonator", cmd_fit_resonator, "fit the complex reflection model", data=True)
    p.add_argument("--delay", action="store_true", help="also fit a cable delay")
    p.add_argument("--residuals", help="write the complex fit residuals as CSV here")
    p.add_argument("--plot", help="write an SVG of data and fit")

    p = add("fit-lorentzian", cmd_fit_lorentzian, "fit a Lorentzian dip", data=True)
    p.add_argument("--plot", help="write an SVG of data and fit")

    p = add("fit-rabi", cmd_fit_rabi, "fit a decaying Rabi oscillation", data=True)
    p.add_argument("--plot", help="write an SVG of data and fit")

    p = add("simulate-qubit", cmd_simulate_qubit, "solve the qubit spectrum",
            needs_config=True)
    p.add_argument("--plot", help="write an SVG of the level diagram")

    add("simulate-cavity", cmd_simulate_cavity, "rectangular cavity mode frequency",
        needs_config=True)

    p = add("sweep-gate", cmd_sweep_gate, "sweep the gate and tabulate observables",
            needs_config=True)
    p.add_argument("--json", help="write the sweep as JSON here")
    p.add_argument("--plot", help="write an SVG of the sweep")

    p = add("synth", cmd_synth, "generate synthetic data with a truth sidecar",
            needs_config=True)
    p.add_argument("--seed", type=int, help="override the configured seed")
    p.add_argument("--truth", help="truth JSON path (default: out with .truth.json)")
    p.add_argument("--plot", help="write an SVG rendering")

    p = sub.add_parser("pipeline", help="end-to-end run with tolerance checks")
    p.add_argument("--config", required=True, help="YAML run configuration")
    p.add_argument("--seed", type=int, help="override the configured seed")
    p.add_argument("--workdir", help="artifact directory (default: current)")
    p.set_defaults(func=cmd_pipeline)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except InputDataError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except ValueError as exc:
        print(f"invalid value: {exc}", file=sys.stderr)
        return 1
    except SolverError as exc:
        print(f"solver failure: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
