"""Command-line surface tying the pipeline together.

Exit codes: 0 success, 2 configuration error, 3 numerical-domain error.
Every subcommand accepts --config (flat key=value file; omitted means full
defaults) and prints a one-line summary on success.
"""
from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from .errors import ConfigError, NumericalDomainError, TriphotonError
from .config import parse_config, default_config, dump_defaults, RunConfig
from .params import resonance_set
from .susceptibility import GridSpec2D, chi5_map, dispersion_profile
from .correlation import (default_spectral_window, spectral_kernel,
                          triphoton_amplitude_map, trace_map, diagonal_cut)
from .eventsim import generate_stream
from .coincidence import (reconstruct_triple_direct, reconstruct_triple_delayed,
                          estimate_floor, rates_report)
from . import io_formats


def _load(args) -> RunConfig:
    if getattr(args, "config", None):
        return parse_config(args.config)
    return default_config()


def _spectral_spec(cfg: RunConfig, params):
    return default_spectral_window(
        params, n2=cfg["spectral_n2"], n3=cfg["spectral_n3"],
        linewidth_multiple=cfg["spectral_linewidth_multiple"],
        pad_fraction=cfg["spectral_pad_fraction"])


def _profiles(cfg: RunConfig, params, spec):
    if cfg["dispersion"] != "on":
        return None
    ax2 = np.linspace(spec.min1, spec.max1, max(cfg["spectral_n2"], 64))
    ax3 = np.linspace(spec.min2, spec.max2, max(cfg["spectral_n3"], 64))
    quad = cfg.quadrature()
    return {"S2": dispersion_profile("S2", ax2, params, quad),
            "S3": dispersion_profile("S3", ax3, params, quad)}


def _correlation_map(cfg: RunConfig, params):
    quad = cfg.quadrature()
    spec = _spectral_spec(cfg, params)
    tau = GridSpec2D(0.0, cfg["tau_max"], cfg["tau_points"],
                     0.0, cfg["tau_max"], cfg["tau_points"])
    return triphoton_amplitude_map(
        tau, params, quad, spec, method="transform",
        profiles=_profiles(cfg, params, spec),
        phase_convention=cfg["phase_convention"],
        group_delay_mode=cfg["group_delay_mode"],
        taper_fraction=cfg["taper_fraction"])


def cmd_chi5_map(args) -> int:
    cfg = _load(args)
    params = cfg.experiment_params()
    half = cfg["map_range"]
    spec = GridSpec2D(-half, half, cfg["map_n2"], -half, half, cfg["map_n3"])
    grid = chi5_map(spec, params, cfg.quadrature())
    peak = float(np.max(np.abs(grid.values)))
    io_formats.write_complex_grid(args.out, grid)
    print(f"chi5-map: {cfg['map_n2']}x{cfg['map_n3']} grid, "
          f"peak |chi5| {peak:.6e} (arb), wrote {args.out}")
    return 0


def cmd_linear_response(args) -> int:
    cfg = _load(args)
    params = cfg.experiment_params()
    quad = cfg.quadrature()
    outdir = Path(args.out)
    outdir.mkdir(parents=True, exist_ok=True)
    spec = _spectral_spec(cfg, params)
    written = []
    min_vg = np.inf
    for which, lo, hi, n in (("S2", spec.min1, spec.max1, cfg["spectral_n2"]),
                             ("S3", spec.min2, spec.max2, cfg["spectral_n3"])):
        axis = np.linspace(lo, hi, max(n, 64))
        prof = dispersion_profile(which, axis, params, quad)
        min_vg = min(min_vg, float(np.min(prof.v_group)))
        path = outdir / f"dispersion_{which.lower()}.csv"
        with open(path, "w") as fh:
            fh.write(f"# dispersion profile {which}\n")
            fh.write("# columns: delta_rad_s,chi_real,chi_imag,n,v_group_m_s\n")
            for k in range(axis.size):
                fh.write(f"{axis[k]:.17g},{prof.chi[k].real:.17g},"
                         f"{prof.chi[k].imag:.17g},{prof.n[k]:.17g},"
                         f"{prof.v_group[k]:.17g}\n")
        written.append(str(path))
    print(f"linear-response: wrote {written[0]} and {written[1]} "
          f"(min v_g/c {min_vg / 299792458.0:.3e})")
    return 0


def cmd_correlation_map(args) -> int:
    cfg = _load(args)
    params = cfg.experiment_params()
    cmap = _correlation_map(cfg, params)
    io_formats.write_real_grid(
        args.out, cmap.tau21_axis, cmap.tau31_axis, cmap.r3,
        header_lines=["r3 = |A3(tau21, tau31)|^2, peak-normalized",
                      f"provenance: {cmap.grid.provenance}",
                      f"params_hash: {cmap.params_hash}"])
    print(f"correlation-map: {cmap.r3.shape[0]}x{cmap.r3.shape[1]} tau grid, "
          f"wrote {args.out}")
    return 0


def cmd_trace(args) -> int:
    cfg = _load(args)
    params = cfg.experiment_params()
    cmap = _correlation_map(cfg, params)
    if args.kind == "diag":
        if args.line is None:
            raise ConfigError("trace --kind diag requires --line <seconds>")
        trace = diagonal_cut(cmap, float(args.line))
    else:
        trace = trace_map(cmap, args.kind)
    io_formats.write_trace(args.out, trace.axis, trace.values,
                           header_lines=[f"kind: {trace.kind}",
                                         f"line_spec: {trace.line_spec}"])
    print(f"trace: kind={args.kind}, {trace.axis.size} points, wrote {args.out}")
    return 0


def cmd_simulate(args) -> int:
    cfg = _load(args)
    params = cfg.experiment_params()
    scfg = cfg.source_config(duration=args.duration, seed=args.seed)
    cmap = _correlation_map(cfg, params) if scfg.triplet_rate > 0 else None
    stream = generate_stream(cmap, scfg)
    io_formats.write_events(args.out, stream, seed=scfg.seed,
                            duration_ps=int(round(scfg.duration * 1e12)),
                            keep_origin=args.keep_origin)
    print(f"simulate: {stream.size} events over {scfg.duration:.0f} s "
          f"(seed {scfg.seed}), wrote {args.out}")
    return 0


def cmd_analyze(args) -> int:
    cfg = _load(args)
    stream, header = io_formats.read_events(args.eventfile)
    duration = header["duration_ps"] / 1e12
    method = args.method or cfg["method"]
    if method == "delayed":
        hist = reconstruct_triple_delayed(stream, cfg["window"], cfg["bin"],
                                          cfg["delay_offset"], duration=duration)
    else:
        hist = reconstruct_triple_direct(stream, cfg["window"], cfg["bin"],
                                         duration=duration)
    import dataclasses as _dc
    floor = estimate_floor(hist)
    hist = _dc.replace(hist, floor_estimate=floor)
    report = rates_report(hist, peak_rebin=cfg["peak_rebin"])
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    io_formats.write_real_grid(
        out / "histogram2d.csv", hist.tau21_axis, hist.tau31_axis,
        hist.counts, header_lines=[f"method: {hist.method}",
                                   f"floor_per_bin: {floor!r}",
                                   f"duration_s: {duration!r}"])
    rep = {
        "triplet_rate_per_min": report.triplet_rate_per_min,
        "triplet_rate_err": report.triplet_rate_err,
        "accidental_rate_per_min": report.accidental_rate_per_min,
        "accidental_rate_err": report.accidental_rate_err,
        "g3_peak": report.g3_peak if np.isfinite(report.g3_peak) else "inf",
        "cauchy_schwarz": (report.cauchy_schwarz
                           if np.isfinite(report.cauchy_schwarz) else "inf"),
        "zero_floor": report.zero_floor,
        "visibility": report.visibility,
        "dominant_periods_s": list(report.dominant_periods),
        "method": hist.method,
    }
    with open(out / "report.json", "w") as fh:
        json.dump(rep, fh, indent=2, sort_keys=True)
    print(f"analyze: {method} method, triplets "
          f"{report.triplet_rate_per_min:.1f}+-{report.triplet_rate_err:.1f}/min, "
          f"accidentals {report.accidental_rate_per_min:.1f}"
          f"+-{report.accidental_rate_err:.1f}/min, wrote {out}")
    return 0


def sweep_rate(cfg: RunConfig, params, spec, quad) -> float:
    """Integrated triplet generation rate, arbitrary units.

    The emitted amplitude is proportional to the field-2 amplitude times the
    susceptibility, so the rate integrates P2 |chi5 sinc|^2 over the fixed
    spectral window (fixed so sweep points are mutually comparable).
    """
    kern = spectral_kernel(spec, params, quad)
    dd2 = kern.axis1[1] - kern.axis1[0]
    dd3 = kern.axis2[1] - kern.axis2[0]
    p2 = params.drive.power2
    scale = p2 if p2 is not None else 1.0
    return float(scale * np.sum(np.abs(kern.values) ** 2) * dd2 * dd3)


def _parse_power_arg(text: str) -> float:
    text = text.strip()
    for suffix, mult in (("mW", 1e-3), ("uW", 1e-6), ("W", 1.0)):
        if text.endswith(suffix):
            return float(text[: -len(suffix)].strip()) * mult
    return float(text)


def cmd_sweep(args) -> int:
    cfg = _load(args)
    if args.param != "power2":
        raise ConfigError(f"sweep supports only --param power2, got {args.param}")
    lo = _parse_power_arg(args.start)
    hi = _parse_power_arg(args.stop)
    if args.steps < 2 or not hi > lo > 0:
        raise ConfigError("sweep needs --steps >= 2 and 0 < from < to")
    powers = np.linspace(lo, hi, args.steps)
    quad = cfg.quadrature()
    # spectral window frozen at the largest Rabi frequency so every sweep
    # point is integrated over the same region
    import dataclasses as _dc
    base = cfg.experiment_params()
    top = _dc.replace(base, drive=base.drive.with_power2(hi))
    spec = _spectral_spec(cfg, top)
    rates = []
    for p in powers:
        params = _dc.replace(base, drive=base.drive.with_power2(float(p)))
        rates.append(sweep_rate(cfg, params, spec, quad))
    rates = np.asarray(rates)
    coeff = np.polyfit(powers, rates, 1)
    resid = rates - np.polyval(coeff, powers)
    rel_dev = float(np.max(np.abs(resid)) / np.max(rates))
    with open(args.out, "w") as fh:
        fh.write("# columns: power2_W,integrated_rate_arb\n")
        fh.write(f"# linear_fit_slope: {coeff[0]:.17g}\n")
        fh.write(f"# linear_fit_intercept: {coeff[1]:.17g}\n")
        fh.write(f"# max_relative_deviation_from_linear: {rel_dev:.17g}\n")
        for p, r in zip(powers, rates):
            fh.write(f"{p:.17g},{r:.17g}\n")
    mono = bool(np.all(np.diff(rates) >= -1e-12 * np.max(rates)))
    print(f"sweep: power2 {lo*1e3:.1f}-{hi*1e3:.1f} mW in {args.steps} steps, "
          f"monotone={mono}, max deviation from linear {rel_dev:.2%}, "
          f"wrote {args.out}")
    return 0


def cmd_selftest(args) -> int:
    from . import selftest
    failures = selftest.run()
    if failures:
        print(f"selftest: {failures} check(s) FAILED")
        return 1
    print("selftest: all checks passed")
    return 0


def cmd_print_defaults(args) -> int:
    sys.stdout.write(dump_defaults())
    return 0


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="triphoton",
        description="Simulation and analysis of six-wave-mixing triphoton "
                    "correlations")
    sub = ap.add_subparsers(dest="command", required=True)

    def add(name, fn, **kwargs):
        p = sub.add_parser(name, **kwargs)
        p.add_argument("--config", help="flat key=value configuration file")
        p.set_defaults(fn=fn)
        return p

    p = add("chi5-map", cmd_chi5_map, help="write a chi5(delta2, delta3) grid CSV")
    p.add_argument("--out", required=True)

    p = add("linear-response", cmd_linear_response,
            help="write S2/S3 dispersion profile CSVs")
    p.add_argument("--out", required=True, help="output directory")

    p = add("correlation-map", cmd_correlation_map,
            help="write the |A3|^2 correlation grid CSV")
    p.add_argument("--out", required=True)

    p = add("trace", cmd_trace, help="write a 1-D conditional trace CSV")
    p.add_argument("--out", required=True)
    p.add_argument("--kind", required=True,
                   choices=["trace-out-S3", "trace-out-S2", "trace-out-S1", "diag"])
    p.add_argument("--line", type=float,
                   help="tau21 + tau31 constant [s] for --kind diag")

    p = add("simulate", cmd_simulate, help="generate a time-tagged event file")
    p.add_argument("--out", required=True)
    p.add_argument("--duration", type=float, default=None,
                   help="override duration [s]")
    p.add_argument("--seed", type=int, default=None, help="override seed")
    p.add_argument("--keep-origin", action="store_true",
                   help="export simulation-truth origin tags in the flags byte")

    p = add("analyze", cmd_analyze,
            help="reconstruct and report on an event file")
    p.add_argument("eventfile")
    p.add_argument("--out", required=True, help="output directory")
    p.add_argument("--method", choices=["direct", "delayed"], default=None)

    p = add("sweep", cmd_sweep, help="rate versus drive power trend CSV")
    p.add_argument("--out", required=True)
    p.add_argument("--param", default="power2")
    p.add_argument("--from", dest="start", required=True)
    p.add_argument("--to", dest="stop", required=True)
    p.add_argument("--steps", type=int, default=8)

    add("selftest", cmd_selftest, help="run the built-in oracle/property checks")
    add("print-defaults", cmd_print_defaults,
        help="dump the fully resolved default configuration")
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    try:
        return args.fn(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except NumericalDomainError as exc:
        print(f"numerical error: {exc}", file=sys.stderr)
        return 3
    except TriphotonError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
