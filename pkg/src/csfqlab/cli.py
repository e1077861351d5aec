"""Command-line interface: ``csfqlab {spectrum,spectroscopy,t1-temp,fit,report}``.

Exit status: 0 success, 2 usage error, 3 validation error, 4 numerical
non-convergence.
"""

from __future__ import annotations

import argparse
import io
import json
import logging
import sys
import time
from pathlib import Path

import numpy as np

from csfqlab import losses, spectroscopy
from csfqlab.config import (
    CONFIG_ENV,
    ConfigError,
    config_hash,
    default_points_path,
    load_config,
    load_observations,
    save_config,
)
from csfqlab.constants import GHz, ueV
from csfqlab.fitting import FitError, FitOptions, fit
from csfqlab.losses import DEFAULT_GAP, LossModelError
from csfqlab.model import ModelError, flux_sweep, ladder_spectrum, spectrum, transitions
from csfqlab.numerics import NumericsError
from csfqlab.reference import MEASURED
from csfqlab.spectroscopy import SpectroscopyError, TraceConfig

log = logging.getLogger("csfqlab")

EXIT_OK, EXIT_USAGE, EXIT_INVALID, EXIT_NONCONVERGED = 0, 2, 3, 4


class UsageError(Exception):
    pass


def fmt(x) -> str:
    return f"{x:.10g}"


def write_csv(path, header, rows) -> str:
    buf = io.StringIO()
    buf.write(",".join(header) + "\n")
    for row in rows:
        buf.write(",".join(r if isinstance(r, str) else fmt(r) for r in row) + "\n")
    text = buf.getvalue()
    if path is None or str(path) == "-":
        sys.stdout.write(text)
    else:
        Path(path).parent.mkdir(parents=True, exist_ok=True)
        Path(path).write_text(text)
    return text


# -- subcommands -------------------------------------------------------------


def cmd_spectrum(args, outputs):
    cfg = load_config(args.config)
    params = cfg.to_params()
    if args.levels < 1:
        raise UsageError("--levels must be at least 1")
    cutoff = args.cutoff or cfg.charge_cutoff
    if args.flux_range is not None:
        lo, hi, n = args.flux_range
        if not lo < hi or int(n) != n or n < 2:
            raise UsageError("--flux-range needs LO < HI and an integer N >= 2")
        spectra = flux_sweep(params, lo, hi, int(n), args.levels + 1, cutoff)
    else:
        spectra = [spectrum(params, args.flux, args.levels + 1, cutoff)]
    header = ["flux_Phi0"] + [f"E{k}_GHz" for k in range(1, args.levels + 1)] + ["converged"]
    rows = [
        [s.flux] + [lv / GHz for lv in s.levels[1:]] + ["true" if s.converged else "false"] for s in spectra
    ]
    write_csv(args.csv, header, rows)
    outputs.append(args.csv or "-")
    if args.plot:
        from csfqlab.plotting import plot_flux_sweep

        outputs.append(str(plot_flux_sweep(spectra, args.plot, args.levels)))
    if not all(s.converged for s in spectra):
        log.warning("charge cutoff %d not converged to 1 kHz at some flux points", cutoff)
        return EXIT_NONCONVERGED
    return EXIT_OK


def _trace_grid(trans, args):
    adjacent = [t.freq for t in trans if t.order == 1 and t.j == t.i + 1]
    lo = args.f_lo * GHz if args.f_lo is not None else min(adjacent) - 0.5 * GHz
    hi = args.f_hi * GHz if args.f_hi is not None else max(adjacent) + 0.5 * GHz
    return lo, hi


def cmd_spectroscopy(args, outputs):
    if args.teff < 0:
        raise UsageError("--teff must be non-negative")
    if args.order < 1:
        raise UsageError("--order must be at least 1")
    if args.ladder:
        try:
            excited = [float(x) * GHz for x in args.ladder.split(",")]
        except ValueError:
            raise UsageError("--ladder takes comma-separated level energies in GHz") from None
        spec = ladder_spectrum([0.0] + excited, args.flux)
    else:
        cfg = load_config(args.config)
        spec = spectrum(cfg.to_params(), args.flux, args.levels, cfg.charge_cutoff)
    trans = transitions(spec, args.order)
    lo, hi = _trace_grid(trans, args)
    config = TraceConfig(f_lo=lo, f_hi=hi, n_points=args.points)
    state = spectroscopy.gibbs_populations(spec, args.teff)
    trace = spectroscopy.synthesize_trace(trans, state, config)

    write_csv(args.csv, ["freq_GHz", "amplitude_au"], zip(trace.freqs / GHz, trace.amplitude))
    outputs.append(args.csv)
    peaks_path = args.peaks or str(Path(args.csv).with_name(Path(args.csv).stem + "_peaks.csv"))
    write_csv(
        peaks_path,
        ["center_GHz", "width_MHz", "height_au", "i", "j", "order"],
        [[p.center / GHz, p.width / 1e6, p.height, str(p.label[0]), str(p.label[1]), str(p.label[2])] for p in trace.peaks],
    )
    outputs.append(peaks_path)
    for p in trace.peaks:
        print(f"{p.label[0]}->{p.label[1]} order {p.label[2]}: {p.center / GHz:.4f} GHz, height {p.height:.4g}")
    if args.plot:
        from csfqlab.plotting import plot_traces

        outputs.append(str(plot_traces([trace], [f"T_eff = {args.teff * 1e3:g} mK"], args.plot)))
    return EXIT_OK


def cmd_t1_temp(args, outputs):
    load_config(args.config)
    lo, hi, n = args.range
    if not 0 < lo < hi or int(n) != n or n < 2:
        raise UsageError("--range needs 0 < LO < HI and an integer N >= 2")
    gap = args.gap_ueV * ueV
    model = losses.calibrate_qp(gap, args.t1_base, args.t1_ref, args.temp_ref)
    gamma_int = 1.0 / args.t1_base
    temps = np.linspace(lo, hi, int(n))
    budgets = losses.t1_vs_temperature(model, gamma_int, temps)
    write_csv(
        args.csv,
        ["temp_K", "t1_us", "gamma_qp_per_s", "gamma_total_per_s", "xqp"],
        [[b.temp, b.t1 / 1e-6, b.gamma_qp, b.total_rate, losses.xqp_thermal(b.temp, gap)] for b in budgets],
    )
    outputs.append(args.csv or "-")
    t_half = losses.rolloff_temperature(model, gamma_int)
    print(f"qp_scale_per_s: {model.scale:.6g}", file=sys.stderr)
    print(f"half_plateau_temperature_K: {t_half:.6g}", file=sys.stderr)
    if args.plot:
        from csfqlab.plotting import plot_t1_temperature

        outputs.append(
            str(
                plot_t1_temperature(
                    temps,
                    [b.t1 for b in budgets],
                    args.plot,
                    band=(MEASURED.t1_after_low, MEASURED.t1_after),
                    marks=[(args.temp_ref, args.t1_ref)],
                )
            )
        )
    return EXIT_OK


def cmd_fit(args, outputs):
    cfg = load_config(args.config)
    obs = load_observations(args.data or default_points_path())
    free = () if args.free.strip().lower() == "none" else tuple(s for s in args.free.split(",") if s.strip())
    opts = FitOptions(restarts=args.restarts, seed=args.seed, charge_cutoff=cfg.charge_cutoff)
    result = fit(obs, cfg.to_params(), free, opts)
    p = result.params
    lines = [
        f"converged: {str(result.converged).lower()}",
        f"free: {','.join(result.free) or 'none'}",
        f"iterations: {result.iterations}",
        f"residual_rms_MHz: {result.residual_rms / 1e6:.6g}",
        f"i0_uA: {p.I0 / 1e-6:.8g}",
        f"alpha: {p.alpha:.8g}",
        f"cs_fF: {p.Cs / 1e-15:.8g}",
        f"cj_fF: {p.Cj / 1e-15:.8g}",
    ]
    for ob, err in zip(obs, result.per_point_errors):
        lines.append(f"error_MHz[{ob.flux:g},{ob.i}->{ob.j}]: {err / 1e6:.6g}")
    print("\n".join(lines))
    if args.out_config:
        note = f"fitted to {len(obs)} transitions (free: {','.join(result.free) or 'none'}, seed {args.seed})"
        save_config(cfg.with_params(p, note), args.out_config)
        outputs.append(args.out_config)
    return EXIT_OK if result.converged else EXIT_NONCONVERGED


def cmd_report(args, outputs):
    from csfqlab.report import before_after_trace, format_rows, report_rows

    cfg = load_config(args.config)
    text = format_rows(report_rows(cfg))
    sys.stdout.write(text)
    if args.out:
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        (out / "report.csv").write_text(text)
        outputs.append(str(out / "report.csv"))

        from csfqlab.plotting import plot_flux_sweep, plot_t1_temperature, plot_traces

        before = before_after_trace(MEASURED.temp_hot)
        after = before_after_trace(MEASURED.base_temp)
        outputs.append(
            str(plot_traces([before, after], ["before (175 mK)", "after (15 mK)"], out / "spectroscopy_before_after.png"))
        )
        model = losses.calibrate_qp(DEFAULT_GAP, MEASURED.t1_after, MEASURED.t1_hot, MEASURED.temp_hot)
        temps = np.linspace(0.015, 0.25, 48)
        t1 = losses.t1_curve(model, 1.0 / MEASURED.t1_after, temps)
        outputs.append(
            str(
                plot_t1_temperature(
                    temps,
                    t1,
                    out / "t1_vs_temperature.png",
                    band=(MEASURED.t1_after_low, MEASURED.t1_after),
                    marks=[(MEASURED.temp_hot, MEASURED.t1_hot)],
                )
            )
        )
        sweep = flux_sweep(cfg.to_params(), 0.45, 0.55, 21, 4, cfg.charge_cutoff, check_convergence=False)
        outputs.append(str(plot_flux_sweep(sweep, out / "flux_spectrum.png", 3)))
    return EXIT_OK


# -- parser --------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="csfqlab", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--config", help=f"device config JSON (default: ${CONFIG_ENV} or the packaged paper-csfq.json)")
        p.add_argument("--record", help="write a JSON run record to this path")
        p.add_argument("--seed", type=int, default=0)

    p = sub.add_parser("spectrum", help="energy levels versus flux")
    common(p)
    g = p.add_mutually_exclusive_group()
    g.add_argument("--flux", type=float, default=0.5, help="reduced flux Phi/Phi0")
    g.add_argument("--flux-range", nargs=3, type=float, metavar=("LO", "HI", "N"))
    p.add_argument("--levels", type=int, default=4, help="number of excited levels to report")
    p.add_argument("--cutoff", type=int, help="charge cutoff N (default from config)")
    p.add_argument("--csv", help="output CSV (default stdout)")
    p.add_argument("--plot", help="also render a figure to this path")
    p.set_defaults(func=cmd_spectrum)

    p = sub.add_parser("spectroscopy", help="synthetic thermal spectroscopy trace")
    common(p)
    p.add_argument("--flux", type=float, default=0.51)
    p.add_argument("--teff", type=float, required=True, help="effective qubit temperature (K)")
    p.add_argument("--order", type=int, default=2, help="highest multi-photon order")
    p.add_argument("--levels", type=int, default=4, help="number of levels (ground included)")
    p.add_argument("--ladder", help="use these excited-level energies (GHz, comma-separated) instead of the model")
    p.add_argument("--f-lo", type=float, help="grid start (GHz)")
    p.add_argument("--f-hi", type=float, help="grid end (GHz)")
    p.add_argument("--points", type=int, default=2801)
    p.add_argument("--csv", required=True, help="trace CSV")
    p.add_argument("--peaks", help="peak-table CSV (default: <csv stem>_peaks.csv)")
    p.add_argument("--plot", help="also render a figure to this path")
    p.set_defaults(func=cmd_spectroscopy)

    p = sub.add_parser("t1-temp", help="T1 versus temperature from a calibrated quasiparticle rate")
    common(p)
    p.add_argument("--t1-base", type=float, default=MEASURED.t1_after, help="plateau T1 (s)")
    p.add_argument("--t1-ref", type=float, default=MEASURED.t1_hot, help="T1 at the reference temperature (s)")
    p.add_argument("--temp-ref", type=float, default=MEASURED.temp_hot, help="reference temperature (K)")
    p.add_argument("--gap-ueV", type=float, default=200.0, help="superconducting gap (ueV)")
    p.add_argument("--range", nargs=3, type=float, default=(0.015, 0.25, 48), metavar=("LO", "HI", "N"))
    p.add_argument("--csv", help="output CSV (default stdout)")
    p.add_argument("--plot", help="also render a figure to this path")
    p.set_defaults(func=cmd_t1_temp)

    p = sub.add_parser("fit", help="fit circuit parameters to observed transitions")
    common(p)
    p.add_argument("--data", help="observations CSV (default: packaged paper-points.csv)")
    p.add_argument("--free", default="i0,alpha,cs", help="comma-separated subset of i0,alpha,cs,cj, or 'none'")
    p.add_argument("--restarts", type=int, default=5)
    p.add_argument("--out-config", help="write the fitted config here")
    p.set_defaults(func=cmd_fit)

    p = sub.add_parser("report", help="before/after comparison table")
    common(p)
    p.add_argument("--out", help="directory for report.csv and figures")
    p.set_defaults(func=cmd_report)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s: %(message)s")
    outputs = []
    t0 = time.perf_counter()
    try:
        status = args.func(args, outputs)
    except UsageError as exc:
        parser.error(str(exc))
    except (ConfigError, ModelError, LossModelError, SpectroscopyError, FitError, NumericsError, ValueError) as exc:
        print(f"csfqlab: error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    if args.record:
        record = {
            "command": args.command,
            "argv": list(sys.argv[1:] if argv is None else argv),
            "config_sha256": config_hash(args.config),
            "seed": args.seed,
            "outputs": [str(o) for o in outputs],
            "wall_time_s": round(time.perf_counter() - t0, 6),
            "exit_status": status,
        }
        Path(args.record).write_text(json.dumps(record, indent=2) + "\n")
    return status


if __name__ == "__main__":
    sys.exit(main())
