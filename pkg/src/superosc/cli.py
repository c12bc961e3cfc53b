"""Command-line interface: ``superosc <command> [options]``.

Commands
--------
build     validate a waveform spec and print its diagnostics
sample    write uniform samples of a waveform as CSV
spectrum  spectrum and out-of-band fraction of sampled data
yield     optimized yield bound (and a measured yield for a waveform)
zeros     add, remove or shift an envelope zero in a waveform spec
tailfit   fit ln|g| = a - b t^p to the tail of a bump envelope

Exit status: 0 on success, 1 on I/O or input errors, 2 when a waveform
spec fails the square-integrability check.
"""
from __future__ import annotations

import argparse
import json
import math
import sys
from dataclasses import replace

import numpy as np

from . import spectral, waveform, yield_bound
from .envelope import EnvelopeSpec, fit_tail_decay, tabulate_bump
from .zero_ops import SquareIntegrabilityError, add_zero, remove_zero, shift_zero

EXIT_OK, EXIT_IO, EXIT_INVALID = 0, 1, 2


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_IO, f"{self.prog}: error: {message}\n")


def _num(x):
    """Round floats to 12 significant digits for reports."""
    if isinstance(x, bool) or x is None or isinstance(x, str):
        return x
    if isinstance(x, dict):
        return {k: _num(v) for k, v in x.items()}
    if isinstance(x, (list, tuple, np.ndarray)):
        return [_num(v) for v in x]
    if isinstance(x, (int, np.integer)):
        return int(x)
    x = float(x)
    if not math.isfinite(x):
        return repr(x)
    return float("%.12g" % x)


def _dump(obj, out=None):
    text = json.dumps(_num(obj), indent=2, sort_keys=True, ensure_ascii=False) + "\n"
    _write(text, out)


def _write(text, out):
    if out is None or out == "-":
        sys.stdout.write(text)
    else:
        with open(out, "w") as fh:
            fh.write(text)


def _read(path):
    if path == "-":
        return sys.stdin.read()
    with open(path) as fh:
        return fh.read()


def _load_spec(path) -> waveform.WaveformSpec:
    return waveform.WaveformSpec.from_json(_read(path))


def _grid(args):
    if args.t_min is None or args.t_max is None:
        raise ValueError("--t-min and --t-max are required")
    if args.count is not None and args.count < 2:
        raise ValueError("--count must be at least 2")
    if args.rate is not None and not args.rate > 0:
        raise ValueError("--rate must be positive")
    return (args.t_min, args.t_max), args.count, args.rate


# ------------------------------------------------------------------ commands


def cmd_build(args) -> int:
    spec = _load_spec(args.spec)
    rep = waveform.validate(spec)
    out = {"label": spec.label, "validity": rep.to_dict()}
    if not rep.passed:
        _dump(out, args.out)
        sys.stderr.write(f"invalid waveform: {rep.condition}\n")
        return EXIT_INVALID
    if spec.f0 is not None:
        out["diagnostics"] = waveform.diagnostics(spec, args.t_max).to_dict()
        out["so_fidelity"] = waveform.so_fidelity(spec)
    _dump(out, args.out)
    return EXIT_OK


def cmd_sample(args) -> int:
    spec = _load_spec(args.spec)
    rng, count, rate = _grid(args)
    sig = waveform.sample(spec, rng, count=count, rate=rate)
    if sig.coarse:
        sys.stderr.write("warning: fewer than 8 samples per 1/f0\n")
    _write(sig.to_csv(), args.out)
    return EXIT_OK


def _signal_for_spectrum(args) -> spectral.SampledSignal:
    if args.samples is not None:
        return spectral.SampledSignal.from_csv(_read(args.samples))
    if args.spec is None:
        raise ValueError("give --samples or --spec with a grid")
    rng, count, rate = _grid(args)
    return waveform.sample(_load_spec(args.spec), rng, count=count, rate=rate)


def cmd_spectrum(args) -> int:
    """Report on stdout; with --out, also the spectrum itself as CSV or JSON."""
    sig = _signal_for_spectrum(args)
    est = spectral.spectrum(sig, args.window)
    p = est.power
    rep = {
        "count": sig.count,
        "dt": sig.dt,
        "df": est.df,
        "nyquist": est.nyquist,
        "total_energy": est.total_energy,
        "peak_frequency": abs(float(est.freqs[int(np.argmax(p))])),
        "window": est.window,
    }
    if args.fmax is not None:
        rep["fmax"] = args.fmax
        rep["out_of_band_fraction"] = spectral.out_of_band_energy(est, args.fmax)
    if args.out is not None:
        if args.format == "csv":
            _write(spectral.spectrum_to_csv(est), args.out)
        else:
            H = est.amplitudes
            _dump({"f": est.freqs, "re": H.real, "im": H.imag, "power": p}, args.out)
    _dump(rep)
    return EXIT_OK


def cmd_yield(args) -> int:
    if args.spec is not None:
        spec = _load_spec(args.spec)
        prof = yield_bound.profile_from_waveform(spec)
        if args.fmax is not None:
            prof = replace(prof, f_max=args.fmax)
    else:
        if args.fmax is None or args.fs is None or args.tau_s is None:
            raise ValueError("--fmax, --fs and --tau-s are required without --spec")
        prof = yield_bound.SoProfile(args.a_s, args.fs, args.tau_s, 0.0, args.fmax)
    tau, bound = yield_bound.optimize_bound(prof, args.method)
    fs = yield_bound.FilterSpec(tau, prof.f_s)
    rep = {
        "f_s": prof.f_s,
        "f_max": prof.f_max,
        "tau_s": prof.tau_s,
        "method": args.method,
        "tau_star": tau,
        "bound_star": bound,
        "unrounded_bound": yield_bound.yield_bound(prof, tau, "unrounded"),
        "window_energy": yield_bound.window_energy(fs, prof, "rounded"),
    }
    host_energy = 1.0
    if args.spec is not None:
        half = args.t_max if args.t_max is not None else 1000.0
        rate = args.rate if args.rate is not None else waveform.DEFAULT_SAMPLES_PER_PERIOD * prof.f_s
        sig = waveform.sample(spec, (-half, half), rate=rate)
        m = yield_bound.empirical_yield(sig, prof, fs)
        host_energy = m.host_energy
        rep["measured_yield"] = m.measured_yield
        rep["output_energy_convolution"] = m.output_energy_convolution
        rep["output_energy_spectral"] = m.output_energy_spectral
        rep["host_energy"] = m.host_energy
    rep["tail_energy_bound"] = yield_bound.tail_bound(fs, prof.f_max, host_energy)
    _dump(rep, args.out)
    return EXIT_OK


def cmd_zeros(args) -> int:
    spec = _load_spec(args.spec)
    ledger = spec.envelope_ledger
    if args.action == "add":
        ledger = add_zero(ledger, args.at, args.multiplicity)
    elif args.action == "remove":
        ledger = remove_zero(ledger, args.at, args.multiplicity)
    else:
        if args.to is None:
            raise ValueError("shift needs --to")
        ledger = shift_zero(ledger, args.at, args.to)
    new = replace(spec, envelope_ops=tuple(ledger.ops))
    _write(new.to_json() + "\n", args.out)
    return EXIT_OK


def cmd_tailfit(args) -> int:
    env = EnvelopeSpec("bump", m=args.m, n=args.n)
    lo, hi = args.t_lo, args.t_hi
    table = tabulate_bump(env, hi, args.oversample)
    fit = fit_tail_decay(table, (lo, hi), exponent=args.exponent)
    _dump({"m": args.m, "n": args.n, "t_lo": lo, "t_hi": hi, "a": fit.a, "b": fit.b, "p": fit.p, "points": fit.points}, args.out)
    return EXIT_OK


# ------------------------------------------------------------------ parser


def build_parser() -> argparse.ArgumentParser:
    ap = _Parser(prog="superosc", description="Band-limited superoscillating waveforms.")
    sub = ap.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def grid(p):
        p.add_argument("--t-min", type=float)
        p.add_argument("--t-max", type=float)
        g = p.add_mutually_exclusive_group()
        g.add_argument("--count", type=int)
        g.add_argument("--rate", type=float, help="samples per second")

    p = sub.add_parser("build", help="validate a spec and print diagnostics")
    p.add_argument("--spec", required=True)
    p.add_argument("--out")
    p.add_argument("--t-max", type=float, help="peak search half-window (s)")
    p.set_defaults(func=cmd_build)

    p = sub.add_parser("sample", help="sample a waveform to CSV")
    p.add_argument("--spec", required=True)
    p.add_argument("--out")
    grid(p)
    p.set_defaults(func=cmd_sample)

    p = sub.add_parser("spectrum", help="spectrum of samples")
    p.add_argument("--samples", help="CSV written by 'sample'")
    p.add_argument("--spec")
    p.add_argument("--out", help="spectrum CSV (f, re, im, power)")
    p.add_argument("--fmax", type=float)
    p.add_argument("--window", choices=["none", "taper"], default="none")
    p.add_argument("--format", choices=["csv", "json"], default="csv")
    grid(p)
    p.set_defaults(func=cmd_spectrum)

    p = sub.add_parser("yield", help="optimized yield bound")
    p.add_argument("--spec")
    p.add_argument("--fmax", type=float)
    p.add_argument("--fs", type=float)
    p.add_argument("--tau-s", type=float)
    p.add_argument("--a-s", type=float, default=1.0)
    p.add_argument("--method", choices=["rounded", "unrounded", "exact"], default="rounded")
    p.add_argument("--t-max", type=float, help="half-length of the measurement grid (s)")
    p.add_argument("--rate", type=float)
    p.add_argument("--out")
    p.set_defaults(func=cmd_yield)

    p = sub.add_parser("zeros", help="edit envelope zeros of a spec")
    p.add_argument("action", choices=["add", "remove", "shift"])
    p.add_argument("--spec", required=True)
    p.add_argument("--at", type=float, required=True)
    p.add_argument("--to", type=float)
    p.add_argument("--multiplicity", type=int, default=1)
    p.add_argument("--out")
    p.set_defaults(func=cmd_zeros)

    p = sub.add_parser("tailfit", help="tail fit of a bump envelope")
    p.add_argument("--m", type=int, default=1)
    p.add_argument("--n", type=int, default=1)
    p.add_argument("--t-lo", type=float, default=100.0)
    p.add_argument("--t-hi", type=float, default=10000.0)
    p.add_argument("--oversample", type=float, default=4.0)
    p.add_argument("--exponent", type=float)
    p.add_argument("--out")
    p.set_defaults(func=cmd_tailfit)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except SquareIntegrabilityError as exc:
        sys.stderr.write(f"invalid: {exc}\n")
        return EXIT_INVALID
    except (OSError, ValueError, KeyError, TypeError) as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
