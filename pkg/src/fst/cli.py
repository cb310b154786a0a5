"""Command-line interface: ``fst stylize | verify | spectrum | corpus``.

Exit codes: 0 success, 1 failed verification check, 2 I/O or format error,
3 numerical failure.
"""

from __future__ import annotations

import argparse
import sys
import warnings
from pathlib import Path

import numpy as np

from fst import io, linalg
from fst.errors import FormatError, NumericalError
from fst.metrics import Check, VerificationReport, timing_probe
from fst.spectral import dft, idft, spectral_gram, swap_component
from fst.stylize import (
    METHODS,
    FrequencyWeight,
    apply_frequency,
    apply_spatial,
    phase_replace,
    run_pipeline,
)
from fst.tensor import channel_stats, content_loss
from fst.verify import covariance_check, run_verification_suite

EXIT_OK, EXIT_CHECK, EXIT_IO, EXIT_NUMERIC = 0, 1, 2, 3


def _print_tsv(report: VerificationReport, stream=None) -> None:
    stream = stream or sys.stdout
    for e in report.entries:
        status = "PASS" if e.passed else "FAIL"
        print(f"{e.name}\t{e.residual:.6e}\t{e.tolerance:.6e}\t{status}", file=stream)


def _unit(x: str) -> float:
    x = float(x)
    if not 0.0 <= x <= 1.0:
        raise argparse.ArgumentTypeError(f"{x} is not in [0, 1]")
    return x


def _positive(x: str) -> float:
    v = float(x)
    if not v > 0:
        raise argparse.ArgumentTypeError(f"{x} is not positive")
    return v


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="fst", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("stylize", help="transfer style statistics onto a content image or fmap")
    s.add_argument("--content", required=True, type=Path)
    s.add_argument("--style", required=True, type=Path)
    s.add_argument("-o", "--output", required=True, type=Path)
    s.add_argument("--method", choices=METHODS, default="wct")
    s.add_argument("--domain", choices=("spatial", "frequency"), default="frequency")
    s.add_argument("--phase-replace", action="store_true")
    mix = s.add_mutually_exclusive_group()
    mix.add_argument("--fc-sigma", type=_positive, help="Gaussian frequency-combination width")
    mix.add_argument("--blend-alpha", type=_unit, help="constant content/stylized blend weight")
    s.add_argument("--fc-raw-index", action="store_true",
                   help="use raw index offsets instead of size-normalized ones")
    s.add_argument("--eig-cutoff", type=float, default=linalg.DEFAULT_CUTOFF)
    s.add_argument("--max-iters", type=int, default=5000, help="gram-opt iteration cap")
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--report", type=Path)
    s.add_argument("--figures", type=Path, help="directory for matplotlib figures")
    s.add_argument("--timings", action="store_true", help="record stage timings in the report")

    v = sub.add_parser("verify", help="run the identity verification suite")
    v.add_argument("--content", type=Path)
    v.add_argument("--style", type=Path)
    v.add_argument("--seed", type=int, default=0)
    v.add_argument("--report", type=Path)
    v.add_argument("--figures", type=Path)
    v.add_argument("--eig-cutoff", type=float, default=linalg.DEFAULT_CUTOFF)
    v.add_argument("--timings", action="store_true")
    v.add_argument("--inject-fault", action="store_true", help=argparse.SUPPRESS)

    sp = sub.add_parser("spectrum", help="amplitude/phase views and amplitude/phase swaps")
    sp.add_argument("input", type=Path)
    sp.add_argument("--out-dir", type=Path, help="write amplitude_c<k>.png and phase_c<k>.png")
    sp.add_argument("--swap", choices=("amplitude", "phase"),
                    help="take this component from --with")
    sp.add_argument("--with", dest="donor", type=Path)
    sp.add_argument("-o", "--output", type=Path, help="swap result")
    sp.add_argument("--figure", type=Path, help="matplotlib amplitude/phase panel")

    c = sub.add_parser("corpus", help="write the procedural desk corpus as PNG pairs")
    c.add_argument("out_dir", type=Path)
    return p


def _stylize_report(args, f_c, f_s, result, report: VerificationReport) -> None:
    xf = result.transform
    spatial = apply_spatial(f_c, xf)
    freq = idft(apply_frequency(dft(f_c), dft(f_s), xf))
    method = args.method
    report.add(Check(f"domain_equivalence_{method}", float(np.max(np.abs(freq - spatial))), 1e-6,
                     xf.method))
    stats_s = channel_stats(f_s)
    out_stats = channel_stats(result.stylized)
    report.add(Check(f"mean_alignment_{method}",
                     float(np.max(np.abs(out_stats.mean - stats_s.mean))), 1e-9))
    if method in ("wct", "optimal"):
        report.add(covariance_check(f"covariance_alignment_{method}", result.stylized,
                                      channel_stats(f_c), stats_s, method, args.eig_cutoff))
    if args.phase_replace:
        before = content_loss(result.stylized, f_c)
        after = content_loss(idft(phase_replace(dft(result.stylized), dft(f_c))), f_c)
        report.add(Check("pr_content_loss_reduction", max(0.0, after - before) / max(before, 1e-300),
                         1e-12, f"before={before:.6e} after={after:.6e}"))


def cmd_stylize(args) -> int:
    f_c = io.read_any(args.content)
    f_s = io.read_any(args.style)
    weight = None
    if args.fc_sigma is not None:
        weight = FrequencyWeight(sigma=args.fc_sigma, raw_index=args.fc_raw_index)
    elif args.blend_alpha is not None:
        weight = FrequencyWeight(constant=args.blend_alpha)
    report = VerificationReport(seed=args.seed)
    _, result = timing_probe(
        f"stylize_{args.method}_{args.domain}",
        lambda: run_pipeline(f_c, f_s, args.method, args.domain, args.phase_replace, weight,
                             rel_cutoff=args.eig_cutoff, max_iters=args.max_iters),
        report if args.timings else None)
    info = result.transform.info
    if info.get("no_descent") or (args.method == "gram-opt" and not info.get("converged", True)):
        print(f"fst: gram-opt stopped after {info['iterations']} iterations, "
              f"objective {info['objective']:.3e}", file=sys.stderr)
    if args.report:
        _stylize_report(args, f_c, f_s, result, report)
        io.write_report(report, args.report)
        _print_tsv(report)
    # quantization happens only here, after every numerical check
    io.write_any(result.output, args.output)
    if args.figures:
        from fst import plotting
        stem = Path(args.output).stem
        plotting.plot_stylize(f_c, f_s, result.output, args.figures / f"{stem}_panel.png",
                              title=f"{args.method} / {args.domain}"
                                    + (" + PR" if args.phase_replace else "")
                                    + (f" + FC(sigma={args.fc_sigma:g})" if args.fc_sigma else ""))
        plotting.plot_spectrum(result.output, args.figures / f"{stem}_spectrum.png")
        if args.report:
            plotting.plot_report(report, args.figures / f"{stem}_checks.png")
    return EXIT_OK


def cmd_verify(args) -> int:
    f_c = io.read_any(args.content) if args.content else None
    f_s = io.read_any(args.style) if args.style else None
    if (f_c is None) != (f_s is None):
        print("fst: verify needs both --content and --style, or neither", file=sys.stderr)
        return EXIT_IO
    report = run_verification_suite(f_c, f_s, seed=args.seed, rel_cutoff=args.eig_cutoff,
                                    fault=args.inject_fault, timings=args.timings)
    if args.report:
        io.write_report(report, args.report)
        _print_tsv(report)
    else:
        sys.stdout.write(io.report_json(report))
    if args.figures:
        from fst import plotting
        plotting.plot_report(report, args.figures / "verification.png")
    for e in report.failures():
        print(f"fst: check failed: {e.name} (residual {e.residual:.3e} > {e.tolerance:.3e})",
              file=sys.stderr)
    return EXIT_OK if report.passed else EXIT_CHECK


def cmd_spectrum(args) -> int:
    from fst.spectral import amplitude_view, phase_view
    f = io.read_any(args.input)
    if args.out_dir:
        args.out_dir.mkdir(parents=True, exist_ok=True)
        amp, ph = amplitude_view(f), phase_view(f)
        for k in range(f.shape[0]):
            io.write_image(amp[k:k + 1], args.out_dir / f"amplitude_c{k}.png")
            io.write_image(ph[k:k + 1], args.out_dir / f"phase_c{k}.png")
    if args.swap:
        if args.donor is None or args.output is None:
            print("fst: --swap needs --with and --output", file=sys.stderr)
            return EXIT_IO
        donor = io.read_any(args.donor)
        out = swap_component(f, donor, args.swap)
        io.write_any(out, args.output)
        g_out, g_donor = np.diag(spectral_gram(dft(out))), np.diag(spectral_gram(dft(donor)))
        print(f"gram_diag_out\t{' '.join(f'{x:.6e}' for x in g_out)}")
        print(f"gram_diag_{args.swap}_donor\t{' '.join(f'{x:.6e}' for x in g_donor)}")
    if args.figure:
        from fst import plotting
        plotting.plot_spectrum(f, args.figure, title=str(args.input.name))
    return EXIT_OK


def cmd_corpus(args) -> int:
    from fst.corpus import desk_corpus
    args.out_dir.mkdir(parents=True, exist_ok=True)
    for i, (c, s) in enumerate(desk_corpus()):
        io.write_image(c, args.out_dir / f"content_{i:02d}.png")
        io.write_image(s, args.out_dir / f"style_{i:02d}.png")
    return EXIT_OK


COMMANDS = {"stylize": cmd_stylize, "verify": cmd_verify, "spectrum": cmd_spectrum,
            "corpus": cmd_corpus}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        with warnings.catch_warnings():
            warnings.simplefilter("default")
            return COMMANDS[args.command](args)
    except (OSError, FormatError) as exc:
        print(f"fst: {exc}", file=sys.stderr)
        return EXIT_IO
    except NumericalError as exc:
        print(f"fst: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except ValueError as exc:
        # shape/layout mismatches between user inputs
        print(f"fst: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
