"""Batch pipeline front end: generate, fit, analyze, verify.

Exit codes: 0 success, 1 usage error, 2 data error, 3 verification failure.
Every subcommand that writes files also writes a ``<command>_manifest.json``
listing inputs, configuration, record counts, stage timings, and a sha256
digest of every output file.  Outputs are deterministic for fixed flags and
seed; ``CITESCALE_WORKERS`` may fan the fit stage out across processes
without changing any output byte.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import math
import os
import sys
import time

import numpy as np

from . import __version__
from .cohort import (FILTER_PRESETS, SynthSpec, _format_cell,
                     generate_synthetic, load_cohort, read_summary_csv,
                     save_cohort, write_atomic, write_summary_csv)
from .errors import CitescaleError
from .fitting import FitConfig, RejectionReason, fit_cohort
from .risk import exponential_family, general_scaling_curve
from .scaling import (E_BOUND, BinConfig, bound_violation_report,
                      build_summary_rows, impscale_curve, point_from_counts,
                      summarize_cohort)
from .verify import CHECK_NAMES, run_checks

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_DATA = 2
EXIT_VERIFY = 3

_CURVE_POINTS = 512


class _Parser(argparse.ArgumentParser):
    """argparse variant whose usage failures exit with code 1."""

    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_USAGE)


def _sha256(path: str) -> str:
    digest = hashlib.sha256()
    with open(path, "rb") as handle:
        for block in iter(lambda: handle.read(1 << 20), b""):
            digest.update(block)
    return digest.hexdigest()


def _write_manifest(out_dir: str, command: str, config: dict,
                    inputs: list[str], outputs: list[str],
                    counts: dict, timing: dict) -> str:
    manifest = {
        "tool": "citescale",
        "version": __version__,
        "command": command,
        "config": config,
        "inputs": [{"path": p, "sha256": _sha256(p)} for p in inputs],
        "outputs": [{"name": os.path.basename(p), "sha256": _sha256(p)}
                    for p in sorted(outputs)],
        "record_counts": counts,
        "timing_seconds": {k: round(v, 3) for k, v in timing.items()},
    }
    path = os.path.join(out_dir, f"{command}_manifest.json")
    write_atomic(path, (json.dumps(manifest, indent=2, sort_keys=True) + "\n")
                 .encode("utf-8"))
    return path


def _write_table(path: str, comments: list[str], header: list[str],
                 rows: list[list]) -> None:
    lines = [f"# {c}" for c in comments]
    lines.append(",".join(header))
    for row in rows:
        lines.append(",".join(_format_cell(v) for v in row))
    write_atomic(path, ("\n".join(lines) + "\n").encode("utf-8"))


def _workers_from_env() -> int:
    raw = os.environ.get("CITESCALE_WORKERS", "1")
    try:
        workers = int(raw)
    except ValueError:
        raise ValueError(f"CITESCALE_WORKERS must be an integer, got {raw!r}") from None
    if workers < 1:
        raise ValueError(f"CITESCALE_WORKERS must be at least 1, got {workers}")
    return workers


def _scalar_or_range(scalar, pair, *, integer: bool):
    if pair is not None:
        return (int(pair[0]), int(pair[1])) if integer else (float(pair[0]), float(pair[1]))
    return int(scalar) if integer else float(scalar)


def cmd_generate(args) -> int:
    spec = SynthSpec(
        n_researchers=args.n,
        b_true=_scalar_or_range(args.b, args.b_range, integer=False),
        n_pub=_scalar_or_range(args.npub, args.npub_range, integer=True),
        mean_citations=_scalar_or_range(args.mean_cit, args.mean_cit_range,
                                        integer=False),
        seed=args.seed,
    )
    os.makedirs(args.out, exist_ok=True)
    t0 = time.perf_counter()
    cohort = generate_synthetic(spec)
    t1 = time.perf_counter()
    cohort_path = os.path.join(args.out, "cohort.jsonl")
    save_cohort(cohort, cohort_path)
    t2 = time.perf_counter()
    _write_manifest(
        args.out, "generate",
        config={"n": args.n, "b_true": repr(spec.b_true), "n_pub": repr(spec.n_pub),
                "mean_citations": repr(spec.mean_citations), "seed": spec.seed},
        inputs=[], outputs=[cohort_path],
        counts={"generated": len(cohort.records)},
        timing={"generate": t1 - t0, "write": t2 - t1})
    print(f"wrote {cohort_path} ({len(cohort.records)} records)")
    return EXIT_OK


def _loss_histogram(values: list[float], n_bins: int = 40):
    finite = sorted(v for v in values if math.isfinite(v) and v > 0.0)
    if not finite:
        return np.array([]), np.array([], dtype=np.int64)
    lo, hi = finite[0], finite[-1]
    if lo == hi:
        edges = np.array([lo * 0.9, hi * 1.1])
    else:
        edges = np.geomspace(lo, hi, n_bins + 1)
    counts, edges = np.histogram(finite, bins=edges)
    return edges, counts


def cmd_fit(args) -> int:
    t0 = time.perf_counter()
    cohort = load_cohort(args.cohort)
    if not cohort.records:
        raise CitescaleError(f"{args.cohort}: cohort holds no records")
    config = FitConfig(b_min=args.b_min, b_max=args.b_max, b_step=args.b_step,
                       s_cutoff=args.s_cutoff, min_points=args.min_points)
    workers = _workers_from_env()
    t1 = time.perf_counter()
    fits = fit_cohort(cohort.records, config, workers=workers)
    t2 = time.perf_counter()
    rows = build_summary_rows(cohort.records, fits)
    os.makedirs(args.out, exist_ok=True)
    fits_path = os.path.join(args.out, "fits.csv")
    write_summary_csv(rows, fits_path)

    edges, counts = _loss_histogram([f.s_min for f in fits])
    hist_path = os.path.join(args.out, "s_min_hist.csv")
    _write_table(
        hist_path,
        comments=["histogram of per-record minimum fit loss s_min (log-spaced bins)",
                  f"records={len(fits)} acceptance cutoff={config.s_cutoff!r}"],
        header=["bin_lo", "bin_hi", "count"],
        rows=[[float(edges[i]), float(edges[i + 1]), int(counts[i])]
              for i in range(len(counts))])
    outputs = [fits_path, hist_path]
    if not args.no_figures and len(counts):
        from .figures import render_loss_histogram
        png_path = os.path.join(args.out, "s_min_hist.png")
        render_loss_histogram(edges, counts, config.s_cutoff, png_path)
        outputs.append(png_path)
    t3 = time.perf_counter()

    by_reason = {reason.value: 0 for reason in RejectionReason}
    for f in fits:
        by_reason[f.rejection_reason.value] += 1
    counts_out = {
        "total": len(fits),
        "fitted": sum(1 for f in fits
                      if f.rejection_reason is not RejectionReason.TOO_FEW_POINTS),
        "accepted": by_reason.pop("none"),
        "rejected": {k: v for k, v in by_reason.items()},
    }
    _write_manifest(
        args.out, "fit",
        config={"b_min": config.b_min, "b_max": config.b_max,
                "b_step": config.b_step, "s_cutoff": config.s_cutoff,
                "min_points": config.min_points, "workers": workers},
        inputs=[args.cohort], outputs=outputs, counts=counts_out,
        timing={"load": t1 - t0, "fit": t2 - t1, "write": t3 - t2})
    print(f"wrote {fits_path} ({counts_out['accepted']}/{len(fits)} accepted)")
    return EXIT_OK


def _overlay_curves(family: str, b_list: list[float]):
    r = (np.arange(_CURVE_POINTS) + 1.0) / (_CURVE_POINTS + 1.0)
    header = ["r"]
    columns = [r]
    if family == "tsallis-pareto":
        for b in b_list:
            header.append(f"y_b_{b:g}")
            columns.append(impscale_curve(b, r))
    else:
        fam = exponential_family()
        header.append("y_exponential")
        columns.append(np.array([general_scaling_curve(fam, v) for v in r]))
    header.append("y_two_h")
    columns.append(2.0 * r)
    header.append("y_e_bound")
    columns.append(math.sqrt(E_BOUND) * r)
    return header, columns


def cmd_analyze(args) -> int:
    t0 = time.perf_counter()
    cohort = load_cohort(args.cohort)
    rows = read_summary_csv(args.fits)
    if [r.id for r in cohort.records] != [row.id for row in rows]:
        raise CitescaleError(
            f"{args.fits}: fit table ids do not match cohort {args.cohort}")
    if args.preset == "custom":
        if args.npub_min is None or args.ncit_min is None:
            raise CitescaleError(
                "--preset custom needs --npub-min and --ncit-min")
        preset: str | tuple[int, int] = (args.npub_min, args.ncit_min)
    else:
        preset = args.preset
    bins = BinConfig(b_bins=args.b_bins, gini_bins=args.gini_bins,
                     grid_nx=args.grid_nx, grid_ny=args.grid_ny,
                     grid_y_max=args.grid_ymax)
    t1 = time.perf_counter()
    summary = summarize_cohort(rows, preset=preset, bins=bins)

    n_pub_min, n_cit_min = (preset if isinstance(preset, tuple)
                            else FILTER_PRESETS[preset])
    kept = [r for r in rows if r.n_pub >= n_pub_min and r.n_cit >= n_cit_min]
    accepted = [r for r in kept if r.accepted]
    points = [point_from_counts(r.id, r.n_pub, r.n_cit, r.h) for r in accepted]
    t2 = time.perf_counter()

    os.makedirs(args.out, exist_ok=True)
    outputs = []

    def _out(name: str) -> str:
        path = os.path.join(args.out, name)
        outputs.append(path)
        return path

    b_edges = summary.b_bin_edges
    _write_table(
        _out("b_hist.csv"),
        comments=["histogram of fitted shape exponents b over accepted records",
                  "log-spaced bins; bin_center is the geometric midpoint"],
        header=["bin_lo", "bin_hi", "bin_center", "count"],
        rows=[[float(b_edges[i]), float(b_edges[i + 1]),
               float(math.sqrt(b_edges[i] * b_edges[i + 1])), int(c)]
              for i, c in enumerate(summary.b_counts)])

    g_edges = summary.gini_bin_edges
    _write_table(
        _out("gini_hist.csv"),
        comments=["histogram of per-record Gini indices over accepted records",
                  "linear bins on [0, 1]"],
        header=["bin_lo", "bin_hi", "bin_center", "count"],
        rows=[[float(g_edges[i]), float(g_edges[i + 1]),
               float((g_edges[i] + g_edges[i + 1]) / 2.0), int(c)]
              for i, c in enumerate(summary.gini_counts)])

    _write_table(
        _out("scaling_points.csv"),
        comments=["per-researcher scaling coordinates over accepted records",
                  "x = h/n_pub, y = sqrt(n_cit)/n_pub, lambda = n_pub^2/n_cit"],
        header=["id", "x_coord", "y_coord", "lambda",
                "violates_e_bound", "violates_obvious_bound"],
        rows=[[p.id, p.x_coord, p.y_coord, p.lam,
               p.violates_e_bound, p.violates_obvious_bound] for p in points])

    gx, gy = summary.grid_x_edges, summary.grid_y_edges
    nz = np.argwhere(summary.grid_counts > 0)
    _write_table(
        _out("density_grid.csv"),
        comments=["researcher density over the scaling plane (non-empty cells only)",
                  f"x: {bins.grid_nx} bins on [0, {bins.grid_x_max:g}] (h/n_pub); "
                  f"y: {bins.grid_ny} bins on [0, {bins.grid_y_max:g}] "
                  "(sqrt(n_cit)/n_pub)"],
        header=["x_index", "y_index", "x_center", "y_center", "count"],
        rows=[[int(i), int(j),
               float((gx[i] + gx[i + 1]) / 2.0), float((gy[j] + gy[j + 1]) / 2.0),
               int(summary.grid_counts[i, j])] for i, j in nz])

    curve_header, curve_columns = _overlay_curves(args.overlay_family, args.curve_b)
    _write_table(
        _out("overlay_curves.csv"),
        comments=["model scaling curves on the (h/n_pub, sqrt(n_cit)/n_pub) plane",
                  "y_two_h is the line y = 2x; y_e_bound is y = sqrt(e)*x"],
        header=curve_header,
        rows=[[float(col[i]) for col in curve_columns]
              for i in range(_CURVE_POINTS)])

    reports = [bound_violation_report(rows, "strict"),
               bound_violation_report(rows, "relaxed")]
    if summary.preset not in ("strict", "relaxed"):
        reports.append(bound_violation_report(rows, preset))
    _write_table(
        _out("violations.csv"),
        comments=["bound violation rates per filter preset",
                  "e bound: n_cit >= e*h^2; obvious bound: n_cit >= h^2"],
        header=["preset", "n_records", "e_bound_violations", "e_bound_rate",
                "obvious_bound_violations", "obvious_bound_rate"],
        rows=[[rep["preset"], rep["n_records"], rep["e_bound_violations"],
               rep["e_bound_rate"], rep["obvious_bound_violations"],
               rep["obvious_bound_rate"]] for rep in reports])

    summary_payload = {
        "preset": summary.preset,
        "record_counts": summary.record_counts,
        "b_mode": summary.b_mode,
        "b_mean": summary.b_mean,
        "gini_mode": summary.gini_mode,
        "e_bound_violation_rate": summary.e_bound_violation_rate,
        "two_h_median": summary.two_h_median,
        "bins": {"b_bins": bins.b_bins, "gini_bins": bins.gini_bins,
                 "grid_nx": bins.grid_nx, "grid_ny": bins.grid_ny,
                 "grid_x_max": bins.grid_x_max, "grid_y_max": bins.grid_y_max},
        "overlay": {"family": args.overlay_family, "b_list": args.curve_b},
    }
    summary_path = _out("summary.json")
    write_atomic(summary_path,
                 (json.dumps(summary_payload, indent=2, sort_keys=True) + "\n")
                 .encode("utf-8"))

    if not args.no_figures:
        from .figures import (render_b_histogram, render_gini_histogram,
                              render_scaling_map)
        render_b_histogram(b_edges, summary.b_counts, _out("b_hist.png"))
        render_gini_histogram(g_edges, summary.gini_counts, _out("gini_hist.png"))
        r = curve_columns[0]
        curves = [(curve_header[i], r, curve_columns[i])
                  for i in range(1, len(curve_columns))]
        render_scaling_map(gx, gy, summary.grid_counts, curves,
                           _out("scaling_map.png"))
    t3 = time.perf_counter()

    _write_manifest(
        args.out, "analyze",
        config={"preset": summary.preset, "b_bins": bins.b_bins,
                "gini_bins": bins.gini_bins, "grid_nx": bins.grid_nx,
                "grid_ny": bins.grid_ny, "grid_y_max": bins.grid_y_max,
                "overlay_family": args.overlay_family,
                "curve_b": args.curve_b},
        inputs=[args.cohort, args.fits], outputs=outputs,
        counts=summary.record_counts,
        timing={"load": t1 - t0, "aggregate": t2 - t1, "write": t3 - t2})
    print(f"wrote {len(outputs)} analysis files to {args.out} "
          f"(accepted={summary.record_counts['accepted']})")
    return EXIT_OK


def cmd_verify(args) -> int:
    t0 = time.perf_counter()
    results = run_checks(perturb=args.perturb)
    elapsed = time.perf_counter() - t0
    failed = [r for r in results if not r.passed]
    for r in results:
        status = "PASS" if r.passed else "FAIL"
        print(f"{status}  {r.name}: {r.detail} "
              f"(worst {r.worst_error:.3e}, tolerance {r.tolerance:.0e})")
    print(f"{len(results) - len(failed)}/{len(results)} checks passed "
          f"in {elapsed:.1f}s")
    return EXIT_OK if not failed else EXIT_VERIFY


def build_parser() -> _Parser:
    parser = _Parser(prog="citescale",
                     description="Citation-inequality analytics pipeline")
    parser.add_argument("--version", action="version",
                        version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    g = sub.add_parser("generate", help="write a synthetic citation cohort")
    g.add_argument("--n", type=int, required=True, help="number of researchers")
    grp = g.add_mutually_exclusive_group(required=True)
    grp.add_argument("--b", type=float, help="shape exponent for every researcher")
    grp.add_argument("--b-range", nargs=2, type=float, metavar=("LO", "HI"),
                     help="uniform shape exponent range")
    grp = g.add_mutually_exclusive_group(required=True)
    grp.add_argument("--npub", type=int, help="publications per researcher")
    grp.add_argument("--npub-range", nargs=2, type=int, metavar=("LO", "HI"),
                     help="uniform integer publication-count range")
    grp = g.add_mutually_exclusive_group(required=True)
    grp.add_argument("--mean-cit", type=float, help="mean citations per publication")
    grp.add_argument("--mean-cit-range", nargs=2, type=float, metavar=("LO", "HI"),
                     help="uniform mean-citation range")
    g.add_argument("--seed", type=int, default=0, help="RNG seed (default 0)")
    g.add_argument("--out", default=".", help="output directory (default .)")
    g.set_defaults(func=cmd_generate)

    f = sub.add_parser("fit", help="fit the tail law to every record")
    f.add_argument("cohort", help="cohort file from 'generate' or external data")
    f.add_argument("--b-min", type=float, default=1.025)
    f.add_argument("--b-max", type=float, default=8.0)
    f.add_argument("--b-step", type=float, default=0.025)
    f.add_argument("--s-cutoff", type=float, default=0.2)
    f.add_argument("--min-points", type=int, default=3)
    f.add_argument("--no-figures", action="store_true",
                   help="skip PNG rendering, keep data files only")
    f.add_argument("--out", default=".", help="output directory (default .)")
    f.set_defaults(func=cmd_fit)

    a = sub.add_parser("analyze", help="aggregate fits into figure data")
    a.add_argument("cohort", help="cohort file")
    a.add_argument("fits", help="fits.csv written by 'fit'")
    a.add_argument("--preset", choices=["strict", "relaxed", "none", "custom"],
                   default="strict", help="filter preset (default strict)")
    a.add_argument("--npub-min", type=int, help="custom preset: minimum publications")
    a.add_argument("--ncit-min", type=int, help="custom preset: minimum citations")
    a.add_argument("--b-bins", type=int, default=48)
    a.add_argument("--gini-bins", type=int, default=50)
    a.add_argument("--grid-nx", type=int, default=200)
    a.add_argument("--grid-ny", type=int, default=200)
    a.add_argument("--grid-ymax", type=float, default=3.0)
    a.add_argument("--curve-b", type=_float_list, default=[1.32, 1.58],
                   help="comma-separated shape exponents for overlay curves")
    a.add_argument("--overlay-family", choices=["tsallis-pareto", "exponential"],
                   default="tsallis-pareto",
                   help="tail-law family used for the overlay curves")
    a.add_argument("--no-figures", action="store_true",
                   help="skip PNG rendering, keep data files only")
    a.add_argument("--out", default=".", help="output directory (default .)")
    a.set_defaults(func=cmd_analyze)

    v = sub.add_parser("verify", help="run analytic identity checks")
    v.add_argument("--perturb", choices=list(CHECK_NAMES), default=None,
                   help="test hook: bias one named check to prove failures surface")
    v.set_defaults(func=cmd_verify)
    return parser


def _float_list(raw: str) -> list[float]:
    try:
        values = [float(tok) for tok in raw.split(",") if tok.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a comma-separated float list: {raw!r}")
    if not values:
        raise argparse.ArgumentTypeError("at least one exponent required")
    return values


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else EXIT_USAGE
    try:
        return args.func(args)
    except (CitescaleError, OSError, ValueError) as exc:
        print(f"citescale: error: {exc}", file=sys.stderr)
        return EXIT_DATA


def run() -> None:
    sys.exit(main())


if __name__ == "__main__":
    run()
