"""Command-line front end: simulate, process, fit, report.

Thin argparse wiring over :mod:`chansounder.campaign` and
:mod:`chansounder.synth`; all real work happens there.  Exit code 0 on
success, 1 on any toolkit or file-system error.
"""

from __future__ import annotations

import argparse
import sys
from dataclasses import replace
from pathlib import Path

from .campaign import (
    CampaignManifest,
    DistanceMode,
    default_manifest,
    load_manifest,
    read_pl_samples,
    fit_samples_to_json,
    run_pipeline,
    run_report,
)
from .errors import ChanSounderError
from .synth import default_truth, generate_campaign, load_truth


def _add_manifest_args(sub: argparse.ArgumentParser) -> None:
    sub.add_argument("--manifest", type=Path, help="campaign manifest JSON")
    g = sub.add_argument_group("manifest overrides")
    g.add_argument("--bands-ghz", help="comma-separated bands in GHz, e.g. 2.4,5,6")
    g.add_argument("--bandwidth-hz", type=float)
    g.add_argument("--record-len", type=int)
    g.add_argument("--reps-per-position", type=int)
    g.add_argument("--snapshots-per-rep", type=int)
    g.add_argument("--distance-mode", choices=[m.value for m in DistanceMode])
    g.add_argument("--snr-gate-db", type=float)
    g.add_argument("--peak-window-db", type=float)
    g.add_argument("--floor-margin-db", type=float)
    g.add_argument("--deconv-floor-db", type=float)


def _resolve_manifest(args, captures: Path | None = None) -> CampaignManifest:
    if args.manifest is not None:
        manifest = load_manifest(args.manifest)
    elif captures is not None and (captures / "manifest.json").exists():
        manifest = load_manifest(captures / "manifest.json")
    else:
        manifest = default_manifest(getattr(args, "include_nlos", False))

    changes = {}
    if args.bands_ghz:
        changes["bands_ghz"] = [float(b) for b in args.bands_ghz.split(",")]
    for name in ("bandwidth_hz", "record_len", "reps_per_position", "snapshots_per_rep"):
        value = getattr(args, name)
        if value is not None:
            changes[name] = value
    if args.distance_mode:
        changes["distance_mode"] = DistanceMode(args.distance_mode)
    th_changes = {}
    for name in ("snr_gate_db", "peak_window_db", "floor_margin_db", "deconv_floor_db"):
        value = getattr(args, name)
        if value is not None:
            th_changes[name] = value
    if th_changes:
        changes["thresholds"] = replace(manifest.thresholds, **th_changes)
    return replace(manifest, **changes) if changes else manifest


def _cmd_simulate(args) -> int:
    manifest = _resolve_manifest(args)
    truth = load_truth(args.truth) if args.truth else default_truth()
    out = generate_campaign(manifest, truth, args.seed, args.out)
    n = len(manifest.positions) * len(manifest.bands_ghz) * manifest.reps_per_position
    print(f"wrote {n} measurement captures to {out}")
    return 0


def _cmd_process(args) -> int:
    manifest = _resolve_manifest(args, captures=args.captures)
    csv_path, summary_path = run_pipeline(manifest, args.captures, args.out)
    print(f"wrote {csv_path} and {summary_path}")
    return 0


def _cmd_fit(args) -> int:
    samples = read_pl_samples(args.positions)
    out_dir = args.out if args.out is not None else args.positions.parent
    out_dir.mkdir(parents=True, exist_ok=True)
    path = fit_samples_to_json(samples, out_dir / "fits.json")
    print(f"wrote {path}")
    return 0


def _cmd_report(args) -> int:
    manifest = _resolve_manifest(args, captures=args.captures)
    paths = run_report(manifest, args.captures, args.out)
    print(f"wrote {len(paths)} report files to {paths[0].parent}")
    return 0


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="chansounder",
        description="Channel-sounding campaign simulation and batch analysis.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", help="generate a synthetic capture tree")
    _add_manifest_args(p)
    p.add_argument("--truth", type=Path, help="truth parameter JSON")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", type=Path, required=True, help="capture output directory")
    p.add_argument(
        "--include-nlos",
        action="store_true",
        help="add the NLOS position list (default manifest only)",
    )
    p.set_defaults(func=_cmd_simulate)

    p = sub.add_parser("process", help="captures -> position CSV + summary")
    _add_manifest_args(p)
    p.add_argument("--captures", type=Path, required=True, help="capture tree root")
    p.add_argument("--out", type=Path, help="report directory (default: captures/reports)")
    p.set_defaults(func=_cmd_process)

    p = sub.add_parser("fit", help="position CSV -> PL model fits JSON")
    p.add_argument("--positions", type=Path, required=True, help="position CSV")
    p.add_argument("--out", type=Path, help="output directory")
    p.set_defaults(func=_cmd_fit)

    p = sub.add_parser("report", help="captures -> full report with plot data")
    _add_manifest_args(p)
    p.add_argument("--captures", type=Path, required=True, help="capture tree root")
    p.add_argument("--out", type=Path, help="report directory (default: captures/reports)")
    p.set_defaults(func=_cmd_report)
    return parser


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ChanSounderError, OSError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
