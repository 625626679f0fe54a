"""Command-line front end: synthesize, stats, preview, eval.

Exit codes: 0 success, 1 usage error, 2 data error.
"""
from __future__ import annotations

import argparse
import sys
from pathlib import Path

import cv2

from . import __version__, ingest, metrics
from .pipeline import SynthesisConfig, SynthesisManifest, SynthesisError, stats, synthesize
from .preview import contact_sheet


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="posepaste", description=__doc__)
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    p_syn = sub.add_parser("synthesize", help="composite donor objects onto pedestrians")
    p_syn.add_argument("--persons", required=True, help="pedestrian image directory")
    p_syn.add_argument("--donors", required=True, help="donor image directory")
    p_syn.add_argument(
        "--keypoints", nargs=2, metavar=("PERSONS_JSON", "DONORS_JSON"),
        help="annotation files; default: keypoints.json inside each directory",
    )
    p_syn.add_argument("--masks", help="donor mask directory (default: the donor directory)")
    p_syn.add_argument("--out", required=True, help="output directory")
    p_syn.add_argument("--seed", type=int, required=True, help="RNG seed (reproducible runs)")
    p_syn.add_argument("--bin", type=float, default=15.0, help="slope/height bucket size (default 15)")
    p_syn.add_argument("--no-scale-correct", action="store_true",
                       help="disable torso-length scale correction (default on)")
    p_syn.add_argument("--no-originals", action="store_true",
                       help="do not copy originals through (default: output is doubled)")
    p_syn.add_argument("--strict", action="store_true", help="abort on any per-image failure")
    p_syn.add_argument("--jobs", type=int, default=1, help="worker threads")

    p_stats = sub.add_parser("stats", help="report statistics for a synthesis run")
    p_stats.add_argument("--out", required=True, help="synthesis run directory")

    p_prev = sub.add_parser("preview", help="contact sheet of (original, fake) pairs")
    p_prev.add_argument("--out", required=True, help="synthesis run directory")
    p_prev.add_argument("--contact-sheet", default="4x4", metavar="WxH",
                        help="grid size, pairs per row x rows (default 4x4)")

    p_eval = sub.add_parser("eval", help="Rank-k / mAP from distances or embeddings")
    p_eval.add_argument("--dist", help="distance matrix file")
    p_eval.add_argument("--embeddings", nargs=2, metavar=("QUERY", "GALLERY"),
                        help="query and gallery embedding files")
    p_eval.add_argument("--protocol", choices=["market"], default="market")
    return parser


def _cmd_synthesize(args) -> int:
    persons_ann = args.keypoints[0] if args.keypoints else Path(args.persons) / "keypoints.json"
    donors_ann = args.keypoints[1] if args.keypoints else Path(args.donors) / "keypoints.json"
    persons, p_skipped = ingest.load_person_dataset(args.persons, persons_ann, strict=args.strict)
    donors, d_skipped = ingest.load_donor_dataset(args.donors, donors_ann, mask_dir=args.masks)
    cfg = SynthesisConfig(
        seed=args.seed,
        output_dir=args.out,
        bin_size=args.bin,
        scale_correct=not args.no_scale_correct,
        include_originals=not args.no_originals,
        strict=args.strict,
        jobs=args.jobs,
    )
    manifest = synthesize(persons, donors, cfg)
    n_ok = sum(1 for r in manifest.rows if not r.skip_reason)
    print(f"persons: {len(persons)} loaded, {len(p_skipped)} skipped")
    print(f"donors: {len(donors)} loaded, {len(d_skipped)} skipped")
    print(f"composites: {n_ok} written, {len(manifest.rows) - n_ok} skipped")
    print(f"manifest: {Path(args.out) / 'manifest.tsv'}")
    return 0


def _cmd_stats(args) -> int:
    manifest_path = Path(args.out) / "manifest.tsv"
    manifest = SynthesisManifest.from_tsv(manifest_path.read_text())
    report = stats(manifest)
    sys.stdout.write(report.to_text())
    (Path(args.out) / "stats.txt").write_text(report.to_text())
    return 0


def _cmd_preview(args) -> int:
    try:
        cols, rows = (int(v) for v in args.contact_sheet.lower().split("x"))
    except ValueError:
        raise UsageError(f"--contact-sheet expects WxH, got {args.contact_sheet!r}")
    if cols < 1 or rows < 1:
        raise UsageError("--contact-sheet dimensions must be >= 1")
    sheet = contact_sheet(args.out, cols, rows)
    out_path = Path(args.out) / "contact_sheet.png"
    cv2.imwrite(str(out_path), cv2.cvtColor(sheet, cv2.COLOR_RGB2BGR))
    print(f"wrote {out_path}")
    return 0


def _cmd_eval(args) -> int:
    if bool(args.dist) == bool(args.embeddings):
        raise UsageError("eval needs exactly one of --dist or --embeddings")
    if args.dist:
        e = metrics.load_distance_file(args.dist)
    else:
        e = metrics.eval_set_from_embeddings(args.embeddings[0], args.embeddings[1])
    result = metrics.evaluate(e)
    for k in (1, 5, 10):
        if k <= len(result.cmc):
            print(f"Rank-{k} {result.cmc[k - 1]:.4f}")
    print(f"mAP {result.mean_ap:.4f}")
    if result.num_excluded_queries:
        print(f"queries without valid matches (excluded): {result.num_excluded_queries}")
    return 0


def run(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if args.command == "synthesize":
            if args.bin <= 0:
                raise UsageError(f"--bin must be > 0, got {args.bin}")
            if args.seed < 0:
                raise UsageError(f"--seed must be >= 0, got {args.seed}")
            if args.jobs < 1:
                raise UsageError(f"--jobs must be >= 1, got {args.jobs}")
            return _cmd_synthesize(args)
        if args.command == "stats":
            return _cmd_stats(args)
        if args.command == "preview":
            return _cmd_preview(args)
        return _cmd_eval(args)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 1
    except (ingest.KeypointParseError, ingest.DatasetError, SynthesisError,
            OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
