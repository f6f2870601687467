"""Command-line entry point: ``mvsumm summarize | evaluate | synth``.

Exit codes: 0 success, 1 usage error, 2 data error, 3 solver divergence.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .dataset import load_dataset, read_events
from .errors import DataError, SolverDivergence
from .evaluation import score, write_scores
from .pipeline import MODES, PipelineConfig, run_pipeline, write_run
from .selection import LINK_REL, THRESHOLD_REL, read_summary
from .synth import load_spec, write_synth

EXIT_OK, EXIT_USAGE, EXIT_DATA, EXIT_DIVERGED = 0, 1, 2, 3


class _Parser(argparse.ArgumentParser):
    """argparse exits with 2 on bad usage; we reserve 2 for data errors."""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _lengths(text: str) -> tuple:
    try:
        values = tuple(int(x) for x in text.replace(",", " ").split())
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None
    if not values or min(values) < 1:
        raise argparse.ArgumentTypeError("summary lengths must be positive")
    return values


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="mvsumm", description="Multi-view frame summarization.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    s = sub.add_parser("summarize", help="run the pipeline on a dataset manifest")
    s.add_argument("--manifest", required=True, help="dataset manifest (JSON)")
    s.add_argument("--out", required=True, help="run directory")
    s.add_argument("--dim", type=int, default=None, help="embedding dimension (default: 2 x views)")
    s.add_argument("--gamma", type=float, default=5.0)
    s.add_argument("--rho", type=float, default=1.0)
    s.add_argument("--epsilon", type=float, default=1e-7)
    s.add_argument("--max-iter", type=int, default=2000)
    s.add_argument("--threshold", type=float, default=THRESHOLD_REL, help="relative row-norm cutoff")
    s.add_argument("--lengths", type=_lengths, default=(3, 4, 7), help="e.g. 3,4,7")
    s.add_argument("--mode", choices=MODES, default="multi")
    s.add_argument("--dump-intermediates", action="store_true", help="also write W, C_total, Y and Z")
    s.add_argument("--no-group", action="store_true", help="rank raw representatives without grouping")
    s.add_argument("--link", type=float, default=LINK_REL, help="relative coefficient that links representatives")
    s.add_argument("--workers", type=int, default=1, help="threads for the similarity solves")

    e = sub.add_parser("evaluate", help="score a summary against ground-truth events")
    e.add_argument("summary", help="summary file (.csv or .json)")
    e.add_argument("events", help="events CSV")
    e.add_argument("--out", default=None, help="scores file (default: next to the summary)")

    g = sub.add_parser("synth", help="generate a synthetic dataset")
    g.add_argument("spec", help="synth spec (JSON)")
    g.add_argument("--out", required=True, help="output directory")
    g.add_argument("--format", choices=("csv", "bin"), default="csv")
    return p


def cmd_summarize(args) -> int:
    try:
        cfg = PipelineConfig(
            manifest=args.manifest, dim=args.dim, gamma=args.gamma, rho=args.rho, epsilon=args.epsilon,
            max_iter=args.max_iter, threshold_rel=args.threshold, lengths=args.lengths, mode=args.mode,
            out=args.out, dump_intermediates=args.dump_intermediates, group=not args.no_group,
            link_rel=args.link, workers=args.workers,
        )
    except ValueError as exc:
        print(f"mvsumm: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    dataset = load_dataset(args.manifest)
    result = run_pipeline(dataset, cfg)
    out = write_run(result, args.out)
    print(f"{len(result.ranked)} ranked representatives ({len(result.representatives)} nonzero rows); "
          f"wrote {out}")
    return EXIT_OK


def cmd_evaluate(args) -> int:
    summary = read_summary(args.summary)
    events = read_events(args.events)
    if not events:
        raise DataError(f"{args.events}: no events")
    result = score(summary, events)
    out = Path(args.out) if args.out else Path(args.summary).with_suffix(".scores.json")
    write_scores(out, result, events)
    print("P / R / F")
    print(result.table_row())
    return EXIT_OK


def cmd_synth(args) -> int:
    manifest = write_synth(load_spec(args.spec), args.out, fmt=args.format)
    print(f"wrote {manifest}")
    return EXIT_OK


COMMANDS = {"summarize": cmd_summarize, "evaluate": cmd_evaluate, "synth": cmd_synth}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return COMMANDS[args.command](args)
    except SolverDivergence as exc:
        print(f"mvsumm: solver diverged: {exc}", file=sys.stderr)
        return EXIT_DIVERGED
    except (DataError, FileNotFoundError, IsADirectoryError) as exc:
        print(f"mvsumm: data error: {exc}", file=sys.stderr)
        return EXIT_DATA


if __name__ == "__main__":
    sys.exit(main())
