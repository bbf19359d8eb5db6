"""bench: measure fast convolution variants against the im2row baseline.

Exit codes: 0 on success, 1 when --check finds a tolerance violation,
2 on bad input (unknown network, malformed layer file, bad arguments).
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .bench import (
    BASELINE_VARIANT,
    DEFAULT_SEED,
    VARIANTS,
    check_violations,
    emit_report,
    load_layer_table,
    run_network_bench,
)
from .errors import InputError, WinoconvError
from .figures import render_report_figures
from .networks import canonical_name, network_names

# Reported Cortex-A73 speedups over im2row for these kernel families,
# (single thread, four threads).  Printed next to measured numbers as a
# sanity reference; hardware differences make them incomparable in any
# strict sense.
A73_REFERENCE = {
    ("vgg16", "3x3"): (2.7, 3.5),
    ("vgg19", "3x3"): (2.8, 3.5),
    ("googlenet", "3x3"): (2.6, 4.1),
    ("googlenet", "5x5"): (2.3, 3.2),
    ("inception-v3", "1x7"): (2.0, 2.1),
    ("inception-v3", "7x1"): (2.0, 2.1),
    ("inception-v3", "3x3"): (3.1, 3.8),
    ("inception-v3", "5x5"): (2.7, 2.8),
    ("squeezenet", "3x3"): (2.2, 2.6),
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="bench",
        description="Benchmark fast convolution variants against im2row+GEMM.",
    )
    source = parser.add_mutually_exclusive_group(required=True)
    source.add_argument(
        "--network",
        help=f"builtin layer table: {', '.join(network_names())}",
    )
    source.add_argument("--layers", help="CSV file of layer shapes")
    parser.add_argument(
        "--variant",
        action="append",
        choices=[*VARIANTS, BASELINE_VARIANT],
        help="fast variant to measure (repeatable; default: all applicable)",
    )
    parser.add_argument("--reps", type=int, default=3, help="timed runs per stage")
    parser.add_argument(
        "--check",
        action="store_true",
        help="verify every result against the direct oracle",
    )
    parser.add_argument("--threads", type=int, default=1, help="GEMM batch threads")
    parser.add_argument(
        "--scale", type=int, default=1, help="divide channel counts by this"
    )
    parser.add_argument("--format", choices=("csv", "md"), default="csv")
    parser.add_argument("--out", type=Path, help="report file (default: stdout)")
    parser.add_argument("--seed", type=int, default=DEFAULT_SEED)
    return parser


def _family(variant: str) -> str:
    _, _, k_h, k_w = VARIANTS[variant]
    return f"{k_h}x{k_w}"


def _print_summary(network: str, records, threads: int) -> None:
    """Measured per-kernel-family speedup, with published reference
    numbers where we have them.
    """
    base_total = {
        r.layer: r.t_total_ns for r in records if r.variant == BASELINE_VARIANT
    }
    best: dict[str, dict] = {}
    for rec in records:
        if rec.variant == BASELINE_VARIANT:
            continue
        fam = _family(rec.variant)
        cur = best.setdefault(fam, {})
        if rec.layer not in cur or rec.macs < cur[rec.layer].macs:
            cur[rec.layer] = rec
    if not best:
        return
    print("speedup summary (fast layers, per kernel family):", file=sys.stderr)
    for fam in sorted(best):
        rows = best[fam].values()
        fast_ns = sum(r.t_total_ns for r in rows)
        base_ns = sum(base_total[r.layer] for r in rows)
        measured = base_ns / fast_ns if fast_ns else float("inf")
        line = f"  {fam}: {measured:.2f}x over im2row ({threads} thread(s))"
        ref = A73_REFERENCE.get((network, fam)) if network else None
        if ref:
            line += (
                f"; published Cortex-A73 reference: {ref[0]:.1f}x single-thread, "
                f"{ref[1]:.1f}x four-thread"
            )
        print(line, file=sys.stderr)


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        for flag in ("reps", "threads", "scale"):
            if getattr(args, flag) < 1:
                raise InputError(f"--{flag} must be >= 1, got {getattr(args, flag)}")
        layers = load_layer_table(args.network if args.network else args.layers)
        variants = [v for v in (args.variant or VARIANTS) if v != BASELINE_VARIANT]
        records = run_network_bench(
            layers,
            variants,
            scale=args.scale,
            reps=args.reps,
            check=args.check,
            threads=args.threads,
            seed=args.seed,
        )
        text = emit_report(records, args.format)
        if args.out:
            args.out.write_text(text)
            print(f"wrote {args.out}", file=sys.stderr)
            for path in render_report_figures(records, args.out):
                print(f"wrote {path}", file=sys.stderr)
        else:
            sys.stdout.write(text)
        network = canonical_name(args.network) if args.network else None
        _print_summary(network, records, args.threads)
        if args.check:
            violations = check_violations(records)
            if violations:
                for msg in violations:
                    print(f"check failed: {msg}", file=sys.stderr)
                return 1
    except WinoconvError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
