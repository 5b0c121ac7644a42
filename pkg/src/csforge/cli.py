"""csforge command line: run / validate / stats."""

from __future__ import annotations

import argparse
import csv
import sys
from pathlib import Path

from .config import RunConfig, apply_overrides, load_config, validate_config
from .metrics import aggregate_stats, per_pair_rows
from .pipeline import EXIT_FATAL, load_records, run


def _add_override_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--manifest", help="input corpus manifest (JSONL)")
    parser.add_argument("--out", help="output directory")
    parser.add_argument("--seed", type=int, help="run seed")
    parser.add_argument("--pairs", help="comma-separated language pairs, e.g. en-nl,de-es")
    parser.add_argument("--languages", help="comma-separated language codes to enumerate")
    parser.add_argument("--max-subs", dest="max_subs", type=int, help="max substitutions per record")
    parser.add_argument("--pos", help="comma-separated POS pool, e.g. noun,verb,interjection")
    parser.add_argument("--matrix-policy", dest="matrix_policy", choices=["random", "fixed_a", "fixed_b"])
    parser.add_argument("--crossfade-ms", dest="crossfade_ms", type=float)
    parser.add_argument("--per-pair-cap", dest="per_pair_cap", type=int)
    parser.add_argument("--workers", type=int)
    parser.add_argument("--peak-dbfs", dest="peak_dbfs", type=float)
    parser.add_argument("--low-hz", dest="low_hz", type=float)
    parser.add_argument("--high-hz", dest="high_hz", type=float)
    parser.add_argument("--mapper", help="builtin, cmd:<command>, or URL")
    parser.add_argument("--aligner", help="builtin, cmd:<command>, or URL")
    parser.add_argument("--vc", help="builtin, cmd:<command>, or URL")
    parser.add_argument("--lexicon", help="TSV lexicon for the builtin mapper")
    parser.add_argument("--no-resume", dest="resume", action="store_false", default=None)


def _config_from_args(args) -> RunConfig:
    config = load_config(args.config) if args.config else RunConfig()
    overrides = {
        key: getattr(args, key)
        for key in (
            "manifest", "out", "seed", "pairs", "languages", "max_subs", "pos",
            "matrix_policy", "crossfade_ms", "per_pair_cap", "workers", "peak_dbfs",
            "low_hz", "high_hz", "mapper", "aligner", "vc", "lexicon", "resume",
        )
        if hasattr(args, key)
    }
    return apply_overrides(config, overrides)


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(prog="csforge", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    run_p = sub.add_parser("run", help="generate a code-switching corpus")
    run_p.add_argument("--config", help="run configuration (TOML)")
    _add_override_flags(run_p)

    val_p = sub.add_parser("validate", help="check a configuration without running")
    val_p.add_argument("--config", required=True)
    _add_override_flags(val_p)

    stat_p = sub.add_parser("stats", help="recompute statistics from an output manifest")
    stat_p.add_argument("--manifest", required=True)
    stat_p.add_argument("--per-pair-csv", dest="per_pair_csv", help="also write per-pair CSV here")
    stat_p.add_argument("--json", dest="json_out", help="write the stats report here instead of stdout")

    args = parser.parse_args(argv)

    if args.command == "run":
        return run(_config_from_args(args))

    if args.command == "validate":
        problems = validate_config(_config_from_args(args))
        if problems:
            for p in problems:
                print(p)
            return EXIT_FATAL
        print("OK")
        return 0

    if args.command == "stats":
        records, durations = load_records(args.manifest)
        stats = aggregate_stats(records, durations)
        payload = stats.to_json()
        if args.json_out:
            Path(args.json_out).write_text(payload + "\n")
        else:
            print(payload)
        if args.per_pair_csv:
            rows = per_pair_rows(records, durations)
            with open(args.per_pair_csv, "w", newline="", encoding="utf-8") as fh:
                writer = csv.DictWriter(
                    fh, fieldnames=["pair", "n_utt", "duration_s", "mean_cmi", "mean_i_index"]
                )
                writer.writeheader()
                writer.writerows(rows)
        return 0

    return EXIT_FATAL


if __name__ == "__main__":
    sys.exit(main())
