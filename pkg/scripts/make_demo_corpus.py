#!/usr/bin/env python3
"""Build a synthetic n-way parallel demo corpus (audio + manifest + lexicon).

Example:
  python scripts/make_demo_corpus.py --out demo/corpus --languages en,nl,de --groups 50
  csforge run --manifest demo/corpus/manifest.jsonl --lexicon demo/corpus/lexicon.tsv \
      --languages en,nl,de --out demo/out --seed 42
"""

import argparse

from csforge.synthdata import DEMO_LANGUAGES, build_synthetic_corpus


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--out", required=True, help="corpus directory to create")
    parser.add_argument(
        "--languages",
        default="en,nl",
        help="comma-separated codes, or 'demo23' for the full in-domain set",
    )
    parser.add_argument("--groups", type=int, default=50, help="number of parallel sentences")
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--seconds-per-char", type=float, default=0.03)
    parser.add_argument("--duration", type=float, default=None, help="fix every utterance near this many seconds")
    args = parser.parse_args()

    languages = DEMO_LANGUAGES if args.languages == "demo23" else tuple(args.languages.split(","))
    corpus = build_synthetic_corpus(
        args.out,
        languages=languages,
        n_groups=args.groups,
        seed=args.seed,
        seconds_per_char=args.seconds_per_char,
        target_duration_s=args.duration,
    )
    print(f"manifest: {corpus.manifest_path}")
    print(f"lexicon:  {corpus.lexicon_path}")
    print(f"{len(corpus.languages)} languages x {corpus.n_groups} groups")


if __name__ == "__main__":
    main()
