#!/usr/bin/env python3
"""End-to-end demo: synthesize a parallel corpus, run the full pipeline with
the built-in reference backends, and print the resulting statistics."""

import argparse
import json
from pathlib import Path

from csforge.config import RunConfig
from csforge.pipeline import run
from csforge.synthdata import build_synthetic_corpus


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--workdir", default="demo", help="directory for corpus + output")
    parser.add_argument("--languages", default="en,nl,de")
    parser.add_argument("--groups", type=int, default=30)
    parser.add_argument("--seed", type=int, default=42)
    parser.add_argument("--workers", type=int, default=2)
    args = parser.parse_args()

    workdir = Path(args.workdir)
    corpus = build_synthetic_corpus(
        workdir / "corpus",
        languages=tuple(args.languages.split(",")),
        n_groups=args.groups,
        seed=args.seed,
    )
    config = RunConfig(
        manifest=str(corpus.manifest_path),
        out=str(workdir / "out"),
        languages=corpus.languages,
        seed=args.seed,
        workers=args.workers,
        lexicon=str(corpus.lexicon_path),
    )
    code = run(config)
    if code == 0:
        stats = json.loads((workdir / "out" / "stats.json").read_text())
        print(json.dumps(stats, indent=2, sort_keys=True))
    return code


if __name__ == "__main__":
    raise SystemExit(main())
