#!/usr/bin/env python3
"""Measure end-to-end generation throughput with the reference backends.

Synthesizes a corpus of ~10 s utterances at 16 kHz and times a full run.
"""

import argparse
import tempfile
import time
from pathlib import Path

from csforge.config import RunConfig
from csforge.pipeline import load_records, run
from csforge.synthdata import build_synthetic_corpus


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--records", type=int, default=200)
    parser.add_argument("--workers", type=int, default=4)
    parser.add_argument("--duration", type=float, default=10.0)
    args = parser.parse_args()

    with tempfile.TemporaryDirectory(prefix="csforge-bench-") as tmp:
        tmp = Path(tmp)
        corpus = build_synthetic_corpus(
            tmp / "corpus",
            languages=("en", "nl"),
            n_groups=args.records,
            seed=2,
            target_duration_s=args.duration,
        )
        config = RunConfig(
            manifest=str(corpus.manifest_path),
            out=str(tmp / "out"),
            languages=("en", "nl"),
            seed=42,
            workers=args.workers,
            lexicon=str(corpus.lexicon_path),
        )
        t0 = time.perf_counter()
        code = run(config)
        elapsed = time.perf_counter() - t0
        records, _ = load_records(tmp / "out" / "manifest.jsonl")
    print(
        f"exit {code}: {len(records)} records x {args.duration:.0f}s audio "
        f"in {elapsed:.2f}s with {args.workers} workers "
        f"= {len(records) / elapsed:.1f} records/s"
    )


if __name__ == "__main__":
    main()
