"""Deterministic RNG derivation.

Every random decision in the pipeline draws from an RNG derived from the
run seed plus stable string keys (sentence id, language pair, ...), so
output never depends on scheduling or batch composition.
"""

import hashlib
import random


def derive_seed(*parts: object) -> int:
    """Collapse (seed, key, key, ...) into a stable 64-bit integer."""
    raw = "\x1f".join(str(p) for p in parts).encode("utf-8")
    return int.from_bytes(hashlib.sha256(raw).digest()[:8], "little")


def derive_rng(*parts: object) -> random.Random:
    return random.Random(derive_seed(*parts))
