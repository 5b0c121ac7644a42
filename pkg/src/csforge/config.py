"""Run configuration: TOML file plus CLI overrides of the same names.

A config file is the single reproducibility artifact for a run; every
field can also be set from the command line. ``validate_config`` returns
all diagnostics at once instead of stopping at the first.
"""

from __future__ import annotations

import sys
from dataclasses import dataclass, fields, replace
from pathlib import Path

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

from .sourcemix import MATRIX_POLICIES
from .wordmap import POSCategory

DEFAULT_POS = ("noun", "verb", "interjection")


@dataclass(frozen=True)
class RunConfig:
    manifest: str = ""
    out: str = ""
    languages: tuple[str, ...] = ()
    pairs: tuple[str, ...] = ()  # "xx-yy" strings; overrides enumeration
    seed: int = 0
    max_subs: int = 3
    pos: tuple[str, ...] = DEFAULT_POS
    matrix_policy: str = "random"
    crossfade_ms: float = 0.0
    per_pair_cap: int = 0  # 0 = no cap
    workers: int = 1
    peak_dbfs: float = -1.0
    low_hz: float = 80.0
    high_hz: float = 7000.0
    filter_order: int = 8
    mapper: str = "builtin"
    aligner: str = "builtin"
    vc: str = "builtin"
    lexicon: str = ""
    aligner_romanized: bool = True
    min_reference_s: float = 2.0
    backend_timeout_s: float = 60.0
    cache_mappings: bool = True
    resume: bool = True

    def pos_pool(self) -> frozenset:
        return frozenset(POSCategory.parse(p) for p in self.pos)


_LIST_FIELDS = {"languages", "pairs", "pos"}


def load_config(path: str | Path) -> RunConfig:
    with open(path, "rb") as fh:
        data = tomllib.load(fh)
    known = {f.name for f in fields(RunConfig)}
    unknown = set(data) - known
    if unknown:
        raise ValueError(f"unknown config keys: {sorted(unknown)}")
    for key in _LIST_FIELDS & set(data):
        data[key] = tuple(data[key])
    return RunConfig(**data)


def apply_overrides(config: RunConfig, overrides: dict) -> RunConfig:
    updates = {}
    for key, value in overrides.items():
        if value is None:
            continue
        if key in _LIST_FIELDS and isinstance(value, str):
            value = tuple(v.strip() for v in value.split(",") if v.strip())
        updates[key] = value
    return replace(config, **updates) if updates else config


def validate_config(config: RunConfig) -> list[str]:
    """All problems with the config, empty when runnable."""
    problems = []
    if not config.manifest:
        problems.append("manifest: no manifest path configured")
    elif not Path(config.manifest).is_file():
        problems.append(f"manifest: {config.manifest!r} does not exist")
    if not config.out:
        problems.append("out: no output directory configured")
    if config.workers < 1:
        problems.append(f"workers: must be >= 1, got {config.workers}")
    if config.max_subs < 1:
        problems.append(f"max_subs: must be >= 1, got {config.max_subs}")
    if not 0 < config.low_hz < config.high_hz:
        problems.append(f"cutoffs: need 0 < low_hz < high_hz, got {config.low_hz}/{config.high_hz}")
    if config.filter_order < 1:
        problems.append(f"filter_order: must be >= 1, got {config.filter_order}")
    if config.matrix_policy not in MATRIX_POLICIES:
        problems.append(f"matrix_policy: {config.matrix_policy!r} not in {MATRIX_POLICIES}")
    if not 0 <= config.crossfade_ms <= 20:
        problems.append(f"crossfade_ms: must be in [0, 20], got {config.crossfade_ms}")
    if config.peak_dbfs > 0:
        problems.append(f"peak_dbfs: must be <= 0 dBFS, got {config.peak_dbfs}")
    if config.per_pair_cap < 0:
        problems.append(f"per_pair_cap: must be >= 0, got {config.per_pair_cap}")
    if not config.pos:
        problems.append("pos: POS pool must not be empty")
    for p in config.pos:
        try:
            POSCategory.parse(p)
        except ValueError as exc:
            problems.append(f"pos: {exc}")
    for pair in config.pairs:
        parts = pair.split("-")
        if len(parts) != 2 or not all(parts) or parts[0] == parts[1]:
            problems.append(f"pairs: {pair!r} is not a valid xx-yy pair")
    if not config.pairs and len(set(config.languages)) == 1:
        problems.append("languages: need at least 2 languages (or explicit pairs)")
    for role in ("mapper", "aligner", "vc"):
        spec = getattr(config, role)
        if spec != "builtin" and not spec.startswith(("cmd:", "http://", "https://")):
            problems.append(f"{role}: {spec!r} is not builtin, cmd:... or a URL")
    if config.mapper == "builtin":
        if not config.lexicon:
            problems.append("lexicon: builtin mapper needs a lexicon TSV path")
        elif not Path(config.lexicon).is_file():
            problems.append(f"lexicon: {config.lexicon!r} does not exist")
    if config.min_reference_s <= 0:
        problems.append(f"min_reference_s: must be > 0, got {config.min_reference_s}")
    if config.backend_timeout_s <= 0:
        problems.append(f"backend_timeout_s: must be > 0, got {config.backend_timeout_s}")
    return problems
