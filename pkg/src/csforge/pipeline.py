"""Run orchestration: preprocess, map, align, generate, unify, emit.

Records are generated by a bounded worker pool; all randomness is derived
per record from (seed, sentence_id, language pair), and manifest lines are
written by a single writer in task order, so output is byte-identical
regardless of worker count. The done-log makes a crashed run resumable:
a record id is appended only after its WAV and manifest line are on disk.
"""

from __future__ import annotations

import json
import threading
from collections import Counter
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path

from .align import align
from .audio import AudioBuffer, bandpass_filter, normalize_amplitude, read_wav, write_wav
from .backends import (
    BackendEndpoint,
    IdentityConverter,
    LexiconMapper,
    ProtocolClient,
    UniformAligner,
    parse_endpoint,
)
from .config import RunConfig, validate_config
from .corpus import Corpus, LanguagePair, Utterance, enumerate_language_pairs, load_manifest, sample_equivalent_pairs
from .errors import (
    BackendMalformedResponse,
    BackendTimeout,
    BackendUnavailable,
    DegenerateConversion,
    InvalidCutoff,
    MalformedWav,
    ManifestParseError,
    ProtocolError,
    RecordSkip,
    TooFewLanguages,
    UnmappableCharacter,
    UnparsableDocument,
)
from .metrics import aggregate_stats
from .seeding import derive_rng
from .sourcemix import CSRecord, GenerationParams, Substitution, generate_cs_sample, with_audio_path, with_flags
from .vc import VCRequest, unify_style
from .wordmap import POSCategory, WordPair, postprocess_mapping, request_mapping

EXIT_OK = 0
EXIT_FATAL = 1
EXIT_EMPTY = 2


@dataclass(frozen=True)
class Task:
    index: int
    pair: LanguagePair
    sentence_id: str
    utt_a: Utterance
    utt_b: Utterance

    @property
    def done_key(self) -> str:
        return f"{self.sentence_id}:{self.pair}"


@dataclass
class Clients:
    mapper: ProtocolClient
    aligner: ProtocolClient
    vc: ProtocolClient

    def close(self):
        for client in (self.mapper, self.aligner, self.vc):
            client.close()


def build_clients(config: RunConfig) -> Clients:
    timeout = config.backend_timeout_s

    def make(role: str, spec: str, handler_factory, romanized: bool, in_flight: int):
        if spec == "builtin":
            endpoint = BackendEndpoint(
                transport="builtin",
                requires_romanization=romanized,
                timeout_s=timeout,
                max_in_flight=in_flight,
            )
            return ProtocolClient(endpoint, handler_factory())
        return ProtocolClient(
            parse_endpoint(spec, requires_romanization=romanized, timeout_s=timeout, max_in_flight=in_flight)
        )

    mapper = make("mapper", config.mapper, lambda: LexiconMapper.from_tsv(config.lexicon), False, 4)
    aligner = make(
        "aligner",
        config.aligner,
        UniformAligner,
        config.aligner_romanized if config.aligner != "builtin" else True,
        4,
    )
    vc = make("vc", config.vc, IdentityConverter, False, 2)
    return Clients(mapper=mapper, aligner=aligner, vc=vc)


def plan_tasks(config: RunConfig, corpus: Corpus) -> list[Task]:
    if config.pairs:
        pairs = sorted(LanguagePair.of(*p.split("-")) for p in config.pairs)
    else:
        langs = config.languages or sorted(corpus.languages())
        pairs = enumerate_language_pairs(langs)
    sentence_of = {
        utt.utt_id: g.sentence_id for g in corpus.groups for utt in g.members.values()
    }
    tasks: list[Task] = []
    for pair in pairs:
        rng = derive_rng(config.seed, "sample", str(pair))
        sampled = sample_equivalent_pairs(corpus, pair, rng)
        if config.per_pair_cap:
            sampled = sampled[: config.per_pair_cap]
        for utt_a, utt_b in sampled:
            tasks.append(
                Task(
                    index=len(tasks),
                    pair=pair,
                    sentence_id=sentence_of[utt_a.utt_id],
                    utt_a=utt_a,
                    utt_b=utt_b,
                )
            )
    return tasks


class _Generator:
    """Per-run state shared by workers: caches, clients, parameters."""

    def __init__(self, config: RunConfig, clients: Clients, out_dir: Path):
        self.config = config
        self.clients = clients
        self.out_dir = out_dir
        self.params = GenerationParams(
            n_max=config.max_subs,
            pos_pool=config.pos_pool(),
            matrix_policy=config.matrix_policy,
            crossfade_ms=config.crossfade_ms,
            seed=config.seed,
        )
        self._prep_cache: dict[str, AudioBuffer] = {}
        self._map_cache: dict[tuple, dict] = {}
        self._lock = threading.Lock()

    def preprocess(self, utt: Utterance) -> AudioBuffer:
        with self._lock:
            cached = self._prep_cache.get(utt.utt_id)
        if cached is not None:
            return cached
        buf = read_wav(utt.audio_path)
        buf = bandpass_filter(
            buf, self.config.low_hz, self.config.high_hz, self.config.filter_order
        )
        if len(buf):
            buf = normalize_amplitude(buf, self.config.peak_dbfs)
        with self._lock:
            self._prep_cache[utt.utt_id] = buf
        return buf

    def mapping(self, task: Task) -> dict:
        key = (task.utt_a.language, task.utt_b.language, task.utt_a.transcript, task.utt_b.transcript)
        if self.config.cache_mappings:
            with self._lock:
                cached = self._map_cache.get(key)
            if cached is not None:
                return cached
        raw = request_mapping(
            self.clients.mapper,
            task.utt_a.language,
            task.utt_b.language,
            task.utt_a.transcript,
            task.utt_b.transcript,
        )
        if self.config.cache_mappings:
            with self._lock:
                self._map_cache[key] = raw
        return raw

    def process(self, task: Task):
        """Returns (record, duration_s) or raises a per-record error."""
        audio_a = self.preprocess(task.utt_a)
        audio_b = self.preprocess(task.utt_b)
        raw = self.mapping(task)
        word_map, _ = postprocess_mapping(raw, task.utt_a.transcript, task.utt_b.transcript)
        alignments_a = align(self.clients.aligner, audio_a, task.utt_a.transcript, task.utt_a.language)
        alignments_b = align(self.clients.aligner, audio_b, task.utt_b.transcript, task.utt_b.language)
        rng = derive_rng(self.config.seed, "record", task.sentence_id, str(task.pair))
        cs_audio, record = generate_cs_sample(
            task.sentence_id,
            task.utt_a,
            task.utt_b,
            audio_a,
            audio_b,
            word_map,
            alignments_a,
            alignments_b,
            self.params,
            rng,
        )
        reference = audio_a if record.matrix_lang == task.utt_a.language else audio_b
        try:
            cs_audio = unify_style(
                self.clients.vc,
                VCRequest(cs_audio, reference, min_reference_s=self.config.min_reference_s),
                target_peak_dbfs=self.config.peak_dbfs,
            )
        except DegenerateConversion:
            record = with_flags(record, "vc_degenerate_skipped")
        rel_path = f"audio/{record.record_id}.wav"
        write_wav(cs_audio, self.out_dir / rel_path)
        return with_audio_path(record, rel_path), cs_audio.duration_seconds


_SKIP_REASONS = {
    UnmappableCharacter: "unmappable_character",
    UnparsableDocument: "mapper_document_error",
    BackendUnavailable: "backend_error",
    BackendTimeout: "backend_error",
    BackendMalformedResponse: "backend_error",
    ProtocolError: "backend_error",
    MalformedWav: "unreadable_audio",
    InvalidCutoff: "invalid_cutoff",
}


def _skip_reason(exc: Exception) -> str | None:
    if isinstance(exc, RecordSkip):
        return exc.reason
    for etype, reason in _SKIP_REASONS.items():
        if isinstance(exc, etype):
            return reason
    if isinstance(exc, OSError):
        return "unreadable_audio"
    return None


def record_to_json(record: CSRecord, duration_s: float) -> dict:
    matrix_is_a = record.matrix_lang < record.embedded_lang
    return {
        "record_id": record.record_id,
        "sentence_id": record.sentence_id,
        "matrix_lang": record.matrix_lang,
        "embedded_lang": record.embedded_lang,
        "cs_text": record.cs_text,
        "audio_path": record.audio_path,
        "substitutions": [
            {
                "matrix_text": s.pair.side(matrix_is_a),
                "embedded_text": s.pair.side(not matrix_is_a),
                "pos": s.pair.pos.value,
                "matrix_span": [s.matrix_span.start_s, s.matrix_span.end_s],
                "embedded_span": [s.embedded_span.start_s, s.embedded_span.end_s],
            }
            for s in record.substitutions
        ],
        "cmi": record.cmi,
        "i_index": record.i_index,
        "token_langs": list(record.token_langs),
        "flags": list(record.flags),
        "duration_s": duration_s,
    }


def record_from_json(obj: dict) -> tuple[CSRecord, float]:
    from .audio import TimeSpan

    matrix_is_a = obj["matrix_lang"] < obj["embedded_lang"]
    subs = []
    for s in obj.get("substitutions", []):
        side_a = s["matrix_text"] if matrix_is_a else s["embedded_text"]
        side_b = s["embedded_text"] if matrix_is_a else s["matrix_text"]
        subs.append(
            Substitution(
                pair=WordPair(side_a=side_a, side_b=side_b, pos=POSCategory.parse(s["pos"])),
                matrix_span=TimeSpan(*s["matrix_span"]),
                embedded_span=TimeSpan(*s["embedded_span"]),
            )
        )
    record = CSRecord(
        record_id=obj["record_id"],
        sentence_id=obj["sentence_id"],
        matrix_lang=obj["matrix_lang"],
        embedded_lang=obj["embedded_lang"],
        cs_text=obj["cs_text"],
        audio_path=obj["audio_path"],
        substitutions=tuple(subs),
        cmi=obj["cmi"],
        i_index=obj["i_index"],
        token_langs=tuple(obj["token_langs"]),
        flags=tuple(obj.get("flags", [])),
    )
    return record, float(obj.get("duration_s", 0.0))


def load_records(manifest_path: str | Path) -> tuple[list[CSRecord], dict[str, float]]:
    records = []
    durations = {}
    with open(manifest_path, encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if not line:
                continue
            record, duration = record_from_json(json.loads(line))
            records.append(record)
            durations[record.record_id] = duration
    return records, durations


def run(config: RunConfig, log=print) -> int:
    problems = validate_config(config)
    if problems:
        for p in problems:
            log(f"config error: {p}")
        return EXIT_FATAL

    out_dir = Path(config.out)
    (out_dir / "audio").mkdir(parents=True, exist_ok=True)
    try:
        corpus = load_manifest(
            config.manifest, languages=set(config.languages) or None
        )
    except (ManifestParseError, OSError) as exc:
        log(f"fatal: {exc}")
        return EXIT_FATAL

    try:
        clients = build_clients(config)
    except (OSError, ValueError) as exc:
        log(f"fatal: {exc}")
        return EXIT_FATAL

    try:
        tasks = plan_tasks(config, corpus)
    except TooFewLanguages as exc:
        log(f"fatal: {exc}")
        return EXIT_FATAL

    n_pairs = len({str(t.pair) for t in tasks}) if tasks else 0
    done_path = out_dir / "done.log"
    manifest_path = out_dir / "manifest.jsonl"
    done: set[str] = set()
    if config.resume and done_path.is_file():
        done = {line.strip() for line in done_path.read_text().splitlines() if line.strip()}
    if not done:
        manifest_path.write_text("")
        done_path.write_text("")

    pending = [t for t in tasks if t.done_key not in done]
    generator = _Generator(config, clients, out_dir)
    skips: Counter = Counter()
    emitted = 0

    try:
        with ThreadPoolExecutor(max_workers=config.workers) as pool:
            futures = [pool.submit(_safe_process, generator, task) for task in pending]
            with manifest_path.open("a", encoding="utf-8") as manifest_fh, done_path.open(
                "a", encoding="utf-8"
            ) as done_fh:
                for task, future in zip(pending, futures):
                    record, duration, reason = future.result()
                    if record is None:
                        skips[reason] += 1
                        continue
                    manifest_fh.write(
                        json.dumps(record_to_json(record, duration), ensure_ascii=False) + "\n"
                    )
                    manifest_fh.flush()
                    done_fh.write(task.done_key + "\n")
                    done_fh.flush()
                    emitted += 1
    finally:
        clients.close()

    records, durations = load_records(manifest_path)
    stats = aggregate_stats(records, durations, skips)
    (out_dir / "stats.json").write_text(stats.to_json() + "\n")
    report = {
        "attempted": len(pending),
        "emitted": emitted,
        "skipped": dict(sorted(skips.items())),
        "pairs_attempted": n_pairs,
        "resumed": len(tasks) - len(pending),
        "corpus": {
            "missing_audio": len(corpus.missing_audio),
            "singleton_groups": corpus.singleton_groups,
        },
    }
    (out_dir / "skips.json").write_text(json.dumps(report, indent=2, sort_keys=True) + "\n")
    log(
        f"emitted {len(records)} records over {stats.n_language_pairs} pairs "
        f"({sum(skips.values())} skipped) -> {manifest_path}"
    )
    return EXIT_OK if len(records) else EXIT_EMPTY


def _safe_process(generator: _Generator, task: Task):
    try:
        record, duration = generator.process(task)
        return record, duration, None
    except Exception as exc:  # noqa: BLE001 - mapped to skip reasons below
        reason = _skip_reason(exc)
        if reason is None:
            raise
        return None, 0.0, reason
