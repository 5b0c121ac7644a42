"""csforge: code-switching speech corpus synthesis.

Turns any n-way parallel monolingual speech-text corpus into
intra-sentential code-switching speech/text pairs: preprocessing
(bandpass + peak normalization), word-level source mixing driven by
POS-categorized word pairs, forced-alignment segmentation, splice
recombination, pluggable voice-conversion style unification, and
code-switching metrics (CMI, I-index, RER, romanized character
diversity).
"""

from .audio import AudioBuffer, TimeSpan, bandpass_filter, clip_segment, normalize_amplitude, read_wav, splice, write_wav
from .align import WordAlignment, align, locate_word
from .backends import BackendEndpoint, IdentityConverter, LexiconMapper, ProtocolClient, UniformAligner, parse_endpoint
from .config import RunConfig, load_config, validate_config
from .corpus import Corpus, LanguagePair, ParallelGroup, Utterance, enumerate_language_pairs, load_manifest, sample_equivalent_pairs
from .metrics import DatasetStats, aggregate_stats, char_diversity, cmi, i_index, levenshtein, rer
from .sourcemix import CSRecord, GenerationParams, generate_cs_sample, substitute_text
from .text import RomanizedText, romanize, tokenize
from .vc import VCRequest, unify_style
from .wordmap import POSCategory, WordPair, WordPairMap, postprocess_mapping, request_mapping, select_substitutions

__version__ = "0.1.0"

__all__ = [
    "AudioBuffer", "TimeSpan", "read_wav", "write_wav", "bandpass_filter",
    "normalize_amplitude", "clip_segment", "splice",
    "WordAlignment", "align", "locate_word",
    "BackendEndpoint", "ProtocolClient", "parse_endpoint",
    "LexiconMapper", "UniformAligner", "IdentityConverter",
    "RunConfig", "load_config", "validate_config",
    "Corpus", "ParallelGroup", "Utterance", "LanguagePair",
    "load_manifest", "enumerate_language_pairs", "sample_equivalent_pairs",
    "DatasetStats", "aggregate_stats", "char_diversity", "cmi", "i_index",
    "levenshtein", "rer",
    "CSRecord", "GenerationParams", "generate_cs_sample", "substitute_text",
    "RomanizedText", "romanize", "tokenize",
    "VCRequest", "unify_style",
    "POSCategory", "WordPair", "WordPairMap", "postprocess_mapping",
    "request_mapping", "select_substitutions",
]
