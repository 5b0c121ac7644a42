import numpy as np
import pytest

from csforge.audio import AudioBuffer
from csforge.config import RunConfig
from csforge.synthdata import build_synthetic_corpus

# Reference sentence pair for the substitution walkthrough: an English
# matrix sentence, its Dutch parallel, the two noun pairs a mapper should
# produce for them, and the expected code-switched output.
EN_SENT = (
    "Hiking is an outdoor activity which consists of walking in natural "
    "environments often on hiking trails."
)
NL_SENT = (
    "Wandelen is een buitenactiviteit waarbij je in een natuurlijke omgeving "
    "wandelt meestal op wandelpaden."
)
CS_TARGET = (
    "Wandelen is an outdoor activity which consists of walking in natural "
    "environments often on wandelpaden."
)
EN_NL_LEXICON = [
    ("Hiking", "Wandelen", "noun"),
    ("hiking trails", "wandelpaden", "noun"),
    ("walking", "wandelt", "verb"),
]


def sine_buffer(freq_hz: float, duration_s: float, rate: int, amplitude: float = 1.0) -> AudioBuffer:
    t = np.arange(int(round(duration_s * rate))) / rate
    return AudioBuffer(amplitude * np.sin(2 * np.pi * freq_hz * t), rate)


def make_config(corpus, out_dir, **overrides) -> RunConfig:
    base = dict(
        manifest=str(corpus.manifest_path),
        out=str(out_dir),
        languages=tuple(corpus.languages),
        seed=42,
        lexicon=str(corpus.lexicon_path),
    )
    base.update(overrides)
    return RunConfig(**base)


@pytest.fixture(scope="session")
def small_corpus(tmp_path_factory):
    """Two languages, 12 parallel groups, short utterances."""
    root = tmp_path_factory.mktemp("small_corpus")
    return build_synthetic_corpus(root, languages=("en", "nl"), n_groups=12, seed=7)


@pytest.fixture(scope="session")
def trilingual_corpus(tmp_path_factory):
    root = tmp_path_factory.mktemp("tri_corpus")
    return build_synthetic_corpus(root, languages=("de", "en", "nl"), n_groups=6, seed=3)
