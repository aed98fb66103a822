"""Desk-scale fixtures: synthetic parallel corpora and tiny random models.

The paired "languages" are pseudo-word streams related by a deterministic
per-word cipher, which is enough structure for exercising the pipeline
end to end without any external data.
"""

from __future__ import annotations

import numpy as np

from .config import ModelConfig
from .demos import BilingualPair
from .tokenizer import ByteTokenizer
from .weights import WeightStore, random_weights

_SYLLABLES = ("ba", "de", "ki", "lo", "mu", "na", "po", "ra", "su", "ti", "vo", "ze")

_CIPHER = str.maketrans("abdeiklmnoprstuvz", "ozrineatbsmkduvpa")


def toy_config(**overrides) -> ModelConfig:
    """A 2-layer byte-vocabulary model small enough for exhaustive oracles."""
    params = dict(
        n_layers=2,
        d_model=32,
        n_heads=4,
        d_ff=64,
        vocab_size=ByteTokenizer.vocab_size,
        max_seq_len=512,
        eos_token_id=ByteTokenizer.eos_token_id,
    )
    params.update(overrides)
    return ModelConfig(**params)


def toy_model(config: ModelConfig | None = None, seed: int = 0) -> WeightStore:
    return random_weights(config or toy_config(), seed=seed)


def _word(rng: np.random.Generator) -> str:
    return "".join(rng.choice(_SYLLABLES) for _ in range(int(rng.integers(2, 4))))


def toy_sentence(rng: np.random.Generator, min_words: int = 3, max_words: int = 6) -> str:
    return " ".join(_word(rng) for _ in range(int(rng.integers(min_words, max_words + 1))))


def toy_pairs(count: int, seed: int = 0) -> list[BilingualPair]:
    """`count` distinct sentence pairs; the target side is the ciphered source."""
    rng = np.random.default_rng(seed)
    pairs: list[BilingualPair] = []
    seen: set[str] = set()
    while len(pairs) < count:
        src = toy_sentence(rng)
        if src in seen:
            continue
        seen.add(src)
        pairs.append(BilingualPair(src, src.translate(_CIPHER)))
    return pairs
