"""Few-shot demonstration construction and calibration-set assembly.

A translation demonstration interleaves labelled source/target lines, one
``[EOS]`` marker per pair; a monolingual demonstration lists single-language
lines. Rendering is fixed as ``{language name}: {text}`` with one space
after the colon and newline-separated lines, and the literal ``[EOS]``
marker becomes the model's eos token at tokenization time.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence, Union

import numpy as np

from .errors import CorpusError, DataError
from .tokenizer import EOS_MARKER


@dataclass(frozen=True)
class BilingualPair:
    src_text: str
    tgt_text: str

    def __post_init__(self):
        if not self.src_text.strip() or not self.tgt_text.strip():
            raise DataError("bilingual pair sides must be non-empty")


@dataclass(frozen=True)
class TranslationKind:
    src_name: str
    tgt_name: str

    def describe(self) -> str:
        return f"translation({self.src_name}-{self.tgt_name})"


@dataclass(frozen=True)
class MonolingualKind:
    lang_name: str
    side: str = "src"  # which corpus column supplies the sentences

    def __post_init__(self):
        if self.side not in ("src", "tgt"):
            raise DataError(f"side must be 'src' or 'tgt', got {self.side!r}")

    def describe(self) -> str:
        return f"monolingual({self.lang_name})"


DemoKind = Union[TranslationKind, MonolingualKind]


@dataclass(frozen=True)
class Demonstration:
    text: str
    kind: DemoKind


@dataclass(frozen=True)
class CalibrationSet:
    demos: tuple[Demonstration, ...]
    n_shots: int
    seed: int
    source: str


def build_translation_demo(
    pairs: Sequence[BilingualPair], src_name: str, tgt_name: str
) -> Demonstration:
    """Render n sentence pairs as one translation demonstration."""
    if not pairs:
        raise CorpusError("a translation demonstration needs at least one pair")
    if not src_name or not tgt_name:
        raise CorpusError("language names must be non-empty")
    parts = [
        f"{src_name}: {p.src_text}\n{tgt_name}: {p.tgt_text}\n{EOS_MARKER}\n"
        for p in pairs
    ]
    return Demonstration("".join(parts), TranslationKind(src_name, tgt_name))


def build_monolingual_demo(sents: Sequence[str], lang_name: str) -> Demonstration:
    """Render n sentences as one monolingual demonstration."""
    if not sents:
        raise CorpusError("a monolingual demonstration needs at least one sentence")
    if not lang_name:
        raise CorpusError("language name must be non-empty")
    parts = [f"{lang_name}: {s}\n{EOS_MARKER}\n" for s in sents]
    return Demonstration("".join(parts), MonolingualKind(lang_name))


def assemble_calibration(
    corpus: Sequence[BilingualPair],
    N: int = 100,
    n: int = 4,
    kind: DemoKind = TranslationKind("English", "French"),
    seed: int = 0,
    source: str = "",
) -> CalibrationSet:
    """Draw N*n distinct pairs with the given seed and render N demonstrations.

    Sampling is without replacement across the whole set, so no sentence
    pair is reused between demonstrations.
    """
    if N < 1 or n < 1:
        raise CorpusError("N and n must be positive")
    need = N * n
    if len(corpus) < need:
        raise CorpusError(
            f"corpus too small: need {need} pairs (N={N}, n={n}), have {len(corpus)}"
        )
    rng = np.random.default_rng(seed)
    drawn = rng.choice(len(corpus), size=need, replace=False)
    demos: list[Demonstration] = []
    for g in range(N):
        group = [corpus[int(j)] for j in drawn[g * n:(g + 1) * n]]
        if isinstance(kind, TranslationKind):
            demos.append(build_translation_demo(group, kind.src_name, kind.tgt_name))
        else:
            sents = [p.src_text if kind.side == "src" else p.tgt_text for p in group]
            demos.append(build_monolingual_demo(sents, kind.lang_name))
    return CalibrationSet(
        demos=tuple(demos),
        n_shots=n,
        seed=seed,
        source=source or kind.describe(),
    )


def build_translation_prompt(demo: Demonstration, s_test: str) -> str:
    """Append the test source line to a translation demonstration.

    The prompt ends with the bare target-language tag so generation starts
    exactly where the translation should appear.
    """
    if not isinstance(demo.kind, TranslationKind):
        raise DataError("translation prompts require a translation demonstration")
    if not s_test.strip():
        raise DataError("test sentence must be non-empty")
    kind = demo.kind
    return f"{demo.text}{kind.src_name}: {s_test}\n{kind.tgt_name}:"


def load_bilingual_tsv(path) -> list[BilingualPair]:
    """Parse a `src<TAB>tgt` file; `#` comments and blank lines are skipped."""
    pairs: list[BilingualPair] = []
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.rstrip("\n")
            if not line.strip() or line.startswith("#"):
                continue
            if "\t" not in line:
                raise DataError(f"{path}:{lineno}: expected `src<TAB>tgt`")
            src, _, tgt = line.partition("\t")
            if not src.strip() or not tgt.strip():
                raise DataError(f"{path}:{lineno}: empty side in pair")
            pairs.append(BilingualPair(src, tgt))
    return pairs


def load_monolingual_lines(path) -> list[str]:
    """One sentence per line; `#` comments and blank lines are skipped."""
    sents: list[str] = []
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            line = line.rstrip("\n")
            if line.strip() and not line.startswith("#"):
                sents.append(line)
    return sents


def load_program_corpus(path) -> str:
    """Counter-calibration text: a file, or a directory of files concatenated
    in lexicographic filename order."""
    import os

    if os.path.isdir(path):
        names = sorted(
            f for f in os.listdir(path)
            if os.path.isfile(os.path.join(path, f))
        )
        if not names:
            raise CorpusError(f"{path}: no files in counter-calibration directory")
        texts = []
        for name in names:
            with open(os.path.join(path, name), encoding="utf-8") as fh:
                texts.append(fh.read())
        return "".join(texts)
    with open(path, encoding="utf-8") as fh:
        return fh.read()
