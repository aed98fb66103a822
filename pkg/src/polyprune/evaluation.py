"""Cloze-style zero-shot classification and the surrounding metrics.

Classification fills the task template's single ``[Mask]`` slot with each
candidate's verbalization, scores the whole filled prompt under the model,
and predicts the candidate with the highest log-likelihood. English
templates and verbalizers are used for every example language.
"""

from __future__ import annotations

import csv
from collections import Counter
from dataclasses import dataclass
from math import exp, log
from typing import Mapping, Sequence

import numpy as np

from .errors import DataError, ValidationError
from .tokenizer import ByteTokenizer
from .transformer import sequence_log_prob
from .weights import WeightStore

MASK_SLOT = "[Mask]"

DEFAULT_RESAMPLES = 1000


@dataclass(frozen=True)
class ClozeTask:
    """A template with one mask slot plus a label-to-string verbalizer."""

    name: str
    labels: tuple[str, ...]
    verbalizer: Mapping[str, str]
    template: str

    def __post_init__(self):
        if not self.labels:
            raise ValidationError("a task needs at least one label")
        if self.template.count(MASK_SLOT) != 1:
            raise ValidationError(
                f"template must contain exactly one {MASK_SLOT}, "
                f"found {self.template.count(MASK_SLOT)}"
            )
        missing = [l for l in self.labels if l not in self.verbalizer]
        if missing:
            raise ValidationError(f"verbalizer is missing labels: {missing}")


@dataclass(frozen=True)
class EvalExample:
    fields: Mapping[str, str]
    gold: str


def xnli_task() -> ClozeTask:
    return ClozeTask(
        name="xnli",
        labels=("entailment", "contradiction", "neutral"),
        verbalizer={"entailment": "Yes", "contradiction": "No", "neutral": "Also"},
        template="{premise}, right? " + MASK_SLOT + ", {hypothesis}",
    )


def marc_task() -> ClozeTask:
    return ClozeTask(
        name="marc",
        labels=("negative", "positive"),
        verbalizer={"negative": "negative", "positive": "positive"},
        template="{review} It is " + MASK_SLOT,
    )


def render_prompt(task: ClozeTask, ex: EvalExample, label: str) -> str:
    if label not in task.labels:
        raise ValidationError(f"unknown label {label!r} for task {task.name}")
    try:
        filled = task.template.format(**ex.fields)
    except KeyError as exc:
        raise DataError(f"example lacks field {exc.args[0]!r} for task {task.name}") from exc
    return filled.replace(MASK_SLOT, task.verbalizer[label])


@dataclass(frozen=True)
class PredictionRanking:
    """Candidate labels in descending log-likelihood order."""

    entries: tuple[tuple[str, float], ...]

    @property
    def labels(self) -> tuple[str, ...]:
        return tuple(label for label, _ in self.entries)

    @property
    def top1(self) -> str:
        return self.entries[0][0]

    @classmethod
    def from_labels(cls, labels: Sequence[str]) -> "PredictionRanking":
        # Rank-only rankings (e.g. parsed from a predictions file) carry
        # synthetic descending scores.
        return cls(tuple((l, -float(i)) for i, l in enumerate(labels)))


def rank_candidates(scored: Sequence[tuple[str, float]]) -> PredictionRanking:
    """Order (label, score) pairs by descending score; exact ties keep the
    given label order. Invariant under adding a constant to every score."""
    return PredictionRanking(tuple(sorted(scored, key=lambda pair: -pair[1])))


def classify_zero_shot(
    store: WeightStore, task: ClozeTask, ex: EvalExample, tokenizer=None
) -> PredictionRanking:
    """Rank candidates by the log-likelihood of their filled prompts.

    Exact score ties go to the label listed earlier in the task.
    """
    tok = tokenizer or ByteTokenizer()
    scored = []
    for label in task.labels:
        ids = tok.encode(render_prompt(task, ex, label))
        scored.append((label, sequence_log_prob(store, ids)))
    return rank_candidates(scored)


def accuracy(preds: Sequence[PredictionRanking], golds: Sequence[str]) -> float:
    if len(preds) != len(golds) or not preds:
        raise ValidationError(
            f"need equal non-zero lengths, got {len(preds)} predictions and {len(golds)} golds"
        )
    hits = sum(1 for p, g in zip(preds, golds) if p.top1 == g)
    return hits / len(preds)


def paired_bootstrap(
    preds_a: Sequence[PredictionRanking],
    preds_b: Sequence[PredictionRanking],
    golds: Sequence[str],
    resamples: int = DEFAULT_RESAMPLES,
    seed: int = 0,
) -> float:
    """Two-sided paired bootstrap p-value for the accuracy difference.

    Example indices are resampled with replacement; the p-value is the
    fraction of resamples whose accuracy difference is zero or flips sign
    relative to the full-sample difference.
    """
    if not len(preds_a) == len(preds_b) == len(golds) or not golds:
        raise ValidationError(
            f"aligned non-empty inputs required, got {len(preds_a)}, "
            f"{len(preds_b)}, {len(golds)}"
        )
    if resamples < 1:
        raise ValidationError("resamples must be positive")
    a = np.array([p.top1 == g for p, g in zip(preds_a, golds)], dtype=np.float64)
    b = np.array([p.top1 == g for p, g in zip(preds_b, golds)], dtype=np.float64)
    delta = a.mean() - b.mean()
    rng = np.random.default_rng(seed)
    idx = rng.integers(0, len(golds), size=(resamples, len(golds)))
    deltas = a[idx].mean(axis=1) - b[idx].mean(axis=1)
    flipped = (np.sign(deltas) != np.sign(delta)) | (deltas == 0.0)
    return float(flipped.mean())


def _ngrams(tokens: Sequence, n: int):
    return [tuple(tokens[i:i + n]) for i in range(len(tokens) - n + 1)]


def corpus_bleu(
    hypotheses: Sequence[Sequence], references: Sequence[Sequence], max_n: int = 4
) -> float:
    """Corpus BLEU in [0, 1]: geometric mean of clipped n-gram precisions
    times the brevity penalty; zero whenever any precision is zero."""
    if len(hypotheses) != len(references) or not hypotheses:
        raise ValidationError(
            f"need equal non-zero corpus sizes, got {len(hypotheses)} and {len(references)}"
        )
    clipped = [0] * max_n
    totals = [0] * max_n
    hyp_len = 0
    ref_len = 0
    for hyp, ref in zip(hypotheses, references):
        hyp_len += len(hyp)
        ref_len += len(ref)
        for n in range(1, max_n + 1):
            counts = Counter(_ngrams(hyp, n))
            ref_counts = Counter(_ngrams(ref, n))
            totals[n - 1] += sum(counts.values())
            clipped[n - 1] += sum(min(c, ref_counts[g]) for g, c in counts.items())
    if any(t == 0 for t in totals) or any(c == 0 for c in clipped):
        return 0.0
    log_precision = sum(log(c / t) for c, t in zip(clipped, totals)) / max_n
    brevity = min(0.0, 1.0 - ref_len / hyp_len)
    return exp(brevity + log_precision)


def load_xnli_tsv(path) -> list[EvalExample]:
    """`premise<TAB>hypothesis<TAB>label` rows, one example per line."""
    return _load_examples(path, ("premise", "hypothesis"), xnli_task().labels)


def load_marc_tsv(path) -> list[EvalExample]:
    """`review<TAB>label` rows, one example per line."""
    return _load_examples(path, ("review",), marc_task().labels)


def _load_examples(path, field_names: tuple[str, ...], labels: tuple[str, ...]):
    examples: list[EvalExample] = []
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.rstrip("\n")
            if not line.strip() or line.startswith("#"):
                continue
            cols = line.split("\t")
            if len(cols) != len(field_names) + 1:
                raise DataError(
                    f"{path}:{lineno}: expected {len(field_names) + 1} tab-separated "
                    f"columns, got {len(cols)}"
                )
            gold = cols[-1].strip().lower()
            if gold not in labels:
                raise DataError(f"{path}:{lineno}: unknown label {cols[-1]!r}")
            examples.append(EvalExample(fields=dict(zip(field_names, cols[:-1])), gold=gold))
    if not examples:
        raise DataError(f"{path}: no examples found")
    return examples


def load_translation_tsv(path) -> list[tuple[str, str]]:
    """`src<TAB>ref` rows for the translation harness."""
    rows: list[tuple[str, str]] = []
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.rstrip("\n")
            if not line.strip() or line.startswith("#"):
                continue
            cols = line.split("\t")
            if len(cols) != 2:
                raise DataError(f"{path}:{lineno}: expected `src<TAB>ref`")
            rows.append((cols[0], cols[1]))
    if not rows:
        raise DataError(f"{path}: no rows found")
    return rows


def save_predictions_csv(preds: Sequence[PredictionRanking], path, ids=None) -> None:
    """Rows of (example id, ranked labels joined with `|`)."""
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, quoting=csv.QUOTE_ALL, lineterminator="\n")
        writer.writerow(["example_id", "ranking"])
        for i, pred in enumerate(preds):
            key = ids[i] if ids is not None else str(i)
            writer.writerow([key, "|".join(pred.labels)])


def load_predictions_csv(path) -> list[tuple[str, PredictionRanking]]:
    rows: list[tuple[str, PredictionRanking]] = []
    with open(path, encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header != ["example_id", "ranking"]:
            raise DataError(f"{path}: expected header example_id,ranking")
        for lineno, row in enumerate(reader, start=2):
            if len(row) != 2:
                raise DataError(f"{path}:{lineno}: expected 2 columns")
            labels = tuple(row[1].split("|"))
            if len(set(labels)) != len(labels) or not labels or "" in labels:
                raise DataError(f"{path}:{lineno}: malformed ranking {row[1]!r}")
            rows.append((row[0], PredictionRanking.from_labels(labels)))
    if not rows:
        raise DataError(f"{path}: no predictions found")
    return rows
