"""Feature-magnitude analyses over residual-stream activation norms.

Everything here is rank-based: features are ordered by descending norm
(ties to the lower dimension index), and the analyses compare the head and
tail of those orderings across demonstration sources: which dimensions are
loudest under one kind of input and quietest under another.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from typing import Mapping, Sequence

import numpy as np

from .errors import ValidationError

DEFAULT_BETA = 30.0

MONO = "mono"
TRANS = "trans"


@dataclass(frozen=True)
class RankedFeatures:
    """Per-feature norms for one demonstration source at one layer."""

    label: str
    layer: int
    norms: np.ndarray
    order: np.ndarray  # permutation of [0, d), descending norm

    @classmethod
    def from_norms(cls, label: str, layer: int, norms) -> "RankedFeatures":
        arr = np.asarray(norms, dtype=np.float64)
        if arr.ndim != 1 or arr.size == 0:
            raise ValidationError("norms must be a non-empty 1-D vector")
        order = np.argsort(-arr, kind="stable")
        return cls(label=label, layer=layer, norms=arr, order=order)

    @property
    def dim(self) -> int:
        return int(self.norms.size)


def topk_report(rf: RankedFeatures, k: int) -> list[tuple[int, float]]:
    """The k largest-magnitude dimensions with their norms."""
    if not 1 <= k <= rf.dim:
        raise ValidationError(f"k must lie in [1, {rf.dim}], got {k}")
    return [(int(d), float(rf.norms[d])) for d in rf.order[:k]]


def top_bottom_sets(rf: RankedFeatures, beta: float = DEFAULT_BETA) -> tuple[frozenset, frozenset]:
    """Dimension sets for the top and bottom beta percent of the ranking."""
    if not 0 < beta < 100:
        raise ValidationError(f"beta must lie in (0, 100), got {beta}")
    d_beta = int(math.floor(rf.dim * beta / 100.0))
    if d_beta == 0:
        raise ValidationError(
            f"beta={beta} selects zero of {rf.dim} dimensions; increase beta or d"
        )
    top = frozenset(int(i) for i in rf.order[:d_beta])
    bottom = frozenset(int(i) for i in rf.order[rf.dim - d_beta:])
    return top, bottom


def overlap_ratio(top_a: frozenset, bottom_b: frozenset) -> float:
    """Fraction of one source's top dimensions sitting in another's bottom."""
    if len(top_a) != len(bottom_b) or not top_a:
        raise ValidationError(
            f"set sizes must match and be non-empty, got {len(top_a)} and {len(bottom_b)}"
        )
    return len(top_a & bottom_b) / len(top_a)


@dataclass(frozen=True)
class OverlapMatrix:
    row_labels: tuple[str, ...]  # rows index the "top" source
    col_labels: tuple[str, ...]  # columns index the "bottom" source
    beta: float
    layer: int
    values: np.ndarray


def overlap_matrix(features: Sequence[RankedFeatures], beta: float = DEFAULT_BETA) -> OverlapMatrix:
    """All-pairs overlap ratios at one layer; entry (r, c) compares the top
    of source r against the bottom of source c."""
    if not features:
        raise ValidationError("need at least one ranked-feature source")
    dim = features[0].dim
    layer = features[0].layer
    for rf in features:
        if rf.dim != dim:
            raise ValidationError(
                f"mixed dimensions: {rf.label!r} has {rf.dim}, expected {dim}"
            )
        if rf.layer != layer:
            raise ValidationError(
                f"mixed layers: {rf.label!r} is layer {rf.layer}, expected {layer}"
            )
    tops, bottoms = zip(*(top_bottom_sets(rf, beta) for rf in features))
    values = np.array(
        [[overlap_ratio(tops[r], bottoms[c]) for c in range(len(features))]
         for r in range(len(features))],
        dtype=np.float64,
    )
    labels = tuple(rf.label for rf in features)
    return OverlapMatrix(
        row_labels=labels, col_labels=labels, beta=float(beta), layer=layer, values=values
    )


@dataclass(frozen=True)
class QuadrantSummary:
    """Mean overlap per (row kind x column kind) group at one layer.

    A field is None when no source pair falls in that quadrant.
    """

    layer: int
    mono_mono: float | None
    mono_trans: float | None
    trans_mono: float | None
    trans_trans: float | None


def quadrant_averages(m: OverlapMatrix, kind_of: Mapping[str, str]) -> QuadrantSummary:
    """Group matrix entries by the (row, column) source kinds and average."""
    for label in set(m.row_labels) | set(m.col_labels):
        if kind_of.get(label) not in (MONO, TRANS):
            raise ValidationError(
                f"label {label!r} is not classified as '{MONO}' or '{TRANS}'"
            )
    buckets: dict[tuple[str, str], list[float]] = {}
    for r, rl in enumerate(m.row_labels):
        for c, cl in enumerate(m.col_labels):
            buckets.setdefault((kind_of[rl], kind_of[cl]), []).append(float(m.values[r, c]))

    def mean_of(key):
        vals = buckets.get(key)
        return sum(vals) / len(vals) if vals else None

    return QuadrantSummary(
        layer=m.layer,
        mono_mono=mean_of((MONO, MONO)),
        mono_trans=mean_of((MONO, TRANS)),
        trans_mono=mean_of((TRANS, MONO)),
        trans_trans=mean_of((TRANS, TRANS)),
    )


def unique_dim_ratio(rf_a: RankedFeatures, rf_b: RankedFeatures, k: int) -> float:
    """Percentage of a's top-k dimensions that are absent from b's top-k."""
    if rf_a.dim != rf_b.dim:
        raise ValidationError(
            f"dimension mismatch: {rf_a.dim} vs {rf_b.dim}"
        )
    if not 1 <= k <= rf_a.dim:
        raise ValidationError(f"k must lie in [1, {rf_a.dim}], got {k}")
    top_a = set(int(i) for i in rf_a.order[:k])
    top_b = set(int(i) for i in rf_b.order[:k])
    return 100.0 * len(top_a - top_b) / k


def write_overlap_csv(m: OverlapMatrix, path) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, quoting=csv.QUOTE_ALL, lineterminator="\n")
        writer.writerow(["top\\bottom", *m.col_labels])
        for r, label in enumerate(m.row_labels):
            writer.writerow([label, *[repr(float(v)) for v in m.values[r]]])


def write_quadrant_csv(summaries: Sequence[QuadrantSummary], path) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, quoting=csv.QUOTE_ALL, lineterminator="\n")
        writer.writerow(["layer", "mono_mono", "mono_trans", "trans_mono", "trans_trans"])
        for s in summaries:
            writer.writerow([
                s.layer,
                *["" if v is None else repr(float(v))
                  for v in (s.mono_mono, s.mono_trans, s.trans_mono, s.trans_trans)],
            ])


_CELL = 56
_MARGIN = 96


def heatmap_svg(m: OverlapMatrix) -> str:
    """Standalone SVG heatmap: white-to-blue linear ramp, value annotations."""
    n_rows, n_cols = m.values.shape
    width = _MARGIN + n_cols * _CELL + 8
    height = _MARGIN + n_rows * _CELL + 8
    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}">',
        f'<rect width="{width}" height="{height}" fill="white"/>',
        f'<text x="{_MARGIN / 2:.0f}" y="16" font-family="monospace" font-size="12">'
        f"layer {m.layer}, beta {m.beta:g}</text>",
    ]
    for c, label in enumerate(m.col_labels):
        x = _MARGIN + c * _CELL + _CELL / 2
        parts.append(
            f'<text x="{x:.0f}" y="{_MARGIN - 8}" font-family="monospace" font-size="11" '
            f'text-anchor="middle">{label}</text>'
        )
    for r, label in enumerate(m.row_labels):
        y = _MARGIN + r * _CELL + _CELL / 2 + 4
        parts.append(
            f'<text x="{_MARGIN - 8}" y="{y:.0f}" font-family="monospace" font-size="11" '
            f'text-anchor="end">{label}</text>'
        )
    for r in range(n_rows):
        for c in range(n_cols):
            v = float(m.values[r, c])
            # Linear ramp from white (0.0) to a saturated blue (1.0).
            red = int(round(255 * (1 - v)))
            green = int(round(255 - 155 * v))
            x, y = _MARGIN + c * _CELL, _MARGIN + r * _CELL
            parts.append(
                f'<rect x="{x}" y="{y}" width="{_CELL}" height="{_CELL}" '
                f'fill="rgb({red},{green},255)" stroke="#444" stroke-width="1"/>'
            )
            parts.append(
                f'<text x="{x + _CELL / 2:.0f}" y="{y + _CELL / 2 + 4:.0f}" '
                f'font-family="monospace" font-size="11" text-anchor="middle">{v:.2f}</text>'
            )
    parts.append("</svg>")
    return "\n".join(parts) + "\n"


def write_heatmap_svg(m: OverlapMatrix, path) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(heatmap_svg(m))
