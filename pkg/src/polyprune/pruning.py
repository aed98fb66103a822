"""Importance scoring, mask construction, and mask application.

Scores follow the weights-times-activations recipe: the importance of a
weight is its magnitude times the L2 norm of the input feature it reads,
with an optional counter-calibration refinement that divides by the norm
the same feature shows on a second data stream. Masks remove the
lowest-scoring fraction of each output row.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .containers import read_container, write_container
from .errors import FormatError, ValidationError
from .stats import ActivationStats
from .weights import WeightStore

MASK_MAGIC = b"NLM1"

DEFAULT_ALPHA = 0.3
DEFAULT_EPS = 1e-8

# Score matrices are plain dicts: layer name -> float64 array, d_out x d_in.
ScoreMatrix = dict


def _norms_for(store: WeightStore, stats: ActivationStats, name: str) -> np.ndarray:
    if name not in stats:
        raise ValidationError(f"stats are missing prunable layer {name!r}")
    if stats.token_count(name) <= 0:
        raise ValidationError(f"stats for {name!r} have zero token count")
    norms = stats.norms(name)
    d_in = store[name].shape[1]
    if norms.shape[0] != d_in:
        raise ValidationError(
            f"stats for {name!r} have dimension {norms.shape[0]}, weights expect {d_in}"
        )
    return norms


def wanda_scores(store: WeightStore, stats: ActivationStats) -> ScoreMatrix:
    """Per-weight importance: |weight| times input-feature L2 norm."""
    scores: ScoreMatrix = {}
    for name in store.prunable_names():
        norms = _norms_for(store, stats, name)
        scores[name] = np.abs(store[name]).astype(np.float64) * norms[None, :]
    return scores


def ratio_scores(
    store: WeightStore,
    stats_x: ActivationStats,
    stats_z: ActivationStats,
    eps: float = DEFAULT_EPS,
) -> ScoreMatrix:
    """Counter-calibrated importance: the base score times ||X_j|| / ||Z_j||.

    Features that are loud on the counter stream Z are down-weighted; a
    feature Z never touches (norm 0) keeps a large finite score thanks to
    the eps clamp on the denominator.
    """
    if eps <= 0:
        raise ValidationError("eps must be positive")
    base = wanda_scores(store, stats_x)
    scores: ScoreMatrix = {}
    for name, s in base.items():
        nx = _norms_for(store, stats_x, name)
        nz = _norms_for(store, stats_z, name)
        scores[name] = s * (nx / np.maximum(nz, eps))[None, :]
    return scores


@dataclass(frozen=True)
class PruneMask:
    """Boolean keep-masks per layer (True = keep) plus their provenance."""

    masks: dict[str, np.ndarray]
    alpha: float
    provenance: str = ""


def pruned_per_row(alpha: float, d_in: int) -> int:
    return int(math.floor(alpha * d_in))


def build_mask(scores: ScoreMatrix, alpha: float = DEFAULT_ALPHA, provenance: str = "") -> PruneMask:
    """Mark the floor(alpha * d_in) lowest-scoring entries of each row pruned.

    Ties go to the lower column index, so masks are deterministic across
    platforms.
    """
    if not 0 <= alpha <= 1:
        raise ValidationError(f"alpha must lie in [0, 1], got {alpha}")
    masks: dict[str, np.ndarray] = {}
    for name, s in scores.items():
        s = np.asarray(s, dtype=np.float64)
        if not np.isfinite(s).all():
            raise ValidationError(f"scores for {name!r} contain non-finite values")
        d_out, d_in = s.shape
        k = pruned_per_row(alpha, d_in)
        keep = np.ones((d_out, d_in), dtype=bool)
        if k > 0:
            order = np.argsort(s, axis=1, kind="stable")  # ascending score, then column
            rows = np.repeat(np.arange(d_out), k)
            keep[rows, order[:, :k].ravel()] = False
        masks[name] = keep
    return PruneMask(masks=masks, alpha=float(alpha), provenance=provenance)


def apply_mask(store: WeightStore, mask: PruneMask) -> WeightStore:
    """Zero the pruned entries; everything outside the mask is untouched."""
    matrices: dict[str, np.ndarray] = {}
    for name, mat in store.matrices.items():
        keep = mask.masks.get(name)
        if keep is None:
            matrices[name] = mat
            continue
        if keep.shape != mat.shape:
            raise ValidationError(
                f"mask for {name!r} has shape {keep.shape}, weights are {mat.shape}"
            )
        matrices[name] = np.where(keep, mat, np.float32(0.0))
    return WeightStore(store.config, matrices)


def sparsity_rows(mask: PruneMask) -> list[tuple[str, int, int, int, float]]:
    """(layer, rows, cols, pruned, fraction) per layer, in mask order."""
    out = []
    for name, keep in mask.masks.items():
        pruned = int(keep.size - keep.sum())
        out.append((name, keep.shape[0], keep.shape[1], pruned, pruned / keep.size))
    return out


def save_mask(mask: PruneMask, path) -> None:
    manifest = []
    chunks = []
    offset = 0
    for name, keep in mask.masks.items():
        packed = np.packbits(keep.astype(np.uint8), axis=None).tobytes()
        manifest.append({
            "name": name,
            "rows": int(keep.shape[0]),
            "cols": int(keep.shape[1]),
            "offset": offset,
        })
        chunks.append(packed)
        offset += len(packed)
    header = {
        "alpha": mask.alpha,
        "provenance": mask.provenance,
        "layers": manifest,
    }
    write_container(path, MASK_MAGIC, header, b"".join(chunks))


def load_mask(path) -> PruneMask:
    header, payload = read_container(path, MASK_MAGIC)
    masks: dict[str, np.ndarray] = {}
    for entry in header.get("layers", []):
        name = entry["name"]
        rows, cols = int(entry["rows"]), int(entry["cols"])
        offset = int(entry["offset"])
        nbytes = (rows * cols + 7) // 8
        raw = payload[offset:offset + nbytes]
        if len(raw) != nbytes:
            raise FormatError(f"{path}: payload truncated for mask {name!r}")
        bits = np.unpackbits(np.frombuffer(raw, dtype=np.uint8), count=rows * cols)
        masks[name] = bits.astype(bool).reshape(rows, cols)
    return PruneMask(
        masks=masks,
        alpha=float(header.get("alpha", DEFAULT_ALPHA)),
        provenance=str(header.get("provenance", "")),
    )
