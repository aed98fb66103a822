"""Per-feature activation statistics accumulated over calibration tokens.

For each tracked layer we keep the running sum of squared activations per
input feature, in float64 so long calibration streams do not lose low-order
bits, plus the number of tokens seen. Feature norms are the square roots of
the sums, taken at read time.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .containers import read_container, write_container
from .errors import FormatError, ValidationError

MAGIC = b"NLS1"


@dataclass
class LayerStats:
    sq_sums: np.ndarray  # float64, shape (dim,)
    token_count: int


class ActivationStats:
    """Accumulator of per-feature squared sums, keyed by layer name.

    One instance has a single writer; parallel calibration shards should
    accumulate into separate instances and combine them with
    :func:`merge_stats`.
    """

    def __init__(self):
        self.layers: dict[str, LayerStats] = {}

    def add_batch(self, name: str, activations) -> None:
        """Fold a (tokens, dim) activation matrix into the running sums."""
        acts = np.asarray(activations, dtype=np.float64)
        if acts.ndim != 2:
            raise ValidationError(f"activations for {name!r} must be 2-D, got {acts.ndim}-D")
        entry = self.layers.get(name)
        if entry is None:
            self.layers[name] = LayerStats(
                sq_sums=np.square(acts).sum(axis=0),
                token_count=acts.shape[0],
            )
            return
        if entry.sq_sums.shape[0] != acts.shape[1]:
            raise ValidationError(
                f"dimension mismatch for {name!r}: have {entry.sq_sums.shape[0]}, "
                f"got {acts.shape[1]}"
            )
        entry.sq_sums += np.square(acts).sum(axis=0)
        entry.token_count += acts.shape[0]

    def names(self) -> list[str]:
        return list(self.layers)

    def norms(self, name: str) -> np.ndarray:
        """Per-feature L2 norms over all accumulated tokens."""
        return np.sqrt(self.layers[name].sq_sums)

    def token_count(self, name: str) -> int:
        return self.layers[name].token_count

    def __contains__(self, name: str) -> bool:
        return name in self.layers

    def __len__(self) -> int:
        return len(self.layers)


def merge_stats(a: ActivationStats, b: ActivationStats) -> ActivationStats:
    """Combine two accumulators: elementwise sums of squares and token counts."""
    if set(a.layers) != set(b.layers):
        only_a = sorted(set(a.layers) - set(b.layers))
        only_b = sorted(set(b.layers) - set(a.layers))
        raise ValidationError(
            f"layer sets differ: only in first={only_a}, only in second={only_b}"
        )
    merged = ActivationStats()
    for name, ea in a.layers.items():
        eb = b.layers[name]
        if ea.sq_sums.shape != eb.sq_sums.shape:
            raise ValidationError(f"dimension mismatch for {name!r}")
        merged.layers[name] = LayerStats(
            sq_sums=ea.sq_sums + eb.sq_sums,
            token_count=ea.token_count + eb.token_count,
        )
    return merged


def save_stats(stats: ActivationStats, path) -> None:
    manifest = []
    chunks = []
    offset = 0
    for name, entry in stats.layers.items():
        raw = np.ascontiguousarray(entry.sq_sums, dtype="<f8").tobytes()
        manifest.append({
            "name": name,
            "dim": int(entry.sq_sums.shape[0]),
            "token_count": int(entry.token_count),
            "offset": offset,
        })
        chunks.append(raw)
        offset += len(raw)
    write_container(path, MAGIC, {"layers": manifest}, b"".join(chunks))


def load_stats(path) -> ActivationStats:
    header, payload = read_container(path, MAGIC)
    stats = ActivationStats()
    for entry in header.get("layers", []):
        name, dim = entry["name"], int(entry["dim"])
        offset = int(entry["offset"])
        raw = payload[offset:offset + dim * 8]
        if len(raw) != dim * 8:
            raise FormatError(f"{path}: payload truncated for layer {name!r}")
        stats.layers[name] = LayerStats(
            sq_sums=np.frombuffer(raw, dtype="<f8").copy(),
            token_count=int(entry["token_count"]),
        )
    return stats
