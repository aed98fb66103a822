"""Weight storage and the on-disk container format.

A model is a named map of 2-D float32 matrices. Canonical names:

* ``embed``       -- token embedding, vocab_size x d_model
* ``pos_embed``   -- learned absolute position table, max_seq_len x d_model
* ``block.{i}.attn.{q,k,v,o}`` -- attention projections, d_model x d_model
* ``block.{i}.mlp.up``   -- d_ff x d_model
* ``block.{i}.mlp.down`` -- d_model x d_ff
* ``lm_head``     -- output projection, vocab_size x d_model

Every linear matrix is stored d_out x d_in and applied as ``y = x @ W.T``.
Normalization layers are parameter-free, so the map above is the complete
parameter set.

Container file (magic ``NLW1``): length-prefixed JSON header holding the
model configuration and an ordered manifest of ``{name, rows, cols, offset}``
entries, followed by raw little-endian float32 payloads, row-major, in
manifest order. Saving a loaded store reproduces the file byte for byte.
"""

from __future__ import annotations

import numpy as np

from .config import ModelConfig
from .containers import read_container, write_container
from .errors import FormatError, ValidationError

MAGIC = b"NLW1"

ATTN_PARTS = ("q", "k", "v", "o")
MLP_PARTS = ("up", "down")


def block_matrix_names(block: int) -> list[str]:
    names = [f"block.{block}.attn.{p}" for p in ATTN_PARTS]
    names += [f"block.{block}.mlp.{p}" for p in MLP_PARTS]
    return names


def expected_shapes(config: ModelConfig) -> dict[str, tuple[int, int]]:
    """Canonical name -> (rows, cols) for every matrix the model requires."""
    d, f = config.d_model, config.d_ff
    shapes: dict[str, tuple[int, int]] = {
        "embed": (config.vocab_size, d),
        "pos_embed": (config.max_seq_len, d),
    }
    for i in range(config.n_layers):
        for p in ATTN_PARTS:
            shapes[f"block.{i}.attn.{p}"] = (d, d)
        shapes[f"block.{i}.mlp.up"] = (f, d)
        shapes[f"block.{i}.mlp.down"] = (d, f)
    shapes["lm_head"] = (config.vocab_size, d)
    return shapes


class WeightStore:
    """Immutable bundle of a configuration and its named weight matrices.

    Stores are never mutated after construction; transformations such as
    mask application build a new store. Sharing one store across threads is
    therefore safe.
    """

    def __init__(self, config: ModelConfig, matrices: dict[str, np.ndarray]):
        self.config = config
        self.matrices = {name: np.asarray(m, dtype=np.float32) for name, m in matrices.items()}
        self._validate()

    def _validate(self) -> None:
        shapes = expected_shapes(self.config)
        missing = sorted(set(shapes) - set(self.matrices))
        if missing:
            raise ValidationError(f"missing matrices: {', '.join(missing)}")
        extra = sorted(set(self.matrices) - set(shapes))
        if extra:
            raise ValidationError(f"unexpected matrices: {', '.join(extra)}")
        for name, mat in self.matrices.items():
            if mat.ndim != 2 or mat.shape != shapes[name]:
                raise ValidationError(
                    f"matrix {name!r} has shape {tuple(mat.shape)}, expected {shapes[name]}"
                )
            if not np.isfinite(mat).all():
                raise ValidationError(f"matrix {name!r} contains non-finite values")

    def __getitem__(self, name: str) -> np.ndarray:
        return self.matrices[name]

    def __contains__(self, name: str) -> bool:
        return name in self.matrices

    def prunable_names(self) -> list[str]:
        """Attention and MLP linear matrices, in canonical block order."""
        names: list[str] = []
        for i in range(self.config.n_layers):
            names.extend(block_matrix_names(i))
        return names


def random_weights(config: ModelConfig, seed: int = 0, scale: float = 0.08) -> WeightStore:
    """Seeded random model for experiments and tests."""
    rng = np.random.default_rng(seed)
    matrices = {
        name: (rng.standard_normal(shape) * scale).astype(np.float32)
        for name, shape in expected_shapes(config).items()
    }
    return WeightStore(config, matrices)


def save_weights(store: WeightStore, path) -> None:
    manifest = []
    offset = 0
    chunks = []
    for name, mat in store.matrices.items():
        raw = np.ascontiguousarray(mat, dtype="<f4").tobytes()
        manifest.append({
            "name": name,
            "rows": int(mat.shape[0]),
            "cols": int(mat.shape[1]),
            "offset": offset,
        })
        chunks.append(raw)
        offset += len(raw)
    header = {"config": store.config.to_dict(), "manifest": manifest}
    write_container(path, MAGIC, header, b"".join(chunks))


def load_weights(path) -> WeightStore:
    header, payload = read_container(path, MAGIC)
    if "config" not in header or "manifest" not in header:
        raise FormatError(f"{path}: header lacks config or manifest")
    config = ModelConfig.from_dict(header["config"])
    shapes = expected_shapes(config)
    matrices: dict[str, np.ndarray] = {}
    for entry in header["manifest"]:
        name = entry["name"]
        rows, cols, offset = int(entry["rows"]), int(entry["cols"]), int(entry["offset"])
        if name not in shapes:
            raise FormatError(f"{path}: unknown matrix {name!r} in manifest")
        if (rows, cols) != shapes[name]:
            raise FormatError(
                f"{path}: matrix {name!r} declared {rows}x{cols}, "
                f"config requires {shapes[name][0]}x{shapes[name][1]}"
            )
        nbytes = rows * cols * 4
        raw = payload[offset:offset + nbytes]
        if len(raw) != nbytes:
            raise FormatError(f"{path}: payload truncated for matrix {name!r}")
        mat = np.frombuffer(raw, dtype="<f4").reshape(rows, cols)
        if not np.isfinite(mat).all():
            raise FormatError(f"{path}: matrix {name!r} contains non-finite values")
        matrices[name] = mat.copy()
    try:
        return WeightStore(config, matrices)
    except ValidationError as exc:
        raise FormatError(f"{path}: {exc}") from exc
