"""Decoder-only transformer inference with per-layer activation capture.

Architecture: token embedding plus learned absolute position embedding,
pre-norm blocks (parameter-free layer norm, causal multi-head attention,
tanh-GELU MLP), a final norm, and a tied-shape output projection. The
forward pass is pure float32 numpy and deterministic for fixed inputs.

Capture targets are either linear-layer names (the input activations of
``block.{i}.attn.{q,k,v,o}``, ``block.{i}.mlp.{up,down}``, or ``lm_head``)
or integer block indices, which record the block's residual-stream output
under the key ``resid.{i}``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import CaptureError, ValidationError
from .stats import ActivationStats
from .weights import WeightStore

RESID_PREFIX = "resid."

_LN_EPS = 1e-5


@dataclass(frozen=True)
class GenParams:
    """Sampling hyperparameters; defaults match the translation recipe."""

    max_new_tokens: int = 64
    temperature: float = 0.8
    top_k: int = 100
    top_p: float = 0.75
    seed: int = 0

    def __post_init__(self):
        if self.max_new_tokens < 1:
            raise ValidationError("max_new_tokens must be positive")
        if self.temperature <= 0:
            raise ValidationError("temperature must be positive")
        if self.top_k < 1:
            raise ValidationError("top_k must be positive")
        if not 0 < self.top_p <= 1:
            raise ValidationError("top_p must lie in (0, 1]")


def _layer_norm(x: np.ndarray) -> np.ndarray:
    mu = x.mean(axis=-1, keepdims=True)
    var = np.square(x - mu).mean(axis=-1, keepdims=True)
    return (x - mu) / np.sqrt(var + _LN_EPS)


_GELU_C = np.float32(np.sqrt(2.0 / np.pi))


def _gelu(x: np.ndarray) -> np.ndarray:
    return 0.5 * x * (1.0 + np.tanh(_GELU_C * (x + 0.044715 * x * x * x)))


def _softmax(x: np.ndarray, axis: int = -1) -> np.ndarray:
    shifted = x - x.max(axis=axis, keepdims=True)
    e = np.exp(shifted)
    return e / e.sum(axis=axis, keepdims=True)


def _check_tokens(store: WeightStore, ids) -> np.ndarray:
    arr = np.asarray(ids, dtype=np.int64)
    if arr.ndim != 1 or arr.size == 0:
        raise ValidationError("token sequence must be a non-empty 1-D id list")
    cfg = store.config
    if arr.size > cfg.max_seq_len:
        raise ValidationError(
            f"sequence length {arr.size} exceeds max_seq_len {cfg.max_seq_len}"
        )
    if arr.min() < 0 or arr.max() >= cfg.vocab_size:
        raise ValidationError(f"token ids must lie in [0, {cfg.vocab_size})")
    return arr


def _split_capture(store: WeightStore, capture) -> tuple[set[str], set[int]]:
    capturable = set(store.prunable_names()) | {"lm_head"}
    names: set[str] = set()
    blocks: set[int] = set()
    for item in capture:
        if isinstance(item, str):
            if item not in capturable:
                raise CaptureError(f"unknown capture layer {item!r}")
            names.add(item)
        elif isinstance(item, (int, np.integer)):
            if not 0 <= int(item) < store.config.n_layers:
                raise CaptureError(
                    f"block index {int(item)} outside [0, {store.config.n_layers})"
                )
            blocks.add(int(item))
        else:
            raise CaptureError(f"capture items must be layer names or block indices, got {item!r}")
    return names, blocks


def forward_with_capture(
    store: WeightStore, tokens, capture=()
) -> tuple[np.ndarray, ActivationStats]:
    """Run the causal forward pass, optionally recording activation stats.

    Returns float32 logits of shape (T, vocab_size) and an accumulator
    holding, per captured linear layer, the squared sums of that layer's
    input activations over all T positions, and per captured block index
    the squared sums of the block's residual-stream output.
    """
    ids = _check_tokens(store, tokens)
    names, blocks = _split_capture(store, capture)
    stats = ActivationStats()
    cfg = store.config
    T = ids.size
    n_heads, d_head = cfg.n_heads, cfg.d_model // cfg.n_heads

    x = store["embed"][ids] + store["pos_embed"][:T]
    causal = np.triu(np.ones((T, T), dtype=bool), k=1)

    for i in range(cfg.n_layers):
        h = _layer_norm(x)
        for part in ("q", "k", "v"):
            full = f"block.{i}.attn.{part}"
            if full in names:
                stats.add_batch(full, h)
        q = h @ store[f"block.{i}.attn.q"].T
        k = h @ store[f"block.{i}.attn.k"].T
        v = h @ store[f"block.{i}.attn.v"].T
        q = q.reshape(T, n_heads, d_head).transpose(1, 0, 2)
        k = k.reshape(T, n_heads, d_head).transpose(1, 0, 2)
        v = v.reshape(T, n_heads, d_head).transpose(1, 0, 2)
        scores = (q @ k.transpose(0, 2, 1)) / np.float32(np.sqrt(d_head))
        scores = np.where(causal, np.float32(-np.inf), scores)
        mix = _softmax(scores, axis=-1) @ v
        mix = mix.transpose(1, 0, 2).reshape(T, cfg.d_model)
        o_name = f"block.{i}.attn.o"
        if o_name in names:
            stats.add_batch(o_name, mix)
        x = x + mix @ store[o_name].T

        h = _layer_norm(x)
        up_name = f"block.{i}.mlp.up"
        if up_name in names:
            stats.add_batch(up_name, h)
        act = _gelu(h @ store[up_name].T)
        down_name = f"block.{i}.mlp.down"
        if down_name in names:
            stats.add_batch(down_name, act)
        x = x + act @ store[down_name].T

        if i in blocks:
            stats.add_batch(f"{RESID_PREFIX}{i}", x)

    h = _layer_norm(x)
    if "lm_head" in names:
        stats.add_batch("lm_head", h)
    logits = h @ store["lm_head"].T
    return logits, stats


def sequence_log_prob(store: WeightStore, tokens) -> float:
    """Natural-log likelihood of positions 2..T given their prefixes.

    The whole sequence is scored; there is no length normalization.
    """
    ids = _check_tokens(store, tokens)
    if ids.size < 2:
        raise ValidationError("log probability needs at least 2 tokens")
    logits, _ = forward_with_capture(store, ids)
    lg = logits.astype(np.float64)
    rows = lg[:-1]
    peak = rows.max(axis=1)
    lse = peak + np.log(np.exp(rows - peak[:, None]).sum(axis=1))
    picked = rows[np.arange(ids.size - 1), ids[1:]]
    return float((picked - lse).sum())


def generate(store: WeightStore, prompt, params: GenParams = GenParams()) -> list[int]:
    """Sample a continuation: temperature, then top-k, then nucleus top-p.

    Stops at the end-of-sequence token, after ``max_new_tokens``, or when
    the context window fills. The returned ids exclude the prompt and
    include the terminating eos token when one was produced. Deterministic
    for a fixed (store, prompt, params) triple.
    """
    ids = list(_check_tokens(store, prompt))
    cfg = store.config
    rng = np.random.default_rng(params.seed)
    out: list[int] = []
    for _ in range(params.max_new_tokens):
        if len(ids) >= cfg.max_seq_len:
            break
        logits, _ = forward_with_capture(store, ids)
        row = logits[-1].astype(np.float64) / params.temperature
        # Descending sort; ties resolved toward the lower token id so greedy
        # decoding (top_k=1) is reproducible across platforms.
        order = np.argsort(-row, kind="stable")[: params.top_k]
        probs = _softmax(row[order])
        cum = np.cumsum(probs)
        keep = (cum - probs) < params.top_p  # always keeps the head token
        order, probs = order[keep], probs[keep]
        probs = probs / probs.sum()
        token = int(rng.choice(order, p=probs))
        ids.append(token)
        out.append(token)
        if token == cfg.eos_token_id:
            break
    return out
