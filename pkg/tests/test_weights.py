"""Weight store construction and container round trips."""

import numpy as np
import pytest

from polyprune import toy
from polyprune.config import ModelConfig
from polyprune.errors import FormatError, ValidationError
from polyprune.weights import (
    WeightStore,
    expected_shapes,
    load_weights,
    random_weights,
    save_weights,
)


def test_config_invariants():
    with pytest.raises(ValidationError):
        ModelConfig(n_layers=2, d_model=30, n_heads=4, d_ff=64,
                    vocab_size=64, max_seq_len=16, eos_token_id=0)
    with pytest.raises(ValidationError):
        ModelConfig(n_layers=2, d_model=32, n_heads=4, d_ff=64,
                    vocab_size=64, max_seq_len=16, eos_token_id=64)
    with pytest.raises(ValidationError):
        ModelConfig(n_layers=0, d_model=32, n_heads=4, d_ff=64,
                    vocab_size=64, max_seq_len=16, eos_token_id=0)


def test_two_layer_store_has_expected_matrix_set(tiny_store):
    block_names = [n for n in tiny_store.matrices if n.startswith("block.")]
    assert len(block_names) == 12  # 2 blocks x (q,k,v,o,up,down)
    assert "embed" in tiny_store and "lm_head" in tiny_store
    assert set(tiny_store.matrices) == set(expected_shapes(tiny_store.config))


def test_store_rejects_missing_and_misshapen_matrices(tiny_store):
    matrices = dict(tiny_store.matrices)
    del matrices["block.0.attn.q"]
    with pytest.raises(ValidationError, match="block.0.attn.q"):
        WeightStore(tiny_store.config, matrices)

    matrices = dict(tiny_store.matrices)
    matrices["block.0.attn.q"] = matrices["block.0.attn.q"][:, :-1]
    with pytest.raises(ValidationError, match="block.0.attn.q"):
        WeightStore(tiny_store.config, matrices)


def test_store_rejects_non_finite(tiny_store):
    matrices = {k: v.copy() for k, v in tiny_store.matrices.items()}
    matrices["block.1.mlp.up"][0, 0] = np.nan
    with pytest.raises(ValidationError, match="block.1.mlp.up"):
        WeightStore(tiny_store.config, matrices)


def test_round_trip_is_byte_identical(tmp_path):
    store = random_weights(toy.toy_config(), seed=5)
    first = tmp_path / "a.nlw"
    second = tmp_path / "b.nlw"
    save_weights(store, first)
    save_weights(load_weights(first), second)
    assert first.read_bytes() == second.read_bytes()


def test_round_trip_preserves_values(tmp_path, tiny_store):
    path = tmp_path / "m.nlw"
    save_weights(tiny_store, path)
    loaded = load_weights(path)
    assert loaded.config == tiny_store.config
    for name, mat in tiny_store.matrices.items():
        assert np.array_equal(loaded[name], mat)


def test_load_rejects_wrong_shape_naming_matrix(tmp_path, tiny_store):
    path = tmp_path / "m.nlw"
    save_weights(tiny_store, path)
    raw = bytearray(path.read_bytes())
    # Corrupt the manifest: shrink block.0.attn.q's declared columns.
    text = raw.decode("latin-1")
    text = text.replace(
        '"name":"block.0.attn.q","rows":32,"cols":32',
        '"name":"block.0.attn.q","rows":32,"cols":31',
    )
    path.write_bytes(text.encode("latin-1"))
    with pytest.raises(FormatError, match="block.0.attn.q"):
        load_weights(path)


def test_load_rejects_bad_magic(tmp_path, tiny_store):
    path = tmp_path / "m.nlw"
    save_weights(tiny_store, path)
    raw = bytearray(path.read_bytes())
    raw[:4] = b"XXXX"
    path.write_bytes(bytes(raw))
    with pytest.raises(FormatError, match="magic"):
        load_weights(path)


def test_load_rejects_truncated_payload(tmp_path, tiny_store):
    path = tmp_path / "m.nlw"
    save_weights(tiny_store, path)
    raw = path.read_bytes()
    path.write_bytes(raw[:-64])
    with pytest.raises(FormatError, match="truncated"):
        load_weights(path)


def test_load_rejects_non_finite_payload(tmp_path, tiny_store):
    path = tmp_path / "m.nlw"
    save_weights(tiny_store, path)
    raw = bytearray(path.read_bytes())
    # Overwrite the first payload float with a NaN pattern; "embed" is the
    # first manifest entry so the error must name it.
    header_len = int.from_bytes(raw[4:8], "little")
    payload_start = 8 + header_len
    raw[payload_start:payload_start + 4] = np.float32(np.nan).tobytes()
    path.write_bytes(bytes(raw))
    with pytest.raises(FormatError, match="embed"):
        load_weights(path)
