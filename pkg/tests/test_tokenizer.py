"""Byte-level and file-backed tokenizers."""

import pytest

from polyprune.errors import DataError
from polyprune.tokenizer import EOS_MARKER, ByteTokenizer, VocabTokenizer


def test_byte_round_trip():
    tok = ByteTokenizer()
    text = "English: hi\nFrench: salut\n"
    assert tok.decode(tok.encode(text)) == text


def test_eos_marker_maps_to_special():
    tok = ByteTokenizer()
    ids = tok.encode(f"ab{EOS_MARKER}cd")
    assert ids == [97, 98, tok.eos_token_id, 99, 100]
    assert tok.decode(ids) == "abcd"


def test_eos_marker_can_be_kept_literal():
    tok = ByteTokenizer()
    ids = tok.encode(EOS_MARKER, map_eos_marker=False)
    assert tok.eos_token_id not in ids
    assert tok.decode(ids) == EOS_MARKER


def test_vocab_tokenizer_greedy_longest_match(tmp_path):
    path = tmp_path / "vocab.txt"
    path.write_text("a\nab\nb\n \n<eos>\n", encoding="utf-8")
    tok = VocabTokenizer(path)
    assert tok.vocab_size == 5
    # "ab" must win over "a" then "b".
    assert tok.encode("ab a") == [1, 3, 0]
    assert tok.decode(tok.encode("ab a")) == "ab a"
    assert tok.encode(f"a{EOS_MARKER}b") == [0, tok.eos_token_id, 2]


def test_vocab_tokenizer_rejects_unknown_chars(tmp_path):
    path = tmp_path / "vocab.txt"
    path.write_text("a\n<eos>\n", encoding="utf-8")
    tok = VocabTokenizer(path)
    with pytest.raises(DataError, match="'z'"):
        tok.encode("az")


def test_vocab_tokenizer_requires_eos(tmp_path):
    path = tmp_path / "vocab.txt"
    path.write_text("a\nb\n", encoding="utf-8")
    with pytest.raises(DataError, match="<eos>"):
        VocabTokenizer(path)
