"""Tokenizers: a byte-level default plus a pluggable file-backed vocabulary.

Demonstration templates embed the literal marker ``[EOS]``; both tokenizers
replace it with the end-of-sequence token id during encoding, so rendered
text stays printable while token streams carry the real terminator.
"""

from __future__ import annotations

from .errors import DataError

EOS_MARKER = "[EOS]"
EOS_TOKEN = "<eos>"


class ByteTokenizer:
    """UTF-8 bytes as ids 0..255, with one end-of-sequence special at 256."""

    vocab_size = 257
    eos_token_id = 256

    def encode(self, text: str, map_eos_marker: bool = True) -> list[int]:
        if not map_eos_marker:
            return list(text.encode("utf-8"))
        ids: list[int] = []
        for i, piece in enumerate(text.split(EOS_MARKER)):
            if i > 0:
                ids.append(self.eos_token_id)
            ids.extend(piece.encode("utf-8"))
        return ids

    def decode(self, ids) -> str:
        # Specials are dropped; byte sequences are decoded leniently so that
        # sampled garbage from a toy model never raises.
        data = bytes(i for i in ids if 0 <= i < 256)
        return data.decode("utf-8", errors="replace")


class VocabTokenizer:
    """Greedy longest-match tokenizer over an external vocabulary file.

    The file holds one token string per line (line number = token id) and
    must include the literal line ``<eos>``, which becomes the
    end-of-sequence id. Text that cannot be matched raises, pointing at the
    offending character.
    """

    def __init__(self, path):
        with open(path, encoding="utf-8") as fh:
            tokens = [line.rstrip("\n") for line in fh]
        while tokens and tokens[-1] == "":
            tokens.pop()
        if not tokens:
            raise DataError(f"{path}: empty vocabulary file")
        if len(set(tokens)) != len(tokens):
            raise DataError(f"{path}: duplicate tokens in vocabulary")
        if EOS_TOKEN not in tokens:
            raise DataError(f"{path}: vocabulary does not define {EOS_TOKEN!r}")
        self.path = str(path)
        self.tokens = tokens
        self.vocab_size = len(tokens)
        self.eos_token_id = tokens.index(EOS_TOKEN)
        self._ids = {tok: i for i, tok in enumerate(tokens)}
        self._max_len = max(len(t) for t in tokens)

    def encode(self, text: str, map_eos_marker: bool = True) -> list[int]:
        ids: list[int] = []
        pieces = text.split(EOS_MARKER) if map_eos_marker else [text]
        for i, piece in enumerate(pieces):
            if i > 0:
                ids.append(self.eos_token_id)
            pos = 0
            while pos < len(piece):
                for width in range(min(self._max_len, len(piece) - pos), 0, -1):
                    tok_id = self._ids.get(piece[pos:pos + width])
                    if tok_id is not None:
                        ids.append(tok_id)
                        pos += width
                        break
                else:
                    raise DataError(
                        f"cannot tokenize {piece[pos]!r} at offset {pos} "
                        f"with vocabulary {self.path}"
                    )
        return ids

    def decode(self, ids) -> str:
        return "".join(
            self.tokens[i] for i in ids
            if 0 <= i < self.vocab_size and i != self.eos_token_id
        )
