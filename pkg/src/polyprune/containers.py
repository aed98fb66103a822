"""Binary container plumbing shared by the weight, stats, and mask files.

Layout of every container: 4 magic bytes, a little-endian uint32 giving the
byte length of a UTF-8 JSON header, the header itself, then a raw payload.
Offsets recorded in headers are relative to the start of the payload.
"""

from __future__ import annotations

import json
import struct

from .errors import FormatError

_LEN = struct.Struct("<I")


def write_container(path, magic: bytes, header: dict, payload: bytes) -> None:
    blob = json.dumps(header, ensure_ascii=True, separators=(",", ":")).encode("utf-8")
    with open(path, "wb") as fh:
        fh.write(magic)
        fh.write(_LEN.pack(len(blob)))
        fh.write(blob)
        fh.write(payload)


def read_container(path, magic: bytes) -> tuple[dict, bytes]:
    with open(path, "rb") as fh:
        got = fh.read(len(magic))
        if got != magic:
            raise FormatError(
                f"{path}: bad magic {got!r}, expected {magic!r}"
            )
        raw_len = fh.read(_LEN.size)
        if len(raw_len) != _LEN.size:
            raise FormatError(f"{path}: truncated header length field")
        (hlen,) = _LEN.unpack(raw_len)
        blob = fh.read(hlen)
        if len(blob) != hlen:
            raise FormatError(f"{path}: truncated JSON header")
        try:
            header = json.loads(blob.decode("utf-8"))
        except (UnicodeDecodeError, json.JSONDecodeError) as exc:
            raise FormatError(f"{path}: unreadable JSON header: {exc}") from exc
        payload = fh.read()
    return header, payload
