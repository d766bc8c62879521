"""Little-endian binary record helpers shared by the checkpoint and dataset formats.

Both formats follow the same scheme: a 4-byte magic, a u32 version, a payload of
length-prefixed records, and a trailing sha256 checksum of everything before it.
"""

from __future__ import annotations

import hashlib
import struct

import numpy as np


class FormatVersionMismatch(ValueError):
    pass


class ChecksumMismatch(ValueError):
    pass


def pack_named_f32(name: str, arr: np.ndarray) -> bytes:
    """(name length, name bytes, ndim, dims..., f32 data) record."""
    data = np.ascontiguousarray(arr, dtype="<f4")
    nb = name.encode("utf-8")
    head = struct.pack("<I", len(nb)) + nb
    head += struct.pack("<I", data.ndim) + struct.pack(f"<{data.ndim}I", *data.shape)
    return head + data.tobytes()


class Reader:
    def __init__(self, buf: bytes, offset: int = 0):
        self.buf = buf
        self.pos = offset

    def take(self, n: int) -> bytes:
        if self.pos + n > len(self.buf):
            raise ValueError("truncated record stream")
        out = self.buf[self.pos:self.pos + n]
        self.pos += n
        return out

    def u32(self) -> int:
        return struct.unpack("<I", self.take(4))[0]

    def named_f32(self) -> tuple[str, np.ndarray]:
        name = self.take(self.u32()).decode("utf-8")
        ndim = self.u32()
        shape = struct.unpack(f"<{ndim}I", self.take(4 * ndim))
        count = int(np.prod(shape)) if ndim else 1
        arr = np.frombuffer(self.take(4 * count), dtype="<f4").reshape(shape).copy()
        return name, arr


def finish_with_checksum(body: bytes) -> bytes:
    return body + hashlib.sha256(body).digest()


def open_checked(raw: bytes, magic: bytes, version: int) -> Reader:
    """Validate magic, version and trailing checksum; return a Reader over the payload."""
    if len(raw) < len(magic) + 4 + 32:
        raise ValueError("file too short")
    body, digest = raw[:-32], raw[-32:]
    if hashlib.sha256(body).digest() != digest:
        raise ChecksumMismatch("trailing sha256 does not match file contents")
    if body[:len(magic)] != magic:
        raise ValueError(f"bad magic {body[:len(magic)]!r}, expected {magic!r}")
    got = struct.unpack("<I", body[len(magic):len(magic) + 4])[0]
    if got != version:
        raise FormatVersionMismatch(f"format version {got}, expected {version}")
    return Reader(body, len(magic) + 4)
