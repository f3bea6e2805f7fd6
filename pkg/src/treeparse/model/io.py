"""Binary model container.

Layout, all integers little-endian::

    magic      8 bytes  b"TRPMODEL"
    version    u32
    config     u32 length + UTF-8 JSON (sorted keys, no whitespace)
    vocabs     u32 length + UTF-8 JSON (same canonical form)
    count      u32 number of parameter arrays, then per array in name order:
      name     u16 length + UTF-8
      ndim     u8, followed by ndim u32 dimensions
      data     float32 '<f4', C order
"""

from __future__ import annotations

import io
import json
import struct
from pathlib import Path

import numpy as np

from ..errors import DataError
from .config import ModelConfig
from .network import ParserModel, Vocabularies

MAGIC = b"TRPMODEL"
VERSION = 1


class ModelFormatError(DataError):
    pass


def _canonical(obj) -> bytes:
    return json.dumps(obj, sort_keys=True, separators=(",", ":"), ensure_ascii=False).encode("utf-8")


def dumps(model: ParserModel) -> bytes:
    out = io.BytesIO()
    out.write(MAGIC)
    out.write(struct.pack("<I", VERSION))
    for block in (_canonical(model.config.to_dict()), _canonical(model.vocabs.to_dict())):
        out.write(struct.pack("<I", len(block)))
        out.write(block)
    out.write(struct.pack("<I", len(model.params)))
    for name in sorted(model.params):
        array = model.params[name]
        encoded = name.encode("utf-8")
        out.write(struct.pack("<H", len(encoded)))
        out.write(encoded)
        out.write(struct.pack("<B", array.ndim))
        out.write(struct.pack(f"<{array.ndim}I", *array.shape))
        out.write(np.ascontiguousarray(array, dtype="<f4").tobytes())
    return out.getvalue()


def loads(data: bytes) -> ParserModel:
    buf = memoryview(data)
    pos = 0

    def take(size: int) -> memoryview:
        nonlocal pos
        if pos + size > len(buf):
            raise ModelFormatError("model file is truncated")
        chunk = buf[pos:pos + size]
        pos += size
        return chunk

    def unpack(fmt: str):
        return struct.unpack(fmt, take(struct.calcsize(fmt)))

    if bytes(take(len(MAGIC))) != MAGIC:
        raise ModelFormatError("not a treeparse model file")
    (version,) = unpack("<I")
    if version != VERSION:
        raise ModelFormatError(f"unsupported model format version {version}")
    try:
        (size,) = unpack("<I")
        config = ModelConfig.from_dict(json.loads(bytes(take(size)).decode("utf-8")))
        (size,) = unpack("<I")
        vocabs = Vocabularies.from_dict(json.loads(bytes(take(size)).decode("utf-8")))
    except (ValueError, TypeError, KeyError) as err:
        raise ModelFormatError(f"bad header: {err}") from None
    (count,) = unpack("<I")
    params = {}
    for _ in range(count):
        (length,) = unpack("<H")
        name = bytes(take(length)).decode("utf-8")
        (ndim,) = unpack("<B")
        shape = unpack(f"<{ndim}I")
        n_items = int(np.prod(shape, dtype=np.int64))
        params[name] = np.frombuffer(take(4 * n_items), dtype="<f4").reshape(shape).astype(np.float32)
    if pos != len(buf):
        raise ModelFormatError("trailing bytes after parameters")
    try:
        return ParserModel(config, vocabs, params)
    except ValueError as err:
        raise ModelFormatError(str(err)) from None


def save_model(model: ParserModel, path: str | Path) -> None:
    Path(path).write_bytes(dumps(model))


def load_model(path: str | Path) -> ParserModel:
    return loads(Path(path).read_bytes())
