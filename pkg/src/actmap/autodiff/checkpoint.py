"""Versioned binary checkpoints for named parameter blocks.

Layout: 8-byte magic (includes the format version), u32-LE header length,
UTF-8 JSON header describing each component's shapes/activations, then the
raw little-endian float64 values per component in header order. Round trips
are bit exact.
"""

from __future__ import annotations

import json
import struct
from pathlib import Path

import numpy as np

from .net import NetworkParams, param_count

MAGIC = b"AMCKPT01"


class CheckpointError(ValueError):
    pass


def save_checkpoint(path, components: dict[str, NetworkParams]) -> None:
    header = {
        "components": [
            {
                "name": name,
                "shapes": [list(s) for s in p.shapes],
                "activations": list(p.activations),
            }
            for name, p in components.items()
        ]
    }
    blob = json.dumps(header).encode("utf-8")
    with open(path, "wb") as fh:
        fh.write(MAGIC)
        fh.write(struct.pack("<I", len(blob)))
        fh.write(blob)
        for p in components.values():
            fh.write(np.ascontiguousarray(p.values, dtype="<f8").tobytes())


def load_checkpoint(path) -> dict[str, NetworkParams]:
    data = Path(path).read_bytes()
    if data[:8] != MAGIC:
        raise CheckpointError(f"{path}: bad magic {data[:8]!r}")
    (hlen,) = struct.unpack("<I", data[8:12])
    header = json.loads(data[12 : 12 + hlen].decode("utf-8"))
    out: dict[str, NetworkParams] = {}
    pos = 12 + hlen
    for comp in header["components"]:
        shapes = tuple(tuple(s) for s in comp["shapes"])
        n = param_count(shapes)
        values = np.frombuffer(data, dtype="<f8", count=n, offset=pos).copy()
        pos += 8 * n
        out[comp["name"]] = NetworkParams(shapes, tuple(comp["activations"]), values)
    if pos != len(data):
        raise CheckpointError(f"{path}: {len(data) - pos} trailing bytes")
    return out
