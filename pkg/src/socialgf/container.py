"""Single-file artifact container used by every stage.

Layout (all integers little-endian):

    bytes 0..3    magic b"SGF1"
    bytes 4..7    uint32 header length H
    bytes 8..8+H  header, UTF-8 JSON with sorted keys
    remainder     raw array payloads, concatenated in header order

The header carries {"format_version", "tool_version", "backend", "meta",
"arrays": [{"name", "shape", "dtype"}]}. Array payloads are C-order with the
explicit little-endian dtype given per entry, so files round-trip bit-exactly
and are readable from any platform. meta is caller-defined JSON (config hash,
provenance, schedule constants, ...).
"""

import json
import struct

import numpy as np

import socialgf
from socialgf.errors import ArtifactError

MAGIC = b"SGF1"
FORMAT_VERSION = 1
_ALLOWED_DTYPES = {"<f8", "<i8", "|u1"}


def write_container(path, meta, arrays, backend_name=None):
    """Write meta (JSON-serializable dict) and named arrays to path."""
    entries = []
    payloads = []
    for name, arr in arrays.items():
        arr = np.ascontiguousarray(arr)
        if arr.dtype == np.float64:
            dtype = "<f8"
        elif arr.dtype == np.int64:
            dtype = "<i8"
        elif arr.dtype == np.uint8:
            dtype = "|u1"
        else:
            raise ArtifactError(
                f"array {name!r} has unsupported dtype {arr.dtype}; "
                f"convert to float64/int64/uint8 first")
        data = arr.astype(np.dtype(dtype), copy=False).tobytes(order="C")
        entries.append({"name": name, "shape": list(arr.shape), "dtype": dtype})
        payloads.append(data)
    if backend_name is None:
        from socialgf.backend import BACKEND
        backend_name = BACKEND
    header = {
        "format_version": FORMAT_VERSION,
        "tool_version": socialgf.__version__,
        "backend": backend_name,
        "meta": meta,
        "arrays": entries,
    }
    blob = json.dumps(header, sort_keys=True, separators=(",", ":")).encode("utf-8")
    with open(path, "wb") as f:
        f.write(MAGIC)
        f.write(struct.pack("<I", len(blob)))
        f.write(blob)
        for data in payloads:
            f.write(data)


def read_container(path):
    """Read a container; returns (meta, arrays, header)."""
    try:
        with open(path, "rb") as f:
            raw = f.read()
    except OSError as exc:
        raise ArtifactError(f"cannot read artifact {path}: {exc}") from exc
    if len(raw) < 8 or raw[:4] != MAGIC:
        raise ArtifactError(f"{path} is not a socialgf container (bad magic)")
    (hlen,) = struct.unpack("<I", raw[4:8])
    if len(raw) < 8 + hlen:
        raise ArtifactError(f"{path} is truncated (header)")
    try:
        header = json.loads(raw[8:8 + hlen].decode("utf-8"))
    except (UnicodeDecodeError, json.JSONDecodeError) as exc:
        raise ArtifactError(f"{path} has a corrupt header: {exc}") from exc
    if header.get("format_version") != FORMAT_VERSION:
        raise ArtifactError(
            f"{path} has format_version {header.get('format_version')}, "
            f"this build reads {FORMAT_VERSION}")
    arrays = {}
    offset = 8 + hlen
    for entry in header["arrays"]:
        dtype = entry["dtype"]
        if dtype not in _ALLOWED_DTYPES:
            raise ArtifactError(f"{path}: array {entry['name']!r} has bad dtype {dtype}")
        shape = tuple(int(s) for s in entry["shape"])
        count = int(np.prod(shape)) if shape else 1
        nbytes = count * np.dtype(dtype).itemsize
        if offset + nbytes > len(raw):
            raise ArtifactError(f"{path} is truncated (array {entry['name']!r})")
        arr = np.frombuffer(raw, dtype=np.dtype(dtype), count=count, offset=offset)
        arrays[entry["name"]] = arr.reshape(shape).copy()
        offset += nbytes
    if offset != len(raw):
        raise ArtifactError(f"{path} has {len(raw) - offset} trailing bytes")
    return header["meta"], arrays, header
