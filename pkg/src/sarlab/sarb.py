"""SARB: a bit-exact binary array container.

Layout:
  bytes 0..5    magic b"SARB1\\n"
  bytes 6..13   u64 little-endian JSON header length L
  bytes 14..14+L-1  UTF-8 JSON header:
      {"arrays": [{"name", "dtype", "shape", "byte_offset"}, ...]}
      dtype in {"f64", "c128", "i64"}; byte_offset is relative to the start
      of the payload section (14+L).
  then the packed little-endian payloads; c128 stored as interleaved
  (re, im) f64 pairs.

Writes are canonical (arrays packed contiguously in insertion order, compact
JSON), so identical inputs produce identical bytes.
"""

from __future__ import annotations

import json
import os

import numpy as np

MAGIC = b"SARB1\n"

_DTYPES = {"f64": np.dtype("<f8"), "c128": np.dtype("<c16"),
           "i64": np.dtype("<i8")}
_NAMES = {np.dtype(np.float64): "f64", np.dtype(np.complex128): "c128",
          np.dtype(np.int64): "i64"}


class SarbError(ValueError):
    """Raised for malformed containers or invalid write requests."""


def _dtype_name(arr: np.ndarray) -> str:
    key = arr.dtype.newbyteorder("=")
    name = _NAMES.get(np.dtype(key))
    if name is None:
        raise SarbError(f"unsupported dtype {arr.dtype}; "
                        f"use one of {sorted(_DTYPES)}")
    return name


def sarb_bytes(arrays: dict, meta: dict | None = None) -> bytes:
    """Serialize named arrays to SARB bytes (canonical layout).

    meta, when given, is carried as an extra JSON object in the header;
    readers that only want arrays can ignore it.
    """
    index = []
    payloads = []
    offset = 0
    seen = set()
    for name, arr in arrays.items():
        if name in seen:
            raise SarbError(f"duplicate array name {name!r}")
        seen.add(name)
        arr = np.asarray(arr)
        dtype = _dtype_name(arr)
        data = np.ascontiguousarray(arr.astype(_DTYPES[dtype], copy=False)).tobytes()
        index.append({"name": name, "dtype": dtype,
                      "shape": list(arr.shape), "byte_offset": offset})
        payloads.append(data)
        offset += len(data)
    doc: dict = {"arrays": index}
    if meta is not None:
        doc["meta"] = meta
    header = json.dumps(doc, separators=(",", ":"), sort_keys=True).encode("utf-8")
    return b"".join([MAGIC, len(header).to_bytes(8, "little"), header, *payloads])


def write_sarb(path, arrays: dict, meta: dict | None = None) -> None:
    """Write named arrays to a SARB file; rewrite of identical arrays yields
    identical bytes."""
    blob = sarb_bytes(arrays, meta)
    tmp = f"{path}.tmp.{os.getpid()}"
    with open(tmp, "wb") as f:
        f.write(blob)
    os.replace(tmp, path)


def read_sarb_meta(path) -> dict:
    """The header's optional meta object ({} when absent)."""
    with open(path, "rb") as f:
        head = f.read(14)
        if head[:6] != MAGIC:
            raise SarbError(f"bad magic at byte 0: expected {MAGIC!r}, "
                            f"got {head[:6]!r}")
        hlen = int.from_bytes(head[6:14], "little")
        header = json.loads(f.read(hlen).decode("utf-8"))
    return header.get("meta", {})


def read_sarb_bytes(data: bytes, names=None) -> dict:
    """Parse SARB bytes into {name: array}; names optionally selects a subset."""
    if data[:6] != MAGIC:
        raise SarbError(f"bad magic at byte 0: expected {MAGIC!r}, "
                        f"got {data[:6]!r}")
    if len(data) < 14:
        raise SarbError(f"truncated container: {len(data)} bytes, header "
                        "length field needs 14")
    hlen = int.from_bytes(data[6:14], "little")
    if 14 + hlen > len(data):
        raise SarbError(f"header length {hlen} exceeds file size at byte 14")
    try:
        header = json.loads(data[14:14 + hlen].decode("utf-8"))
    except (UnicodeDecodeError, json.JSONDecodeError) as e:
        raise SarbError(f"malformed JSON header at byte 14: {e}") from e
    if not isinstance(header, dict) or "arrays" not in header:
        raise SarbError("header missing 'arrays' index at byte 14")

    payload_start = 14 + hlen
    payload_len = len(data) - payload_start
    out = {}
    seen = set()
    spans = []
    for entry in header["arrays"]:
        name = entry.get("name")
        if not isinstance(name, str) or name in seen:
            raise SarbError(f"missing or duplicate array name {name!r} in header")
        seen.add(name)
        dtype = _DTYPES.get(entry.get("dtype"))
        if dtype is None:
            raise SarbError(f"array {name!r}: unknown dtype {entry.get('dtype')!r}")
        shape = tuple(entry.get("shape", ()))
        offset = entry.get("byte_offset")
        count = int(np.prod(shape, dtype=np.int64)) if shape else 1
        nbytes = count * dtype.itemsize
        if not isinstance(offset, int) or offset < 0 or offset + nbytes > payload_len:
            raise SarbError(
                f"array {name!r}: payload [{offset}, {offset}+{nbytes}) out of "
                f"bounds at byte {payload_start + (offset or 0)}")
        spans.append((offset, offset + nbytes, name))
        if names is not None and name not in names:
            continue
        raw = data[payload_start + offset:payload_start + offset + nbytes]
        out[name] = np.frombuffer(raw, dtype=dtype).reshape(shape).copy()

    spans.sort()
    for (s0, e0, n0), (s1, e1, n1) in zip(spans, spans[1:]):
        if s1 < e0:
            raise SarbError(f"arrays {n0!r} and {n1!r} overlap at byte "
                            f"{payload_start + s1}")
    if names is not None:
        missing = set(names) - seen
        if missing:
            raise SarbError(f"arrays not in container: {sorted(missing)}")
    return out


def read_sarb(path, names=None) -> dict:
    """Read a SARB file into {name: array}."""
    with open(path, "rb") as f:
        return read_sarb_bytes(f.read(), names)


def info_sarb(path) -> list[dict]:
    """Array index of a SARB file: [{name, dtype, shape}] without payloads."""
    with open(path, "rb") as f:
        head = f.read(14)
        if head[:6] != MAGIC:
            raise SarbError(f"bad magic at byte 0: expected {MAGIC!r}, "
                            f"got {head[:6]!r}")
        hlen = int.from_bytes(head[6:14], "little")
        header = json.loads(f.read(hlen).decode("utf-8"))
    return [{"name": e["name"], "dtype": e["dtype"], "shape": tuple(e["shape"])}
            for e in header["arrays"]]
