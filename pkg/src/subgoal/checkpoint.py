"""Parameter checkpoints: named float64 arrays in one binary container.

Layout: an 8-byte little-endian header length, a JSON header listing
(name, shape, offset) for each array plus optional metadata, then the
raw little-endian float64 payload. Offsets are bytes into the payload.
"""

import json
import struct

import numpy as np

_LEN_FMT = "<Q"


def save_arrays(path, named_arrays, meta=None):
    """Write `named_arrays` (mapping name -> ndarray) to `path`.

    Iteration order of the mapping fixes the on-disk order, so passing the
    same mapping twice produces byte-identical files.
    """
    entries = []
    payload = bytearray()
    for name, arr in named_arrays.items():
        a = np.ascontiguousarray(arr, dtype="<f8")
        entries.append({"name": name, "shape": list(a.shape), "offset": len(payload)})
        payload.extend(a.tobytes())
    header = {"arrays": entries}
    if meta is not None:
        header["meta"] = meta
    hbytes = json.dumps(header, sort_keys=True).encode("utf-8")
    with open(path, "wb") as f:
        f.write(struct.pack(_LEN_FMT, len(hbytes)))
        f.write(hbytes)
        f.write(bytes(payload))


def load_arrays(path):
    """Read a container; returns (dict name -> float64 ndarray, meta or None)."""
    with open(path, "rb") as f:
        raw = f.read()
    (hlen,) = struct.unpack_from(_LEN_FMT, raw, 0)
    header = json.loads(raw[8 : 8 + hlen].decode("utf-8"))
    payload = raw[8 + hlen :]
    out = {}
    for e in header["arrays"]:
        shape = tuple(e["shape"])
        count = int(np.prod(shape)) if shape else 1
        a = np.frombuffer(payload, dtype="<f8", count=count, offset=e["offset"])
        out[e["name"]] = a.reshape(shape).astype(np.float64)
    return out, header.get("meta")


def mlp_to_named(prefix, params):
    """Flatten an MlpParams into {prefix.w0, prefix.b0, ...} arrays."""
    out = {}
    for i, (w, b) in enumerate(zip(params.weights, params.biases)):
        out[f"{prefix}.w{i}"] = w.data
        out[f"{prefix}.b{i}"] = b.data
    return out


def mlp_from_named(prefix, named):
    """Rebuild MlpParams saved under `prefix`; layers found by index scan."""
    from .nn import MlpParams

    weights, biases = [], []
    i = 0
    while f"{prefix}.w{i}" in named:
        weights.append(named[f"{prefix}.w{i}"])
        biases.append(named[f"{prefix}.b{i}"])
        i += 1
    if not weights:
        raise KeyError(f"no arrays under prefix {prefix!r}")
    return MlpParams(weights, biases)
