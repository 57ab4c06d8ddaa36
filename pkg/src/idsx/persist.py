"""Binary model snapshots.

Layout (integers little-endian):

    magic    4 bytes   b"IDSX"
    version  u16       currently 1
    hlen     u32       length of the JSON config block
    header   hlen bytes, UTF-8 JSON: pulse, readout, inference settings,
                        and per-plane geometry (dims, device params,
                        r_couple, quantizers)
    w data   one float64 row-major block per plane, in plane order
    crc      u32       CRC32 of every preceding byte

Loading validates magic, version, lengths and the checksum before any
object is built, so a corrupt or truncated file never yields a partially
loaded model.  Snapshots of the same model are byte-identical.
"""

from __future__ import annotations

import json
import struct
import zlib
from pathlib import Path

import numpy as np

from .alm import Model
from .device import DeviceParams
from .errors import StateFormatError
from .plane import Plane, Quantizer
from .readout import ReadoutConfig
from .spreading import PulseSpec

MAGIC = b"IDSX"
VERSION = 1
_PREFIX = struct.Struct("<4sHI")


def _quant_dict(q: Quantizer) -> dict:
    return {"lo": q.lo, "hi": q.hi, "bins": q.bins}


def dumps_model(model: Model) -> bytes:
    header = {
        "epsilon_weight": model.epsilon_weight,
        "pulse": {"v0": model.pulse.v0, "t0": model.pulse.t0, "steps": model.pulse.steps},
        "readout": {
            "v_in": model.readout_cfg.v_in,
            "v_dd": model.readout_cfg.v_dd,
            "r_res": model.readout_cfg.r_res,
            "r_x": model.readout_cfg.r_x,
            "delta_threshold": model.readout_cfg.delta_threshold,
        },
        "planes": [
            {
                "m": p.m,
                "n": p.n,
                "r_couple": p.r_couple,
                "params": {
                    "r_on": p.params.r_on,
                    "r_off": p.params.r_off,
                    "d": p.params.d,
                    "mu_v": p.params.mu_v,
                },
                "x_quant": _quant_dict(p.x_quant),
                "y_quant": _quant_dict(p.y_quant),
                "block_reverse": p.block_reverse,
            }
            for p in model.planes
        ],
    }
    blob = json.dumps(header, separators=(",", ":")).encode("utf-8")
    parts = [_PREFIX.pack(MAGIC, VERSION, len(blob)), blob]
    for plane in model.planes:
        parts.append(np.ascontiguousarray(plane.w, dtype="<f8").tobytes())
    body = b"".join(parts)
    return body + struct.pack("<I", zlib.crc32(body))


def loads_model(data: bytes) -> Model:
    if len(data) < _PREFIX.size + 4:
        raise StateFormatError(f"snapshot too short ({len(data)} bytes)")
    magic, version, hlen = _PREFIX.unpack_from(data, 0)
    if magic != MAGIC:
        raise StateFormatError(f"bad magic {magic!r}, expected {MAGIC!r}")
    if version != VERSION:
        raise StateFormatError(f"unsupported snapshot version {version}")
    if _PREFIX.size + hlen + 4 > len(data):
        raise StateFormatError("header length exceeds file size")

    body, (crc_stored,) = data[:-4], struct.unpack("<I", data[-4:])
    if zlib.crc32(body) != crc_stored:
        raise StateFormatError("checksum mismatch; snapshot is corrupt")

    try:
        header = json.loads(data[_PREFIX.size : _PREFIX.size + hlen].decode("utf-8"))
        plane_specs = header["planes"]
        expected = _PREFIX.size + hlen + sum(p["m"] * p["n"] * 8 for p in plane_specs) + 4
        if expected != len(data):
            raise StateFormatError(f"size mismatch: expected {expected} bytes, file has {len(data)}")
        offset = _PREFIX.size + hlen
        planes = []
        for spec in plane_specs:
            m, n = spec["m"], spec["n"]
            w = np.frombuffer(data, dtype="<f8", count=m * n, offset=offset).reshape(m, n).copy()
            offset += m * n * 8
            planes.append(
                Plane(
                    m=m,
                    n=n,
                    params=DeviceParams(**spec["params"]),
                    r_couple=spec["r_couple"],
                    x_quant=Quantizer(**spec["x_quant"]),
                    y_quant=Quantizer(**spec["y_quant"]),
                    w=w,
                    block_reverse=spec.get("block_reverse", False),
                )
            )
        return Model(
            planes=planes,
            readout_cfg=ReadoutConfig(**header["readout"]),
            pulse=PulseSpec(**header["pulse"]),
            epsilon_weight=header["epsilon_weight"],
        )
    except StateFormatError:
        raise
    except (KeyError, TypeError, ValueError, json.JSONDecodeError) as exc:
        raise StateFormatError(f"malformed snapshot header: {exc}") from None


def save_model(model: Model, path) -> None:
    Path(path).write_bytes(dumps_model(model))


def load_model(path) -> Model:
    return loads_model(Path(path).read_bytes())
