"""Image and FMAP tensor serialization, JSON report emission."""

from __future__ import annotations

import json
import struct
from pathlib import Path

import numpy as np
from PIL import Image, UnidentifiedImageError

from fst.errors import (
    BadMagic,
    BadVersion,
    CorruptFile,
    SizeMismatch,
    UnsupportedFormat,
)
from fst.metrics import VerificationReport
from fst.tensor import as_fmap

FMAP_MAGIC = b"FMAP"
FMAP_VERSION = 1
_HEADER = struct.Struct("<4sIIII")
PNG_MAGIC = b"\x89PNG\r\n\x1a\n"

REPORT_SCHEMA = {
    "type": "object",
    "required": ["version", "seed", "checks", "timings"],
    "additionalProperties": False,
    "properties": {
        "version": {"type": "integer", "const": 1},
        "seed": {"type": "integer"},
        "checks": {
            "type": "array",
            "items": {
                "type": "object",
                "required": ["name", "residual", "tolerance", "passed", "detail"],
                "additionalProperties": False,
                "properties": {
                    "name": {"type": "string"},
                    "residual": {"type": "number"},
                    "tolerance": {"type": "number"},
                    "passed": {"type": "boolean"},
                    "detail": {"type": "string"},
                },
            },
        },
        "timings": {"type": "object", "additionalProperties": {"type": "number", "minimum": 0}},
    },
}


def write_fmap(f, path) -> None:
    f = as_fmap(f)
    c, h, w = f.shape
    with open(path, "wb") as fh:
        fh.write(_HEADER.pack(FMAP_MAGIC, FMAP_VERSION, c, h, w))
        fh.write(f.astype("<f8").tobytes())


def read_fmap(path) -> np.ndarray:
    raw = Path(path).read_bytes()
    if len(raw) < _HEADER.size:
        raise SizeMismatch(f"{path}: {len(raw)} bytes is shorter than the FMAP header")
    magic, version, c, h, w = _HEADER.unpack_from(raw)
    if magic != FMAP_MAGIC:
        raise BadMagic(f"{path}: magic {magic!r} is not {FMAP_MAGIC!r}")
    if version != FMAP_VERSION:
        raise BadVersion(f"{path}: unsupported FMAP version {version}")
    expected = _HEADER.size + 8 * c * h * w
    if len(raw) != expected or c * h * w == 0:
        raise SizeMismatch(f"{path}: {len(raw)} bytes, header declares {expected} for {c}x{h}x{w}")
    data = np.frombuffer(raw, dtype="<f8", offset=_HEADER.size).astype(np.float64)
    return data.reshape(c, h, w)


def read_image(path) -> np.ndarray:
    """PNG or binary PPM (P6), 8-bit, as a float (C, H, W) map in [0, 255]."""
    path = Path(path)
    with open(path, "rb") as fh:
        head = fh.read(8)
    if not (head.startswith(PNG_MAGIC) or head[:2] == b"P6"):
        raise UnsupportedFormat(f"{path}: not a PNG or P6 PPM file")
    try:
        with Image.open(path) as im:
            im.load()
            mode = im.mode
            if mode in ("1", "L"):
                im = im.convert("L")
            elif mode == "LA":
                im = im.convert("L")
            elif mode in ("RGB", "RGBA", "P", "PA"):
                im = im.convert("RGB")
            else:
                raise UnsupportedFormat(f"{path}: image mode {mode} is not 8-bit gray/RGB")
            arr = np.asarray(im, dtype=np.float64)
    except (UnidentifiedImageError, SyntaxError, ValueError, OSError) as exc:
        if isinstance(exc, UnsupportedFormat):
            raise
        raise CorruptFile(f"{path}: {exc}") from exc
    if arr.ndim == 2:
        return arr[None].copy()
    return np.ascontiguousarray(arr.transpose(2, 0, 1))


def quantize(f) -> np.ndarray:
    """Clamp to [0, 255] and round half-to-even."""
    return np.rint(np.clip(as_fmap(f), 0.0, 255.0)).astype(np.uint8)


def write_image(f, path) -> None:
    path = Path(path)
    q = quantize(f)
    c = q.shape[0]
    ext = path.suffix.lower()
    if ext not in (".png", ".ppm"):
        raise UnsupportedFormat(f"{path}: output must be .png or .ppm")
    if ext == ".ppm" and c != 3:
        raise UnsupportedFormat(f"{path}: P6 PPM needs 3 channels, got {c}")
    if c == 1:
        im = Image.fromarray(q[0])
    elif c == 3:
        im = Image.fromarray(np.ascontiguousarray(q.transpose(1, 2, 0)))
    else:
        raise UnsupportedFormat(f"{path}: images need 1 or 3 channels, got {c}")
    im.save(path, format="PNG" if ext == ".png" else "PPM")


def is_fmap_path(path) -> bool:
    path = Path(path)
    if path.suffix.lower() == ".fmap":
        return True
    try:
        with open(path, "rb") as fh:
            return fh.read(4) == FMAP_MAGIC
    except OSError:
        return False


def read_any(path) -> np.ndarray:
    return read_fmap(path) if is_fmap_path(path) else read_image(path)


def write_any(f, path) -> None:
    if Path(path).suffix.lower() == ".fmap":
        write_fmap(f, path)
    else:
        write_image(f, path)


def report_json(report: VerificationReport) -> str:
    return json.dumps(report.as_dict(), indent=2, sort_keys=False) + "\n"


def write_report(report: VerificationReport, path) -> None:
    Path(path).write_text(report_json(report))
