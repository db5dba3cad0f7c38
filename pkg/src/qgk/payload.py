"""Secret normalization and restoration.

Text and raw bytes pass through unchanged.  Image secrets are resized to a
canonical square, re-encoded as PNG, and base64-encoded, so the embedded byte
string is reproducible and the recovered raster compares pixel-exact against
the canonical resize rather than against a lossily re-decoded original.
"""

from __future__ import annotations

import base64
import binascii
import io
from dataclasses import dataclass
from typing import Tuple, Union

import numpy as np
from PIL import Image

from .crypto import PayloadType
from .errors import FormatError, ParameterError

__all__ = [
    "SecretInput",
    "DEFAULT_RESIZE",
    "normalize",
    "restore",
    "load_secret_image",
]

DEFAULT_RESIZE = 512

# fixed encoder settings keep PNG bytes reproducible across calls
_PNG_OPTS = {"format": "PNG", "optimize": False, "compress_level": 6}


@dataclass(frozen=True)
class SecretInput:
    """A secret to embed: UTF-8 text, opaque bytes, or a decoded image raster."""

    kind: str
    data: Union[str, bytes, np.ndarray]
    resize_target: int = DEFAULT_RESIZE

    def __post_init__(self):
        if self.kind not in ("text", "bytes", "image"):
            raise ParameterError(f"unknown secret kind {self.kind!r}")
        if self.kind == "text" and not isinstance(self.data, str):
            raise ParameterError("text secrets must be str")
        if self.kind == "bytes" and not isinstance(self.data, (bytes, bytearray)):
            raise ParameterError("byte secrets must be bytes")
        if self.kind == "image":
            arr = self.data
            if not isinstance(arr, np.ndarray) or arr.ndim != 3 or arr.dtype != np.uint8:
                raise ParameterError("image secrets must be (H, W, 3|4) uint8 rasters")
            if arr.shape[2] not in (3, 4):
                raise ParameterError("image secrets must have 3 or 4 channels")
        if self.resize_target < 1:
            raise ParameterError("resize target must be positive")


def load_secret_image(path) -> np.ndarray:
    """Decode a PNG or JPEG secret to an RGB raster."""
    try:
        with Image.open(path) as im:
            if im.format not in ("PNG", "JPEG"):
                raise FormatError(f"secret image must be PNG or JPEG, got {im.format or 'unknown'}")
            return np.asarray(im.convert("RGB"), dtype=np.uint8).copy()
    except FileNotFoundError:
        raise
    except FormatError:
        raise
    except Exception as exc:
        raise FormatError(f"cannot decode secret image: {exc}") from exc


def _canonical_raster(arr: np.ndarray, target: int) -> np.ndarray:
    """Resize to target x target RGB; identity when already that size."""
    if arr.shape[2] == 4:
        arr = arr[:, :, :3]
    if arr.shape[0] == target and arr.shape[1] == target:
        return np.ascontiguousarray(arr)
    im = Image.fromarray(arr, mode="RGB").resize((target, target), Image.BILINEAR)
    return np.asarray(im, dtype=np.uint8)


def normalize(secret: SecretInput) -> Tuple[bytes, PayloadType]:
    """Produce the byte string that gets encrypted, plus its header type tag.

    Image path: resize to the canonical square, PNG-encode, base64 with the
    standard alphabet and padding. Text is UTF-8; bytes pass through.
    """
    if secret.kind == "text":
        return secret.data.encode("utf-8"), PayloadType.RAW_BYTES
    if secret.kind == "bytes":
        return bytes(secret.data), PayloadType.RAW_BYTES
    raster = _canonical_raster(secret.data, secret.resize_target)
    buf = io.BytesIO()
    Image.fromarray(raster, mode="RGB").save(buf, **_PNG_OPTS)
    return base64.b64encode(buf.getvalue()), PayloadType.IMAGE_PNG_B64


def restore(payload: bytes, payload_type: PayloadType) -> Union[bytes, np.ndarray]:
    """Invert normalize: bytes for raw payloads, the decoded raster for images.

    Decode failures here mean the authenticated payload was malformed, which
    is treated as corruption by callers.
    """
    if payload_type == PayloadType.RAW_BYTES:
        return payload
    try:
        png = base64.b64decode(payload, validate=True)
    except (binascii.Error, ValueError) as exc:
        raise FormatError("payload is not valid base64") from exc
    try:
        with Image.open(io.BytesIO(png)) as im:
            if im.format != "PNG":
                raise FormatError("decoded payload is not PNG")
            return np.asarray(im.convert("RGB"), dtype=np.uint8).copy()
    except FormatError:
        raise
    except Exception as exc:
        raise FormatError(f"cannot decode recovered image: {exc}") from exc
