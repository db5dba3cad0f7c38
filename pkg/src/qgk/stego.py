"""Dual-region LSB embedding: layout, keyed permutations, header container, PNG I/O.

Channel index space: flattened row-major RGB, index = (y*W + x)*3 + channel.
The header region is the first 256 channel indices; its secrecy comes from the
keyed traversal order, not its location, so a decoder needs no prior knowledge
beyond the seeds.  The payload region is everything after, traversed in an
order keyed by both the payload sub-seed and the circuit-derived gate key.

Header container wire format (32 bytes = 256 bits, big-endian):

    offset  size  field
    0       4     magic "QGK1"
    4       1     version 0x01
    5       1     payload type (0 raw bytes, 1 base64-of-PNG image)
    6       12    AEAD nonce
    18      8     ciphertext length
    26      2     reserved, zero
    28      4     CRC-32 of bytes 0..27

CRC failure and AEAD failure are reported identically downstream; the CRC only
exists to reject wrong seeds cheaply before attempting decryption.
"""

from __future__ import annotations

import hashlib
import logging
import struct
import zlib
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from PIL import Image

from .crypto import PayloadType, TAG_LEN
from .errors import CapacityError, FormatError
from .keystream import KeyStream

__all__ = [
    "KeyStream",
    "StegoLayout",
    "HeaderContainer",
    "HEADER_BITS",
    "HEADER_BYTES",
    "keyed_permutation",
    "build_layout",
    "embed_bits",
    "extract_bits",
    "bytes_to_bits",
    "bits_to_bytes",
    "capacity",
    "load_png",
    "save_png",
]

log = logging.getLogger(__name__)

HEADER_BYTES = 32
HEADER_BITS = 8 * HEADER_BYTES
MAGIC = b"QGK1"
VERSION = 0x01

# smallest payload container: 1 ciphertext byte + 16 tag bytes
_MIN_TOTAL_BITS = HEADER_BITS + 8 * (1 + TAG_LEN)


@dataclass(frozen=True)
class StegoLayout:
    """Disjoint header/payload regions and their keyed traversal orders."""

    width: int
    height: int
    header_region: np.ndarray
    payload_region: np.ndarray
    header_perm: np.ndarray
    payload_perm: np.ndarray


@dataclass(frozen=True)
class HeaderContainer:
    """Decoded header fields (magic, version, and CRC are implicit)."""

    payload_type: PayloadType
    nonce: bytes
    ciphertext_len: int

    def pack(self) -> bytes:
        if len(self.nonce) != 12:
            raise FormatError("nonce must be 12 bytes")
        body = MAGIC + bytes([VERSION, int(self.payload_type)]) + self.nonce
        body += struct.pack(">Q", self.ciphertext_len) + b"\x00\x00"
        return body + struct.pack(">I", zlib.crc32(body))

    @classmethod
    def unpack(cls, data: bytes) -> "HeaderContainer":
        if len(data) != HEADER_BYTES:
            raise FormatError("header must be 32 bytes")
        body, crc = data[:28], struct.unpack(">I", data[28:])[0]
        if zlib.crc32(body) != crc:
            raise FormatError("header checksum mismatch")
        if body[:4] != MAGIC or body[4] != VERSION:
            raise FormatError("bad header magic or version")
        try:
            ptype = PayloadType(body[5])
        except ValueError as exc:
            raise FormatError("unknown payload type") from exc
        if body[26:28] != b"\x00\x00":
            raise FormatError("reserved bytes must be zero")
        return cls(
            payload_type=ptype,
            nonce=body[6:18],
            ciphertext_len=struct.unpack(">Q", body[18:26])[0],
        )


# below this size the plain-Python swap loop beats loading a JIT
_NUMBA_MIN = 1 << 15
_fy_kernel = None
_fy_kernel_tried = False


def _load_fy_kernel():
    """JIT-compiled swap loop; import is deferred so small jobs skip the cost."""
    global _fy_kernel, _fy_kernel_tried
    if _fy_kernel_tried:
        return _fy_kernel
    _fy_kernel_tried = True
    try:
        from numba import njit

        @njit(cache=True)
        def fy_swaps(arr, draws):  # pragma: no cover - exercised via wrapper
            k = 0
            for i in range(arr.shape[0] - 1, 0, -1):
                j = draws[k]
                k += 1
                tmp = arr[i]
                arr[i] = arr[j]
                arr[j] = tmp

        fy_swaps(np.arange(4, dtype=np.int64), np.zeros(3, dtype=np.int64))
        _fy_kernel = fy_swaps
    except Exception:  # numba unavailable or JIT failure: pure Python fallback
        _fy_kernel = None
    return _fy_kernel


def keyed_permutation(indices, seed: bytes) -> np.ndarray:
    """Deterministic Fisher-Yates over `indices`, keyed by `seed`.

    Iterates i from the last position down to 1 with j drawn uniformly from
    [0, i] off the seed's keystream, so the result depends only on
    (indices, seed).
    """
    arr = np.array(indices, dtype=np.int64, copy=True)
    if arr.ndim != 1 or arr.shape[0] == 0:
        raise FormatError("indices must be a non-empty 1-D sequence")
    n = arr.shape[0]
    if n == 1:
        return arr
    ks = KeyStream(seed)
    moduli = np.arange(n, 1, -1, dtype=np.uint64)
    draws = ks.uniform_many(moduli).astype(np.int64)
    kernel = _load_fy_kernel() if n >= _NUMBA_MIN else None
    if kernel is not None:
        kernel(arr, draws)
        return arr
    out = arr.tolist()
    js = draws.tolist()
    k = 0
    for i in range(n - 1, 0, -1):
        j = js[k]
        k += 1
        out[i], out[j] = out[j], out[i]
    return np.array(out, dtype=np.int64)


def build_layout(
    width: int,
    height: int,
    header_seed: bytes,
    payload_seed: bytes,
    gate_key: bytes | None,
) -> StegoLayout:
    """Partition the channel index space and key both traversals.

    A None gate_key keys the payload traversal by the payload seed alone;
    that path exists only for the ablation study of the circuit layer.
    """
    total = 3 * width * height
    if total < _MIN_TOTAL_BITS:
        raise CapacityError(
            f"image provides {total} channels; at least {_MIN_TOTAL_BITS} required"
        )
    header_region = np.arange(HEADER_BITS, dtype=np.int64)
    payload_region = np.arange(HEADER_BITS, total, dtype=np.int64)
    if gate_key is None:
        payload_key = payload_seed
    else:
        payload_key = hashlib.sha256(payload_seed + gate_key).digest()
    return StegoLayout(
        width=width,
        height=height,
        header_region=header_region,
        payload_region=payload_region,
        header_perm=keyed_permutation(header_region, header_seed),
        payload_perm=keyed_permutation(payload_region, payload_key),
    )


def bytes_to_bits(data: bytes) -> np.ndarray:
    """Serialize bytes MSB-first into a 0/1 array."""
    return np.unpackbits(np.frombuffer(data, dtype=np.uint8))


def bits_to_bytes(bits: np.ndarray) -> bytes:
    if len(bits) % 8 != 0:
        raise FormatError("bit count must be a multiple of 8")
    return np.packbits(np.asarray(bits, dtype=np.uint8)).tobytes()


def embed_bits(raster: np.ndarray, bits: np.ndarray, perm: np.ndarray) -> np.ndarray:
    """Set the LSB of channel perm[i] to bits[i]; all other bits untouched."""
    bits = np.asarray(bits, dtype=np.uint8)
    if len(bits) > len(perm):
        raise CapacityError(f"{len(bits)} bits exceed region of {len(perm)} channels")
    out = raster.copy()
    slots = perm[: len(bits)]
    out[slots] = (out[slots] & 0xFE) | bits
    return out


def extract_bits(raster: np.ndarray, count: int, perm: np.ndarray) -> np.ndarray:
    """Read `count` LSBs back along the permutation."""
    if count > len(perm):
        raise CapacityError(f"{count} bits exceed region of {len(perm)} channels")
    return (raster[perm[:count]] & 1).astype(np.uint8)


def capacity(width: int, height: int) -> int:
    """Usable payload budget in bytes: (3HW - 2*256 bits)/8 - 200, floored at 0.

    Embedding refuses any ciphertext-plus-tag container larger than this.
    """
    return max(0, (3 * width * height - 2 * HEADER_BITS) // 8 - 200)


def load_png(path, convert: bool = False) -> np.ndarray:
    """Load an 8-bit RGB/RGBA PNG as an (H, W, 3|4) uint8 array.

    16-bit and paletted images are rejected unless `convert` is set, in which
    case they are converted to RGB with a logged warning (conversion breaks
    signature compatibility with the original file, so it is opt-in).
    """
    try:
        with Image.open(path) as im:
            if im.format != "PNG":
                raise FormatError(f"carrier must be PNG, got {im.format or 'unknown'}")
            if im.mode not in ("RGB", "RGBA"):
                if not convert:
                    raise FormatError(f"unsupported PNG mode {im.mode!r}; pass convert to coerce")
                log.warning("converting %s image to RGB; pixel values are re-quantized", im.mode)
                im = im.convert("RGB")
            return np.asarray(im, dtype=np.uint8).copy()
    except FileNotFoundError:
        raise
    except FormatError:
        raise
    except Exception as exc:
        raise FormatError(f"cannot decode PNG: {exc}") from exc


def save_png(path, raster: np.ndarray) -> None:
    """Write an (H, W, 3|4) uint8 raster as a lossless PNG."""
    arr = np.asarray(raster)
    if arr.ndim != 3 or arr.shape[2] not in (3, 4) or arr.dtype != np.uint8:
        raise FormatError("raster must be an (H, W, 3|4) uint8 array")
    mode = "RGB" if arr.shape[2] == 3 else "RGBA"
    Image.fromarray(arr, mode=mode).save(Path(path), format="PNG")
