"""Recovery-factor binding: image signature, master seed, sub-seed expansion.

Everything downstream of the four recovery factors (password, shared secret,
context string, image signature) hangs off two constructions:

    master = SHA256(len4(P) || len4(S) || len4(C) || R_I)
    sub    = SHA256(label || master)      for each role label

The 4-byte big-endian length prefixes make the concatenation injective, so
("a","bc") and ("ab","c") can never collide.  Sub-seed labels are fixed ASCII
strings, one per role, so compromising one sub-seed reveals nothing about the
others short of inverting SHA-256.
"""

from __future__ import annotations

import hashlib
import struct
from dataclasses import dataclass

import numpy as np

from .errors import FormatError

DIGEST_LEN = 32

LABEL_HEADER = b"QGK/header"
LABEL_PAYLOAD = b"QGK/payload"
LABEL_QUANTUM = b"QGK/quantum"
LABEL_ENCRYPT = b"QGK/encrypt"


def _len_prefixed(field: bytes) -> bytes:
    return struct.pack(">I", len(field)) + field


@dataclass(frozen=True)
class RecoveryState:
    """The four factors that jointly gate extraction."""

    password: bytes
    shared_secret: bytes
    context_string: bytes
    image_signature: bytes

    def __post_init__(self):
        for name in ("password", "shared_secret", "context_string", "image_signature"):
            value = getattr(self, name)
            if not isinstance(value, (bytes, bytearray)) or len(value) == 0:
                raise FormatError(f"{name} must be non-empty bytes")
        if len(self.image_signature) != DIGEST_LEN:
            raise FormatError("image_signature must be exactly 32 bytes")


@dataclass(frozen=True)
class SeedBundle:
    """Master seed plus the four role-separated sub-seeds."""

    master: bytes
    header_seed: bytes
    payload_seed: bytes
    quantum_seed: bytes
    encrypt_seed: bytes


def compute_image_signature(raster: np.ndarray) -> bytes:
    """Hash the decoded pixel buffer: SHA256(BE32(W) || BE32(H) || RGB bytes).

    Operates on the RGB planes row-major, independent of any file-level
    encoding, so a losslessly re-encoded PNG keeps its signature while any
    single pixel change (including lossy recompression) breaks it.  RGBA
    input is accepted; the alpha plane is ignored.
    """
    arr = np.asarray(raster)
    if arr.ndim != 3 or arr.shape[2] not in (3, 4) or arr.dtype != np.uint8:
        raise FormatError("raster must be an (H, W, 3|4) uint8 array")
    height, width = arr.shape[0], arr.shape[1]
    if height < 1 or width < 1:
        raise FormatError("raster dimensions must be at least 1x1")
    rgb = np.ascontiguousarray(arr[:, :, :3])
    h = hashlib.sha256()
    h.update(struct.pack(">II", width, height))
    h.update(rgb.tobytes())
    return h.digest()


def derive_master_seed(state: RecoveryState) -> bytes:
    """Composite seed over all four recovery factors (length-prefixed)."""
    h = hashlib.sha256()
    h.update(_len_prefixed(state.password))
    h.update(_len_prefixed(state.shared_secret))
    h.update(_len_prefixed(state.context_string))
    h.update(state.image_signature)
    return h.digest()


def expand_seeds(master: bytes) -> SeedBundle:
    """Expand the master seed into role-separated sub-seeds."""
    if len(master) != DIGEST_LEN:
        raise FormatError("master seed must be 32 bytes")

    def sub(label: bytes) -> bytes:
        return hashlib.sha256(label + master).digest()

    return SeedBundle(
        master=bytes(master),
        header_seed=sub(LABEL_HEADER),
        payload_seed=sub(LABEL_PAYLOAD),
        quantum_seed=sub(LABEL_QUANTUM),
        encrypt_seed=sub(LABEL_ENCRYPT),
    )


def signature_to_hex(signature: bytes) -> str:
    """Serialize a signature as 64 lowercase hex characters."""
    if len(signature) != DIGEST_LEN:
        raise FormatError("signature must be 32 bytes")
    return signature.hex()


def signature_from_hex(text: str) -> bytes:
    """Parse the 64-hex-character signature form accepted by decode."""
    text = text.strip()
    if len(text) != 2 * DIGEST_LEN:
        raise FormatError("signature hex must be 64 characters")
    try:
        return bytes.fromhex(text)
    except ValueError as exc:
        raise FormatError("signature hex is not valid hexadecimal") from exc
