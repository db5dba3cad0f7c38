"""Password strengthening, key derivation, and AES-256-GCM payload protection.

Key path:

    salt = SHA256("QGK/pbkdf2-salt" || len4(S) || len4(C))[:16]
    K_P  = PBKDF2-HMAC-SHA256(password, salt, iterations, 32)
    K_E  = SHA256(K_P || encrypt_seed)

The salt binds the strengthened password to the shared secret and context
string while staying reconstructible at decode time from the recovery factors
alone.  The iteration count is a caller contract (never stored in the image);
both parties must agree on it.

Decryption failure is a normal return value (None), never an exception with
detail: the caller cannot tell a wrong key from a flipped ciphertext bit.
"""

from __future__ import annotations

import enum
import hashlib
import os
import struct
from dataclasses import dataclass

from cryptography.exceptions import InvalidTag
from cryptography.hazmat.primitives.ciphers.aead import AESGCM

from .errors import FormatError

KEY_LEN = 32
NONCE_LEN = 12
TAG_LEN = 16
DEFAULT_ITERATIONS = 100_000

_SALT_LABEL = b"QGK/pbkdf2-salt"


class PayloadType(enum.IntEnum):
    """How the plaintext should be post-processed after decryption."""

    RAW_BYTES = 0
    IMAGE_PNG_B64 = 1


@dataclass(frozen=True)
class ProtectedPayload:
    """Packed protected payload: nonce, ciphertext, tag, length, type flag."""

    nonce: bytes
    ciphertext: bytes
    tag: bytes
    plaintext_len: int
    payload_type: PayloadType

    def __post_init__(self):
        if len(self.nonce) != NONCE_LEN:
            raise FormatError("nonce must be 12 bytes")
        if len(self.tag) != TAG_LEN:
            raise FormatError("tag must be 16 bytes")
        if len(self.ciphertext) != self.plaintext_len:
            raise FormatError("ciphertext length must equal plaintext_len")


def pbkdf2_salt(shared_secret: bytes, context_string: bytes) -> bytes:
    """16-byte salt derived from the shared secret and context string."""
    h = hashlib.sha256()
    h.update(_SALT_LABEL)
    h.update(struct.pack(">I", len(shared_secret)) + shared_secret)
    h.update(struct.pack(">I", len(context_string)) + context_string)
    return h.digest()[:16]


def strengthen_password(
    password: bytes,
    shared_secret: bytes,
    context_string: bytes,
    iterations: int = DEFAULT_ITERATIONS,
) -> bytes:
    """PBKDF2-HMAC-SHA256 over the password with the context-bound salt."""
    if iterations < 1:
        raise ValueError("iterations must be >= 1")
    salt = pbkdf2_salt(shared_secret, context_string)
    return hashlib.pbkdf2_hmac("sha256", password, salt, iterations, KEY_LEN)


def derive_encryption_key(strengthened: bytes, encrypt_seed: bytes) -> bytes:
    """AEAD key: SHA256(K_P || encrypt_seed)."""
    if len(strengthened) != KEY_LEN or len(encrypt_seed) != KEY_LEN:
        raise FormatError("both key inputs must be 32 bytes")
    return hashlib.sha256(strengthened + encrypt_seed).digest()


def encrypt_payload(
    key: bytes, plaintext: bytes, payload_type: PayloadType
) -> ProtectedPayload:
    """AES-256-GCM with a fresh 96-bit random nonce and 128-bit tag."""
    if len(key) != KEY_LEN:
        raise FormatError("key must be 32 bytes")
    if len(plaintext) == 0:
        raise FormatError("plaintext must be non-empty")
    nonce = os.urandom(NONCE_LEN)
    sealed = AESGCM(key).encrypt(nonce, plaintext, None)
    return ProtectedPayload(
        nonce=nonce,
        ciphertext=sealed[:-TAG_LEN],
        tag=sealed[-TAG_LEN:],
        plaintext_len=len(plaintext),
        payload_type=PayloadType(payload_type),
    )


def decrypt_payload(key: bytes, payload: ProtectedPayload) -> bytes | None:
    """Return the plaintext, or None if authentication fails.

    No partial plaintext is ever exposed; every failure collapses to the
    same opaque value.
    """
    if len(key) != KEY_LEN:
        raise FormatError("key must be 32 bytes")
    try:
        return AESGCM(key).decrypt(payload.nonce, payload.ciphertext + payload.tag, None)
    except InvalidTag:
        return None
