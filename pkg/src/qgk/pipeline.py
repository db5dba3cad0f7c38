"""Encode/decode orchestration with four-factor recovery and silent failure.

Decode returns either a `Recovered` value or None.  None carries no stage
information: header checksum failure, authentication failure, and payload
corruption are indistinguishable to the caller (a debug flag raises
`StageFailure` instead, for development only).

The ablation modes exist to demonstrate why each design element is present.
They are never reachable without explicitly constructing a config that names
one, and stego images produced under an ablation are not interoperable with
the standard mode.
"""

from __future__ import annotations

import hashlib
import os
from dataclasses import dataclass
from typing import Optional, Union

import numpy as np

from . import crypto, payload as payload_mod, quantum, stego
from .context import (
    RecoveryState,
    SeedBundle,
    compute_image_signature,
    derive_master_seed,
    expand_seeds,
    signature_from_hex,
)
from .errors import CapacityError, FormatError, ParameterError, StageFailure

__all__ = ["PipelineConfig", "Recovered", "ABLATION_MODES", "encode", "decode"]

ABLATION_MODES = ("drop-context", "no-quantum", "single-region", "no-auth")

# stand-in used when the drop-context ablation removes C from key material
_CONTEXT_PLACEHOLDER = b"\x00"


@dataclass(frozen=True)
class PipelineConfig:
    """Tunables shared by encode and decode; both sides must match."""

    iterations: int = crypto.DEFAULT_ITERATIONS
    qubits: int = 4
    depth: int = 3
    resize_target: int = payload_mod.DEFAULT_RESIZE
    ablation: Optional[str] = None
    debug: bool = False

    def __post_init__(self):
        if self.ablation is not None and self.ablation not in ABLATION_MODES:
            raise ParameterError(f"unknown ablation mode {self.ablation!r}")


@dataclass(frozen=True, eq=False)
class Recovered:
    """Successful decode result: raw bytes or a decoded image raster."""

    payload_type: crypto.PayloadType
    data: Union[bytes, np.ndarray]

    @property
    def is_image(self) -> bool:
        return self.payload_type == crypto.PayloadType.IMAGE_PNG_B64

    def __eq__(self, other):
        if not isinstance(other, Recovered):
            return NotImplemented
        if self.payload_type != other.payload_type:
            return False
        if isinstance(self.data, np.ndarray) or isinstance(other.data, np.ndarray):
            return (
                isinstance(self.data, np.ndarray)
                and isinstance(other.data, np.ndarray)
                and self.data.shape == other.data.shape
                and bool(np.array_equal(self.data, other.data))
            )
        return self.data == other.data


def _as_bytes(value: Union[str, bytes], name: str) -> bytes:
    if isinstance(value, str):
        value = value.encode("utf-8")
    if not isinstance(value, (bytes, bytearray)) or len(value) == 0:
        raise ParameterError(f"{name} must be a non-empty string or bytes")
    return bytes(value)


def _effective_context(context: bytes, config: PipelineConfig) -> bytes:
    if config.ablation == "drop-context":
        return _CONTEXT_PLACEHOLDER
    return context


def _validate_raster(raster: np.ndarray, name: str) -> np.ndarray:
    if (
        not isinstance(raster, np.ndarray)
        or raster.ndim != 3
        or raster.dtype != np.uint8
        or raster.shape[2] not in (3, 4)
    ):
        raise FormatError(f"{name} must be an (H, W, 3|4) uint8 raster")
    return raster


def _derive_keys(
    password: bytes, shared_secret: bytes, context: bytes, signature: bytes, config: PipelineConfig
):
    """All key material from the four factors: seeds, AEAD key, gate key."""
    state = RecoveryState(
        password=password,
        shared_secret=shared_secret,
        context_string=context,
        image_signature=signature,
    )
    seeds = expand_seeds(derive_master_seed(state))
    strong = crypto.strengthen_password(
        password, shared_secret, context, iterations=config.iterations
    )
    enc_key = crypto.derive_encryption_key(strong, seeds.encrypt_seed)
    gate_key = _gate_key(seeds, config)
    return seeds, enc_key, gate_key


def _gate_key(seeds: SeedBundle, config: PipelineConfig) -> Optional[bytes]:
    if config.ablation == "no-quantum":
        return None
    spec = quantum.derive_parameters(seeds.quantum_seed, config.qubits, config.depth)
    return quantum.derive_gate_key(quantum.evaluate_statevector(spec))


def _flat_channels(raster: np.ndarray) -> np.ndarray:
    """Row-major RGB channel values; alpha, if any, is excluded."""
    return np.ascontiguousarray(raster[:, :, :3]).reshape(-1)


def _single_region_perm(total: int, seeds: SeedBundle, gate_key: bytes, nonce: bytes) -> np.ndarray:
    # one permutation over every channel, keyed by material that includes the
    # nonce: this is the circular dependency the dual-region layout removes
    key = hashlib.sha256(seeds.payload_seed + (gate_key or b"") + nonce).digest()
    return stego.keyed_permutation(np.arange(total, dtype=np.int64), key)


def encode(
    cover: np.ndarray,
    secret: payload_mod.SecretInput,
    password: Union[str, bytes],
    shared_secret: Union[str, bytes],
    context_string: Union[str, bytes],
    config: Optional[PipelineConfig] = None,
):
    """Embed `secret` into `cover`; returns (stego raster, signature hex).

    The cover is never modified in place.  The returned signature is the
    fourth recovery factor and must reach the recipient out of band.
    """
    config = config or PipelineConfig()
    cover = _validate_raster(cover, "cover")
    height, width = cover.shape[:2]

    password_b = _as_bytes(password, "password")
    shared_b = _as_bytes(shared_secret, "shared secret")
    context_b = _effective_context(_as_bytes(context_string, "context string"), config)

    signature = compute_image_signature(cover)
    seeds, enc_key, gate_key = _derive_keys(password_b, shared_b, context_b, signature, config)

    message, ptype = payload_mod.normalize(secret)
    budget = stego.capacity(width, height)
    if len(message) > budget:
        raise CapacityError(
            f"payload of {len(message)} bytes exceeds capacity of {budget} bytes"
        )

    if config.ablation == "no-auth":
        nonce = os.urandom(crypto.NONCE_LEN)
        ciphertext = _ctr_transform(enc_key, nonce, message)
        tag = bytes(crypto.TAG_LEN)
    else:
        protected = crypto.encrypt_payload(enc_key, message, ptype)
        nonce, ciphertext, tag = protected.nonce, protected.ciphertext, protected.tag

    header = stego.HeaderContainer(
        payload_type=ptype, nonce=nonce, ciphertext_len=len(ciphertext)
    )
    header_bits = stego.bytes_to_bits(header.pack())
    payload_bits = stego.bytes_to_bits(ciphertext + tag)

    flat = _flat_channels(cover)
    if config.ablation == "single-region":
        perm = _single_region_perm(flat.shape[0], seeds, gate_key, nonce)
        flat = stego.embed_bits(flat, np.concatenate([header_bits, payload_bits]), perm)
    else:
        layout = stego.build_layout(width, height, seeds.header_seed, seeds.payload_seed, gate_key)
        if len(payload_bits) > len(layout.payload_perm):
            raise CapacityError("payload container does not fit the payload region")
        flat = stego.embed_bits(flat, header_bits, layout.header_perm)
        flat = stego.embed_bits(flat, payload_bits, layout.payload_perm)

    out = cover.copy()
    out[:, :, :3] = flat.reshape(height, width, 3)
    return out, signature.hex()


def decode(
    stego_raster: np.ndarray,
    password: Union[str, bytes],
    shared_secret: Union[str, bytes],
    context_string: Union[str, bytes],
    reference: Union[np.ndarray, str, bytes],
    config: Optional[PipelineConfig] = None,
) -> Optional[Recovered]:
    """Attempt extraction; returns Recovered on success, None otherwise.

    `reference` is either the original cover raster or the 64-hex-char
    signature.  Every failure mode yields the same None unless config.debug
    is set, in which case StageFailure names the failing stage.
    """
    config = config or PipelineConfig()

    def fail(stage: str) -> None:
        if config.debug:
            raise StageFailure(stage)
        return None

    stego_raster = _validate_raster(stego_raster, "stego image")
    height, width = stego_raster.shape[:2]

    password_b = _as_bytes(password, "password")
    shared_b = _as_bytes(shared_secret, "shared secret")
    context_b = _effective_context(_as_bytes(context_string, "context string"), config)

    if isinstance(reference, np.ndarray):
        signature = compute_image_signature(_validate_raster(reference, "reference"))
    elif isinstance(reference, str):
        signature = signature_from_hex(reference)
    elif isinstance(reference, (bytes, bytearray)) and len(reference) == 32:
        signature = bytes(reference)
    else:
        raise ParameterError("reference must be a raster, 64-hex signature, or 32-byte digest")

    seeds, enc_key, gate_key = _derive_keys(password_b, shared_b, context_b, signature, config)

    if config.ablation == "single-region":
        # the traversal key includes the nonce, but the nonce lives inside the
        # traversal; recovery is impossible by construction
        return fail("layout")

    flat = _flat_channels(stego_raster)
    total = flat.shape[0]
    if total < stego.HEADER_BITS:
        return fail("header")
    header_perm = stego.keyed_permutation(
        np.arange(stego.HEADER_BITS, dtype=np.int64), seeds.header_seed
    )
    try:
        header = stego.HeaderContainer.unpack(
            stego.bits_to_bytes(stego.extract_bits(flat, stego.HEADER_BITS, header_perm))
        )
    except FormatError:
        return fail("header")

    container_bits = 8 * (header.ciphertext_len + crypto.TAG_LEN)
    if container_bits > total - stego.HEADER_BITS:
        return fail("header")

    layout = stego.build_layout(width, height, seeds.header_seed, seeds.payload_seed, gate_key)
    container = stego.bits_to_bytes(
        stego.extract_bits(flat, container_bits, layout.payload_perm)
    )
    ciphertext, tag = container[: header.ciphertext_len], container[header.ciphertext_len :]

    if config.ablation == "no-auth":
        # unauthenticated mode decrypts whatever came out of the traversal
        plaintext = _ctr_transform(enc_key, header.nonce, ciphertext)
    else:
        protected = crypto.ProtectedPayload(
            nonce=header.nonce,
            ciphertext=ciphertext,
            tag=tag,
            plaintext_len=len(ciphertext),
            payload_type=header.payload_type,
        )
        plaintext = crypto.decrypt_payload(enc_key, protected)
        if plaintext is None:
            return fail("auth")

    try:
        data = payload_mod.restore(plaintext, header.payload_type)
    except FormatError:
        return fail("restore")
    return Recovered(payload_type=header.payload_type, data=data)


def _ctr_transform(key: bytes, nonce: bytes, data: bytes) -> bytes:
    """AES-CTR for the no-auth ablation; same function encrypts and decrypts."""
    from cryptography.hazmat.primitives.ciphers import Cipher, algorithms, modes

    counter_block = nonce + bytes(16 - len(nonce))
    cipher = Cipher(algorithms.AES(key), modes.CTR(counter_block))
    enc = cipher.encryptor()
    return enc.update(data) + enc.finalize()
