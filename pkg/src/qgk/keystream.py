"""Deterministic hash-counter keystream and unbiased integer draws.

Stream definition: block i = SHA-256(seed || BE64(i)), the stream being the
concatenation of blocks.  Every randomized-looking step in the pipeline
(circuit angles, region permutations, shot sampling) reads from one of these
streams, which is what makes encode and decode reproduce each other exactly.

Uniform integers in [0, m) come from consecutive big-endian 8-byte words by
modulo rejection: words >= floor(2^64 / m) * m are discarded so the modulo
carries no bias.
"""

from __future__ import annotations

import hashlib
import struct

import numpy as np

_BLOCK_SIZE = 32
_UINT64_MAX = np.uint64(0xFFFFFFFFFFFFFFFF)


class KeyStream:
    """Byte stream seeded by a 32-byte digest; read position advances."""

    def __init__(self, seed: bytes):
        if not isinstance(seed, (bytes, bytearray)):
            raise TypeError("seed must be bytes")
        self._seed = bytes(seed)
        self._base = hashlib.sha256(self._seed)
        self._pos = 0

    def _block(self, index: int) -> bytes:
        h = self._base.copy()
        h.update(struct.pack(">Q", index))
        return h.digest()

    def _bytes_at(self, pos: int, n: int) -> bytes:
        first = pos // _BLOCK_SIZE
        last = (pos + n + _BLOCK_SIZE - 1) // _BLOCK_SIZE
        buf = b"".join(self._block(i) for i in range(first, last))
        off = pos - first * _BLOCK_SIZE
        return buf[off : off + n]

    def read(self, n: int) -> bytes:
        """Consume and return the next n stream bytes."""
        out = self._bytes_at(self._pos, n)
        self._pos += n
        return out

    def words(self, count: int) -> np.ndarray:
        """Consume the next `count` big-endian 8-byte words as uint64."""
        raw = self.read(8 * count)
        return np.frombuffer(raw, dtype=">u8").astype(np.uint64)

    def next_word(self) -> int:
        return int(self.words(1)[0])

    def uniform(self, m: int) -> int:
        """Unbiased draw from [0, m) by modulo rejection."""
        if m <= 0:
            raise ValueError("m must be positive")
        limit = (2**64 // m) * m
        while True:
            w = self.next_word()
            if w < limit:
                return w % m

    def uniform_many(self, ms: np.ndarray) -> np.ndarray:
        """Vectorized `uniform` for an array of moduli, in draw order.

        Rejections are vanishingly rare for small moduli (probability below
        m / 2^64 per draw) but must still consume extra words exactly like the
        scalar path; the stream position is rewound past any mis-assigned
        words so both paths agree bit for bit.
        """
        ms = np.ascontiguousarray(ms, dtype=np.uint64)
        out = np.empty(len(ms), dtype=np.uint64)
        filled = 0
        while filled < len(ms):
            need = len(ms) - filled
            words = self.words(need)
            m = ms[filled:]
            r1 = _UINT64_MAX % m
            s = (r1 + np.uint64(1)) % m
            threshold = np.uint64(0) - s  # wraps to 2^64 - s
            reject = (s != np.uint64(0)) & (words >= threshold)
            if not reject.any():
                out[filled:] = words % m
                return out
            p = int(np.argmax(reject))
            out[filled : filled + p] = words[:p] % m[:p]
            filled += p
            self._pos -= 8 * (need - p)  # un-consume words after the reject
            out[filled] = self.uniform(int(ms[filled]))
            filled += 1
        return out
