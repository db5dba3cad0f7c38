"""Seed-conditioned variational circuit, exact Born distribution, gate key.

The circuit is a fixed, non-trainable transformation: per layer, RX/RY/RZ on
every qubit followed by a ring of CNOTs (control q, target (q+1) mod n, q
ascending; skipped when n == 1 since control would equal target).  Angles come
straight off the hash keystream of the quantum sub-seed, so the same recovery
factors always rebuild the same circuit.

Frozen conventions (changing any of these changes every derived gate key):
  * parameter index(layer, qubit, axis) = (layer*n + qubit)*3 + axis,
    axis X=0, Y=1, Z=2; layers are 0-based;
  * qubit 0 is the most significant bit of an output bitstring;
  * rotations use the standard half-angle matrices, e.g.
    RX(t) = [[cos t/2, -i sin t/2], [-i sin t/2, cos t/2]].

The Born distribution is always evaluated by exact statevector arithmetic in
double precision with a fixed gate-application order, never by sampling, so
the derived gate key is bit-reproducible across runs and platforms.  Shot
sampling exists only for the hardware-proxy validation study and plays no
part in the encode/decode path.
"""

from __future__ import annotations

import hashlib
import math
import struct
from dataclasses import dataclass, field

import numpy as np

from .errors import ParameterError
from .keystream import KeyStream

DEFAULT_QUBITS = 4
DEFAULT_DEPTH = 3
MAX_QUBITS = 12
MAX_DEPTH = 64

_TWO_PI = 2.0 * math.pi
_PROB_QUANTUM = 10**9  # fixed-point scale for gate-key encoding


@dataclass(frozen=True)
class CircuitSpec:
    """Qubit count, depth, and the 3*n*d rotation angles."""

    n_qubits: int
    depth: int
    parameters: np.ndarray

    def __post_init__(self):
        if not (1 <= self.n_qubits <= MAX_QUBITS):
            raise ParameterError(f"n_qubits must be in [1, {MAX_QUBITS}]")
        if not (1 <= self.depth <= MAX_DEPTH):
            raise ParameterError(f"depth must be in [1, {MAX_DEPTH}]")
        params = np.ascontiguousarray(self.parameters, dtype=np.float64)
        expected = 3 * self.n_qubits * self.depth
        if params.shape != (expected,):
            raise ParameterError(f"expected {expected} parameters, got {params.shape}")
        if np.any(params < 0.0) or np.any(params >= _TWO_PI):
            raise ParameterError("angles must lie in [0, 2*pi)")
        params.setflags(write=False)
        object.__setattr__(self, "parameters", params)

    def angle(self, layer: int, qubit: int, axis: int) -> float:
        return float(self.parameters[(layer * self.n_qubits + qubit) * 3 + axis])


@dataclass(frozen=True)
class BornDistribution:
    """Exact output probabilities over all 2^n basis bitstrings."""

    n_qubits: int
    probabilities: np.ndarray

    def __post_init__(self):
        probs = np.ascontiguousarray(self.probabilities, dtype=np.float64)
        if probs.shape != (2**self.n_qubits,):
            raise ParameterError("probabilities must have length 2^n_qubits")
        if np.any(probs < 0.0) or np.any(probs > 1.0):
            raise ParameterError("probabilities must lie in [0, 1]")
        if abs(float(probs.sum()) - 1.0) > 1e-10:
            raise ParameterError("probabilities must sum to 1 within 1e-10")
        probs.setflags(write=False)
        object.__setattr__(self, "probabilities", probs)

    def bitstring(self, index: int) -> str:
        return format(index, f"0{self.n_qubits}b")

    def modal_bitstring(self) -> str:
        """Lexicographically smallest bitstring among the maxima."""
        return self.bitstring(int(np.argmax(self.probabilities)))


@dataclass(frozen=True)
class NoiseParams:
    """Two-parameter classical stand-in for device noise.

    rho_dep: probability a shot is replaced by a uniform random bitstring.
    rho_ro:  independent per-bit readout flip probability.
    """

    rho_dep: float = 0.03
    rho_ro: float = 0.01

    def __post_init__(self):
        if not (0.0 <= self.rho_dep <= 1.0 and 0.0 <= self.rho_ro <= 1.0):
            raise ParameterError("noise probabilities must lie in [0, 1]")


@dataclass(frozen=True)
class ShotCounts:
    """Empirical measurement record: bitstring -> count."""

    n_qubits: int
    counts: dict[str, int] = field(default_factory=dict)
    shots: int = 0

    def __post_init__(self):
        if self.shots < 1:
            raise ParameterError("shots must be >= 1")
        if sum(self.counts.values()) != self.shots:
            raise ParameterError("counts must sum to shots")

    def to_distribution(self) -> np.ndarray:
        """Empirical probability vector over all 2^n outcomes."""
        probs = np.zeros(2**self.n_qubits, dtype=np.float64)
        for bits, count in self.counts.items():
            probs[int(bits, 2)] = count
        return probs / self.shots

    def modal_bitstring(self) -> str:
        return format(int(np.argmax(self.to_distribution())), f"0{self.n_qubits}b")


def derive_parameters(quantum_seed: bytes, n: int = DEFAULT_QUBITS, d: int = DEFAULT_DEPTH) -> CircuitSpec:
    """Map the quantum sub-seed to angles: theta_i = 2*pi * (u_i / 2^64).

    u_i is the i-th big-endian 8-byte word of the seed's keystream, so the
    angles are uniform on [0, 2*pi) and identical on every platform.
    """
    count = 3 * n * d
    if not (1 <= n <= MAX_QUBITS and 1 <= d <= MAX_DEPTH):
        raise ParameterError("circuit size out of bounds")
    words = KeyStream(quantum_seed).words(count)
    angles = words.astype(np.float64) * (_TWO_PI / 2.0**64)
    # words within 2^11 of 2^64 round up to 2^64 in float64; keep angles < 2*pi
    np.minimum(angles, np.nextafter(_TWO_PI, 0.0), out=angles)
    return CircuitSpec(n_qubits=n, depth=d, parameters=angles)


def _rx(theta: float) -> np.ndarray:
    c, s = math.cos(theta / 2.0), math.sin(theta / 2.0)
    return np.array([[c, -1j * s], [-1j * s, c]], dtype=complex)


def _ry(theta: float) -> np.ndarray:
    c, s = math.cos(theta / 2.0), math.sin(theta / 2.0)
    return np.array([[c, -s], [s, c]], dtype=complex)


def _rz(theta: float) -> np.ndarray:
    e = np.exp(-0.5j * theta)
    return np.array([[e, 0.0], [0.0, np.conj(e)]], dtype=complex)


def _apply_single(state: np.ndarray, matrix: np.ndarray, qubit: int, n: int) -> np.ndarray:
    psi = state.reshape([2] * n)
    axes = list(range(n))
    axes[qubit], axes[-1] = axes[-1], axes[qubit]
    psi = np.transpose(psi, axes)
    psi = np.tensordot(psi, matrix, axes=([-1], [1]))
    return np.transpose(psi, axes).reshape(-1)


def _apply_cnot(state: np.ndarray, control: int, target: int, n: int) -> np.ndarray:
    psi = state.reshape([2] * n).copy()
    sel10 = [slice(None)] * n
    sel11 = [slice(None)] * n
    sel10[control], sel10[target] = 1, 0
    sel11[control], sel11[target] = 1, 1
    swap = psi[tuple(sel10)].copy()
    psi[tuple(sel10)] = psi[tuple(sel11)]
    psi[tuple(sel11)] = swap
    return psi.reshape(-1)


def evaluate_statevector(spec: CircuitSpec) -> BornDistribution:
    """Exact Born distribution of the circuit applied to |0...0>.

    Gate order is fixed (qubits ascending, RX then RY then RZ, then the CNOT
    ring) so the floating-point result is bit-identical on every run.
    """
    n, d = spec.n_qubits, spec.depth
    state = np.zeros(2**n, dtype=complex)
    state[0] = 1.0
    for layer in range(d):
        for q in range(n):
            base = (layer * n + q) * 3
            state = _apply_single(state, _rx(float(spec.parameters[base])), q, n)
            state = _apply_single(state, _ry(float(spec.parameters[base + 1])), q, n)
            state = _apply_single(state, _rz(float(spec.parameters[base + 2])), q, n)
        if n > 1:
            for q in range(n):
                state = _apply_cnot(state, q, (q + 1) % n, n)
    # |amp|^2 can overshoot 1.0 by an ulp; clip so the type invariant holds
    probs = np.clip(np.abs(state) ** 2, 0.0, 1.0)
    return BornDistribution(n_qubits=n, probabilities=probs)


def encode_distribution(dist: BornDistribution) -> bytes:
    """Fixed-point encoding hashed into the gate key.

    Concatenation over ascending bitstrings of BE64(round(p * 10^9)); the
    quantization makes the key immune to sub-1e-9 floating-point wiggle.
    """
    quantized = np.rint(dist.probabilities * _PROB_QUANTUM).astype(np.uint64)
    return b"".join(struct.pack(">Q", int(v)) for v in quantized)


def derive_gate_key(dist: BornDistribution) -> bytes:
    """Gate key: SHA256(ASCII(modal bitstring) || encoded distribution).

    Ties among maxima break to the lexicographically smallest bitstring.
    """
    modal = dist.modal_bitstring()
    return hashlib.sha256(modal.encode("ascii") + encode_distribution(dist)).digest()


def sample_shots(
    dist: BornDistribution,
    shots: int,
    sampling_seed: bytes,
    noise: NoiseParams | None = None,
) -> ShotCounts:
    """Finite-shot sampling by inverse CDF over keystream uniforms.

    Keystream word layout, fixed for reproducibility: one word per shot when
    noiseless; with noise, n+3 words per shot laid out as
    [sample, depolarize, replacement, readout_0 .. readout_{n-1}].
    The replacement word is always consumed, used only when the depolarize
    draw fires.  Readout word j flips bit j (MSB-first) of the outcome.
    """
    if shots < 1:
        raise ParameterError("shots must be >= 1")
    n = dist.n_qubits
    size = 2**n
    cdf = np.cumsum(dist.probabilities)
    ks = KeyStream(sampling_seed)
    scale = 2.0**-64

    if noise is None:
        u = ks.words(shots).astype(np.float64) * scale
        outcomes = np.minimum(np.searchsorted(cdf, u, side="right"), size - 1)
    else:
        words = ks.words(shots * (n + 3)).reshape(shots, n + 3)
        u_sample = words[:, 0].astype(np.float64) * scale
        outcomes = np.minimum(np.searchsorted(cdf, u_sample, side="right"), size - 1)
        u_dep = words[:, 1].astype(np.float64) * scale
        replace = u_dep < noise.rho_dep
        replacement = (words[:, 2] % np.uint64(size)).astype(np.int64)
        outcomes = np.where(replace, replacement, outcomes)
        u_ro = words[:, 3:].astype(np.float64) * scale
        flips = u_ro < noise.rho_ro
        bit_values = 1 << np.arange(n - 1, -1, -1, dtype=np.int64)  # MSB-first
        outcomes = outcomes ^ (flips * bit_values).sum(axis=1)

    values, counts = np.unique(outcomes, return_counts=True)
    table = {format(int(v), f"0{n}b"): int(c) for v, c in zip(values, counts)}
    return ShotCounts(n_qubits=n, counts=table, shots=shots)
