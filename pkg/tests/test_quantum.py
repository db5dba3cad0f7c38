"""Circuit derivation, exact Born evaluation, gate key, and shot sampling."""

import hashlib
import math
import struct

import numpy as np
import pytest

from qgk.analysis import total_variation_distance
from qgk.errors import ParameterError
from qgk.keystream import KeyStream
from qgk.quantum import (
    BornDistribution,
    CircuitSpec,
    NoiseParams,
    ShotCounts,
    derive_gate_key,
    derive_parameters,
    encode_distribution,
    evaluate_statevector,
    sample_shots,
)

from oracle import born_oracle

ZERO_SEED = bytes(32)

# frozen: first three keystream words of the zero seed scaled by 2*pi / 2^64
GOLDEN_ANGLES = [1.0849851044888155, 2.2272601458691903, 5.179341882241624]

# frozen: SHA256("0000" || BE64(10^9) || 15 * BE64(0)) for the identity circuit
GOLDEN_ZERO_THETA_KEY = "f7dd36b53073beeeeab5383010aa1468f77e4deb2edd2666cf28b8c5811a17bd"


def _uniform_spec(n, d, value=0.0):
    return CircuitSpec(n_qubits=n, depth=d, parameters=np.full(3 * n * d, value))


def test_angle_goldens_zero_seed():
    spec = derive_parameters(ZERO_SEED, n=4, d=3)
    assert spec.parameters[:3].tolist() == GOLDEN_ANGLES


def test_angles_match_word_formula():
    seed = hashlib.sha256(b"angle formula").digest()
    spec = derive_parameters(seed, n=3, d=2)
    words = KeyStream(seed).words(18)
    want = words.astype(np.float64) * (2.0 * math.pi / 2.0**64)
    assert np.array_equal(spec.parameters, want)


def test_angles_in_range_many_seeds():
    for i in range(1000):
        seed = hashlib.sha256(b"range" + str(i).encode()).digest()
        params = derive_parameters(seed, n=2, d=2).parameters
        assert np.all(params >= 0.0)
        assert np.all(params < 2.0 * math.pi)


def test_parameter_index_convention():
    # angle(layer, qubit, axis) must read slot (layer*n + qubit)*3 + axis
    n, d = 3, 4
    spec = derive_parameters(hashlib.sha256(b"index").digest(), n=n, d=d)
    for layer in range(d):
        for qubit in range(n):
            for axis in range(3):
                slot = (layer * n + qubit) * 3 + axis
                assert spec.angle(layer, qubit, axis) == spec.parameters[slot]


def test_identity_circuit_concentrates_on_zero():
    dist = evaluate_statevector(_uniform_spec(4, 3))
    assert dist.probabilities[0] == pytest.approx(1.0, abs=1e-15)
    assert float(dist.probabilities[1:].sum()) == pytest.approx(0.0, abs=1e-15)
    assert dist.modal_bitstring() == "0000"


def test_single_qubit_pi_flip():
    # RX(pi) on |0> lands on |1> exactly (global phase aside)
    spec = CircuitSpec(n_qubits=1, depth=1, parameters=np.array([math.pi, 0.0, 0.0]))
    dist = evaluate_statevector(spec)
    assert dist.probabilities[1] == pytest.approx(1.0, abs=1e-15)
    assert dist.modal_bitstring() == "1"


def test_qubit_zero_is_most_significant():
    # flip qubit 0 of three, then trace the CNOT ring by hand:
    # |100> -(0->1)-> |110> -(1->2)-> |111> -(2->0)-> |011>.
    # under an LSB-first convention the same circuit would end on |110>,
    # so the observed bitstring pins the bit order
    params = np.zeros(9)
    params[0] = math.pi  # RX on qubit 0, layer 0
    dist = evaluate_statevector(CircuitSpec(n_qubits=3, depth=1, parameters=params))
    assert dist.modal_bitstring() == "011"
    assert dist.probabilities[0b011] == pytest.approx(1.0, abs=1e-12)


@pytest.mark.parametrize("n,d", [(1, 1), (2, 3), (3, 2), (4, 3)])
def test_statevector_matches_dense_oracle(n, d):
    seed = hashlib.sha256(f"oracle {n} {d}".encode()).digest()
    spec = derive_parameters(seed, n=n, d=d)
    got = evaluate_statevector(spec).probabilities
    want = born_oracle(n, d, spec.parameters)
    assert np.max(np.abs(got - want)) < 1e-12


def test_probabilities_sum_to_one():
    for i in range(50):
        seed = hashlib.sha256(b"sum" + str(i).encode()).digest()
        dist = evaluate_statevector(derive_parameters(seed, n=4, d=3))
        assert abs(float(dist.probabilities.sum()) - 1.0) < 1e-10


def test_evaluation_is_bit_stable():
    spec = derive_parameters(hashlib.sha256(b"stable").digest(), n=4, d=3)
    first = evaluate_statevector(spec).probabilities
    for _ in range(100):
        again = evaluate_statevector(spec).probabilities
        assert np.array_equal(first, again)


def test_encode_distribution_quantizes():
    dist = BornDistribution(n_qubits=1, probabilities=np.array([0.25, 0.75]))
    blob = encode_distribution(dist)
    assert blob == struct.pack(">Q", 250_000_000) + struct.pack(">Q", 750_000_000)


def test_encode_distribution_absorbs_tiny_wiggle():
    eps = 1e-13
    a = BornDistribution(n_qubits=1, probabilities=np.array([0.25 - eps, 0.75 + eps]))
    b = BornDistribution(n_qubits=1, probabilities=np.array([0.25 + eps, 0.75 - eps]))
    assert encode_distribution(a) == encode_distribution(b)


def test_gate_key_golden_identity_circuit():
    dist = evaluate_statevector(_uniform_spec(4, 3))
    assert derive_gate_key(dist).hex() == GOLDEN_ZERO_THETA_KEY


def test_gate_key_tie_breaks_to_smallest_bitstring():
    dist = BornDistribution(n_qubits=2, probabilities=np.full(4, 0.25))
    assert dist.modal_bitstring() == "00"
    want = hashlib.sha256(
        b"00" + b"".join(struct.pack(">Q", 250_000_000) for _ in range(4))
    ).digest()
    assert derive_gate_key(dist) == want


def test_gate_key_deterministic_across_recomputation():
    seed = hashlib.sha256(b"gate determinism").digest()
    keys = {
        derive_gate_key(evaluate_statevector(derive_parameters(seed, 4, 3)))
        for _ in range(100)
    }
    assert len(keys) == 1


def test_sample_shots_point_mass():
    probs = np.zeros(8)
    probs[0b101] = 1.0
    dist = BornDistribution(n_qubits=3, probabilities=probs)
    counts = sample_shots(dist, 500, hashlib.sha256(b"point").digest())
    assert counts.counts == {"101": 500}
    assert counts.modal_bitstring() == "101"


def test_sample_shots_readout_flips_all_bits():
    # rho_ro = 1 flips every bit of every shot deterministically
    probs = np.zeros(4)
    probs[0b00] = 1.0
    dist = BornDistribution(n_qubits=2, probabilities=probs)
    noise = NoiseParams(rho_dep=0.0, rho_ro=1.0)
    counts = sample_shots(dist, 200, hashlib.sha256(b"flip").digest(), noise)
    assert counts.counts == {"11": 200}


def test_sample_shots_full_depolarizing_is_uniformish():
    probs = np.zeros(4)
    probs[0] = 1.0
    dist = BornDistribution(n_qubits=2, probabilities=probs)
    noise = NoiseParams(rho_dep=1.0, rho_ro=0.0)
    counts = sample_shots(dist, 8192, hashlib.sha256(b"dep").digest(), noise)
    empirical = counts.to_distribution()
    assert total_variation_distance(empirical, np.full(4, 0.25)) < 0.03


def test_sample_shots_deterministic():
    dist = evaluate_statevector(derive_parameters(hashlib.sha256(b"det").digest(), 4, 3))
    seed = hashlib.sha256(b"shot seed").digest()
    noise = NoiseParams()
    a = sample_shots(dist, 1024, seed, noise)
    b = sample_shots(dist, 1024, seed, noise)
    assert a.counts == b.counts
    c = sample_shots(dist, 1024, hashlib.sha256(b"other seed").digest(), noise)
    assert c.counts != a.counts


def test_sample_shots_converges_to_born():
    # noiseless empirical TVD at 2^16 shots stays small across 100 circuits
    shots = 1 << 16
    worst = 0.0
    for i in range(100):
        seed = hashlib.sha256(b"converge" + str(i).encode()).digest()
        dist = evaluate_statevector(derive_parameters(seed, 4, 3))
        counts = sample_shots(dist, shots, hashlib.sha256(b"cshots" + str(i).encode()).digest())
        tvd = total_variation_distance(counts.to_distribution(), dist.probabilities)
        worst = max(worst, tvd)
    assert worst <= 0.02


def test_shot_counts_to_distribution():
    counts = ShotCounts(n_qubits=2, counts={"00": 1, "11": 3}, shots=4)
    assert counts.to_distribution().tolist() == [0.25, 0.0, 0.0, 0.75]


@pytest.mark.parametrize(
    "kwargs",
    [
        {"n_qubits": 0, "depth": 1, "parameters": np.zeros(0)},
        {"n_qubits": 13, "depth": 1, "parameters": np.zeros(3 * 13)},
        {"n_qubits": 2, "depth": 0, "parameters": np.zeros(0)},
        {"n_qubits": 2, "depth": 65, "parameters": np.zeros(3 * 2 * 65)},
        {"n_qubits": 2, "depth": 1, "parameters": np.zeros(5)},
        {"n_qubits": 2, "depth": 1, "parameters": np.full(6, 7.0)},
        {"n_qubits": 2, "depth": 1, "parameters": np.full(6, -0.1)},
    ],
)
def test_circuit_spec_validation(kwargs):
    with pytest.raises(ParameterError):
        CircuitSpec(**kwargs)


@pytest.mark.parametrize("rho_dep,rho_ro", [(-0.1, 0.0), (0.0, 1.5)])
def test_noise_params_validation(rho_dep, rho_ro):
    with pytest.raises(ParameterError):
        NoiseParams(rho_dep=rho_dep, rho_ro=rho_ro)


def test_noise_params_defaults():
    noise = NoiseParams()
    assert noise.rho_dep == 0.03
    assert noise.rho_ro == 0.01


def test_born_distribution_validation():
    with pytest.raises(ParameterError):
        BornDistribution(n_qubits=2, probabilities=np.array([0.5, 0.5]))
    with pytest.raises(ParameterError):
        BornDistribution(n_qubits=1, probabilities=np.array([0.6, 0.6]))


def test_shot_counts_validation():
    with pytest.raises(ParameterError):
        ShotCounts(n_qubits=1, counts={"0": 2}, shots=3)
    with pytest.raises(ParameterError):
        ShotCounts(n_qubits=1, counts={}, shots=0)


def test_extreme_word_does_not_reach_two_pi():
    # a keystream word within 2^11 of 2^64 would round to exactly 2*pi in
    # float64; the derivation clamps to the previous representable value
    class _Fake:
        def words(self, count):
            return np.full(count, 0xFFFFFFFFFFFFFFFF, dtype=np.uint64)

    words = _Fake().words(3).astype(np.float64) * (2.0 * math.pi / 2.0**64)
    assert words[0] == 2.0 * math.pi  # the hazard is real
    spec = derive_parameters(ZERO_SEED, n=1, d=1)
    assert np.all(spec.parameters < 2.0 * math.pi)
