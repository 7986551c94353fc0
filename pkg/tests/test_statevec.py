import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import stats

from qdmlab import statevec as sv
from qdmlab.errors import (
    ConfigError,
    EncodingError,
    NormError,
    PostselectError,
    ShapeError,
    StateError,
)

from conftest import random_state_vector


def test_basis_state():
    s = sv.basis_state(3, 5)
    assert s.n_qubits == 3 and s.dim == 8
    assert s.amplitudes[5] == 1.0 and np.count_nonzero(s.amplitudes) == 1


def test_quantum_state_validation():
    with pytest.raises(ShapeError):
        sv.QuantumState(2, np.ones(3, dtype=complex))
    with pytest.raises(NormError):
        sv.QuantumState(1, np.array([1.0, 1.0], dtype=complex))


def test_state_is_immutable():
    s = sv.basis_state(2)
    with pytest.raises(ValueError):
        s.amplitudes[0] = 0.0


def test_amplitude_encode_roundtrip(rng):
    v = np.abs(rng.standard_normal(8))
    v /= np.linalg.norm(v)
    s = sv.amplitude_encode(v)
    np.testing.assert_allclose(sv.decode_amplitudes(s), v, atol=1e-12)


def test_amplitude_encode_errors(rng):
    with pytest.raises(NormError):
        sv.amplitude_encode(np.array([1.0, 1.0]))
    with pytest.raises(ShapeError):
        sv.amplitude_encode(np.ones(3) / np.sqrt(3))
    with pytest.raises(EncodingError):
        sv.amplitude_encode(np.zeros(4), renormalize=True)
    s = sv.amplitude_encode(np.array([3.0, 4.0]), renormalize=True)
    np.testing.assert_allclose(sv.decode_amplitudes(s), [0.6, 0.8], atol=1e-12)


def test_decode_from_shots_converges(rng):
    s = sv.amplitude_encode(random_state_vector(rng, 3))
    est = sv.decode_from_shots(s, 200_000, rng)
    np.testing.assert_allclose(est, sv.decode_amplitudes(s), atol=0.01)


def test_measure_branches_is_exact_channel(rng):
    s = sv.amplitude_encode(random_state_vector(rng, 3))
    ens = sv.measure_branches(s, (0, 1))
    assert abs(sum(p for p, _ in ens.branches) - 1.0) < 1e-12
    # Each branch must equal the corresponding postselected state.
    for p, branch in ens.branches:
        idx = int(np.argmax(np.abs(branch.amplitudes) ** 2))
        bits = ((idx >> 2) & 1, (idx >> 1) & 1)
        post = sv.postselect(s, (0, 1), bits)
        assert sv.fidelity(branch, post) > 1.0 - 1e-12


def test_measure_sample_statistics(rng):
    s = sv.amplitude_encode(random_state_vector(rng, 2))
    probs = np.abs(s.amplitudes) ** 2
    counts = np.zeros(4)
    n = 4000
    for _ in range(n):
        bits, _ = sv.measure_sample(s, (0, 1), rng)
        counts[(bits[0] << 1) | bits[1]] += 1
    res = stats.chisquare(counts, probs * n)
    assert res.pvalue > 0.01


def test_postselect_zero_probability_raises():
    s = sv.basis_state(2, 0)
    with pytest.raises(PostselectError):
        sv.postselect(s, (0,), (1,))


def test_discard_requires_collapsed_qubit(rng):
    s = sv.amplitude_encode(random_state_vector(rng, 3))
    with pytest.raises(StateError):
        sv.discard_qubits(s, (1,))
    post = sv.postselect(s, (1,), (1,))
    reduced = sv.discard_qubits(post, (1,))
    assert reduced.n_qubits == 2
    # Remaining amplitudes match the selected block.
    block = np.array([post.amplitudes[(a << 2) | (1 << 1) | b] for a in (0, 1) for b in (0, 1)])
    np.testing.assert_allclose(reduced.amplitudes, block / np.linalg.norm(block), atol=1e-12)


def test_add_ancilla_and_tensor_label(rng):
    s = sv.amplitude_encode(random_state_vector(rng, 2))
    grown = sv.add_ancilla(s, 1)
    assert grown.n_qubits == 3
    np.testing.assert_allclose(grown.amplitudes[::2], s.amplitudes, atol=1e-12)
    np.testing.assert_allclose(grown.amplitudes[1::2], 0.0, atol=1e-12)
    labeled = sv.tensor_label(s, 2, 2)
    assert labeled.n_qubits == 4
    np.testing.assert_allclose(labeled.amplitudes[8:12], s.amplitudes, atol=1e-12)
    assert np.count_nonzero(labeled.amplitudes[:8]) == 0


def test_rotation_and_cnot_wrappers(rng):
    s = sv.basis_state(2, 0)
    s = sv.apply_rotation(s, 0, "x", np.pi)
    # Rx(pi)|0> = -i|1>, so the control is set.
    s = sv.apply_cnot(s, 0, 1)
    assert abs(s.amplitudes[3]) > 1.0 - 1e-12


def test_apply_x_conditioned():
    s = sv.basis_state(2, 0)
    assert sv.apply_x_conditioned(s, 0, 0) is s
    flipped = sv.apply_x_conditioned(s, 0, 1)
    assert abs(flipped.amplitudes[2]) == 1.0
    with pytest.raises(ConfigError):
        sv.apply_x_conditioned(s, 0, 2)


def test_fidelity_and_mixed_fidelity(rng):
    a = sv.amplitude_encode(random_state_vector(rng, 2))
    b = sv.amplitude_encode(random_state_vector(rng, 2))
    f = sv.fidelity(a, b)
    assert 0.0 <= f <= 1.0
    assert abs(sv.fidelity(a, a) - 1.0) < 1e-12
    assert abs(sv.fidelity(a, b) - sv.fidelity(b, a)) < 1e-12
    ens = sv.measure_branches(a, (0,))
    # Mixed fidelity of the measured channel never exceeds the pure one
    # against the pre-measurement state by more than numerical noise.
    mf = sv.mixed_fidelity(ens, a)
    assert 0.0 <= mf <= 1.0 + 1e-12


def test_swap_test_tracks_exact_fidelity(rng):
    a = sv.amplitude_encode(random_state_vector(rng, 2))
    b = sv.amplitude_encode(random_state_vector(rng, 2))
    exact = sv.fidelity(a, b)
    est = sv.swap_test_estimate(a, b, 100_000, rng)
    assert abs(est - exact) < 0.02
    assert abs(sv.swap_test_estimate(a, a, 1000, rng) - 1.0) < 0.05


def test_depolarize_trajectory(rng):
    s = sv.basis_state(2, 0)
    assert sv.depolarize_trajectory(s, 0, 0.0, rng) is s
    noisy = sv.depolarize_trajectory(s, 0, 1.0, rng)
    assert abs(np.linalg.norm(noisy.amplitudes) - 1.0) < 1e-12


def test_readout_flip(rng):
    assert sv.readout_flip((0, 1, 0), 0.0, rng) == (0, 1, 0)
    flipped = sv.readout_flip((0, 1, 0), 1.0, rng)
    assert flipped == (1, 0, 1)


@settings(deadline=None, max_examples=30)
@given(seed=st.integers(min_value=0, max_value=2**31), n=st.integers(min_value=1, max_value=4))
def test_measurement_channel_preserves_probability(seed, n):
    rng = np.random.default_rng(seed)
    s = sv.amplitude_encode(random_state_vector(rng, n))
    qubits = tuple(range(min(2, n)))
    ens = sv.measure_branches(s, qubits)
    assert abs(sum(p for p, _ in ens.branches) - 1.0) < 1e-9
    # Channel preserves the basis distribution of the measured qubits.
    probs_before = np.abs(s.amplitudes) ** 2
    probs_after = sum(p * np.abs(b.amplitudes) ** 2 for p, b in ens.branches)
    np.testing.assert_allclose(probs_after, probs_before, atol=1e-9)
