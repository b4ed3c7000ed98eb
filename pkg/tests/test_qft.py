import numpy as np
import pytest

from quantgrad.qft import iqft, qft
from quantgrad.sim import StateVector, new_state

from conftest import random_state


def reference_dft(n, inverse=False):
    N = 1 << n
    sign = -1 if inverse else 1
    jk = np.outer(np.arange(N), np.arange(N))
    return np.exp(sign * 2j * np.pi * jk / N) / np.sqrt(N)


def circuit_matrix(fn, n):
    N = 1 << n
    cols = []
    for k in range(N):
        s = new_state(n)
        s.amplitudes[:] = 0
        s.amplitudes[k] = 1
        fn(s, range(n))
        cols.append(s.amplitudes)
    return np.array(cols).T


@pytest.mark.parametrize("n", [1, 2, 3, 4, 5])
@pytest.mark.parametrize("inverse", [False, True])
def test_matches_dft_matrix(n, inverse):
    got = circuit_matrix(iqft if inverse else qft, n)
    assert np.abs(got - reference_dft(n, inverse)).max() < 1e-10


@pytest.mark.parametrize("k", range(16))
def test_iqft_phase_state_to_basis(k):
    N = 16
    amps = np.exp(2j * np.pi * k * np.arange(N) / N) / 4
    s = iqft(StateVector(4, amps), range(4))
    assert abs(s.amplitudes[k]) ** 2 == pytest.approx(1, abs=1e-10)


@pytest.mark.parametrize("k", [1, 3, 7])
def test_negative_frequency_wraps(k):
    N = 16
    amps = np.exp(-2j * np.pi * k * np.arange(N) / N) / 4
    s = iqft(StateVector(4, amps), range(4))
    assert abs(s.amplitudes[N - k]) ** 2 == pytest.approx(1, abs=1e-10)


def test_zero_to_uniform():
    assert np.allclose(iqft(new_state(3), range(3)).amplitudes, 1 / np.sqrt(8))
    assert np.allclose(qft(new_state(3), range(3)).amplitudes, 1 / np.sqrt(8))


def test_roundtrip_random(rng):
    for _ in range(100):
        v = random_state(rng, 4)
        s = StateVector(4, v.copy())
        iqft(qft(s, range(4)), range(4))
        assert np.allclose(s.amplitudes, v, atol=1e-10)


def test_acts_on_subregister_only(rng):
    # a register in the middle of a larger state: transform the tensor factor
    v = random_state(rng, 6)
    s = iqft(StateVector(6, v.copy()), [2, 3, 4])
    t = v.reshape(2, 8, 4)  # axes: qubit 5, qubits 4..2, qubits 1..0
    want = np.einsum("kj,ajb->akb", reference_dft(3, inverse=True), t).ravel()
    assert np.allclose(s.amplitudes, want, atol=1e-12)


def test_empty_register():
    with pytest.raises(ValueError):
        qft(new_state(2), [])
