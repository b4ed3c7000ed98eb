import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from quantgrad.gradest import expected_probabilities
from quantgrad.oracle import get_objective
from quantgrad.sim import StateVector
from quantgrad.vqe import (
    Hamiltonian,
    PauliTerm,
    ansatz_batch,
    batch_energy,
    default_fqve_config,
    energy,
    energy_csv,
    energy_objective,
    fqve,
    heisenberg_2q,
    parameter_shift_gradient,
    prepare_ansatz,
    theta_to_u,
    u_to_theta,
    vqe_baseline,
)

SINGLET = np.array([0, 1, -1, 0]) / math.sqrt(2)
OPT = (3 * math.pi / 2, math.pi)


def closed_form(t1, t2):
    return 1 - (1 - math.sin(t1)) * (1 - math.cos(t2))


def test_spectrum():
    h = heisenberg_2q()
    assert np.allclose(h.eigenvalues(), [-3, 1, 1, 1])
    assert np.trace(h.matrix()).real == pytest.approx(0)


def test_singlet_energy():
    assert heisenberg_2q().expectation(StateVector(2, SINGLET.astype(complex))) == pytest.approx(-3)


@pytest.mark.parametrize("theta,want", [((0.0, 0.0), 1.0), (OPT, -3.0), ((math.pi / 2, 0.0), 1.0)])
def test_special_angles(theta, want):
    assert energy(theta) == pytest.approx(want, abs=1e-12)


def test_optimum_state_is_singlet_up_to_phase():
    psi = prepare_ansatz(OPT).amplitudes
    assert abs(np.vdot(SINGLET, psi)) ** 2 == pytest.approx(1)


@settings(max_examples=50, deadline=None)
@given(st.floats(-7, 7), st.floats(-7, 7))
def test_closed_form_and_variational_bound(t1, t2):
    e = energy((t1, t2))
    assert e == pytest.approx(closed_form(t1, t2), abs=1e-12)
    assert e >= -3 - 1e-12


def test_batch_matches_circuit(rng):
    th = rng.uniform(-4, 4, (20, 2))
    amps = ansatz_batch(th[:, 0], th[:, 1])
    for t, a in zip(th, amps):
        assert np.allclose(a, prepare_ansatz(t).amplitudes, atol=1e-12)
    assert np.allclose(batch_energy(th[:, 0], th[:, 1]), [energy(t) for t in th])


def test_parameter_shift_matches_finite_difference(rng):
    h = 1e-6
    for t in rng.uniform(-3, 3, (20, 2)):
        fd = [(energy(t + h * e) - energy(t - h * e)) / (2 * h) for e in np.eye(2)]
        assert np.allclose(parameter_shift_gradient(t), fd, atol=1e-7)


def test_unit_shift_is_approximate():
    t = np.array([0.4, 1.1])
    exact = parameter_shift_gradient(t)
    unit = parameter_shift_gradient(t, shift=1.0)
    # for a single-frequency term the unit shift scales the derivative by sin(1)
    assert np.allclose(unit, math.sin(1.0) * exact, atol=1e-12)


def test_stationary_at_optimum():
    assert np.allclose(parameter_shift_gradient(OPT), 0, atol=1e-12)


def test_sampled_energy_close():
    e = energy(OPT, shots=20000, seed=1)
    assert abs(e + 3) < 0.05
    assert energy(OPT, shots=100, seed=2) == energy(OPT, shots=100, seed=2)


def test_grid_minimum_location():
    # the 16x16 u grid of the default registers
    vals = np.arange(-8, 8) * 0.25
    uu = np.meshgrid(vals, vals, indexing="ij")
    e = energy_objective().evaluate(uu)
    i, j = np.unravel_index(np.argmin(e), e.shape)
    assert (vals[i], vals[j]) == (-1.0, -2.0)
    assert e.min() == pytest.approx(-3)


def test_coordinate_roundtrip(rng):
    th = rng.uniform(-math.pi, math.pi, (50, 2))
    assert np.allclose(u_to_theta(theta_to_u(th)), th)
    assert np.all(np.abs(theta_to_u(rng.uniform(-20, 20, 100))) <= 2)


def test_energy_objective_gradient_matches_chain_rule(rng):
    f = energy_objective()
    for u in rng.uniform(-2, 2, (10, 2)):
        assert np.allclose(f.grad(u), math.pi / 2 * parameter_shift_gradient(u_to_theta(u)))


def test_registered():
    assert get_objective("heisenberg-energy-u").arity == 2


def _periodic_dist(a, b, period=4.0):
    d = np.abs(np.asarray(a) - np.asarray(b)) % period
    return np.minimum(d, period - d)


def test_fqve_exact_reaches_neighbourhood_of_optimum():
    theta0 = np.random.default_rng(0).uniform(0, math.pi, 2)
    tr = fqve(theta0, default_fqve_config(exact=True))
    assert np.all(_periodic_dist(tr.final_point, theta_to_u(OPT)) <= 0.25 + 1e-12)
    assert tr.final_value < -2.9
    assert tr.coordinate_map is not None


def test_fqve_estimates_taken_at_iterates():
    cfg = default_fqve_config(exact=True, max_iters=1)
    theta0 = np.array([0.3, 1.0])
    tr = fqve(theta0, cfg)
    assert tr.iterations[0].point == pytest.approx(theta_to_u(theta0).tolist())


def test_baseline_converges():
    tr = vqe_baseline([0.3, 1.0])
    assert tr.stop_reason == "converged"
    assert tr.final_value == pytest.approx(-3, abs=1e-5)


def test_fqve_and_baseline_agree():
    theta0 = np.random.default_rng(0).uniform(0, math.pi, 2)
    q = fqve(theta0, default_fqve_config(exact=True))
    c = vqe_baseline(theta0)
    assert abs(q.final_value - c.final_value) < 0.1


def test_energy_csv_maps_back_to_theta():
    tr = fqve([0.3, 1.0], default_fqve_config(exact=True, max_iters=2))
    lines = energy_csv(tr, "u").splitlines()
    assert lines[0] == "iter,theta1,theta2,energy"
    t1 = float(lines[1].split(",")[1])
    assert t1 == pytest.approx(0.3)


def test_gradient_circuit_on_energy_is_distribution():
    cfg = default_fqve_config(exact=True).oracle_cfg
    p = expected_probabilities(energy_objective(), [0.5, -0.25], cfg)
    assert p.sum() == pytest.approx(1)


@pytest.mark.parametrize("bad", [lambda: PauliTerm(1.0, "XQ"), lambda: PauliTerm(float("nan"), "XX"),
                                 lambda: Hamiltonian((PauliTerm(1.0, "X"),), 2),
                                 lambda: Hamiltonian((), 2)])
def test_hamiltonian_validation(bad):
    with pytest.raises(ValueError):
        bad()
