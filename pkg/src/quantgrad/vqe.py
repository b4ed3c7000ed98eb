"""Two-qubit Heisenberg VQE with quantum-gradient and parameter-shift optimizers.

Ansatz: ``Ry(theta1)`` on qubit 0, ``Ry(theta2)`` on qubit 1, then
``CNOT(0 -> 1)``.  Its energy under ``XX + YY + ZZ`` is
``1 - (1 - sin theta1)(1 - cos theta2)``, minimized at ``(3 pi/2, pi)``
where the state is the singlet and the energy is -3.

The quantum-gradient optimizer works in a wrapped coordinate
``u = wrap(theta) * 2/pi`` with ``wrap`` onto ``[-pi, pi)``, so the
signed 4-bit/2-fraction-bit window ``[-2, 2)`` covers a full period.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .fixedpoint import FixedPointFormat, GradientScale
from .gradest import _round
from .oracle import ObjectiveFunction, OracleConfig, register_objective
from .optimizer import DescentConfig, DescentStep, DescentTrace, descend
from .sim import StateVector, apply_gate, expectation_pauli, new_state, pauli_matrix

U_SCALE = math.pi / 2
COORDINATE_MAP = {
    "theta_from_u": "theta = u * pi / 2",
    "u_from_theta": "u = (((theta + pi) mod 2 pi) - pi) * 2 / pi",
    "u_window": [-2.0, 2.0],
}


@dataclass(frozen=True)
class PauliTerm:
    coefficient: float
    pauli: str

    def __post_init__(self):
        if not math.isfinite(self.coefficient):
            raise ValueError("coefficient must be finite")
        if not self.pauli or set(self.pauli.upper()) - set("IXYZ"):
            raise ValueError(f"malformed Pauli string {self.pauli!r}")


@dataclass(frozen=True)
class Hamiltonian:
    terms: tuple[PauliTerm, ...]
    num_qubits: int

    def __post_init__(self):
        if not self.terms:
            raise ValueError("Hamiltonian needs at least one term")
        if any(len(t.pauli) != self.num_qubits for t in self.terms):
            raise ValueError("Pauli string length must equal num_qubits")

    def matrix(self) -> np.ndarray:
        return sum(t.coefficient * pauli_matrix(t.pauli) for t in self.terms)

    def eigenvalues(self) -> np.ndarray:
        return np.linalg.eigvalsh(self.matrix())

    def expectation(self, state: StateVector) -> float:
        return sum(t.coefficient * expectation_pauli(state, t.pauli) for t in self.terms)


def heisenberg_2q() -> Hamiltonian:
    return Hamiltonian((PauliTerm(1.0, "XX"), PauliTerm(1.0, "YY"), PauliTerm(1.0, "ZZ")), 2)


def prepare_ansatz(theta: Sequence[float]) -> StateVector:
    t1, t2 = (float(v) for v in theta)
    state = new_state(2)
    apply_gate(state, "RY", 0, t1)
    apply_gate(state, "RY", 1, t2)
    apply_gate(state, "CNOT", (0, 1))
    return state


def _sampled(state: StateVector, pauli: str, shots: int, rng: np.random.Generator) -> float:
    # a Pauli measurement is a +-1 coin with P(+1) = (1 + <P>)/2
    p_plus = min(max((1.0 + expectation_pauli(state, pauli)) / 2.0, 0.0), 1.0)
    k = rng.binomial(shots, p_plus)
    return (2.0 * k - shots) / shots


def energy(theta: Sequence[float], hamiltonian: Hamiltonian | None = None,
           shots: int | None = None, seed=None) -> float:
    """<psi(theta)|H|psi(theta)>; pass ``shots`` for sampled Pauli estimates."""
    h = hamiltonian or heisenberg_2q()
    state = prepare_ansatz(theta)
    if shots is None:
        return float(h.expectation(state))
    rng = np.random.default_rng(seed)
    return float(sum(t.coefficient * _sampled(state, t.pauli, shots, rng) for t in h.terms))


def ansatz_batch(t1, t2) -> np.ndarray:
    """Ansatz amplitudes for broadcast arrays of angles, shape ``(..., 4)``."""
    t1, t2 = np.broadcast_arrays(np.asarray(t1, float), np.asarray(t2, float))
    c1, s1 = np.cos(t1 / 2), np.sin(t1 / 2)
    c2, s2 = np.cos(t2 / 2), np.sin(t2 / 2)
    # product state index b = 2*q1 + q0, then CNOT(0->1) swaps b=1 and b=3
    amps = np.stack([c2 * c1, c2 * s1, s2 * c1, s2 * s1], axis=-1)
    return amps[..., [0, 3, 2, 1]].astype(complex)


def batch_energy(t1, t2, hamiltonian: Hamiltonian | None = None) -> np.ndarray:
    h = (hamiltonian or heisenberg_2q()).matrix()
    psi = ansatz_batch(t1, t2)
    return np.real(np.einsum("...i,ij,...j->...", psi.conj(), h, psi))


def parameter_shift_gradient(theta: Sequence[float], hamiltonian: Hamiltonian | None = None,
                             shift: float = math.pi / 2) -> np.ndarray:
    """``(E(theta + s e_i) - E(theta - s e_i)) / 2`` per component.

    Exact for these Ry parameters at ``s = pi/2``.  ``s = 1`` gives the
    unit-shift variant, which is only approximate.
    """
    theta = np.asarray(theta, dtype=float)
    grad = np.zeros_like(theta)
    for i in range(theta.size):
        e = np.zeros_like(theta)
        e[i] = shift
        grad[i] = (energy(theta + e, hamiltonian) - energy(theta - e, hamiltonian)) / 2.0
    return grad


def theta_to_u(theta) -> np.ndarray:
    theta = np.asarray(theta, dtype=float)
    return (np.mod(theta + math.pi, 2 * math.pi) - math.pi) / U_SCALE


def u_to_theta(u) -> np.ndarray:
    return np.asarray(u, dtype=float) * U_SCALE


def energy_objective(hamiltonian: Hamiltonian | None = None) -> ObjectiveFunction:
    """Heisenberg energy as a function of the wrapped coordinates ``u``."""
    h = hamiltonian or heisenberg_2q()

    def fn(u1, u2):
        return batch_energy(np.asarray(u1) * U_SCALE, np.asarray(u2) * U_SCALE, h)

    def grad(u1, u2):
        t1, t2 = np.asarray(u1) * U_SCALE, np.asarray(u2) * U_SCALE
        s = math.pi / 2
        g1 = (batch_energy(t1 + s, t2, h) - batch_energy(t1 - s, t2, h)) / 2
        g2 = (batch_energy(t1, t2 + s, h) - batch_energy(t1, t2 - s, h)) / 2
        return U_SCALE * g1, U_SCALE * g2

    return ObjectiveFunction("heisenberg-energy-u", 2, fn, grad,
                             "2-qubit Heisenberg energy in wrapped coordinates u = theta*2/pi",
                             periodic=4.0)


def default_fqve_config(seed: int = 0, shots: int = 1000, exact: bool = False,
                        max_iters: int = 200) -> DescentConfig:
    """n=4, frac=2 registers over ``u``; ``m = 2 pi`` covers ``|dE/du| <= pi``.

    The learning rate is scaled by ``(2/pi)**2`` so a step in ``u``
    equals a step of 0.25 times the theta-gradient in theta.
    """
    fmt = FixedPointFormat(4, 2, signed=True)
    scale = GradientScale(2 * math.pi, 0.01, fmt.n_bits, "twos")
    ocfg = OracleConfig.build(2, fmt, scale)
    return DescentConfig(
        learning_rate=0.25 / U_SCALE**2,
        oracle_cfg=ocfg,
        max_iters=max_iters,
        grad_norm_tol=0.0,
        shots=shots,
        seed=seed,
        mode="offgrid",
        exact=exact,
        periodic=True,
    )


def fqve(theta0: Sequence[float], cfg: DescentConfig | None = None,
         hamiltonian: Hamiltonian | None = None) -> DescentTrace:
    """Quantum-gradient VQE; trace points are in ``u`` (see ``coordinate_map``)."""
    cfg = cfg or default_fqve_config()
    trace = descend(energy_objective(hamiltonian), theta_to_u(theta0), cfg)
    trace.coordinate_map = dict(COORDINATE_MAP)
    return trace


def vqe_baseline(theta0: Sequence[float], learning_rate: float = 0.25, max_iters: int = 200,
                 tol: float = 1e-3, shift: float = math.pi / 2,
                 hamiltonian: Hamiltonian | None = None) -> DescentTrace:
    """Classical gradient descent on theta using the parameter-shift gradient."""
    theta = np.asarray(theta0, dtype=float).copy()
    steps = []
    stop = "max_iters"
    for _ in range(max_iters):
        g = parameter_shift_gradient(theta, hamiltonian, shift)
        steps.append(DescentStep(theta.tolist(), energy(theta, hamiltonian), g.tolist(), "", 1.0))
        if np.max(np.abs(g)) <= tol:
            stop = "converged"
            break
        theta = theta - learning_rate * g
    return DescentTrace(
        objective="heisenberg-energy-theta",
        iterations=steps,
        stop_reason=stop,
        final_point=theta.tolist(),
        final_value=energy(theta, hamiltonian),
        config={"learning_rate": learning_rate, "max_iters": max_iters, "tol": tol, "shift": shift},
    )


def energy_csv(trace: DescentTrace, coordinate: str = "theta") -> str:
    """``iter,theta1,theta2,energy`` rows; ``u`` traces are mapped back to theta."""
    lines = ["iter,theta1,theta2,energy"]
    for k, s in enumerate(trace.iterations):
        th = u_to_theta(s.point) if coordinate == "u" else np.asarray(s.point)
        lines.append(",".join(str(v) for v in [k, *_round(th.tolist()), _round(s.f_value)]))
    return "\n".join(lines) + "\n"


register_objective(energy_objective(), overwrite=True)
