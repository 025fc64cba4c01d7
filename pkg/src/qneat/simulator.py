"""Statevector simulation of Pauli-rotation circuits and energy estimation."""

from __future__ import annotations

import math
from functools import reduce

import numpy as np

from .circuits import Axis, Circuit, Gate, pauli_action, pauli_masks, rotation
from .exceptions import InvalidArgumentError
from .hamiltonians import Hamiltonian
from .validation import (MAX_QUBITS, check_num_qubits, check_positive_int, check_probability,
                         check_random_state, check_state)

DEFAULT_SHOTS = 8192
MODES = ("exact", "sampled")
NOISE_METHODS = ("auto", "density", "trajectory")
# "auto" switches from density matrices to trajectories above this size
DENSITY_MAX_QUBITS = 8

_SQRT_HALF = 1.0 / math.sqrt(2.0)
_EIGENSTATES = {
    (Axis.Z, 1): np.array([1.0, 0.0], dtype=np.complex128),
    (Axis.Z, -1): np.array([0.0, 1.0], dtype=np.complex128),
    (Axis.X, 1): np.array([_SQRT_HALF, _SQRT_HALF], dtype=np.complex128),
    (Axis.X, -1): np.array([_SQRT_HALF, -_SQRT_HALF], dtype=np.complex128),
    (Axis.Y, 1): np.array([_SQRT_HALF, 1j * _SQRT_HALF], dtype=np.complex128),
    (Axis.Y, -1): np.array([_SQRT_HALF, -1j * _SQRT_HALF], dtype=np.complex128),
}


def product_state(qubit_states) -> np.ndarray:
    """Tensor product of single-qubit states given in qubit order (qubit 0 first)."""
    qubit_states = [np.asarray(v, dtype=np.complex128) for v in qubit_states]
    check_num_qubits(len(qubit_states))
    return reduce(np.kron, reversed(qubit_states))


def init_product_state(n: int, axis=Axis.Z, sign: int = 1) -> np.ndarray:
    """``n``-fold product of the single-qubit eigenstate of ``axis`` with eigenvalue ``sign``."""
    n = check_num_qubits(n)
    if sign not in (1, -1):
        raise InvalidArgumentError(f"sign must be +1 or -1, got {sign!r}")
    single = _EIGENSTATES[Axis.parse(axis), sign]
    return product_state([single] * n)


def _num_qubits(state: np.ndarray) -> int:
    return state.size.bit_length() - 1


def apply_pauli(state: np.ndarray, x_mask: int, z_mask: int, n_y: int) -> np.ndarray:
    """Return ``P @ state`` for the Pauli product described by the masks."""
    perm, phase = pauli_action(_num_qubits(state), x_mask, z_mask, n_y)
    return phase * (state if perm is None else state[perm])


def _rotate(state: np.ndarray, masks: tuple[int, int, int], theta: float) -> np.ndarray:
    perm, phase = pauli_action(_num_qubits(state), *masks)
    half = 0.5 * theta
    flipped = state if perm is None else state[perm]
    return math.cos(half) * state - (1j * math.sin(half)) * (phase * flipped)


def apply_gate(state: np.ndarray, gate: Gate) -> np.ndarray:
    """Apply ``exp(-i theta/2 P) = cos(theta/2) I - i sin(theta/2) P`` to ``state``."""
    state = check_state(state)
    if max(gate.generator.qubits) >= _num_qubits(state):
        raise InvalidArgumentError(
            f"gate on qubits {gate.generator.qubits} does not fit a {_num_qubits(state)}-qubit state")
    return _rotate(state, gate.generator.masks, gate.theta)


def run_circuit(circuit: Circuit, init: np.ndarray) -> np.ndarray:
    """Apply the gates of ``circuit`` to ``init`` in sequence order."""
    state = check_state(init, circuit.num_qubits)
    for gate in circuit.gates:
        state = _rotate(state, gate.generator.masks, gate.theta)
    return state


def expectation(state: np.ndarray, hamiltonian: Hamiltonian) -> float:
    """``<psi|H|psi>`` evaluated exactly."""
    state = check_state(state, hamiltonian.num_qubits)
    total = 0j
    conj = state.conj()
    for perm, diag in hamiltonian.operator_blocks:
        flipped = state if perm is None else state[perm]
        total += np.dot(conj, diag * flipped)
    if abs(total.imag) > 1e-10 * max(1.0, hamiltonian.weight_norm):
        raise ArithmeticError(f"non-real expectation value {total!r}; is the state normalized?")
    return float(total.real)


def measurement_rotations(basis) -> list[Gate]:
    """Basis-change gates mapping each qubit's measured axis onto Z."""
    gates = []
    for qubit, axis in enumerate(basis):
        if axis is Axis.X:
            gates.append(rotation(Axis.Y, qubit, -math.pi / 2))
        elif axis is Axis.Y:
            gates.append(rotation(Axis.X, qubit, math.pi / 2))
    return gates


def outcome_values(num_qubits: int, terms) -> np.ndarray:
    """Weighted sum of +-1 term eigenvalues for every measured bitstring."""
    index = np.arange(1 << num_qubits, dtype=np.int64)
    values = np.zeros(1 << num_qubits)
    for term in terms:
        support = 0
        for qubit, _ in term.items:
            support |= 1 << qubit
        values += term.weight * (1 - 2 * (np.bitwise_count(index & support) & 1).astype(np.int64))
    return values


def circuit_call_count(mode: str, hamiltonian: Hamiltonian) -> int:
    """Circuit executions needed for one loss evaluation."""
    if mode == "exact":
        return 1
    if mode == "sampled":
        return max(1, len(hamiltonian.measurement_groups))
    raise InvalidArgumentError(f"unknown evaluation mode {mode!r}; choose from {MODES}")


class _NoisyRunner:
    """Trajectory sampling of per-gate Pauli errors for one circuit."""

    # error codes 0..3 stand for I, X, Y, Z
    _ERROR_AXES = (None, Axis.X, Axis.Y, Axis.Z)

    def __init__(self, circuit: Circuit, init: np.ndarray):
        self.circuit = circuit
        self.masks = [g.generator.masks for g in circuit.gates]
        self.thetas = [g.theta for g in circuit.gates]
        self.slot_gate = np.array([i for i, g in enumerate(circuit.gates) for _ in g.generator.qubits],
                                  dtype=np.int64)
        self.slot_qubit = [q for g in circuit.gates for q in g.generator.qubits]
        # prefixes[k] is the clean state after the first k gates
        self.prefixes = [init]
        for masks, theta in zip(self.masks, self.thetas):
            self.prefixes.append(_rotate(self.prefixes[-1], masks, theta))

    @property
    def num_slots(self) -> int:
        return len(self.slot_qubit)

    def final_state(self, pattern: np.ndarray) -> np.ndarray:
        hits = np.flatnonzero(pattern)
        if hits.size == 0:
            return self.prefixes[-1]
        first_gate = int(self.slot_gate[hits[0]])
        errors_by_gate: dict[int, list[tuple[int, int]]] = {}
        for slot in hits:
            errors_by_gate.setdefault(int(self.slot_gate[slot]), []).append(
                (self.slot_qubit[slot], int(pattern[slot])))
        state = self.prefixes[first_gate + 1]
        for g in range(first_gate, len(self.masks)):
            if g > first_gate:
                state = _rotate(state, self.masks[g], self.thetas[g])
            for qubit, code in errors_by_gate.get(g, ()):
                state = apply_pauli(state, *pauli_masks([(qubit, self._ERROR_AXES[code])]))
        return state


def _left_rotate(rho: np.ndarray, n: int, masks, theta: float) -> np.ndarray:
    perm, phase = pauli_action(n, *masks)
    flipped = rho if perm is None else rho[perm]
    half = 0.5 * theta
    return math.cos(half) * rho - (1j * math.sin(half)) * (phase[:, None] * flipped)


def _conjugate_rotate(rho: np.ndarray, n: int, masks, theta: float) -> np.ndarray:
    # U rho U^dagger = (U (U rho)^dagger)^dagger
    half_applied = _left_rotate(rho, n, masks, theta)
    return _left_rotate(half_applied.conj().T, n, masks, theta).conj().T


def _left_pauli(rho: np.ndarray, n: int, masks) -> np.ndarray:
    perm, phase = pauli_action(n, *masks)
    return phase[:, None] * (rho if perm is None else rho[perm])


def _pauli_channel(rho: np.ndarray, n: int, qubit: int, p: float) -> np.ndarray:
    """With probability ``p`` apply I, X, Y or Z (uniformly) to ``qubit``."""
    mixed = np.zeros_like(rho)
    for axis in (Axis.X, Axis.Y, Axis.Z):
        masks = pauli_masks([(qubit, axis)])
        mixed += _left_pauli(_left_pauli(rho, n, masks).conj().T, n, masks).conj().T
    return (1.0 - 0.75 * p) * rho + 0.25 * p * mixed


def noisy_density_matrix(circuit: Circuit, init: np.ndarray, noise: float) -> np.ndarray:
    """Density matrix after ``circuit`` with per-gate Pauli errors of probability ``noise``."""
    noise = check_probability(noise, "noise")
    n = circuit.num_qubits
    psi = check_state(init, n)
    rho = np.outer(psi, psi.conj())
    for gate in circuit.gates:
        rho = _conjugate_rotate(rho, n, gate.generator.masks, gate.theta)
        if noise:
            for qubit in gate.generator.qubits:
                rho = _pauli_channel(rho, n, qubit, noise)
    return rho


def noisy_expectation(circuit: Circuit, init: np.ndarray, hamiltonian: Hamiltonian, noise: float) -> float:
    """Exact ``Tr(rho H)`` under the per-gate Pauli error model."""
    rho = noisy_density_matrix(circuit, init, noise)
    total = 0j
    for perm, diag in hamiltonian.operator_blocks:
        # Tr(rho H) = sum_b <b|H rho|b> with (H rho)[b] = diag[b] rho[perm[b], b]
        index = np.arange(rho.shape[0])
        total += np.dot(diag, rho[index if perm is None else perm, index])
    return float(total.real)


def _basis_probabilities(rho: np.ndarray, n: int, basis) -> np.ndarray:
    for gate in measurement_rotations(basis):
        rho = _conjugate_rotate(rho, n, gate.generator.masks, gate.theta)
    probs = np.clip(np.real(np.diag(rho)), 0.0, None)
    return probs / probs.sum()


def _sample_counts(state: np.ndarray, basis, shots: int, rng) -> np.ndarray:
    for gate in measurement_rotations(basis):
        state = _rotate(state, gate.generator.masks, gate.theta)
    probs = np.abs(state) ** 2
    probs /= probs.sum()
    return rng.multinomial(shots, probs)


def estimate_energy_sampled(circuit: Circuit, init: np.ndarray, hamiltonian: Hamiltonian,
                            shots: int = DEFAULT_SHOTS, rng=None, noise: float = 0.0,
                            return_stderr: bool = False, noise_method: str = "auto"):
    """Shot-based energy estimate with basis-rotation measurement layers.

    Every measurement group is a separate circuit execution with ``shots``
    samples. With ``noise = p > 0`` each qubit touched by a circuit gate
    receives, with probability ``p``, a Pauli drawn uniformly from
    {I, X, Y, Z} right after that gate, independently for every shot.

    ``noise_method`` picks how noisy shots are drawn. ``"trajectory"``
    samples an error pattern per shot. ``"density"`` samples all shots from
    the noisy density matrix, which has the same outcome distribution
    because shots are independent. ``"auto"`` uses the density matrix up to
    ``DENSITY_MAX_QUBITS`` qubits.

    Returns the estimate, or ``(estimate, standard_error)`` when
    ``return_stderr`` is set.
    """
    shots = check_positive_int(shots, "shots")
    noise = check_probability(noise, "noise")
    rng = check_random_state(rng)
    n = hamiltonian.num_qubits
    if circuit.num_qubits != n:
        raise InvalidArgumentError(f"circuit has {circuit.num_qubits} qubits, Hamiltonian {n}")
    init = check_state(init, n)

    if noise_method not in NOISE_METHODS:
        raise InvalidArgumentError(f"unknown noise method {noise_method!r}; choose from {NOISE_METHODS}")
    noisy = noise > 0 and len(circuit) > 0
    use_density = noisy and (noise_method == "density"
                             or (noise_method == "auto" and n <= DENSITY_MAX_QUBITS))
    runner = _NoisyRunner(circuit, init) if noisy and not use_density else None
    rho = noisy_density_matrix(circuit, init, noise) if use_density else None
    clean = run_circuit(circuit, init) if not noisy else None

    estimate = hamiltonian.constant
    variance = 0.0
    for basis, terms in hamiltonian.measurement_groups:
        values = outcome_values(n, terms)
        if clean is not None:
            counts = _sample_counts(clean, basis, shots, rng)
        elif rho is not None:
            counts = rng.multinomial(shots, _basis_probabilities(rho, n, basis))
        else:
            occurs = rng.random((shots, runner.num_slots)) < noise
            kinds = rng.integers(0, 4, size=(shots, runner.num_slots), dtype=np.int8)
            patterns, multiplicity = np.unique(occurs * kinds, axis=0, return_counts=True)
            counts = np.zeros(1 << n, dtype=np.int64)
            for pattern, k in zip(patterns, multiplicity):
                counts += _sample_counts(runner.final_state(pattern), basis, int(k), rng)
        mean = float(np.dot(counts, values)) / shots
        second = float(np.dot(counts, values * values)) / shots
        estimate += mean
        variance += max(second - mean * mean, 0.0) / shots
    if return_stderr:
        return estimate, math.sqrt(variance)
    return estimate


class EnergyEvaluator:
    """Loss function ``circuit -> energy`` with circuit-call accounting.

    Parameters
    ----------
    hamiltonian : Hamiltonian
    init_state : ndarray
        Initial statevector every circuit is applied to.
    mode : {"exact", "sampled"}
    shots : int
        Samples per measurement group in sampled mode.
    noise : float
        Per-gate Pauli error probability in sampled mode.
    """

    def __init__(self, hamiltonian: Hamiltonian, init_state, mode: str = "exact",
                 shots: int = DEFAULT_SHOTS, noise: float = 0.0):
        if mode not in MODES:
            raise InvalidArgumentError(f"unknown evaluation mode {mode!r}; choose from {MODES}")
        self.hamiltonian = hamiltonian
        self.init_state = check_state(init_state, hamiltonian.num_qubits)
        self.mode = mode
        self.shots = check_positive_int(shots, "shots")
        self.noise = check_probability(noise, "noise")
        if mode == "exact" and self.noise:
            raise InvalidArgumentError("noise emulation requires sampled mode")
        self.calls_per_evaluation = circuit_call_count(mode, hamiltonian)

    @property
    def num_qubits(self) -> int:
        return self.hamiltonian.num_qubits

    def __call__(self, circuit: Circuit, rng=None) -> float:
        if self.mode == "exact":
            return expectation(run_circuit(circuit, self.init_state), self.hamiltonian)
        if rng is None:
            raise InvalidArgumentError("sampled evaluation needs a random generator")
        return estimate_energy_sampled(circuit, self.init_state, self.hamiltonian,
                                       self.shots, rng, self.noise)


__all__ = [
    "DEFAULT_SHOTS", "DENSITY_MAX_QUBITS", "MAX_QUBITS", "NOISE_METHODS", "EnergyEvaluator",
    "apply_gate", "apply_pauli", "circuit_call_count", "estimate_energy_sampled", "expectation",
    "init_product_state", "measurement_rotations", "noisy_density_matrix", "noisy_expectation",
    "outcome_values", "product_state", "run_circuit",
]
