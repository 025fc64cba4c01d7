"""Fixed-ansatz VQE baseline trained by parameter-shift gradient descent."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from sklearn.base import BaseEstimator
from sklearn.utils.validation import check_is_fitted

from .circuits import TWO_PI, Axis, Circuit, Gate, PauliGenerator
from .exceptions import InvalidArgumentError
from .hamiltonians import Hamiltonian, neutral_initial_axis
from .runlog import GenerationRecord, RunLog
from .simulator import DEFAULT_SHOTS, EnergyEvaluator, expectation, init_product_state, run_circuit
from .validation import check_finite, check_num_qubits, check_positive_int, check_random_state

SHIFT = math.pi / 2


def layers_for(num_parameters: int, n: int) -> int:
    """Smallest layer count giving at least ``num_parameters`` parameters."""
    return max(1, math.ceil(num_parameters / (3 * n - 1)))


class _FixedStructure:
    """Shared behaviour of ansatze with one parameter per gate."""

    num_qubits: int
    generators: tuple[PauliGenerator, ...]

    @property
    def num_parameters(self) -> int:
        return len(self.generators)

    def circuit(self, theta) -> Circuit:
        theta = np.asarray(theta, dtype=float)
        if theta.shape != (self.num_parameters,):
            raise InvalidArgumentError(
                f"expected {self.num_parameters} parameters, got shape {theta.shape}")
        return Circuit(self.num_qubits, tuple(Gate(g, float(t)) for g, t in zip(self.generators, theta)))

    def initial_parameters(self, rng=None) -> np.ndarray:
        return check_random_state(rng).uniform(0.0, TWO_PI, size=self.num_parameters)


@dataclass(frozen=True)
class GeneratorAnsatz(_FixedStructure):
    """Arbitrary fixed gate sequence, one parameter per generator."""

    num_qubits: int
    generators: tuple[PauliGenerator, ...]

    def __post_init__(self):
        Circuit(self.num_qubits, tuple(Gate(g, 0.0) for g in self.generators))
        object.__setattr__(self, "generators", tuple(self.generators))


@dataclass(frozen=True)
class LayeredAnsatz(_FixedStructure):
    """Layers of Ry and Rz on every qubit followed by a line of Rzz gates.

    Each gate carries its own parameter, ``3n - 1`` per layer, in gate order.
    """

    num_qubits: int
    num_layers: int

    def __post_init__(self):
        check_num_qubits(self.num_qubits, minimum=2)
        check_positive_int(self.num_layers, "num_layers")

    @property
    def generators(self) -> tuple[PauliGenerator, ...]:
        n = self.num_qubits
        layer = [PauliGenerator(Axis.Y, (q,)) for q in range(n)]
        layer += [PauliGenerator(Axis.Z, (q,)) for q in range(n)]
        layer += [PauliGenerator(Axis.Z, (q, q + 1)) for q in range(n - 1)]
        return tuple(layer) * self.num_layers


def build_layered_ansatz(n: int, num_layers: int) -> LayeredAnsatz:
    return LayeredAnsatz(n, num_layers)


def parameter_shift_gradient(ansatz, theta, hamiltonian: Hamiltonian, init,
                             evaluator=None, rng=None) -> np.ndarray:
    """Gradient from two shifted evaluations per parameter.

    Exact for Pauli-rotation gates: ``dE/dtheta_k = (E(theta_k + pi/2) - E(theta_k - pi/2)) / 2``.
    ``ansatz`` is any object with ``num_parameters`` and ``circuit(theta)``;
    ``evaluator(circuit, rng)`` defaults to the exact energy from ``init``.
    """
    theta = np.asarray(theta, dtype=float)
    if theta.shape != (ansatz.num_parameters,):
        raise InvalidArgumentError(
            f"expected {ansatz.num_parameters} parameters, got shape {theta.shape}")
    if evaluator is None:
        evaluator = EnergyEvaluator(hamiltonian, init)
    grad = np.empty_like(theta)
    for k in range(theta.size):
        shifted = theta.copy()
        shifted[k] += SHIFT
        plus = evaluator(ansatz.circuit(shifted), rng)
        shifted[k] -= 2 * SHIFT
        minus = evaluator(ansatz.circuit(shifted), rng)
        grad[k] = 0.5 * (plus - minus)
    return grad


@dataclass
class GradientConfig:
    num_qubits: int
    num_layers: int = 7
    learning_rate: float = 0.1
    steps: int = 100
    seed: int | None = None
    max_calls: int | None = None
    target_energy: float | None = None

    def __post_init__(self):
        check_num_qubits(self.num_qubits, minimum=2)
        check_positive_int(self.num_layers, "num_layers")
        lr = check_finite(self.learning_rate, "learning_rate")
        if lr < 0:
            raise InvalidArgumentError(f"learning rate must be non-negative, got {lr}")
        check_positive_int(self.steps, "steps", minimum=0)
        if self.max_calls is not None:
            check_positive_int(self.max_calls, "max_calls")

    def to_dict(self) -> dict:
        return {"num_qubits": self.num_qubits, "num_layers": self.num_layers,
                "learning_rate": self.learning_rate, "steps": self.steps, "seed": self.seed,
                "max_calls": self.max_calls, "target_energy": self.target_energy}


def gradient_descent_run(cfg: GradientConfig, evaluator: EnergyEvaluator,
                         extra_config: dict | None = None) -> RunLog:
    """Plain gradient descent ``theta <- theta - lr * grad``.

    Energy is logged before the first step and after every step; each logged
    energy costs one evaluation on top of the ``2P`` shifted evaluations.
    A step is never started if it would exceed ``max_calls``.
    """
    seed = cfg.seed if cfg.seed is not None else int(np.random.SeedSequence().entropy % 2**63)
    config = cfg.to_dict()
    config["seed"] = seed
    config.update(extra_config or {})
    rng = np.random.default_rng(seed)
    ansatz = LayeredAnsatz(cfg.num_qubits, cfg.num_layers)
    theta = ansatz.initial_parameters(rng)
    per_eval = evaluator.calls_per_evaluation
    step_calls = (2 * ansatz.num_parameters + 1) * per_eval

    energy = float(evaluator(ansatz.circuit(theta), rng))
    calls = per_eval
    log = RunLog("gradient", config, cfg.num_qubits, initial_energy=energy, initial_calls=calls)
    for step in range(1, cfg.steps + 1):
        if cfg.target_energy is not None and energy <= cfg.target_energy:
            break
        if cfg.max_calls is not None and calls + step_calls > cfg.max_calls:
            break
        grad = parameter_shift_gradient(ansatz, theta, evaluator.hamiltonian, evaluator.init_state,
                                        evaluator, rng)
        theta = theta - cfg.learning_rate * grad
        before = energy
        energy = float(evaluator(ansatz.circuit(theta), rng))
        calls += step_calls
        log.records.append(GenerationRecord(step, before, None, None, energy,
                                            parent_gates=ansatz.num_parameters, calls=calls))
    log.final_circuit = ansatz.circuit(theta)
    log.final_parameters = [float(t) for t in theta]
    return log


class GradientVQE(BaseEstimator):
    """Layered-ansatz VQE fitted by parameter-shift gradient descent.

    ``fit`` takes a Hamiltonian; afterwards ``theta_``, ``energy_`` and
    ``log_`` are available.
    """

    def __init__(self, num_layers=7, learning_rate=0.1, steps=100, max_calls=None,
                 target_energy=None, mode="exact", shots=DEFAULT_SHOTS, noise=0.0,
                 init_axis=None, random_state=None):
        self.num_layers = num_layers
        self.learning_rate = learning_rate
        self.steps = steps
        self.max_calls = max_calls
        self.target_energy = target_energy
        self.mode = mode
        self.shots = shots
        self.noise = noise
        self.init_axis = init_axis
        self.random_state = random_state

    def fit(self, hamiltonian: Hamiltonian, y=None):
        if not isinstance(hamiltonian, Hamiltonian):
            raise InvalidArgumentError(f"fit expects a Hamiltonian, got {type(hamiltonian).__name__}")
        cfg = GradientConfig(hamiltonian.num_qubits, self.num_layers, self.learning_rate, self.steps,
                             self.random_state, self.max_calls, self.target_energy)
        axis = neutral_initial_axis(hamiltonian) if self.init_axis is None else Axis.parse(self.init_axis)
        init = init_product_state(hamiltonian.num_qubits, axis, 1)
        evaluator = EnergyEvaluator(hamiltonian, init, self.mode, self.shots, self.noise)
        extra = {"mode": self.mode, "shots": self.shots if self.mode == "sampled" else None,
                 "noise": self.noise, "init_axis": axis.value}
        self.log_ = gradient_descent_run(cfg, evaluator, extra)
        self.ansatz_ = LayeredAnsatz(hamiltonian.num_qubits, self.num_layers)
        self.initial_state_ = init
        self.theta_ = np.array(self.log_.final_parameters)
        self.energy_ = self.log_.final_energy
        self.n_calls_ = self.log_.total_calls
        return self

    def energy(self, hamiltonian: Hamiltonian) -> float:
        check_is_fitted(self, "theta_")
        return expectation(run_circuit(self.ansatz_.circuit(self.theta_), self.initial_state_), hamiltonian)

    def score(self, hamiltonian: Hamiltonian, y=None) -> float:
        return -self.energy(hamiltonian)
