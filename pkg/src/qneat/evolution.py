"""(1+lambda) elitist evolution of circuit architectures."""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np
from sklearn.base import BaseEstimator
from sklearn.utils.validation import check_is_fitted

from .circuits import TWO_PI, Axis, Circuit
from .exceptions import EvaluationError, InvalidArgumentError
from .hamiltonians import Hamiltonian, neutral_initial_axis
from .mutation import MutationConfig, mutate, random_gate
from .runlog import GenerationRecord, RunLog
from .simulator import DEFAULT_SHOTS, EnergyEvaluator, expectation, init_product_state, run_circuit
from .validation import check_finite, check_num_qubits, check_positive_int


@dataclass
class EvolutionConfig:
    """Settings of one evolutionary run.

    The run stops after ``max_generations`` or earlier when any of the
    optional budgets triggers: ``stagnation_tau`` generations in a row
    without improvement, ``max_calls`` circuit calls spent, or the parent
    energy reaching ``target_energy``.
    """

    num_qubits: int
    n_offspring: int = 4
    max_generations: int = 150
    stagnation_tau: int | None = None
    max_calls: int | None = None
    target_energy: float | None = None
    seed: int | None = None
    mutation: MutationConfig = field(default_factory=MutationConfig)
    n_jobs: int = 1

    def __post_init__(self):
        check_num_qubits(self.num_qubits)
        check_positive_int(self.n_offspring, "lambda")
        check_positive_int(self.max_generations, "max_generations")
        if self.stagnation_tau is not None:
            check_positive_int(self.stagnation_tau, "stagnation_tau")
        if self.max_calls is not None:
            check_positive_int(self.max_calls, "max_calls")
        if self.target_energy is not None:
            check_finite(self.target_energy, "target_energy")
        check_positive_int(self.n_jobs, "n_jobs")
        if not isinstance(self.mutation, MutationConfig):
            raise InvalidArgumentError("mutation must be a MutationConfig")

    def to_dict(self) -> dict:
        return {
            "num_qubits": self.num_qubits,
            "lambda": self.n_offspring,
            "max_generations": self.max_generations,
            "stagnation_tau": self.stagnation_tau,
            "max_calls": self.max_calls,
            "target_energy": self.target_energy,
            "seed": self.seed,
            "mutation": self.mutation.to_dict(),
        }


def _calls_per_evaluation(evaluator) -> int:
    return int(getattr(evaluator, "calls_per_evaluation", 1))


def evolve_generation(parent: Circuit, parent_energy: float, n_offspring: int, evaluator, rng,
                      mutation: MutationConfig | None = None, *, generation: int = 1,
                      calls: int = 0, executor=None) -> tuple[Circuit, float, GenerationRecord]:
    """Mutate ``parent`` ``n_offspring`` times and keep the best strict improvement.

    ``parent_energy`` is trusted and never recomputed. Each offspring uses
    its own stream spawned from ``rng``, so running the offspring through
    ``executor`` gives the same result as running them in order. Among
    equally good improving offspring the lowest index wins.
    """
    mutation = mutation or MutationConfig()
    streams = rng.spawn(n_offspring)

    def make_child(index):
        child_rng = streams[index]
        child, outcome = mutate(parent, mutation, child_rng)
        try:
            energy = float(evaluator(child, child_rng))
        except Exception as exc:
            raise EvaluationError(f"evaluation of offspring {index} failed: {exc}", index) from exc
        return child, outcome, energy

    if executor is None:
        children = [make_child(i) for i in range(n_offspring)]
    else:
        children = list(executor.map(make_child, range(n_offspring)))

    energies = [energy for _, _, energy in children]
    best = int(np.argmin(energies))
    best_energy = energies[best]
    accepted = best_energy < parent_energy
    calls += n_offspring * _calls_per_evaluation(evaluator)
    offspring = [{"label": o.label, "gate_kind": o.gate_kind, "energy": e} for _, o, e in children]
    if accepted:
        new_parent, outcome, _ = children[best]
        new_energy = best_energy
        record = GenerationRecord(
            generation, parent_energy, best_energy, True, new_energy, outcome.label,
            outcome.gate_kind, [a.to_dict() for a in outcome.actions], offspring,
            len(new_parent), calls)
    else:
        new_parent, new_energy = parent, parent_energy
        record = GenerationRecord(generation, parent_energy, best_energy, False, new_energy,
                                  offspring=offspring, parent_gates=len(parent), calls=calls)
    return new_parent, new_energy, record


def run_evolution(cfg: EvolutionConfig, evaluator, extra_config: dict | None = None) -> RunLog:
    """Evolve from a single random gate until a stopping rule triggers.

    The whole run is a deterministic function of ``cfg.seed`` in exact mode.
    A missing seed is drawn from OS entropy and written into the log.
    """
    if not isinstance(cfg, EvolutionConfig):
        raise InvalidArgumentError("run_evolution expects an EvolutionConfig")
    seed = cfg.seed if cfg.seed is not None else int(np.random.SeedSequence().entropy % 2**63)
    config = cfg.to_dict()
    config["seed"] = seed
    config.update(extra_config or {})

    root = np.random.default_rng(seed)
    init_rng = root.spawn(1)[0]
    parent = Circuit(cfg.num_qubits, (random_gate(cfg.num_qubits, init_rng, cfg.mutation.theta_range,
                                             cfg.mutation.generator_weighting),))
    energy = float(evaluator(parent, init_rng))
    calls = _calls_per_evaluation(evaluator)
    log = RunLog("qneat", config, cfg.num_qubits, initial_energy=energy, initial_calls=calls)

    executor = ThreadPoolExecutor(cfg.n_jobs) if cfg.n_jobs > 1 else None
    try:
        stale = 0
        for generation in range(1, cfg.max_generations + 1):
            parent, energy, record = evolve_generation(
                parent, energy, cfg.n_offspring, evaluator, root.spawn(1)[0], cfg.mutation,
                generation=generation, calls=calls, executor=executor)
            calls = record.calls
            log.records.append(record)
            stale = 0 if record.accepted else stale + 1
            if cfg.stagnation_tau is not None and stale >= cfg.stagnation_tau:
                break
            if cfg.max_calls is not None and calls >= cfg.max_calls:
                break
            if cfg.target_energy is not None and energy <= cfg.target_energy:
                break
    finally:
        if executor is not None:
            executor.shutdown()
    log.final_circuit = parent
    return log


class QNEAT(BaseEstimator):
    """Evolutionary circuit-architecture search minimizing ``<H>``.

    ``fit`` takes a :class:`~qneat.hamiltonians.Hamiltonian` in place of a
    data matrix. After fitting, ``circuit_`` holds the best circuit,
    ``energy_`` its (possibly estimated) energy and ``log_`` the full
    :class:`~qneat.runlog.RunLog`.

    Parameters
    ----------
    n_offspring : int, default=4
        Offspring per generation (the lambda of a (1+lambda) scheme).
    max_generations : int, default=150
    stagnation_tau : int or None
        Stop after this many generations without improvement.
    max_calls : int or None
        Stop once this many circuit calls have been spent.
    target_energy : float or None
        Stop as soon as the parent energy is at or below this value.
    mutation_probs : tuple of 4 floats, default=(0.5, 0.1, 0.1, 0.3)
        Insert, delete, swap and modify probabilities.
    p_repeat : float, default=0.1
    modify_sigma : float, default=0.1
    theta_range : tuple, default=(0, 2*pi)
    generator_weighting : {"pooled", "kind"}, default="pooled"
    mode : {"exact", "sampled"}, default="exact"
    shots : int, default=8192
    noise : float, default=0.0
        Per-gate Pauli error probability (sampled mode only).
    init_axis : {"X", "Y", "Z"} or None
        Product-state axis of the initial state; neutral axis when ``None``.
    random_state : int or None
    n_jobs : int or None
        Threads used to evaluate offspring.
    """

    def __init__(self, n_offspring=4, max_generations=150, stagnation_tau=None, max_calls=None,
                 target_energy=None, mutation_probs=(0.5, 0.1, 0.1, 0.3), p_repeat=0.1,
                 modify_sigma=0.1, theta_range=(0.0, TWO_PI), generator_weighting="pooled",
                 mode="exact", shots=DEFAULT_SHOTS, noise=0.0, init_axis=None, random_state=None,
                 n_jobs=None):
        self.n_offspring = n_offspring
        self.max_generations = max_generations
        self.stagnation_tau = stagnation_tau
        self.max_calls = max_calls
        self.target_energy = target_energy
        self.mutation_probs = mutation_probs
        self.p_repeat = p_repeat
        self.modify_sigma = modify_sigma
        self.theta_range = theta_range
        self.generator_weighting = generator_weighting
        self.mode = mode
        self.shots = shots
        self.noise = noise
        self.init_axis = init_axis
        self.random_state = random_state
        self.n_jobs = n_jobs

    def _initial_state(self, hamiltonian):
        axis = neutral_initial_axis(hamiltonian) if self.init_axis is None else Axis.parse(self.init_axis)
        return axis, init_product_state(hamiltonian.num_qubits, axis, 1)

    def fit(self, hamiltonian: Hamiltonian, y=None):
        if not isinstance(hamiltonian, Hamiltonian):
            raise InvalidArgumentError(f"fit expects a Hamiltonian, got {type(hamiltonian).__name__}")
        mutation = MutationConfig.from_probabilities(
            self.mutation_probs, p_repeat=self.p_repeat, modify_sigma=self.modify_sigma,
            theta_range=tuple(self.theta_range), generator_weighting=self.generator_weighting)
        cfg = EvolutionConfig(
            num_qubits=hamiltonian.num_qubits, n_offspring=self.n_offspring,
            max_generations=self.max_generations, stagnation_tau=self.stagnation_tau,
            max_calls=self.max_calls, target_energy=self.target_energy, seed=self.random_state,
            mutation=mutation, n_jobs=self.n_jobs or 1)
        axis, init = self._initial_state(hamiltonian)
        evaluator = EnergyEvaluator(hamiltonian, init, self.mode, self.shots, self.noise)
        extra = {"mode": self.mode, "shots": self.shots if self.mode == "sampled" else None,
                 "noise": self.noise, "init_axis": axis.value}
        self.log_ = run_evolution(cfg, evaluator, extra)
        self.init_axis_ = axis
        self.initial_state_ = init
        self.circuit_ = self.log_.final_circuit
        self.energy_ = self.log_.final_energy
        self.n_calls_ = self.log_.total_calls
        self.n_generations_ = len(self.log_.records)
        return self

    def final_state(self):
        """Statevector prepared by the fitted circuit."""
        check_is_fitted(self, "circuit_")
        return run_circuit(self.circuit_, self.initial_state_)

    def energy(self, hamiltonian: Hamiltonian) -> float:
        """Exact energy of the fitted circuit's state under ``hamiltonian``."""
        return expectation(self.final_state(), hamiltonian)

    def score(self, hamiltonian: Hamiltonian, y=None) -> float:
        """Negative exact energy, so that larger is better."""
        return -self.energy(hamiltonian)
