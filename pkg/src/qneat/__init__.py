"""Evolutionary architecture search for variational quantum circuits."""

__version__ = "0.1.0"

from .circuits import Axis, Circuit, Gate, PauliGenerator, PauliString, generator_set, rotation
from .evolution import QNEAT, EvolutionConfig, evolve_generation, run_evolution
from .exceptions import (EvaluationError, InvalidArgumentError, NoNeutralAxisError, QNEATError,
                         UnsupportedSizeError)
from .gradient import GradientVQE, LayeredAnsatz, build_layered_ansatz, parameter_shift_gradient
from .hamiltonians import (Hamiltonian, dense_matrix, exact_extremes, local_pauli_sum,
                           neutral_initial_axis, sk, tfi)
from .mutation import MutationConfig, MutationOutcome, mutate, random_gate
from .runlog import GenerationRecord, RunLog
from .simulator import (EnergyEvaluator, apply_gate, circuit_call_count, estimate_energy_sampled,
                        expectation, init_product_state, run_circuit)

__all__ = [
    "Axis", "Circuit", "EnergyEvaluator", "EvaluationError", "EvolutionConfig", "Gate",
    "GenerationRecord", "GradientVQE", "Hamiltonian", "InvalidArgumentError", "LayeredAnsatz",
    "MutationConfig", "MutationOutcome", "NoNeutralAxisError", "PauliGenerator", "PauliString",
    "QNEAT", "QNEATError", "RunLog", "UnsupportedSizeError", "apply_gate", "build_layered_ansatz",
    "circuit_call_count", "dense_matrix", "estimate_energy_sampled", "evolve_generation",
    "exact_extremes", "expectation", "generator_set", "init_product_state", "local_pauli_sum",
    "mutate", "neutral_initial_axis", "parameter_shift_gradient", "random_gate", "rotation",
    "run_circuit", "run_evolution", "sk", "tfi",
]
