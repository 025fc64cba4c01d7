import math

import numpy as np
import pytest
from scipy.optimize import minimize
from sklearn.base import clone

from qneat.circuits import Axis, PauliGenerator, generator_set
from qneat.exceptions import InvalidArgumentError
from qneat.gradient import (
    GeneratorAnsatz,
    GradientConfig,
    GradientVQE,
    LayeredAnsatz,
    gradient_descent_run,
    layers_for,
    parameter_shift_gradient,
)
from qneat.hamiltonians import exact_extremes, local_pauli_sum, tfi
from qneat.simulator import EnergyEvaluator, expectation, init_product_state, run_circuit

ZERO = np.array([1.0, 0.0])


def _energy(ansatz, theta, h, init):
    return expectation(run_circuit(ansatz.circuit(theta), init), h)


def test_parameter_counts():
    assert LayeredAnsatz(8, 7).num_parameters == 161
    assert LayeredAnsatz(2, 1).num_parameters == 5
    assert layers_for(150, 8) == 7
    kinds = {g.kind for g in LayeredAnsatz(4, 3).generators}
    assert kinds == {"ry", "rz", "rzz"}


def test_ansatz_rejects_bad_shapes():
    with pytest.raises(InvalidArgumentError):
        LayeredAnsatz(1, 2)
    with pytest.raises(InvalidArgumentError):
        LayeredAnsatz(3, 0)
    with pytest.raises(InvalidArgumentError):
        LayeredAnsatz(3, 1).circuit(np.zeros(3))


def test_single_rx_gradient_matches_derivative_of_cosine():
    # <Z> after Rx(theta) on |0> is cos(theta), so the slope at pi/2 is -1.
    ansatz = GeneratorAnsatz(1, (PauliGenerator(Axis.X, (0,)),))
    h = local_pauli_sum(1, "Z")
    grad = parameter_shift_gradient(ansatz, [math.pi / 2], h, ZERO)
    assert grad == pytest.approx([-1.0], abs=1e-12)
    for theta in np.linspace(-3, 3, 7):
        assert parameter_shift_gradient(ansatz, [theta], h, ZERO)[0] == pytest.approx(-math.sin(theta), abs=1e-12)


def test_gradient_vanishes_at_global_minimum():
    ansatz = LayeredAnsatz(2, 2)
    h = tfi(2)
    init = init_product_state(2, Axis.Z, 1)
    exact_min = exact_extremes(h)[0]
    fun = lambda t: _energy(ansatz, t, h, init)
    jac = lambda t: parameter_shift_gradient(ansatz, t, h, init)
    best = None
    for seed in range(5):
        res = minimize(fun, ansatz.initial_parameters(seed), jac=jac, method="BFGS", options={"gtol": 1e-10})
        if best is None or res.fun < best.fun:
            best = res
    assert best.fun == pytest.approx(exact_min, abs=1e-9)
    assert np.linalg.norm(jac(best.x)) <= 1e-6


def test_parameter_shift_matches_finite_differences(rng):
    eps = 1e-5
    for case in range(50):
        n = int(rng.integers(2, 5))
        ansatz = LayeredAnsatz(n, int(rng.integers(1, 3)))
        h = tfi(n, J=float(rng.uniform(0.5, 1.5)), h=float(rng.uniform(0.5, 1.5)))
        init = init_product_state(n, Axis.Z, 1)
        theta = ansatz.initial_parameters(rng)
        grad = parameter_shift_gradient(ansatz, theta, h, init)
        for k in range(theta.size):
            step = np.zeros_like(theta)
            step[k] = eps
            fd = (_energy(ansatz, theta + step, h, init) - _energy(ansatz, theta - step, h, init)) / (2 * eps)
            assert abs(grad[k] - fd) <= 1e-6, (case, k)


def test_zero_learning_rate_keeps_energy_constant():
    evaluator = EnergyEvaluator(tfi(3), init_product_state(3, Axis.Z, 1))
    log = gradient_descent_run(GradientConfig(3, num_layers=1, learning_rate=0.0, steps=5, seed=1), evaluator)
    energies = [log.initial_energy] + [r.energy for r in log.records]
    assert len(energies) == 6
    assert np.ptp(energies) == 0.0


@pytest.mark.slow
def test_two_qubit_tfi_converges_with_default_layers():
    h = tfi(2)
    exact_min = exact_extremes(h)[0]
    evaluator = EnergyEvaluator(h, init_product_state(2, Axis.Z, 1))
    hits = 0
    for seed in range(10):
        log = gradient_descent_run(GradientConfig(2, learning_rate=0.1, steps=500, seed=seed), evaluator)
        hits += abs(log.final_energy - exact_min) <= 1e-2
    assert hits >= 8


def test_small_learning_rate_descends_over_windows():
    evaluator = EnergyEvaluator(tfi(2), init_product_state(2, Axis.Z, 1))
    for seed in range(3):
        log = gradient_descent_run(GradientConfig(2, num_layers=2, learning_rate=0.01, steps=100, seed=seed),
                                   evaluator)
        energies = [log.initial_energy] + [r.energy for r in log.records]
        for k in range(len(energies) - 10):
            assert energies[k + 10] <= energies[k] + 1e-12


def test_call_accounting():
    evaluator = EnergyEvaluator(tfi(8), init_product_state(8, Axis.Z, 1))
    log = gradient_descent_run(GradientConfig(8, num_layers=7, steps=1, seed=0), evaluator)
    assert log.initial_calls == 1
    assert log.records[0].calls - log.initial_calls == 2 * 161 + 1
    assert log.records[0].parent_gates == 161
    assert log.records[0].accepted is None


def test_budget_and_target_stop_rules():
    evaluator = EnergyEvaluator(tfi(3), init_product_state(3, Axis.Z, 1))
    per_step = 2 * LayeredAnsatz(3, 1).num_parameters + 1
    log = gradient_descent_run(GradientConfig(3, num_layers=1, steps=50, seed=0, max_calls=1 + 3 * per_step),
                               evaluator)
    assert len(log.records) == 3 and log.total_calls <= 1 + 3 * per_step
    log = gradient_descent_run(GradientConfig(3, num_layers=1, steps=50, seed=0, target_energy=10.0), evaluator)
    assert log.records == []


def test_estimator_api():
    h = tfi(3)
    model = GradientVQE(num_layers=1, steps=20, random_state=3).fit(h)
    assert model.theta_.shape == (8,)
    assert model.energy(h) == pytest.approx(model.energy_, abs=1e-12)
    assert model.score(h) == -model.energy(h)
    again = clone(model).fit(h)
    assert again.energy_ == model.energy_
    with pytest.raises(InvalidArgumentError):
        GradientVQE().fit("tfi")


def test_random_twenty_gate_circuit_matches_finite_differences(rng):
    generators = generator_set(3)
    ansatz = GeneratorAnsatz(3, tuple(generators[i] for i in rng.integers(0, len(generators), size=20)))
    h = tfi(3)
    init = init_product_state(3, Axis.Y, 1)
    theta = ansatz.initial_parameters(rng)
    grad = parameter_shift_gradient(ansatz, theta, h, init)
    eps = 1e-5
    for k in range(20):
        step = np.zeros(20)
        step[k] = eps
        fd = (_energy(ansatz, theta + step, h, init) - _energy(ansatz, theta - step, h, init)) / (2 * eps)
        assert abs(grad[k] - fd) <= 1e-6
