import numpy as np
import pytest

from qneat.circuits import Circuit, Gate, generator_set


def random_circuit(n, num_gates, rng, theta_scale=2 * np.pi):
    generators = generator_set(n)
    picks = rng.integers(0, len(generators), size=num_gates)
    return Circuit(n, tuple(Gate(generators[i], float(rng.uniform(-theta_scale, theta_scale)))
                            for i in picks))


def random_state(n, rng):
    psi = rng.normal(size=2 ** n) + 1j * rng.normal(size=2 ** n)
    return psi / np.linalg.norm(psi)


@pytest.fixture
def rng():
    return np.random.default_rng(20211019)
