import itertools
import json
import math

import numpy as np
import pytest

from qneat.circuits import Axis, PauliString
from qneat.exceptions import InvalidArgumentError, NoNeutralAxisError, UnsupportedSizeError
from qneat.hamiltonians import (Hamiltonian, build_hamiltonian, dense_matrix, diagonal_energies,
                                exact_extremes, local_pauli_sum, neutral_initial_axis, sk, sk_couplings,
                                tfi)
from qneat.simulator import expectation, init_product_state

# Lowest eigenvalue of -Z0Z1 - X0 - X1: the symmetric block spanned by
# (|00>+|11>)/sqrt2 and (|01>+|10>)/sqrt2 is [[-1, -2], [-2, 1]], eigenvalues +-sqrt(5).
TFI2_MIN = -math.sqrt(5)


def test_local_pauli_sum_terms():
    H = local_pauli_sum(3, "X")
    assert [t.items for t in H.terms] == [((0, Axis.X),), ((1, Axis.X),), ((2, Axis.X),)]
    assert all(t.weight == 1.0 for t in H.terms)


def test_local_spectra():
    assert exact_extremes(local_pauli_sum(1, "Z")) == (-1.0, 1.0)
    low, high = exact_extremes(local_pauli_sum(10, "X"))
    assert low == pytest.approx(-10, abs=1e-9) and high == pytest.approx(10, abs=1e-9)


def test_tfi_structure():
    H = tfi(2)
    labels = {t.label(2): t.weight for t in H.terms}
    assert labels == {"ZZ": -1.0, "XI": -1.0, "IX": -1.0}
    assert len(tfi(8).terms) == 15
    with pytest.raises(InvalidArgumentError):
        tfi(1)


def test_tfi_small_spectrum():
    low, high = exact_extremes(tfi(2, 1.0, 1.0))
    assert low == pytest.approx(TFI2_MIN, abs=1e-12)
    assert high == pytest.approx(-TFI2_MIN, abs=1e-12)
    assert exact_extremes(tfi(2, 1.0, 0.0))[0] == pytest.approx(-1.0)


def test_sk_counts_and_determinism():
    assert len(sk(10, 1).terms) == 45
    assert sk(6, 42) == sk(6, 42)
    assert sk_couplings(6, 42) == sk_couplings(6, 42)
    assert set(sk_couplings(8, 3).values()) <= {-1.0, 1.0}
    (term,) = sk(2, 0).terms
    assert abs(term.weight) == 1.0
    assert exact_extremes(sk(2, 0))[0] == -1.0


@pytest.mark.parametrize("seed", [0, 1, 2, 3])
def test_sk_minimum_by_enumeration(seed):
    couplings = sk_couplings(4, seed)
    brute = min(sum(J * s[i] * s[j] for (i, j), J in couplings.items())
                for s in itertools.product((1, -1), repeat=4))
    assert exact_extremes(sk(4, seed))[0] == brute


def test_dense_matrix_examples():
    np.testing.assert_array_equal(dense_matrix(local_pauli_sum(1, "Z")), np.diag([1, -1]))
    xx = dense_matrix(Hamiltonian(2, [PauliString({0: "X", 1: "X"})]))
    np.testing.assert_array_equal(xx, np.fliplr(np.eye(4)))
    M = dense_matrix(tfi(3))
    assert np.max(np.abs(M - M.conj().T)) <= 1e-12
    assert abs(np.trace(M)) <= 1e-12


def test_dense_matrix_bit_order():
    # Z on qubit 0 flips sign on odd basis indices
    M = dense_matrix(Hamiltonian(2, [PauliString({0: "Z"})]))
    np.testing.assert_array_equal(np.diag(M).real, [1, -1, 1, -1])


def test_dense_size_guard():
    with pytest.raises(UnsupportedSizeError):
        dense_matrix(local_pauli_sum(13, "X"))
    with pytest.raises(UnsupportedSizeError):
        exact_extremes(tfi(13))
    # Z-diagonal Hamiltonians are scanned instead
    assert exact_extremes(local_pauli_sum(16, "Z")) == (-16.0, 16.0)


def test_sparse_path_agrees_with_dense():
    H = tfi(11, 1.0, 0.7)
    eigenvalues = np.linalg.eigvalsh(dense_matrix(H))
    low, high = exact_extremes(H)
    assert low == pytest.approx(eigenvalues[0], abs=1e-8)
    assert high == pytest.approx(eigenvalues[-1], abs=1e-8)


def test_diagonal_scan_matches_dense():
    H = sk(5, 9)
    np.testing.assert_allclose(diagonal_energies(H), np.diag(dense_matrix(H)).real, atol=1e-12)
    with pytest.raises(InvalidArgumentError):
        diagonal_energies(tfi(3))


def test_merging_duplicate_terms():
    H = Hamiltonian(2, [PauliString({0: "X"}, 0.5), PauliString({0: "X"}, 0.25),
                        PauliString({1: "Z"}, 1.0), PauliString({1: "Z"}, -1.0)])
    assert len(H.terms) == 1
    assert H.terms[0].weight == 0.75


def test_rejects_out_of_range_term():
    with pytest.raises(InvalidArgumentError):
        Hamiltonian(2, [PauliString({2: "Z"})])


def test_json_round_trip():
    H = tfi(4, 0.5, 2.0)
    doc = json.loads(H.to_json())
    assert doc["n"] == 4
    assert doc["terms"][0] == {"weight": -0.5, "paulis": [{"qubit": 0, "axis": "Z"}, {"qubit": 1, "axis": "Z"}]}
    assert Hamiltonian.from_json(H.to_json()) == H
    with pytest.raises(InvalidArgumentError):
        Hamiltonian.from_dict({"terms": []})


def test_neutral_axis():
    assert neutral_initial_axis(local_pauli_sum(3, "X")) is Axis.Y
    assert neutral_initial_axis(tfi(3)) is Axis.Y
    assert neutral_initial_axis(sk(4, 0)) is Axis.Y
    assert neutral_initial_axis(Hamiltonian(2, [PauliString({0: "Y"}), PauliString({1: "Z"})])) is Axis.X
    with pytest.raises(NoNeutralAxisError):
        neutral_initial_axis(Hamiltonian(1, [PauliString({0: a}) for a in "XYZ"]))


@pytest.mark.parametrize("H", [local_pauli_sum(6, "X"), local_pauli_sum(5, "Z"), tfi(6), sk(6, 11)],
                         ids=["local-x", "local-z", "tfi", "sk"])
def test_zero_energy_at_neutral_state(H):
    psi = init_product_state(H.num_qubits, neutral_initial_axis(H), 1)
    assert expectation(psi, H) == pytest.approx(0.0, abs=1e-9)


def test_sk_x_init_also_neutral():
    H = sk(6, 5)
    assert expectation(init_product_state(6, "X", 1), H) == pytest.approx(0.0, abs=1e-9)


def test_build_hamiltonian_names():
    assert build_hamiltonian("local-z", 3) == local_pauli_sum(3, "Z")
    assert build_hamiltonian("sk", 4, sk_seed=7) == sk(4, 7)
    with pytest.raises(InvalidArgumentError):
        build_hamiltonian("heisenberg", 3)
