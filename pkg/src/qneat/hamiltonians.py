"""Benchmark Hamiltonians, exact-spectrum oracles and the neutral initial axis."""

from __future__ import annotations

import json
import math
from functools import cached_property, reduce
from typing import Iterable, Mapping

import numpy as np

from .circuits import Axis, PauliString, pauli_action
from .exceptions import InvalidArgumentError, NoNeutralAxisError, UnsupportedSizeError
from .validation import check_finite, check_num_qubits, check_random_state

DENSE_MAX_QUBITS = 12
EIGH_MAX_QUBITS = 10

_PAULI_MATRICES = {
    None: np.eye(2, dtype=np.complex128),
    Axis.X: np.array([[0, 1], [1, 0]], dtype=np.complex128),
    Axis.Y: np.array([[0, -1j], [1j, 0]], dtype=np.complex128),
    Axis.Z: np.array([[1, 0], [0, -1]], dtype=np.complex128),
}


class Hamiltonian:
    """Weighted sum of Pauli strings on ``num_qubits`` qubits.

    Terms with identical Pauli content are merged on construction and terms
    whose merged weight is exactly zero are dropped. Instances are treated as
    immutable.
    """

    def __init__(self, num_qubits: int, terms: Iterable[PauliString]):
        self.num_qubits = check_num_qubits(num_qubits)
        merged: dict[tuple, float] = {}
        for term in terms:
            if not isinstance(term, PauliString):
                raise InvalidArgumentError(f"expected a PauliString, got {term!r}")
            if term.max_qubit >= self.num_qubits:
                raise InvalidArgumentError(
                    f"term on qubit {term.max_qubit} does not fit {self.num_qubits} qubits")
            merged[term.key] = merged.get(term.key, 0.0) + term.weight
        self.terms = tuple(PauliString(dict(key), weight)
                           for key, weight in merged.items() if weight != 0.0)

    def __repr__(self):
        body = " + ".join(f"{t.weight:g}*{t.label(self.num_qubits)}" for t in self.terms)
        return f"Hamiltonian(n={self.num_qubits}, {body or '0'})"

    def __eq__(self, other):
        if not isinstance(other, Hamiltonian):
            return NotImplemented
        return (self.num_qubits == other.num_qubits
                and {t.key: t.weight for t in self.terms} == {t.key: t.weight for t in other.terms})

    def __len__(self):
        return len(self.terms)

    @property
    def weight_norm(self) -> float:
        """Upper bound on ``|<psi|H|psi>|``."""
        return math.fsum(abs(t.weight) for t in self.terms)

    @property
    def axes(self) -> set[Axis]:
        return {axis for term in self.terms for _, axis in term.items}

    @property
    def is_diagonal(self) -> bool:
        return all(term.is_diagonal for term in self.terms)

    @cached_property
    def operator_blocks(self) -> tuple:
        """``(perm, diag)`` blocks with ``H @ psi == sum(diag * psi[perm])``.

        Terms sharing an X/Y support pattern are folded into one diagonal.
        """
        n = self.num_qubits
        blocks: dict[int, list] = {}
        for term in self.terms:
            x_mask, z_mask, n_y = term.masks
            perm, phase = pauli_action(n, x_mask, z_mask, n_y)
            if x_mask not in blocks:
                blocks[x_mask] = [perm, np.zeros(1 << n, dtype=np.complex128)]
            blocks[x_mask][1] += term.weight * phase
        return tuple((perm, diag) for perm, diag in blocks.values())

    @cached_property
    def measurement_groups(self) -> tuple:
        """Terms grouped by the full-register basis they are measured in.

        A term whose Paulis share one axis is measured with the whole register
        in that axis; a mixed-axis term uses its own axes and Z elsewhere. Only
        identical register bases are grouped. Returns ``(basis, terms)`` pairs
        in first-seen order, ``basis`` being a tuple of :class:`Axis`.
        """
        groups: dict[tuple, list] = {}
        for term in self.terms:
            if not term.items:
                continue
            axes = {axis for _, axis in term.items}
            fill = axes.pop() if len(axes) == 1 else Axis.Z
            basis = tuple(term.paulis.get(q, fill) for q in range(self.num_qubits))
            groups.setdefault(basis, []).append(term)
        return tuple((basis, tuple(terms)) for basis, terms in groups.items())

    @property
    def constant(self) -> float:
        return math.fsum(t.weight for t in self.terms if not t.items)

    def to_dict(self) -> dict:
        return {
            "n": self.num_qubits,
            "terms": [
                {"weight": t.weight,
                 "paulis": [{"qubit": q, "axis": a.value} for q, a in t.items]}
                for t in self.terms
            ],
        }

    @classmethod
    def from_dict(cls, data: Mapping) -> "Hamiltonian":
        try:
            terms = [PauliString({p["qubit"]: p["axis"] for p in term["paulis"]}, term["weight"])
                     for term in data["terms"]]
            return cls(data["n"], terms)
        except (KeyError, TypeError) as exc:
            raise InvalidArgumentError(f"malformed Hamiltonian document: {exc}") from None

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    @classmethod
    def from_json(cls, text: str) -> "Hamiltonian":
        return cls.from_dict(json.loads(text))


def local_pauli_sum(n: int, axis=Axis.X) -> Hamiltonian:
    """``sum_i sigma^axis_i`` with unit weights."""
    n = check_num_qubits(n)
    axis = Axis.parse(axis)
    return Hamiltonian(n, [PauliString({i: axis}, 1.0) for i in range(n)])


def tfi(n: int, J: float = 1.0, h: float = 1.0) -> Hamiltonian:
    """Open-chain transverse-field Ising model ``-J sum Z_i Z_{i+1} - h sum X_i``."""
    n = check_num_qubits(n, minimum=2)
    J = check_finite(J, "J")
    h = check_finite(h, "h")
    terms = [PauliString({i: Axis.Z, i + 1: Axis.Z}, -J) for i in range(n - 1)]
    terms += [PauliString({i: Axis.X}, -h) for i in range(n)]
    return Hamiltonian(n, terms)


def sk_couplings(n: int, rng=None) -> dict[tuple[int, int], float]:
    """Draw ``J_ij`` uniformly from {-1, +1} for every pair ``i < j``."""
    n = check_num_qubits(n, minimum=2)
    rng = check_random_state(rng)
    pairs = [(i, j) for i in range(n) for j in range(i + 1, n)]
    signs = rng.choice(np.array([-1.0, 1.0]), size=len(pairs))
    return {pair: float(s) for pair, s in zip(pairs, signs)}


def sk(n: int, rng=None) -> Hamiltonian:
    """Sherrington-Kirkpatrick instance ``sum_{i<j} J_ij Z_i Z_j`` with ``J_ij = +-1``."""
    couplings = sk_couplings(n, rng)
    return Hamiltonian(n, [PauliString({i: Axis.Z, j: Axis.Z}, w) for (i, j), w in couplings.items()])


def dense_matrix(hamiltonian: Hamiltonian) -> np.ndarray:
    """Dense ``2**n x 2**n`` matrix built from Kronecker products.

    Deliberately independent of the index/phase tables used by the
    simulator so it can serve as a testing oracle.
    """
    n = hamiltonian.num_qubits
    if n > DENSE_MAX_QUBITS:
        raise UnsupportedSizeError(f"dense matrices are limited to {DENSE_MAX_QUBITS} qubits, got {n}")
    dim = 1 << n
    matrix = np.zeros((dim, dim), dtype=np.complex128)
    for term in hamiltonian.terms:
        # highest qubit first: qubit 0 ends up as the least-significant bit
        factors = [_PAULI_MATRICES[term.paulis.get(q)] for q in reversed(range(n))]
        matrix += term.weight * reduce(np.kron, factors)
    return matrix


def diagonal_energies(hamiltonian: Hamiltonian) -> np.ndarray:
    """Energies of all computational basis states of a Z-diagonal Hamiltonian."""
    if not hamiltonian.is_diagonal:
        raise InvalidArgumentError("bitstring scan requires a Z-diagonal Hamiltonian")
    n = hamiltonian.num_qubits
    index = np.arange(1 << n, dtype=np.int64)
    spins = 1 - 2 * ((index[:, None] >> np.arange(n)) & 1)
    energies = np.zeros(1 << n)
    for term in hamiltonian.terms:
        product = np.ones(1 << n, dtype=np.int64)
        for qubit, _ in term.items:
            product *= spins[:, qubit]
        energies += term.weight * product
    return energies


def sparse_matrix(hamiltonian: Hamiltonian):
    """Sparse CSR matrix assembled from the simulator's operator blocks."""
    from scipy import sparse

    dim = 1 << hamiltonian.num_qubits
    rows = np.arange(dim)
    total = sparse.csr_matrix((dim, dim), dtype=np.complex128)
    for perm, diag in hamiltonian.operator_blocks:
        cols = rows if perm is None else perm
        total = total + sparse.csr_matrix((diag, (rows, cols)), shape=(dim, dim))
    return total


def exact_extremes(hamiltonian: Hamiltonian) -> tuple[float, float]:
    """Smallest and largest eigenvalue of ``hamiltonian``.

    Z-diagonal Hamiltonians are scanned over bitstrings (up to the global
    qubit limit); others are diagonalized, densely up to 10 qubits and with a
    sparse Lanczos solver for 11 and 12 qubits.
    """
    n = hamiltonian.num_qubits
    if hamiltonian.is_diagonal:
        energies = diagonal_energies(hamiltonian)
        return float(energies.min()), float(energies.max())
    if n > DENSE_MAX_QUBITS:
        raise UnsupportedSizeError(
            f"exact spectrum of non-diagonal Hamiltonians is limited to {DENSE_MAX_QUBITS} qubits, got {n}")
    if n <= EIGH_MAX_QUBITS:
        eigenvalues = np.linalg.eigvalsh(dense_matrix(hamiltonian))
        return float(eigenvalues[0]), float(eigenvalues[-1])
    from scipy.sparse.linalg import eigsh

    matrix = sparse_matrix(hamiltonian)
    low = eigsh(matrix, k=1, which="SA", return_eigenvectors=False, tol=1e-12)[0]
    high = eigsh(matrix, k=1, which="LA", return_eigenvectors=False, tol=1e-12)[0]
    return float(low), float(high)


NEUTRAL_AXIS_PREFERENCE = (Axis.Y, Axis.X, Axis.Z)


def neutral_initial_axis(hamiltonian: Hamiltonian) -> Axis:
    """An axis that occurs in no term, preferring Y, then X, then Z."""
    used = hamiltonian.axes
    for axis in NEUTRAL_AXIS_PREFERENCE:
        if axis not in used:
            return axis
    raise NoNeutralAxisError("every Pauli axis occurs in the Hamiltonian; no neutral product state")


HAMILTONIAN_NAMES = ("local-x", "local-z", "tfi", "sk")


def build_hamiltonian(name: str, n: int, *, J: float = 1.0, h: float = 1.0, sk_seed=None) -> Hamiltonian:
    """Construct one of the named benchmark Hamiltonians."""
    if name == "local-x":
        return local_pauli_sum(n, Axis.X)
    if name == "local-z":
        return local_pauli_sum(n, Axis.Z)
    if name == "tfi":
        return tfi(n, J, h)
    if name == "sk":
        return sk(n, sk_seed)
    raise InvalidArgumentError(f"unknown Hamiltonian {name!r}; choose from {', '.join(HAMILTONIAN_NAMES)}")
