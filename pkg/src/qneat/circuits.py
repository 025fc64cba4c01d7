"""Circuit genotype: Pauli generators, rotation gates, circuits and Pauli strings.

Qubit 0 is the least-significant bit of a basis-state index throughout the
package.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Iterable, Mapping

import numpy as np

from .exceptions import InvalidArgumentError
from .validation import check_finite, check_num_qubits


class Axis(str, enum.Enum):
    X = "X"
    Y = "Y"
    Z = "Z"

    @classmethod
    def parse(cls, value) -> "Axis":
        if isinstance(value, cls):
            return value
        try:
            return cls(str(value).upper())
        except ValueError:
            raise InvalidArgumentError(f"unknown Pauli axis {value!r}") from None


def pauli_masks(paulis: Iterable[tuple[int, Axis]]) -> tuple[int, int, int]:
    """Return ``(x_mask, z_mask, n_y)`` for a product of single-qubit Paulis.

    With these masks ``P|b> = i**n_y * (-1)**popcount(b & z_mask) |b ^ x_mask>``.
    """
    x_mask = z_mask = n_y = 0
    for qubit, axis in paulis:
        bit = 1 << qubit
        if axis is Axis.X:
            x_mask |= bit
        elif axis is Axis.Z:
            z_mask |= bit
        else:
            x_mask |= bit
            z_mask |= bit
            n_y += 1
    return x_mask, z_mask, n_y


@lru_cache(maxsize=4096)
def pauli_action(num_qubits: int, x_mask: int, z_mask: int, n_y: int):
    """Index map and phases such that ``(P @ psi) == phase * psi[perm]``.

    ``perm`` is ``None`` for diagonal operators. The returned arrays are
    cached and must not be mutated.
    """
    index = np.arange(1 << num_qubits, dtype=np.int64)
    source = index ^ x_mask
    parity = (np.bitwise_count(source & z_mask) & 1).astype(np.int64)
    phase = (1j ** (n_y % 4)) * (1 - 2 * parity).astype(np.complex128)
    phase.flags.writeable = False
    if x_mask == 0:
        return None, phase
    source.flags.writeable = False
    return source, phase


@dataclass(frozen=True)
class PauliGenerator:
    """A single-qubit Pauli or a same-axis product on two distinct qubits."""

    axis: Axis
    qubits: tuple[int, ...]
    _masks: tuple = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "axis", Axis.parse(self.axis))
        qubits = tuple(int(q) for q in self.qubits)
        if len(qubits) not in (1, 2):
            raise InvalidArgumentError(f"a generator acts on 1 or 2 qubits, got {qubits}")
        if len(set(qubits)) != len(qubits):
            raise InvalidArgumentError(f"generator qubits must be distinct, got {qubits}")
        if min(qubits) < 0:
            raise InvalidArgumentError(f"negative qubit index in {qubits}")
        object.__setattr__(self, "qubits", tuple(sorted(qubits)))
        object.__setattr__(self, "_masks", pauli_masks((q, self.axis) for q in self.qubits))

    @property
    def kind(self) -> str:
        """Gate-kind label used in statistics, e.g. ``"rz"`` or ``"ryy"``."""
        return "r" + self.axis.value.lower() * len(self.qubits)

    @property
    def masks(self) -> tuple[int, int, int]:
        return self._masks

    def as_pauli_string(self, weight: float = 1.0) -> "PauliString":
        return PauliString({q: self.axis for q in self.qubits}, weight)

    def to_dict(self) -> dict:
        return {"axis": self.axis.value, "qubits": list(self.qubits)}

    @classmethod
    def from_dict(cls, data: Mapping) -> "PauliGenerator":
        return cls(Axis.parse(data["axis"]), tuple(data["qubits"]))


@lru_cache(maxsize=64)
def generator_set(num_qubits: int) -> tuple[PauliGenerator, ...]:
    """All ``3n`` single-qubit and ``3 n(n-1)/2`` two-qubit generators."""
    gens = [PauliGenerator(axis, (q,)) for q in range(num_qubits) for axis in Axis]
    gens += [PauliGenerator(axis, (i, j))
             for i in range(num_qubits) for j in range(i + 1, num_qubits) for axis in Axis]
    return tuple(gens)


@dataclass(frozen=True)
class Gate:
    """The rotation ``exp(-i theta/2 P)``; ``theta`` is kept unreduced."""

    generator: PauliGenerator
    theta: float

    def __post_init__(self):
        object.__setattr__(self, "theta", check_finite(self.theta, "theta"))

    @property
    def kind(self) -> str:
        return self.generator.kind

    def with_theta(self, theta: float) -> "Gate":
        return Gate(self.generator, theta)

    def to_dict(self) -> dict:
        return {"generator": self.generator.to_dict(), "theta": self.theta}

    @classmethod
    def from_dict(cls, data: Mapping) -> "Gate":
        return cls(PauliGenerator.from_dict(data["generator"]), float(data["theta"]))


def rotation(axis, qubits, theta: float) -> Gate:
    """Shorthand: ``rotation("X", 0, pi)`` or ``rotation("Z", (0, 1), t)``."""
    if isinstance(qubits, int):
        qubits = (qubits,)
    return Gate(PauliGenerator(Axis.parse(axis), tuple(qubits)), theta)


@dataclass(frozen=True)
class Circuit:
    """Ordered gate sequence; gate 0 acts first. The empty circuit is the identity."""

    num_qubits: int
    gates: tuple[Gate, ...] = ()

    def __post_init__(self):
        n = check_num_qubits(self.num_qubits)
        gates = tuple(self.gates)
        for gate in gates:
            if max(gate.generator.qubits) >= n:
                raise InvalidArgumentError(
                    f"gate on qubits {gate.generator.qubits} does not fit {n} qubits")
        object.__setattr__(self, "gates", gates)

    def __len__(self) -> int:
        return len(self.gates)

    def __iter__(self):
        return iter(self.gates)

    def __getitem__(self, index):
        return self.gates[index]

    def insert(self, position: int, gate: Gate) -> "Circuit":
        gates = list(self.gates)
        gates.insert(position, gate)
        return Circuit(self.num_qubits, tuple(gates))

    def delete(self, position: int) -> "Circuit":
        gates = list(self.gates)
        del gates[position]
        return Circuit(self.num_qubits, tuple(gates))

    def replace(self, position: int, gate: Gate) -> "Circuit":
        gates = list(self.gates)
        gates[position] = gate
        return Circuit(self.num_qubits, tuple(gates))

    def to_list(self) -> list[dict]:
        return [gate.to_dict() for gate in self.gates]

    @classmethod
    def from_list(cls, num_qubits: int, data: Iterable[Mapping]) -> "Circuit":
        return cls(num_qubits, tuple(Gate.from_dict(item) for item in data))


@dataclass(frozen=True)
class PauliString:
    """Weighted tensor product of single-qubit Paulis; identity elsewhere.

    An empty mapping denotes the constant term ``weight * I``.
    """

    paulis: Mapping[int, Axis]
    weight: float = 1.0
    _items: tuple = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        items = []
        for qubit, axis in dict(self.paulis).items():
            qubit = int(qubit)
            if qubit < 0:
                raise InvalidArgumentError(f"negative qubit index {qubit}")
            items.append((qubit, Axis.parse(axis)))
        items.sort()
        object.__setattr__(self, "_items", tuple(items))
        object.__setattr__(self, "paulis", dict(items))
        object.__setattr__(self, "weight", check_finite(self.weight, "weight"))

    @property
    def key(self) -> tuple:
        return self._items

    @property
    def items(self) -> tuple[tuple[int, Axis], ...]:
        return self._items

    @property
    def max_qubit(self) -> int:
        return self._items[-1][0] if self._items else -1

    @property
    def masks(self) -> tuple[int, int, int]:
        return pauli_masks(self._items)

    @property
    def is_diagonal(self) -> bool:
        return all(axis is Axis.Z for _, axis in self._items)

    def label(self, num_qubits: int) -> str:
        """Readable label with qubit 0 leftmost, e.g. ``"ZZI"``."""
        return "".join(self.paulis[q].value if q in self.paulis else "I" for q in range(num_qubits))

    def commutes_with(self, other: "PauliString") -> bool:
        anti = sum(1 for q, a in self._items if q in other.paulis and other.paulis[q] is not a)
        return anti % 2 == 0


TWO_PI = 2.0 * math.pi
