"""Input validation helpers in the spirit of ``sklearn.utils.validation``."""

from __future__ import annotations

import math
import numbers
from typing import Sequence

import numpy as np

from .exceptions import InvalidArgumentError, UnsupportedSizeError

MAX_QUBITS = 24


def check_num_qubits(n, minimum: int = 1, maximum: int = MAX_QUBITS) -> int:
    """Validate a qubit count and return it as ``int``."""
    if isinstance(n, bool) or not isinstance(n, numbers.Integral):
        raise InvalidArgumentError(f"qubit count must be an integer, got {n!r}")
    n = int(n)
    if n < minimum:
        raise InvalidArgumentError(f"qubit count must be >= {minimum}, got {n}")
    if n > maximum:
        raise UnsupportedSizeError(f"qubit count {n} exceeds the supported maximum {maximum}")
    return n


def check_positive_int(value, name: str, minimum: int = 1) -> int:
    if isinstance(value, bool) or not isinstance(value, numbers.Integral):
        raise InvalidArgumentError(f"{name} must be an integer, got {value!r}")
    if value < minimum:
        raise InvalidArgumentError(f"{name} must be >= {minimum}, got {value}")
    return int(value)


def check_finite(value, name: str) -> float:
    try:
        value = float(value)
    except (TypeError, ValueError):
        raise InvalidArgumentError(f"{name} must be a real number, got {value!r}") from None
    if not math.isfinite(value):
        raise InvalidArgumentError(f"{name} must be finite, got {value}")
    return value


def check_probability(value, name: str, allow_one: bool = True) -> float:
    value = check_finite(value, name)
    upper_ok = value <= 1.0 if allow_one else value < 1.0
    if value < 0.0 or not upper_ok:
        bound = "[0, 1]" if allow_one else "[0, 1)"
        raise InvalidArgumentError(f"{name} must lie in {bound}, got {value}")
    return value


def check_probabilities(probs: Sequence[float], name: str = "probabilities",
                        size: int | None = None, atol: float = 1e-12) -> tuple[float, ...]:
    """Validate a probability vector that must sum to one."""
    probs = tuple(check_probability(p, name) for p in probs)
    if size is not None and len(probs) != size:
        raise InvalidArgumentError(f"{name} needs {size} entries, got {len(probs)}")
    if abs(math.fsum(probs) - 1.0) > atol:
        raise InvalidArgumentError(f"{name} must sum to 1, got {math.fsum(probs)!r}")
    return probs


def check_random_state(seed) -> np.random.Generator:
    """Turn ``None``, an int, a SeedSequence or a Generator into a Generator."""
    if isinstance(seed, np.random.Generator):
        return seed
    if seed is None or isinstance(seed, (numbers.Integral, np.random.SeedSequence)):
        return np.random.default_rng(seed)
    raise InvalidArgumentError(f"cannot build a random generator from {seed!r}")


def check_state(state, num_qubits: int | None = None) -> np.ndarray:
    """Validate a statevector and return it as a complex128 array."""
    state = np.asarray(state, dtype=np.complex128)
    if state.ndim != 1 or state.size < 2 or state.size & (state.size - 1):
        raise InvalidArgumentError("a statevector needs 2**n amplitudes with n >= 1")
    n = state.size.bit_length() - 1
    if num_qubits is not None and n != num_qubits:
        raise InvalidArgumentError(f"expected a {num_qubits}-qubit state, got {n} qubits")
    return state
