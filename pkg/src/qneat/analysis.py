"""Post-run statistics and the single-rotation usefulness estimator."""

from __future__ import annotations

import csv
import math
from collections import Counter
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, Iterable

import numpy as np

from .circuits import Gate, PauliGenerator, generator_set
from .hamiltonians import Hamiltonian
from .mutation import OUTCOME_LABELS
from .runlog import RunLog
from .simulator import apply_gate, expectation, product_state
from .validation import check_positive_int, check_random_state, check_state

HISTOGRAM_COLUMNS = ("label", "gate_kind", "count", "proposals", "rate")
CURVE_COLUMNS = ("calls", "energy")


@dataclass(frozen=True)
class SinusoidFit:
    """``f(theta) = a + b cos(theta) + c sin(theta)``."""

    a: float
    b: float
    c: float

    def __call__(self, theta):
        return self.a + self.b * np.cos(theta) + self.c * np.sin(theta)

    @property
    def amplitude(self) -> float:
        return math.hypot(self.b, self.c)

    @property
    def minimum(self) -> float:
        return self.a - self.amplitude

    @property
    def argmin(self) -> float:
        """Minimising angle in ``[0, 2 pi)``."""
        return math.atan2(-self.c, -self.b) % (2 * math.pi)


def fit_rotation_response(state, hamiltonian: Hamiltonian, generator: PauliGenerator) -> SinusoidFit:
    """Energy as a function of the angle of one rotation appended to ``state``.

    Three evaluations at 0, pi/2 and pi determine the sinusoid exactly.
    """
    state = check_state(state, hamiltonian.num_qubits)

    def f(theta):
        return expectation(apply_gate(state, Gate(generator, theta)), hamiltonian)

    f0, f_half, f_pi = f(0.0), f(math.pi / 2), f(math.pi)
    a = 0.5 * (f0 + f_pi)
    return SinusoidFit(a, 0.5 * (f0 - f_pi), f_half - a)


def is_useful(fit: SinusoidFit, tol: float = 1e-9) -> bool:
    """Some angle lowers the energy below the unrotated value by more than ``tol``."""
    return fit.minimum < fit(0.0) - tol


def useful_generators(state, hamiltonian: Hamiltonian, tol: float = 1e-9) -> list[PauliGenerator]:
    """All generators of the full set whose rotation can lower the energy of ``state``."""
    return [g for g in generator_set(hamiltonian.num_qubits)
            if is_useful(fit_rotation_response(state, hamiltonian, g), tol)]


def random_product_state(n: int, rng) -> np.ndarray:
    """Product of single-qubit states drawn uniformly from the Bloch sphere."""
    rng = check_random_state(rng)
    cos_polar = rng.uniform(-1.0, 1.0, size=n)
    azimuth = rng.uniform(0.0, 2 * math.pi, size=n)
    half = np.arccos(cos_polar) / 2
    return product_state([np.array([math.cos(h), np.exp(1j * phi) * math.sin(h)])
                          for h, phi in zip(half, azimuth)])


def useful_gate_fraction(hamiltonian: Hamiltonian, state_sampler: Callable | None = None,
                         num_samples: int = 1000, rng=None, tol: float = 1e-9) -> float:
    """Fraction of (state, uniform generator) draws that admit an energy-lowering angle.

    ``state_sampler(n, rng)`` defaults to uniform product states.
    """
    num_samples = check_positive_int(num_samples, "num_samples")
    rng = check_random_state(rng)
    sampler = state_sampler or random_product_state
    n = hamiltonian.num_qubits
    generators = generator_set(n)
    useful = 0
    for _ in range(num_samples):
        state = sampler(n, rng)
        generator = generators[int(rng.integers(0, len(generators)))]
        useful += is_useful(fit_rotation_response(state, hamiltonian, generator), tol)
    return float(useful) / num_samples


def _as_logs(logs) -> list[RunLog]:
    return [logs] if isinstance(logs, RunLog) else list(logs)


def success_histogram(logs: RunLog | Iterable[RunLog]) -> list[dict]:
    """Accepted improvements per ``(label, gate_kind)`` and their success rate.

    ``proposals`` counts every offspring proposed with that label, whatever
    its gate kind, and ``rate`` is ``count / proposals``. Rows are ordered by
    label (insert, delete, swap, modify, multiple) and then gate kind.
    """
    counts: Counter = Counter()
    seen: set = set()
    proposals: Counter = Counter()
    for log in _as_logs(logs):
        counts.update(log.tallies())
        for record in log.records:
            for child in record.offspring or ():
                proposals[child["label"]] += 1
                seen.add((child["label"], child["gate_kind"]))
    order = {label: i for i, label in enumerate(OUTCOME_LABELS)}
    keys = sorted(set(counts) | seen, key=lambda k: (order.get(k[0], len(order)), k[0], k[1]))
    return [{"label": label, "gate_kind": kind, "count": counts[label, kind],
             "proposals": proposals[label],
             "rate": counts[label, kind] / proposals[label] if proposals[label] else 0.0}
            for label, kind in keys]


def calls_vs_energy(log: RunLog) -> list[tuple[int, float]]:
    """Cumulative circuit calls against the best energy seen so far."""
    if not log.records:
        return []
    series = []
    best = math.inf
    if log.initial_energy is not None:
        best = log.initial_energy
        series.append((log.initial_calls, best))
    for record in log.records:
        best = min(best, record.energy)
        series.append((record.calls, best))
    return series


def calls_to_reach(log: RunLog, threshold: float) -> int | None:
    """First cumulative call count at which the best energy is ``<= threshold``."""
    for calls, energy in calls_vs_energy(log):
        if energy <= threshold:
            return calls
    return None


def write_histogram_csv(rows: list[dict], path) -> Path:
    path = Path(path)
    with path.open("w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(HISTOGRAM_COLUMNS)
        for row in rows:
            writer.writerow([row[c] for c in HISTOGRAM_COLUMNS])
    return path


def write_curve_csv(series: list[tuple[int, float]], path) -> Path:
    path = Path(path)
    with path.open("w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(CURVE_COLUMNS)
        writer.writerows(series)
    return path
