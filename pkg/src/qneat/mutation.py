"""Multi-level mutation operator over circuit genotypes."""

from __future__ import annotations

import enum
from functools import lru_cache
from dataclasses import asdict, dataclass

import numpy as np

from .circuits import TWO_PI, Circuit, Gate, generator_set
from .exceptions import InvalidArgumentError
from .validation import check_finite, check_probabilities, check_probability


class MutationAction(str, enum.Enum):
    INSERT = "insert"
    DELETE = "delete"
    SWAP = "swap"
    MODIFY = "modify"


ACTIONS = (MutationAction.INSERT, MutationAction.DELETE, MutationAction.SWAP, MutationAction.MODIFY)
MULTIPLE = "multiple"
MIXED_KIND = "mixed"
OUTCOME_LABELS = tuple(a.value for a in ACTIONS) + (MULTIPLE,)
WEIGHTINGS = ("pooled", "kind")


@dataclass(frozen=True)
class MutationConfig:
    """Action probabilities and parameters of the mutation operator.

    ``modify_sigma`` is the standard deviation of the Gaussian parameter
    nudge. ``theta_range`` is the half-open interval new angles are drawn
    from. ``generator_weighting`` selects how new generators are drawn, see
    :func:`random_gate`.
    """

    p_insert: float = 0.5
    p_delete: float = 0.1
    p_swap: float = 0.1
    p_modify: float = 0.3
    p_repeat: float = 0.1
    modify_sigma: float = 0.1
    theta_range: tuple[float, float] = (0.0, TWO_PI)
    generator_weighting: str = "pooled"

    def __post_init__(self):
        check_probabilities(self.probabilities, "mutation probabilities", size=4)
        check_probability(self.p_repeat, "p_repeat", allow_one=False)
        sigma = check_finite(self.modify_sigma, "modify_sigma")
        if sigma <= 0:
            raise InvalidArgumentError(f"modify_sigma must be positive, got {sigma}")
        low, high = (check_finite(v, "theta_range") for v in self.theta_range)
        if not low < high:
            raise InvalidArgumentError(f"theta_range must be increasing, got {self.theta_range}")
        object.__setattr__(self, "theta_range", (low, high))
        if self.generator_weighting not in WEIGHTINGS:
            raise InvalidArgumentError(
                f"generator_weighting must be one of {WEIGHTINGS}, got {self.generator_weighting!r}")

    @property
    def probabilities(self) -> tuple[float, float, float, float]:
        return (self.p_insert, self.p_delete, self.p_swap, self.p_modify)

    @classmethod
    def from_probabilities(cls, probs, **kwargs) -> "MutationConfig":
        probs = tuple(probs)
        if len(probs) != 4:
            raise InvalidArgumentError(f"need 4 action probabilities, got {len(probs)}")
        return cls(*probs, **kwargs)

    @property
    def expected_actions(self) -> float:
        return 1.0 / (1.0 - self.p_repeat)

    def to_dict(self) -> dict:
        data = asdict(self)
        data["theta_range"] = list(self.theta_range)
        return data


@dataclass(frozen=True)
class ActionRecord:
    action: MutationAction
    position: int
    gate_kind: str

    def to_dict(self) -> dict:
        return {"action": self.action.value, "position": self.position, "gate_kind": self.gate_kind}


@dataclass(frozen=True)
class MutationOutcome:
    actions: tuple[ActionRecord, ...]

    def __post_init__(self):
        if not self.actions:
            raise InvalidArgumentError("a mutation outcome holds at least one action")

    @property
    def label(self) -> str:
        return self.actions[0].action.value if len(self.actions) == 1 else MULTIPLE

    @property
    def gate_kind(self) -> str:
        """Kind of the gate touched; ``"mixed"`` if a multi-action mutation touched several kinds."""
        kinds = {a.gate_kind for a in self.actions}
        return kinds.pop() if len(kinds) == 1 else MIXED_KIND


@lru_cache(maxsize=64)
def _generators_by_kind(n: int) -> tuple[tuple, ...]:
    groups: dict[str, list] = {}
    for generator in generator_set(n):
        groups.setdefault(generator.kind, []).append(generator)
    return tuple(tuple(g) for g in groups.values())


def random_gate(n: int, rng: np.random.Generator, theta_range=(0.0, TWO_PI),
                weighting: str = "pooled") -> Gate:
    """Random generator and an angle drawn uniformly from ``theta_range``.

    ``"pooled"`` draws uniformly from all ``3n + 3n(n-1)/2`` generators;
    ``"kind"`` first draws one of the gate kinds (rx ... rzz) uniformly, then
    the qubits.
    """
    if weighting == "pooled":
        generators = generator_set(n)
    elif weighting == "kind":
        groups = _generators_by_kind(n)
        generators = groups[int(rng.integers(0, len(groups)))]
    else:
        raise InvalidArgumentError(f"unknown generator weighting {weighting!r}")
    generator = generators[int(rng.integers(0, len(generators)))]
    return Gate(generator, float(rng.uniform(theta_range[0], theta_range[1])))


def _draw_action(u: float, probabilities) -> MutationAction:
    edge = 0.0
    for action, p in zip(ACTIONS, probabilities):
        edge += p
        if u < edge:
            return action
    # the running sum may round to just below 1
    return next(a for a, p in zip(reversed(ACTIONS), reversed(probabilities)) if p > 0)


def mutate(circuit: Circuit, cfg: MutationConfig, rng) -> tuple[Circuit, MutationOutcome]:
    """Apply one or more random actions to ``circuit``.

    After each action another one follows with probability ``cfg.p_repeat``.
    Delete, swap and modify fall back to insert on an empty circuit.

    The generator is consumed in a fixed order per action: ``random()`` for
    the action, then ``integers`` for the position, then either
    ``integers`` + ``uniform`` for a new gate or ``normal`` for a nudge, and
    finally ``random()`` for the repeat coin.
    """
    n = circuit.num_qubits
    records = []
    while True:
        action = _draw_action(float(rng.random()), cfg.probabilities)
        if len(circuit) == 0:
            action = MutationAction.INSERT
        if action is MutationAction.INSERT:
            position = int(rng.integers(0, len(circuit) + 1))
            gate = random_gate(n, rng, cfg.theta_range, cfg.generator_weighting)
            circuit = circuit.insert(position, gate)
            kind = gate.kind
        else:
            position = int(rng.integers(0, len(circuit)))
            old = circuit[position]
            if action is MutationAction.DELETE:
                circuit = circuit.delete(position)
                kind = old.kind
            elif action is MutationAction.SWAP:
                gate = random_gate(n, rng, cfg.theta_range, cfg.generator_weighting)
                circuit = circuit.replace(position, gate)
                kind = gate.kind
            else:
                epsilon = float(rng.normal(0.0, cfg.modify_sigma))
                circuit = circuit.replace(position, old.with_theta(old.theta + epsilon))
                kind = old.kind
        records.append(ActionRecord(action, position, kind))
        if not rng.random() < cfg.p_repeat:
            break
    return circuit, MutationOutcome(tuple(records))


def action_count_pmf(k: int, p_repeat: float = 0.1) -> float:
    """Probability that a mutation performs exactly ``k`` actions."""
    if k < 1:
        return 0.0
    return (1.0 - p_repeat) * p_repeat ** (k - 1)

