"""Run logs shared by the evolutionary search and the gradient baseline.

A log is stored as JSON lines: one ``"generation"`` object per line followed
by a single ``"summary"`` object. Every line carries ``"schema": 1``.

Generation line fields::

    generation             1-based generation (or gradient step) index
    parent_energy          parent energy before the generation
    best_offspring_energy  lowest offspring energy (null for gradient steps)
    accepted               whether the best offspring replaced the parent (null for gradient)
    energy                 parent energy after the generation
    label, gate_kind       outcome of the accepted offspring, else null
    actions                action list of the accepted offspring, else null
    offspring              [{"label", "gate_kind", "energy"}] per offspring (null for gradient)
    parent_gates           gate count of the parent after the generation
    calls                  cumulative circuit calls

Summary fields: ``algorithm``, ``config``, ``num_qubits``,
``initial_energy``, ``initial_calls``, ``final_energy``, ``total_calls``,
``generations``, ``final_circuit`` (list of gates), ``final_parameters``
(gradient runs only) and ``tallies`` (accepted ``label``/``gate_kind``
counts).
"""

from __future__ import annotations

import json
from collections import Counter
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

from .circuits import Circuit
from .exceptions import InvalidArgumentError

SCHEMA_VERSION = 1

_RECORD_FIELDS = ("generation", "parent_energy", "best_offspring_energy", "accepted", "energy",
                  "label", "gate_kind", "actions", "offspring", "parent_gates", "calls")


@dataclass
class GenerationRecord:
    generation: int
    parent_energy: float
    best_offspring_energy: float | None
    accepted: bool | None
    energy: float
    label: str | None = None
    gate_kind: str | None = None
    actions: list[dict] | None = None
    offspring: list[dict] | None = None
    parent_gates: int = 0
    calls: int = 0

    def to_dict(self) -> dict:
        data = {"schema": SCHEMA_VERSION, "type": "generation"}
        data.update((name, getattr(self, name)) for name in _RECORD_FIELDS)
        return data

    @classmethod
    def from_dict(cls, data: dict) -> "GenerationRecord":
        return cls(**{name: data.get(name) for name in _RECORD_FIELDS})


@dataclass
class RunLog:
    algorithm: str
    config: dict
    num_qubits: int
    initial_energy: float | None = None
    initial_calls: int = 0
    records: list[GenerationRecord] = field(default_factory=list)
    final_circuit: Circuit | None = None
    final_parameters: list[float] | None = None

    @property
    def final_energy(self) -> float | None:
        return self.records[-1].energy if self.records else self.initial_energy

    @property
    def total_calls(self) -> int:
        return self.records[-1].calls if self.records else self.initial_calls

    @property
    def parent_energies(self) -> list[float]:
        """Parent energy at the start of every generation plus the final one."""
        if not self.records:
            return [] if self.initial_energy is None else [self.initial_energy]
        return [r.parent_energy for r in self.records] + [self.records[-1].energy]

    @property
    def accepted_generations(self) -> int:
        return sum(1 for r in self.records if r.accepted)

    def tallies(self) -> Counter:
        """Accepted-improvement counts keyed by ``(label, gate_kind)``."""
        return Counter((r.label, r.gate_kind) for r in self.records if r.accepted)

    def summary(self) -> dict:
        return {
            "schema": SCHEMA_VERSION,
            "type": "summary",
            "algorithm": self.algorithm,
            "config": self.config,
            "num_qubits": self.num_qubits,
            "initial_energy": self.initial_energy,
            "initial_calls": self.initial_calls,
            "final_energy": self.final_energy,
            "total_calls": self.total_calls,
            "generations": len(self.records),
            "final_circuit": None if self.final_circuit is None else self.final_circuit.to_list(),
            "final_parameters": self.final_parameters,
            "tallies": [{"label": label, "gate_kind": kind, "count": count}
                        for (label, kind), count in sorted(self.tallies().items())],
        }

    def to_jsonl(self) -> str:
        lines = [json.dumps(r.to_dict()) for r in self.records]
        lines.append(json.dumps(self.summary()))
        return "\n".join(lines) + "\n"

    def write(self, path) -> Path:
        path = Path(path)
        path.write_text(self.to_jsonl(), encoding="utf-8")
        return path

    @classmethod
    def from_jsonl(cls, text: str) -> "RunLog":
        records = []
        summary: dict[str, Any] | None = None
        for lineno, line in enumerate(text.splitlines(), 1):
            if not line.strip():
                continue
            try:
                data = json.loads(line)
            except json.JSONDecodeError as exc:
                raise InvalidArgumentError(f"line {lineno}: not JSON ({exc})") from None
            if data.get("schema") != SCHEMA_VERSION:
                raise InvalidArgumentError(f"line {lineno}: unsupported schema {data.get('schema')!r}")
            if data.get("type") == "generation":
                records.append(GenerationRecord.from_dict(data))
            elif data.get("type") == "summary":
                summary = data
            else:
                raise InvalidArgumentError(f"line {lineno}: unknown record type {data.get('type')!r}")
        if summary is None:
            raise InvalidArgumentError("run log has no summary line")
        n = summary["num_qubits"]
        circuit = summary.get("final_circuit")
        return cls(
            algorithm=summary["algorithm"],
            config=summary.get("config") or {},
            num_qubits=n,
            initial_energy=summary.get("initial_energy"),
            initial_calls=summary.get("initial_calls") or 0,
            records=records,
            final_circuit=None if circuit is None else Circuit.from_list(n, circuit),
            final_parameters=summary.get("final_parameters"),
        )

    @classmethod
    def read(cls, path) -> "RunLog":
        return cls.from_jsonl(Path(path).read_text(encoding="utf-8"))
