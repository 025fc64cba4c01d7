import json

import pytest

from qneat.circuits import Axis
from qneat.evolution import EvolutionConfig, run_evolution
from qneat.exceptions import InvalidArgumentError
from qneat.gradient import GradientConfig, gradient_descent_run
from qneat.hamiltonians import tfi
from qneat.runlog import SCHEMA_VERSION, RunLog
from qneat.simulator import EnergyEvaluator, init_product_state


@pytest.fixture(scope="module")
def evaluator():
    return EnergyEvaluator(tfi(3), init_product_state(3, Axis.X, 1))


def test_evolution_log_round_trip(evaluator, tmp_path):
    log = run_evolution(EvolutionConfig(3, max_generations=12, seed=8), evaluator)
    path = log.write(tmp_path / "run.jsonl")
    lines = path.read_text(encoding="utf-8").splitlines()
    assert len(lines) == 13
    assert all(json.loads(line)["schema"] == SCHEMA_VERSION for line in lines)
    assert json.loads(lines[-1])["type"] == "summary"
    again = RunLog.read(path)
    assert again.records == log.records
    assert again.final_circuit == log.final_circuit
    assert again.tallies() == log.tallies()
    assert again.to_jsonl() == log.to_jsonl()


def test_gradient_log_round_trip(evaluator):
    log = gradient_descent_run(GradientConfig(3, num_layers=1, steps=3, seed=1), evaluator)
    again = RunLog.from_jsonl(log.to_jsonl())
    assert again.final_parameters == log.final_parameters
    assert again.records[0].best_offspring_energy is None
    assert again.algorithm == "gradient"


def test_parent_energies_of_empty_log():
    assert RunLog("qneat", {}, 2).parent_energies == []
    assert RunLog("qneat", {}, 2, initial_energy=0.5).parent_energies == [0.5]


@pytest.mark.parametrize("text", [
    "",
    "{oops\n",
    json.dumps({"schema": 2, "type": "summary"}) + "\n",
    json.dumps({"schema": 1, "type": "mystery"}) + "\n",
])
def test_malformed_logs_are_rejected(text):
    with pytest.raises(InvalidArgumentError):
        RunLog.from_jsonl(text)
