import json
import math

import pytest

from qneat.cli import EXIT_CONFIG, EXIT_IO, EXIT_OK, EXIT_UNSUPPORTED_SIZE, format_config, main, parse_config
from qneat.exceptions import InvalidArgumentError
from qneat.hamiltonians import Hamiltonian, tfi
from qneat.runlog import RunLog

RUN_FILES = {"run.jsonl", "circuit.json", "histogram.csv", "curve.csv", "config.txt"}


def _files(path):
    return {p.name for p in path.iterdir()} if path.exists() else set()


def test_parse_run_defaults():
    cfg = parse_config(["run", "--hamiltonian", "tfi", "--qubits", "10", "--lambda", "4",
                        "--generations", "150", "--seed", "7"])
    assert cfg["command"] == "run" and cfg["hamiltonian"] == "tfi"
    assert (cfg["qubits"], cfg["lam"], cfg["generations"], cfg["seed"]) == (10, 4, 150, 7)
    assert cfg["mutation_probs"] == (0.5, 0.1, 0.1, 0.3)
    assert (cfg["p_repeat"], cfg["modify_sigma"], cfg["mode"]) == (0.1, 0.1, "exact")


def test_explicit_default_probabilities_change_nothing():
    base = parse_config(["run", "--seed", "1"])
    same = parse_config(["run", "--seed", "1", "--mutation-probs", "0.5,0.1,0.1,0.3"])
    assert base == same


def test_probabilities_must_sum_to_one(tmp_path, capsys):
    with pytest.raises(InvalidArgumentError):
        parse_config(["run", "--mutation-probs", "0.5,0.5,0.5,0.5"])
    out = tmp_path / "never"
    assert main(["run", "--mutation-probs", "0.5,0.5,0.5,0.5", "--out", str(out)]) == EXIT_CONFIG
    assert "error[config]" in capsys.readouterr().err
    assert not out.exists()


def test_unknown_flag_is_usage_error():
    with pytest.raises(SystemExit) as info:
        parse_config(["run", "--bogus", "1"])
    assert info.value.code == 2


def test_seed_is_drawn_and_recorded():
    cfg = parse_config(["spectrum"])
    assert isinstance(cfg["seed"], int)
    assert f"seed={cfg['seed']}" in format_config(cfg)


def test_sk_instance_seed_defaults_to_run_seed():
    assert parse_config(["spectrum", "--hamiltonian", "sk", "--seed", "5"])["sk_seed"] == 5
    assert parse_config(["spectrum", "--hamiltonian", "sk", "--seed", "5", "--sk-seed", "9"])["sk_seed"] == 9


def test_flags_override_config_file(tmp_path):
    path = tmp_path / "cfg.txt"
    path.write_text("# comment\nqubits = 3\nlambda=2\ngenerations=9\n", encoding="utf-8")
    cfg = parse_config(["run", "--config", str(path), "--generations", "4"])
    assert (cfg["qubits"], cfg["lam"], cfg["generations"]) == (3, 2, 4)
    path.write_text(json.dumps({"qubits": 5, "mode": "sampled"}), encoding="utf-8")
    cfg = parse_config(["run", "--config", str(path)])
    assert (cfg["qubits"], cfg["mode"]) == (5, "sampled")
    path.write_text("colour=red\n", encoding="utf-8")
    with pytest.raises(InvalidArgumentError):
        parse_config(["run", "--config", str(path)])
    path.write_text("mode=quantum\n", encoding="utf-8")
    assert main(["run", "--config", str(path)]) == EXIT_CONFIG


def test_threads_from_environment(monkeypatch):
    monkeypatch.setenv("QNEAT_THREADS", "3")
    assert parse_config(["run"])["threads"] == 3
    assert parse_config(["run", "--threads", "2"])["threads"] == 2
    monkeypatch.setenv("QNEAT_THREADS", "many")
    assert main(["spectrum", "--qubits", "2"]) == EXIT_CONFIG


def test_spectrum_prints_extremes(capsys, tmp_path):
    assert main(["spectrum", "--hamiltonian", "local-x", "--qubits", "10"]) == EXIT_OK
    out = capsys.readouterr().out
    assert "E_min=-10\n" in out and "E_max=10\n" in out
    assert main(["spectrum", "--hamiltonian", "tfi", "--qubits", "2", "--out", str(tmp_path)]) == EXIT_OK
    low = float(capsys.readouterr().out.split("E_min=")[1].split()[0])
    assert low == pytest.approx(-math.sqrt(5), abs=1e-10)
    saved = Hamiltonian.from_json((tmp_path / "hamiltonian.json").read_text(encoding="utf-8"))
    assert saved == tfi(2)


def test_unsupported_size_exit_code(tmp_path, capsys):
    assert main(["spectrum", "--hamiltonian", "tfi", "--qubits", "13"]) == EXIT_UNSUPPORTED_SIZE
    assert "unsupported-size" in capsys.readouterr().err
    assert main(["run", "--qubits", "30", "--out", str(tmp_path / "x")]) == EXIT_UNSUPPORTED_SIZE
    assert not (tmp_path / "x").exists()


def test_run_writes_declared_files_and_reproduces_from_echo(tmp_path, capsys):
    first, second = tmp_path / "a", tmp_path / "b"
    argv = ["run", "--hamiltonian", "tfi", "--qubits", "4", "--generations", "15", "--seed", "11"]
    assert main(argv + ["--out", str(first)]) == EXIT_OK
    assert _files(first) == RUN_FILES
    assert main(["run", "--config", str(first / "config.txt"), "--out", str(second)]) == EXIT_OK
    for name in RUN_FILES:
        assert (first / name).read_bytes() == (second / name).read_bytes(), name
    log = RunLog.read(first / "run.jsonl")
    assert len(log.records) == 15 and log.config["seed"] == 11


def test_gradient_reproduces_from_echo(tmp_path):
    first, second = tmp_path / "a", tmp_path / "b"
    argv = ["gradient", "--hamiltonian", "tfi", "--qubits", "3", "--layers", "1", "--steps", "5"]
    assert main(argv + ["--out", str(first)]) == EXIT_OK
    assert _files(first) == RUN_FILES - {"histogram.csv"}
    assert main(["gradient", "--config", str(first / "config.txt"), "--out", str(second)]) == EXIT_OK
    assert (first / "run.jsonl").read_bytes() == (second / "run.jsonl").read_bytes()


def test_stats_from_log(tmp_path):
    run_dir, stats_dir = tmp_path / "run", tmp_path / "stats"
    assert main(["run", "--qubits", "3", "--generations", "10", "--seed", "2", "--out", str(run_dir)]) == EXIT_OK
    assert main(["stats", "--log", str(run_dir / "run.jsonl"), "--out", str(stats_dir)]) == EXIT_OK
    assert _files(stats_dir) == {"histogram.csv", "curve.csv"}
    assert (stats_dir / "curve.csv").read_bytes() == (run_dir / "curve.csv").read_bytes()
    assert main(["stats", "--log", str(tmp_path / "missing.jsonl"), "--out", str(stats_dir)]) == EXIT_IO
    (tmp_path / "bad.jsonl").write_text("not json\n", encoding="utf-8")
    assert main(["stats", "--log", str(tmp_path / "bad.jsonl")]) == EXIT_CONFIG


def test_prop1_reports_fraction(capsys, tmp_path):
    assert main(["prop1", "--qubits", "4", "--samples", "1000", "--seed", "3", "--out", str(tmp_path)]) == EXIT_OK
    line = capsys.readouterr().out.strip()
    fraction = float(line.split()[0].split("=")[1])
    assert fraction >= 0.25 and line.endswith("OK")
    assert json.loads((tmp_path / "prop1.json").read_text(encoding="utf-8"))["useful_fraction"] == fraction


def test_sampled_noisy_run(tmp_path):
    out = tmp_path / "noisy"
    assert main(["run", "--hamiltonian", "tfi", "--qubits", "3", "--generations", "5", "--mode", "sampled",
                 "--shots", "256", "--noise", "0.01", "--seed", "4", "--out", str(out)]) == EXIT_OK
    log = RunLog.read(out / "run.jsonl")
    assert log.config["noise"] == 0.01 and log.config["shots"] == 256
