"""Command line interface: ``qneat {run,gradient,spectrum,stats,prop1}``."""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .analysis import (calls_vs_energy, success_histogram, useful_gate_fraction, write_curve_csv,
                       write_histogram_csv)
from .circuits import Axis
from .evolution import EvolutionConfig, run_evolution
from .exceptions import InvalidArgumentError, QNEATError, UnsupportedSizeError
from .gradient import GradientConfig, gradient_descent_run
from .hamiltonians import HAMILTONIAN_NAMES, Hamiltonian, build_hamiltonian, exact_extremes, neutral_initial_axis
from .mutation import WEIGHTINGS, MutationConfig
from .runlog import RunLog
from .simulator import DEFAULT_SHOTS, MODES, EnergyEvaluator, init_product_state

log = logging.getLogger("qneat")

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_CONFIG = 2
EXIT_IO = 3
EXIT_UNSUPPORTED_SIZE = 4

# keys never echoed into config.txt: they do not influence results
_NOT_ECHOED = {"command", "config", "out", "threads", "verbose"}

DEFAULTS = {
    "common": {"out": ".", "seed": None, "threads": None, "verbose": False},
    "hamiltonian": {"hamiltonian": "local-x", "qubits": 10, "coupling": 1.0, "field": 1.0,
                    "sk_seed": None, "hamiltonian_file": None},
    "run": {"lam": 4, "generations": 150, "stagnation_tau": None, "max_calls": None,
            "target_energy": None, "mode": "exact", "shots": DEFAULT_SHOTS, "noise": 0.0,
            "init_axis": None, "mutation_probs": (0.5, 0.1, 0.1, 0.3), "p_repeat": 0.1,
            "modify_sigma": 0.1, "generator_weighting": "pooled"},
    "gradient": {"layers": 7, "lr": 0.1, "steps": 100, "max_calls": None, "target_energy": None,
                 "mode": "exact", "shots": DEFAULT_SHOTS, "noise": 0.0, "init_axis": None},
    "spectrum": {},
    "stats": {"log": None},
    "prop1": {"hamiltonian": "local-z", "qubits": 4, "samples": 1000, "tol": 1e-9},
}
_SECTIONS = {
    "run": ("common", "hamiltonian", "run"),
    "gradient": ("common", "hamiltonian", "gradient"),
    "spectrum": ("common", "hamiltonian", "spectrum"),
    "stats": ("common", "stats"),
    "prop1": ("common", "hamiltonian", "prop1"),
}


def _float_list(text):
    if isinstance(text, (list, tuple)):
        return tuple(float(v) for v in text)
    try:
        return tuple(float(v) for v in str(text).split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from None


def _optional(kind):
    def convert(text):
        if text is None or str(text).strip().lower() in ("", "none", "null"):
            return None
        return kind(text)
    convert.__name__ = kind.__name__
    return convert


def _axis(text):
    try:
        return Axis.parse(text).value
    except InvalidArgumentError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _flag(text):
    if isinstance(text, bool):
        return text
    value = str(text).strip().lower()
    if value in ("1", "true", "yes", "on"):
        return True
    if value in ("0", "false", "no", "off"):
        return False
    raise argparse.ArgumentTypeError(f"expected a boolean, got {text!r}")


def _add_common(p):
    p.add_argument("--config", help="key=value or JSON file; flags override its values")
    p.add_argument("--out", help="output directory (default: current directory)")
    p.add_argument("--seed", type=_optional(int), help="random seed (default: drawn and recorded)")
    p.add_argument("--threads", type=_optional(int), help="worker threads (env QNEAT_THREADS)")
    p.add_argument("-v", "--verbose", action="store_const", const=True)


def _add_hamiltonian(p):
    p.add_argument("--hamiltonian", choices=HAMILTONIAN_NAMES)
    p.add_argument("--hamiltonian-file", dest="hamiltonian_file", help="Hamiltonian JSON document")
    p.add_argument("--qubits", type=int)
    p.add_argument("--coupling", type=float, help="TFI coupling J")
    p.add_argument("--field", type=float, help="TFI transverse field h")
    p.add_argument("--sk-seed", dest="sk_seed", type=_optional(int),
                   help="seed of a fixed SK instance (default: the run seed)")


def _add_evaluation(p):
    p.add_argument("--mode", choices=MODES)
    p.add_argument("--shots", type=int)
    p.add_argument("--noise", type=float, help="per-gate Pauli error probability (sampled mode)")
    p.add_argument("--init-axis", dest="init_axis", type=_optional(_axis),
                   help="product-state axis of the initial state (default: neutral axis)")
    p.add_argument("--max-calls", dest="max_calls", type=_optional(int))
    p.add_argument("--target-energy", dest="target_energy", type=_optional(float))


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="qneat", description=__doc__)
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    kw = {"argument_default": argparse.SUPPRESS}

    p = sub.add_parser("run", help="evolve a circuit architecture", **kw)
    _add_common(p)
    _add_hamiltonian(p)
    _add_evaluation(p)
    p.add_argument("--lambda", dest="lam", type=int, help="offspring per generation")
    p.add_argument("--generations", type=int)
    p.add_argument("--stagnation-tau", dest="stagnation_tau", type=_optional(int))
    p.add_argument("--mutation-probs", dest="mutation_probs", type=_float_list,
                   help="insert,delete,swap,modify probabilities")
    p.add_argument("--p-repeat", dest="p_repeat", type=float)
    p.add_argument("--modify-sigma", dest="modify_sigma", type=float)
    p.add_argument("--generator-weighting", dest="generator_weighting", choices=WEIGHTINGS)

    p = sub.add_parser("gradient", help="parameter-shift gradient descent baseline", **kw)
    _add_common(p)
    _add_hamiltonian(p)
    _add_evaluation(p)
    p.add_argument("--layers", type=int)
    p.add_argument("--lr", type=float, help="learning rate")
    p.add_argument("--steps", type=int)

    p = sub.add_parser("spectrum", help="exact extreme eigenvalues of a Hamiltonian", **kw)
    _add_common(p)
    _add_hamiltonian(p)

    p = sub.add_parser("stats", help="histogram.csv and curve.csv from a run log", **kw)
    _add_common(p)
    p.add_argument("--log", help="JSON-lines run log")

    p = sub.add_parser("prop1", help="fraction of useful random generators", **kw)
    _add_common(p)
    _add_hamiltonian(p)
    p.add_argument("--samples", type=int)
    p.add_argument("--tol", type=float)
    return parser


def _converters(parser: argparse.ArgumentParser, command: str) -> dict:
    subparsers = next(a for a in parser._actions if isinstance(a, argparse._SubParsersAction))
    sub = subparsers.choices[command]
    table = {}
    for action in sub._actions:
        if action.dest in ("help", "config"):
            continue
        if isinstance(action, argparse._StoreConstAction):
            table[action.dest] = _flag
        elif action.choices is not None:
            choices = action.choices

            def convert(text, choices=choices, dest=action.dest):
                if text not in choices:
                    raise argparse.ArgumentTypeError(f"{dest} must be one of {list(choices)}, got {text!r}")
                return text
            table[action.dest] = convert
        else:
            table[action.dest] = action.type or str
    return table


def read_config_file(path) -> dict:
    """Read a flat ``key=value`` file (``#`` comments) or a JSON object."""
    text = Path(path).read_text(encoding="utf-8")
    if text.lstrip().startswith("{"):
        data = json.loads(text)
        if not isinstance(data, dict):
            raise InvalidArgumentError("JSON config must be an object")
        return data
    values = {}
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise InvalidArgumentError(f"{path}:{lineno}: expected key=value")
        key, value = line.split("=", 1)
        values[key.strip()] = value.strip()
    return values


def parse_config(argv=None, parser=None) -> dict:
    """Resolve defaults, then config-file values, then explicit flags."""
    parser = parser or build_parser()
    args = vars(parser.parse_args(argv))
    command = args.pop("command")
    config = {"command": command}
    for section in _SECTIONS[command]:
        config.update(DEFAULTS[section])
    if "threads" not in args and os.environ.get("QNEAT_THREADS"):
        args["threads"] = os.environ["QNEAT_THREADS"]

    converters = _converters(parser, command)
    if "config" in args:
        file_values = read_config_file(args.pop("config"))
        file_values.pop("command", None)
        for key, value in file_values.items():
            dest = key.replace("-", "_")
            dest = "lam" if dest == "lambda" else dest
            if dest not in converters:
                raise InvalidArgumentError(f"unknown config key {key!r} for '{command}'")
            try:
                config[dest] = value if value is None else converters[dest](value)
            except (argparse.ArgumentTypeError, ValueError) as exc:
                raise InvalidArgumentError(f"invalid value for {key!r}: {exc}") from None
    for key, value in args.items():
        if key == "threads":
            try:
                value = _optional(int)(value)
            except ValueError:
                raise InvalidArgumentError(f"threads must be an integer, got {value!r}") from None
            if value is not None and value < 1:
                raise InvalidArgumentError(f"threads must be >= 1, got {value}")
        config[key] = value
    if command == "run":
        MutationConfig.from_probabilities(config["mutation_probs"], p_repeat=config["p_repeat"],
                                          modify_sigma=config["modify_sigma"],
                                          generator_weighting=config["generator_weighting"])
    if config.get("seed") is None and command != "stats":
        config["seed"] = int(np.random.SeedSequence().entropy % 2**63)
    if command in ("run", "gradient", "spectrum", "prop1") and config.get("hamiltonian") == "sk" \
            and config.get("sk_seed") is None and config.get("hamiltonian_file") is None:
        config["sk_seed"] = config["seed"]
    return config


def format_config(config: dict) -> str:
    lines = [f"command={config['command']}"]
    for key in sorted(config):
        value = config[key]
        if key in _NOT_ECHOED or value is None:
            continue
        if isinstance(value, (list, tuple)):
            value = ",".join(repr(float(v)) for v in value)
        elif isinstance(value, float):
            value = repr(value)
        lines.append(f"{'lambda' if key == 'lam' else key}={value}")
    return "\n".join(lines) + "\n"


def _hamiltonian(cfg) -> Hamiltonian:
    if cfg.get("hamiltonian_file"):
        try:
            text = Path(cfg["hamiltonian_file"]).read_text(encoding="utf-8")
        except OSError as exc:
            raise InvalidArgumentError(f"cannot read Hamiltonian file: {exc}") from None
        return Hamiltonian.from_json(text)
    return build_hamiltonian(cfg["hamiltonian"], cfg["qubits"], J=cfg["coupling"], h=cfg["field"],
                             sk_seed=cfg["sk_seed"])


def _evaluator(cfg, hamiltonian):
    axis = Axis.parse(cfg["init_axis"]) if cfg["init_axis"] else neutral_initial_axis(hamiltonian)
    init = init_product_state(hamiltonian.num_qubits, axis, 1)
    evaluator = EnergyEvaluator(hamiltonian, init, cfg["mode"], cfg["shots"], cfg["noise"])
    extra = {"mode": cfg["mode"], "shots": cfg["shots"] if cfg["mode"] == "sampled" else None,
             "noise": cfg["noise"], "init_axis": axis.value, "hamiltonian": hamiltonian.to_dict()}
    return evaluator, extra


def _prepare_out(cfg) -> Path:
    out = Path(cfg["out"])
    out.mkdir(parents=True, exist_ok=True)
    return out


def _write_config(out: Path, cfg) -> None:
    (out / "config.txt").write_text(format_config(cfg), encoding="utf-8")


def _write_run_outputs(out: Path, cfg, runlog: RunLog, histogram: bool) -> None:
    runlog.write(out / "run.jsonl")
    (out / "circuit.json").write_text(json.dumps(runlog.final_circuit.to_list(), indent=1) + "\n",
                                      encoding="utf-8")
    if histogram:
        write_histogram_csv(success_histogram(runlog), out / "histogram.csv")
    write_curve_csv(calls_vs_energy(runlog), out / "curve.csv")
    _write_config(out, cfg)


def cmd_run(cfg) -> int:
    hamiltonian = _hamiltonian(cfg)
    mutation = MutationConfig.from_probabilities(
        cfg["mutation_probs"], p_repeat=cfg["p_repeat"], modify_sigma=cfg["modify_sigma"],
        generator_weighting=cfg["generator_weighting"])
    evo = EvolutionConfig(
        num_qubits=hamiltonian.num_qubits, n_offspring=cfg["lam"], max_generations=cfg["generations"],
        stagnation_tau=cfg["stagnation_tau"], max_calls=cfg["max_calls"],
        target_energy=cfg["target_energy"], seed=cfg["seed"], mutation=mutation,
        n_jobs=cfg["threads"] or 1)
    evaluator, extra = _evaluator(cfg, hamiltonian)
    out = _prepare_out(cfg)
    runlog = run_evolution(evo, evaluator, extra)
    _write_run_outputs(out, cfg, runlog, histogram=True)
    print(f"final_energy={runlog.final_energy!r} generations={len(runlog.records)} "
          f"calls={runlog.total_calls} gates={len(runlog.final_circuit)}")
    return EXIT_OK


def cmd_gradient(cfg) -> int:
    hamiltonian = _hamiltonian(cfg)
    grad = GradientConfig(hamiltonian.num_qubits, cfg["layers"], cfg["lr"], cfg["steps"], cfg["seed"],
                          cfg["max_calls"], cfg["target_energy"])
    evaluator, extra = _evaluator(cfg, hamiltonian)
    out = _prepare_out(cfg)
    runlog = gradient_descent_run(grad, evaluator, extra)
    _write_run_outputs(out, cfg, runlog, histogram=False)
    print(f"final_energy={runlog.final_energy!r} steps={len(runlog.records)} calls={runlog.total_calls}")
    return EXIT_OK


def cmd_spectrum(cfg) -> int:
    hamiltonian = _hamiltonian(cfg)
    low, high = exact_extremes(hamiltonian)
    print(f"E_min={low:.12g}")
    print(f"E_max={high:.12g}")
    if cfg["out"] != ".":
        out = _prepare_out(cfg)
        (out / "hamiltonian.json").write_text(hamiltonian.to_json() + "\n", encoding="utf-8")
        _write_config(out, cfg)
    return EXIT_OK


def cmd_stats(cfg) -> int:
    if not cfg.get("log"):
        raise InvalidArgumentError("stats needs --log")
    try:
        runlog = RunLog.read(cfg["log"])
    except OSError as exc:
        raise OSError(f"cannot read run log: {exc}") from exc
    out = _prepare_out(cfg)
    write_histogram_csv(success_histogram(runlog), out / "histogram.csv")
    write_curve_csv(calls_vs_energy(runlog), out / "curve.csv")
    print(f"wrote {out / 'histogram.csv'} and {out / 'curve.csv'}")
    return EXIT_OK


def cmd_prop1(cfg) -> int:
    hamiltonian = _hamiltonian(cfg)
    fraction = float(useful_gate_fraction(hamiltonian, None, cfg["samples"], cfg["seed"], cfg["tol"]))
    print(f"useful_fraction={fraction!r} samples={cfg['samples']} bound=0.25 "
          f"{'OK' if fraction >= 0.25 else 'BELOW'}")
    if cfg["out"] != ".":
        out = _prepare_out(cfg)
        (out / "prop1.json").write_text(json.dumps({"useful_fraction": fraction,
                                                    "samples": cfg["samples"]}) + "\n", encoding="utf-8")
        _write_config(out, cfg)
    return EXIT_OK


COMMANDS = {"run": cmd_run, "gradient": cmd_gradient, "spectrum": cmd_spectrum, "stats": cmd_stats,
            "prop1": cmd_prop1}


def dispatch(cfg) -> int:
    """Execute a resolved configuration and map failures onto exit codes."""
    try:
        return COMMANDS[cfg["command"]](cfg)
    except UnsupportedSizeError as exc:
        print(f"error[unsupported-size]: {exc}", file=sys.stderr)
        return EXIT_UNSUPPORTED_SIZE
    except (InvalidArgumentError, QNEATError) as exc:
        print(f"error[config]: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except OSError as exc:
        print(f"error[io]: {exc}", file=sys.stderr)
        return EXIT_IO


def main(argv=None) -> int:
    parser = build_parser()
    try:
        cfg = parse_config(argv, parser)
    except (InvalidArgumentError, json.JSONDecodeError) as exc:
        print(f"error[config]: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except OSError as exc:
        print(f"error[io]: {exc}", file=sys.stderr)
        return EXIT_IO
    logging.basicConfig(level=logging.INFO if cfg.get("verbose") else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    return dispatch(cfg)


if __name__ == "__main__":
    sys.exit(main())
