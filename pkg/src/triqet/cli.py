"""Command-line entry point: build encoders, train/evaluate models, export artifacts.

Every command is driven by a JSON config file plus a few overriding flags,
and is deterministic given (config, seed): reruns produce byte-identical
artifacts. Exit codes: 0 success, 1 usage/config error, 2 data error,
3 numeric failure.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
from dataclasses import dataclass
from pathlib import Path
from typing import Optional

import numpy as np

from . import baselines, classifier, encoder
from .datasets import Dataset, DatasetSpec, load_dataset
from .errors import CircuitError, ConfigError, DataError
from .qsim import Circuit, dump_circuit, load_circuit, run_batch

ENCODER_KINDS = ("greedy", "amplitude", "angle")
MAX_QUBITS = 12  # simulator is exact and dense; beyond this is out of scope


@dataclass
class RunConfig:
    dataset: DatasetSpec
    greedy: encoder.GreedyConfig
    train: classifier.TrainConfig
    encoder_kind: str = "greedy"
    circuit_path: Optional[str] = None
    n_layers: int = 1
    seed: int = 0
    out: str = "runs/out"

    @property
    def n_qubits(self) -> int:
        n_features = self.dataset.resolution**2
        if self.encoder_kind == "angle":
            return n_features
        return encoder.default_n_qubits(n_features)


def _take(doc: dict, allowed: set[str], where: str) -> dict:
    unknown = set(doc) - allowed
    if unknown:
        raise ConfigError(f"unknown {where} config keys: {sorted(unknown)}")
    return doc


def parse_config(doc: dict, seed_override=None, out_override=None) -> RunConfig:
    _take(doc, {"dataset", "encoder", "train", "n_layers", "seed", "out"}, "top-level")
    seed = int(doc.get("seed", 0)) if seed_override is None else int(seed_override)

    ds = dict(doc.get("dataset") or {})
    _take(ds, {"name", "source", "resolution", "class_a", "class_b", "train_cap", "pixel_scale"}, "dataset")
    for key in ("name", "source", "resolution"):
        if key not in ds:
            raise ConfigError(f"dataset config needs '{key}'")
    try:
        spec = DatasetSpec(
            name=str(ds["name"]),
            source=str(ds["source"]),
            resolution=int(ds["resolution"]),
            class_a=int(ds.get("class_a", 0)),
            class_b=int(ds.get("class_b", 1)),
            train_cap=None if ds.get("train_cap") is None else int(ds["train_cap"]),
            pixel_scale=float(ds.get("pixel_scale", 1.0)),
        )
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc

    enc = dict(doc.get("encoder") or {})
    _take(
        enc,
        {
            "kind",
            "circuit",
            "n_qubits",
            "w0",
            "w_damping",
            "margin",
            "loss_kind",
            "max_gates",
            "feature_order",
            "tie_break",
        },
        "encoder",
    )
    kind = str(enc.get("kind", "greedy"))
    if kind not in ENCODER_KINDS:
        raise ConfigError(f"encoder kind must be one of {ENCODER_KINDS}, got {kind!r}")
    greedy = encoder.GreedyConfig(
        n_qubits=None if enc.get("n_qubits") is None else int(enc["n_qubits"]),
        w0=float(enc.get("w0", 1.0)),
        w_damping=float(enc.get("w_damping", 0.01)),
        margin=float(enc.get("margin", 0.0)),
        loss_kind=str(enc.get("loss_kind", "linear")),
        max_gates=None if enc.get("max_gates") is None else int(enc["max_gates"]),
        feature_order=None
        if enc.get("feature_order") is None
        else [int(i) for i in enc["feature_order"]],
        tie_break=str(enc.get("tie_break", "first")),
        seed=seed,
    )

    tr = dict(doc.get("train") or {})
    _take(tr, {"learning_rate", "batch_size", "epochs", "repetitions"}, "train")
    try:
        train_config = classifier.TrainConfig(
            learning_rate=float(tr.get("learning_rate", 0.01)),
            batch_size=int(tr.get("batch_size", 32)),
            epochs=int(tr.get("epochs", 30)),
            seed=seed,
            repetitions=int(tr.get("repetitions", 5)),
        )
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc

    config = RunConfig(
        dataset=spec,
        greedy=greedy,
        train=train_config,
        encoder_kind=kind,
        circuit_path=enc.get("circuit"),
        n_layers=int(doc.get("n_layers", 1)),
        seed=seed,
        out=str(doc.get("out", "runs/out")) if out_override is None else str(out_override),
    )
    n_features = spec.resolution**2
    if kind in ("greedy", "amplitude"):
        expected = encoder.default_n_qubits(n_features)
        if greedy.n_qubits is not None and greedy.n_qubits != expected:
            raise ConfigError(
                f"encoder.n_qubits {greedy.n_qubits} is inconsistent with "
                f"resolution {spec.resolution} (needs ceil(log2 {n_features}) = {expected})"
            )
    if config.n_qubits > MAX_QUBITS:
        raise ConfigError(
            f"{config.n_qubits} qubits exceeds the {MAX_QUBITS}-qubit simulator limit "
            f"(encoder kind {kind!r} at resolution {spec.resolution})"
        )
    if config.n_layers < 1:
        raise ConfigError("n_layers must be at least 1")
    return config


def load_config(path, seed_override=None, out_override=None) -> RunConfig:
    try:
        with open(path) as handle:
            doc = json.load(handle)
    except FileNotFoundError:
        raise ConfigError(f"config file not found: {path}") from None
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: invalid JSON ({exc})") from exc
    return parse_config(doc, seed_override, out_override)


def _write_json(path, doc) -> None:
    with open(path, "w") as handle:
        json.dump(doc, handle, indent=2, sort_keys=True)
        handle.write("\n")


def _fmt(value) -> str:
    if value is None:
        return ""
    return repr(float(value))


def _resolve_embedding(config: RunConfig, train_set: Dataset, out_dir: Path):
    """The greedy circuit (loaded or built inline); None for amplitude/angle."""
    if config.encoder_kind != "greedy":
        return None, None
    if config.circuit_path and Path(config.circuit_path).exists():
        circuit = load_circuit(config.circuit_path)
        if circuit.n_qubits != config.n_qubits:
            raise ConfigError(
                f"{config.circuit_path} has {circuit.n_qubits} qubits but the "
                f"config implies {config.n_qubits}"
            )
        return circuit, None
    triplets = encoder.mine_triplets(train_set)
    result = encoder.greedy_build(triplets, config.greedy)
    dump_circuit(result.circuit, out_dir / "circuit.json")
    return result.circuit, result


def _encode(config: RunConfig, circuit: Optional[Circuit], dataset: Dataset) -> np.ndarray:
    if config.encoder_kind == "greedy":
        return run_batch(circuit, dataset.features)
    if config.encoder_kind == "amplitude":
        return baselines.amplitude_encode_batch(dataset.features, config.n_qubits)
    return run_batch(baselines.angle_encode_circuit(dataset.n_features), dataset.features)


def _write_loss_trace(path, result: encoder.GreedyResult) -> None:
    with open(path, "w", newline="") as handle:
        writer = csv.writer(handle)
        writer.writerow(["step", "chosen_gate", "loss", "w"])
        for step_index, step in enumerate(result.steps):
            label = " + ".join(g.label() for g in step.gates_added)
            writer.writerow([step_index, label, _fmt(step.loss), _fmt(step.w)])


def _write_history(path, history) -> None:
    with open(path, "w", newline="") as handle:
        writer = csv.writer(handle)
        writer.writerow(["epoch", "train_loss", "train_acc", "val_acc"])
        for stats in history:
            writer.writerow(
                [stats.epoch, _fmt(stats.train_loss), _fmt(stats.train_acc), _fmt(stats.val_acc)]
            )


def cmd_build_encoder(args) -> None:
    config = load_config(args.config, args.seed, args.out)
    if config.encoder_kind != "greedy":
        raise ConfigError("build-encoder only applies to the greedy encoder")
    out_dir = Path(config.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    train_set, _, test_set = load_dataset(config.dataset, seed=config.seed)
    triplets = encoder.mine_triplets(train_set)
    result = encoder.greedy_build(triplets, config.greedy)
    dump_circuit(result.circuit, out_dir / "circuit.json")
    _write_loss_trace(out_dir / "loss_trace.csv", result)
    with open(out_dir / "separability.csv", "w", newline="") as handle:
        writer = csv.writer(handle)
        writer.writerow(["split", "intra_mean", "inter_mean"])
        for split_name, split in (("train", train_set), ("test", test_set)):
            report = encoder.separability_report(result.circuit, split, seed=config.seed)
            writer.writerow([split_name, _fmt(report.intra_mean), _fmt(report.inter_mean)])
    counts = encoder.count_gates(result.circuit)
    reference = baselines.mottonen_reference_counts(result.circuit.n_qubits)
    _write_json(
        out_dir / "gate_counts.json",
        {
            "circuit": counts.as_dict(),
            "mottonen_reference": {"cnot": reference.cnot, "rotations": reference.rotations},
        },
    )
    print(f"encoder: {len(result.circuit)} gates on {result.circuit.n_qubits} qubits")
    print(
        f"merged counts: {counts.rotations} rotations, {counts.cnot} cnot, "
        f"{counts.cz} cz, depth {counts.depth}"
    )
    print(
        f"mottonen baseline at {result.circuit.n_qubits} qubits: "
        f"{reference.rotations} rotations, {reference.cnot} cnot"
    )


def _train_repetitions(config: RunConfig, out_dir: Path, kind: str, circuit):
    train_set, val_set, test_set = load_dataset(config.dataset, seed=config.seed)
    sub = RunConfig(**{**config.__dict__, "encoder_kind": kind})
    train_states = _encode(sub, circuit, train_set)
    val_states = _encode(sub, circuit, val_set) if len(val_set) else None
    test_states = _encode(sub, circuit, test_set)
    runs = []
    for repetition in range(config.train.repetitions):
        run_seed = config.train.seed + repetition
        train_config = classifier.TrainConfig(
            learning_rate=config.train.learning_rate,
            batch_size=config.train.batch_size,
            epochs=config.train.epochs,
            seed=run_seed,
            repetitions=config.train.repetitions,
        )
        model, history = classifier.train_on_states(
            train_states,
            train_set.labels,
            val_states,
            val_set.labels if val_states is not None else None,
            train_config,
            config.n_layers,
            sub.n_qubits,
        )
        metrics = classifier.evaluate_states(test_states, test_set.labels, model)
        run_dir = out_dir / f"run{repetition}"
        run_dir.mkdir(parents=True, exist_ok=True)
        classifier.save_checkpoint(run_dir / "checkpoint.json", model, run_seed)
        _write_history(run_dir / "history.csv", history)
        _write_json(run_dir / "metrics.json", metrics.as_dict())
        runs.append({"seed": run_seed, "metrics": metrics.as_dict()})
    mean_accuracy = float(np.mean([r["metrics"]["accuracy"] for r in runs]))
    return {"encoder": kind, "runs": runs, "mean_accuracy": mean_accuracy}


def cmd_train(args) -> None:
    config = load_config(args.config, args.seed, args.out)
    out_dir = Path(config.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    train_set, _, _ = load_dataset(config.dataset, seed=config.seed)
    circuit, _ = _resolve_embedding(config, train_set, out_dir)
    summary = _train_repetitions(config, out_dir, config.encoder_kind, circuit)
    _write_json(out_dir / "summary.json", summary)
    print(
        f"{config.encoder_kind} encoder, {config.n_layers} layer(s): "
        f"mean test accuracy {summary['mean_accuracy']:.4f} "
        f"over {config.train.repetitions} run(s)"
    )


def cmd_evaluate(args) -> None:
    config = load_config(args.config, args.seed, args.out)
    model, _ = classifier.load_checkpoint(args.checkpoint)
    if model.n_qubits != config.n_qubits:
        raise ConfigError(
            f"checkpoint has {model.n_qubits} qubits but the config implies {config.n_qubits}"
        )
    splits = dict(zip(("train", "val", "test"), load_dataset(config.dataset, seed=config.seed)))
    part = splits[args.split]
    if args.limit is not None:
        part = part.head(args.limit)
    if len(part) == 0:
        raise DataError(f"{args.split} split is empty")
    circuit = None
    if config.encoder_kind == "greedy":
        if not config.circuit_path:
            raise ConfigError("evaluate needs encoder.circuit in the config for greedy encoders")
        circuit = load_circuit(config.circuit_path)
    states = _encode(config, circuit, part)
    metrics = classifier.evaluate_states(states, part.labels, model)
    doc = metrics.as_dict()
    print(json.dumps(doc, indent=2, sort_keys=True))
    if args.out:
        out_dir = Path(config.out)
        out_dir.mkdir(parents=True, exist_ok=True)
        _write_json(out_dir / "metrics.json", doc)


def cmd_export_distances(args) -> None:
    config = load_config(args.config, args.seed, args.out)
    out_dir = Path(config.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    splits = dict(zip(("train", "val", "test"), load_dataset(config.dataset, seed=config.seed)))
    part = splits[args.split]
    if args.limit is not None:
        part = part.head(args.limit)
    circuit = None
    if config.encoder_kind == "greedy":
        if not config.circuit_path:
            raise ConfigError("export-distances needs encoder.circuit for greedy encoders")
        circuit = load_circuit(config.circuit_path)
    states = _encode(config, circuit, part)
    gram = states @ states.conj().T
    distances = np.sqrt(np.clip(1.0 - np.abs(gram) ** 2, 0.0, None))
    np.fill_diagonal(distances, 0.0)
    with open(out_dir / "distances.csv", "w", newline="") as handle:
        writer = csv.writer(handle)
        writer.writerow(["label"] + [f"d{i}" for i in range(len(part))])
        for label, row in zip(part.labels, distances):
            writer.writerow([int(label)] + [_fmt(v) for v in row])
    with open(out_dir / "states.csv", "w", newline="") as handle:
        writer = csv.writer(handle)
        dim = states.shape[1]
        header = ["label"]
        for i in range(dim):
            header += [f"re{i}", f"im{i}"]
        writer.writerow(header)
        for label, row in zip(part.labels, states):
            cells = [int(label)]
            for amplitude in row:
                cells += [_fmt(amplitude.real), _fmt(amplitude.imag)]
            writer.writerow(cells)
    print(f"wrote {len(part)}x{len(part)} distance matrix and state dump to {out_dir}")


def cmd_compare(args) -> None:
    config = load_config(args.config, args.seed, args.out)
    out_dir = Path(config.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    train_set, _, _ = load_dataset(config.dataset, seed=config.seed)
    circuit, _ = _resolve_embedding(
        RunConfig(**{**config.__dict__, "encoder_kind": "greedy"}), train_set, out_dir
    )
    comparison = {}
    for kind in ("greedy", "amplitude"):
        summary = _train_repetitions(config, out_dir / kind, kind, circuit if kind == "greedy" else None)
        comparison[kind] = summary
        print(f"{kind:>10}: mean test accuracy {summary['mean_accuracy']:.4f}")
    _write_json(out_dir / "comparison.json", comparison)
    gap = comparison["greedy"]["mean_accuracy"] - comparison["amplitude"]["mean_accuracy"]
    print(f"greedy - amplitude accuracy gap: {gap:+.4f}")


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise ConfigError(message)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="triqet", description=__doc__)
    sub = parser.add_subparsers(dest="command")

    def common(p):
        p.add_argument("--config", required=True, help="JSON run config")
        p.add_argument("--seed", type=int, default=None, help="override the run seed")
        p.add_argument("--out", default=None, help="override the output directory")

    p = sub.add_parser("build-encoder", help="run the greedy search and store the circuit")
    common(p)
    p.set_defaults(func=cmd_build_encoder)

    p = sub.add_parser("train", help="train the classifier over seeded repetitions")
    common(p)
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("evaluate", help="metrics of a checkpoint on a dataset split")
    p.add_argument("checkpoint", help="checkpoint JSON written by train")
    common(p)
    p.add_argument("--split", choices=("train", "val", "test"), default="test")
    p.add_argument("--limit", type=int, default=None, help="use only the first N samples")
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser("export-distances", help="pairwise trace-distance matrix + state dump")
    common(p)
    p.add_argument("--split", choices=("train", "val", "test"), default="test")
    p.add_argument("--limit", type=int, default=None, help="use only the first N samples")
    p.set_defaults(func=cmd_export_distances)

    p = sub.add_parser("compare", help="train greedy and amplitude encoders side by side")
    common(p)
    p.set_defaults(func=cmd_compare)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if getattr(args, "func", None) is None:
            parser.print_help()
            return 1
        args.func(args)
        return 0
    except (ConfigError, CircuitError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 1
    except (DataError, FileNotFoundError) as exc:
        print(f"data error: {exc}", file=sys.stderr)
        return 2
    except (FloatingPointError, np.linalg.LinAlgError) as exc:
        print(f"numeric failure: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
