"""Command-line entry point.

Exit codes: 0 success, 1 domain error, 2 usage error. With ``--json`` every
subcommand prints a single JSON document on stdout; diagnostics go to
stderr only.
"""

from __future__ import annotations

import argparse
import json
import logging
import shutil
import sys
import threading
from pathlib import Path

from . import __version__
from .emb1 import read_embedding
from .errors import KexopsError
from .metrics import Metric, SamplingPlan, compute_metric, subsampled_metric
from .ranking import rank_candidates
from .recommender import (
    fixture_source,
    recommend,
    registry_embedding_source,
    seed_fixture_registry,
)
from .registry import ENV_REGISTRY_ROOT, Registry
from .trainer import ExperimentConfig, run_experiment
from .types import Task


def _parse_metrics(spec: str) -> list[Metric]:
    try:
        return [Metric(name.strip()) for name in spec.split(",") if name.strip()]
    except ValueError as exc:
        raise KexopsError(f"unknown metric in {spec!r}: {exc}") from None


def _parse_weights(spec: str | None) -> dict[Metric, float] | None:
    if not spec:
        return None
    weights = {}
    for part in spec.split(","):
        if "=" not in part:
            raise KexopsError(f"weights must look like mmd=1,fbd=2; got {part!r}")
        name, value = part.split("=", 1)
        weights[Metric(name.strip())] = float(value)
    return weights


def _parse_address(spec: str) -> tuple[str, int]:
    host, _, port = spec.rpartition(":")
    if not host or not port.isdigit():
        raise KexopsError(f"expected host:port, got {spec!r}")
    return host, int(port)


def _emit(args, payload: dict, human: str | None = None) -> None:
    if args.json:
        print(json.dumps(payload, indent=2, sort_keys=True))
    else:
        print(human if human is not None else json.dumps(payload, indent=2, sort_keys=True))


def _table(rows: list[dict], columns: list[str]) -> str:
    if not rows:
        return "(empty)"

    def cell(row, col):
        value = row.get(col)
        return "" if value is None else str(value)

    widths = {c: max(len(c), *(len(cell(r, c)) for r in rows)) for c in columns}
    lines = ["  ".join(c.ljust(widths[c]) for c in columns)]
    lines.append("  ".join("-" * widths[c] for c in columns))
    for r in rows:
        lines.append("  ".join(cell(r, c).ljust(widths[c]) for c in columns))
    return "\n".join(lines)


# -- subcommand handlers ------------------------------------------------------------


def cmd_dataset_add(args) -> int:
    from .types import DatasetRecord

    registry = Registry(args.registry_root)
    record = DatasetRecord(
        id=args.id,
        name=args.name or args.id,
        task=Task(args.task),
        domain=args.domain,
        corpus_ref=args.corpus,
        embedding_ref=args.embedding,
        reader=args.reader,
    )
    registry.put_dataset(record)
    _emit(args, record.to_dict(), f"added dataset {record.id}")
    return 0


def cmd_dataset_list(args) -> int:
    registry = Registry(args.registry_root)
    records = [r.to_dict() for r in registry.list_datasets()]
    _emit(args, {"datasets": records}, _table(records, ["id", "name", "task", "domain", "reader"]))
    return 0


def cmd_model_add(args) -> int:
    from .types import ModelRecord

    registry = Registry(args.registry_root)
    record = ModelRecord(
        id=args.id,
        name=args.name or args.id,
        task=Task(args.task),
        version=args.version,
        feature_extractor=args.extractor,
        adapter=args.adapter,
    )
    registry.put_model(record)
    _emit(args, record.to_dict(), f"added model {record.id}")
    return 0


def cmd_model_list(args) -> int:
    registry = Registry(args.registry_root)
    records = [r.to_dict() for r in registry.list_models()]
    _emit(args, {"models": records}, _table(records, ["id", "name", "task", "version"]))
    return 0


def cmd_embed_import(args) -> int:
    registry = Registry(args.registry_root)
    record = registry.get_dataset(args.dataset)
    matrix = read_embedding(args.file)  # validates the file
    dest = registry.embeddings_dir() / f"{args.dataset}.emb1"
    shutil.copyfile(args.file, dest)
    record.embedding_ref = str(dest)
    registry.update_dataset(record)
    payload = {
        "dataset": args.dataset,
        "rows": matrix.n_rows,
        "dim": matrix.dim,
        "path": str(dest),
    }
    _emit(args, payload, f"imported {matrix.n_rows}x{matrix.dim} embedding for {args.dataset}")
    return 0


def cmd_similarity(args) -> int:
    metrics = _parse_metrics(args.metrics)
    x = read_embedding(args.a)
    y = read_embedding(args.b)
    plan = SamplingPlan(sample_size=args.sample_size, repeats=args.repeats, seed=args.seed)
    results = {}
    for metric in metrics:
        op = lambda a, b, m=metric: compute_metric(m, a, b, seed=args.seed)
        results[metric] = subsampled_metric(op, x, y, plan)
    payload = {
        "a": args.a,
        "b": args.b,
        "plan": {"sample_size": plan.sample_size, "repeats": plan.repeats, "seed": plan.seed},
        "metrics": [results[m].to_dict() for m in metrics],
    }
    if args.report_dir:
        from .report import render_similarity_report

        written = render_similarity_report(args.report_dir, results, x, y, seed=args.seed)
        payload["report_files"] = [str(p) for p in written]
    human = "\n".join(f"{m.value:6s} {results[m].value:.6f} ({results[m].direction.value})" for m in metrics)
    _emit(args, payload, human)
    return 0


def cmd_recommend(args) -> int:
    registry = Registry(args.registry_root)
    target = registry.get_dataset(args.target)
    candidates = [
        d.id
        for d in registry.list_datasets()
        if d.id != target.id and d.task is target.task and d.domain == target.domain
    ]
    if not candidates:
        raise KexopsError(f"no candidate datasets share task/domain with {target.id!r}")

    if args.fixture:
        table = json.loads(Path(args.fixture).read_text())
        source = fixture_source(args.fixture)
        metrics = _parse_metrics(args.metrics) if args.metrics else [Metric(k) for k in sorted(table)]
    else:
        plan = SamplingPlan(sample_size=args.sample_size, repeats=args.repeats, seed=args.seed)
        source = registry_embedding_source(registry, plan)
        metrics = _parse_metrics(args.metrics) if args.metrics else list(Metric)

    report = rank_candidates(target.id, candidates, metrics, source, _parse_weights(args.weights))
    recommendation = recommend(registry, args.desired_metric, report)
    payload = {"recommendation": recommendation.to_dict(), "report": report.to_dict()}
    if args.report_dir:
        from .report import render_ranking_report

        written = render_ranking_report(args.report_dir, report)
        payload["report_files"] = [str(p) for p in written]
    human = (
        f"target    {recommendation.target_dataset_id}\n"
        f"neighbor  {recommendation.neighbor_dataset_id}\n"
        f"model     {recommendation.model_id} "
        f"({recommendation.desired_metric}={recommendation.neighbor_metric_value})"
    )
    _emit(args, payload, human)
    return 0


def cmd_experiment_run(args) -> int:
    registry = Registry(args.registry_root)
    config = ExperimentConfig.from_file(args.config)
    result = run_experiment(config, registry)
    payload = {
        "experiment": result.record.to_dict(),
        "history": result.history,
        "hook_flags": result.hook_flags,
        "artifact": result.artifact_path,
        "error": result.error,
    }
    _emit(
        args,
        payload,
        f"experiment {result.record.id}: {result.record.status.value}"
        + (f" f1={result.record.metrics['f1']:.4f}" if result.record.metrics else ""),
    )
    return 0 if result.error is None else 1


def cmd_experiment_status(args) -> int:
    registry = Registry(args.registry_root)
    record = registry.get_experiment(args.experiment_id)
    _emit(args, record.to_dict(), f"{record.id}: {record.status.value}")
    return 0


def cmd_experiment_list(args) -> int:
    registry = Registry(args.registry_root)
    records = [r.to_dict() for r in registry.list_experiments()]
    _emit(
        args,
        {"experiments": records},
        _table(records, ["id", "dataset_id", "model_id", "status"]),
    )
    return 0


def cmd_serve_gateway(args) -> int:
    from .scheduler import Gateway

    gateway = Gateway.from_machines_file(args.machines, host=args.host, port=args.port)
    gateway.start()
    print(f"gateway listening on {gateway.address[0]}:{gateway.address[1]}", file=sys.stderr)
    try:
        threading.Event().wait()
    except KeyboardInterrupt:
        pass
    finally:
        gateway.stop()
    return 0


def cmd_serve_aiserver(args) -> int:
    from .scheduler import AIServer, experiment_runner

    runner = experiment_runner(args.registry_root or Path(".kexops"))
    server = AIServer(
        machine_id=args.machine_id,
        workers=args.workers,
        runner=runner,
        gateway_address=_parse_address(args.gateway) if args.gateway else None,
        host=args.host,
        port=args.port,
    )
    server.start()
    print(
        f"aiserver {args.machine_id} with {args.workers} workers on "
        f"{server.address[0]}:{server.address[1]}",
        file=sys.stderr,
    )
    try:
        threading.Event().wait()
    except KeyboardInterrupt:
        pass
    finally:
        server.stop()
    return 0


def cmd_submit(args) -> int:
    from .scheduler import submit as net_submit

    config = ExperimentConfig.from_file(args.config)
    task_id = net_submit(_parse_address(args.gateway), config.to_dict(), task_id=args.task_id)
    _emit(args, {"task_id": task_id}, task_id)
    return 0


def cmd_status(args) -> int:
    from .scheduler import status as net_status

    envelope = net_status(_parse_address(args.gateway), args.task_id)
    _emit(args, envelope.to_dict(), f"{envelope.task_id}: {envelope.state.value}")
    return 0


def cmd_result(args) -> int:
    from .scheduler import result as net_result

    record = net_result(_parse_address(args.gateway), args.task_id)
    _emit(args, {"experiment_record": record}, json.dumps(record, indent=2, sort_keys=True))
    return 0


def cmd_simulate(args) -> int:
    from .scheduler import SimMachine, SimTask, simulate

    cluster = json.loads(Path(args.cluster).read_text())
    trace = json.loads(Path(args.trace).read_text())
    machines = [
        SimMachine(
            m["machine_id"],
            int(m["weight"]),
            m.get("workers"),
            frozenset(m.get("crashed_workers", [])),
        )
        for m in cluster
    ]
    tasks = [
        SimTask(
            t["task_id"],
            float(t.get("arrival", 0.0)),
            float(t.get("duration", 1.0)),
            bool(t.get("fails", False)),
        )
        for t in trace
    ]
    result = simulate(machines, tasks, seed=args.seed)
    payload = {"events": result.events, "final_states": {
        tid: {"state": s, "machine": m, "worker": w}
        for tid, (s, m, w) in result.final_states().items()
    }}
    if args.out:
        Path(args.out).write_text(json.dumps(payload, indent=2, sort_keys=True))
    rows = [
        {"task": tid, "state": s, "machine": m, "worker": w}
        for tid, (s, m, w) in sorted(result.final_states().items())
    ]
    _emit(args, payload, _table(rows, ["task", "state", "machine", "worker"]))
    return 0


def cmd_demo_seed(args) -> int:
    registry = Registry(args.registry_root)
    seed_fixture_registry(registry)
    payload = {
        "datasets": len(registry.list_datasets()),
        "models": len(registry.list_models()),
        "experiments": len(registry.list_experiments()),
    }
    _emit(args, payload, f"seeded {payload['datasets']} datasets, "
                         f"{payload['models']} models, {payload['experiments']} experiments")
    return 0


# -- parser ---------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="kexops",
        description="ModelOps toolkit for knowledge-extraction workloads",
    )
    parser.add_argument("--version", action="version", version=f"kexops {__version__}")
    parser.add_argument(
        "--registry-root",
        default=None,
        help=f"registry directory (default: ${ENV_REGISTRY_ROOT} or .kexops)",
    )
    parser.add_argument("--json", action="store_true", help="machine-readable JSON on stdout")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("dataset", help="manage dataset records")
    dsub = p.add_subparsers(dest="action", required=True)
    d_add = dsub.add_parser("add")
    d_add.add_argument("--id", required=True)
    d_add.add_argument("--name")
    d_add.add_argument("--task", choices=[t.value for t in Task], default="NER")
    d_add.add_argument("--domain", default="general")
    d_add.add_argument("--corpus", help="path to the raw corpus file")
    d_add.add_argument("--embedding", help="path to an EMB1 embedding file")
    d_add.add_argument("--reader", help="registered retrieval callback name")
    d_add.set_defaults(func=cmd_dataset_add)
    dsub.add_parser("list").set_defaults(func=cmd_dataset_list)

    p = sub.add_parser("model", help="manage model records")
    msub = p.add_subparsers(dest="action", required=True)
    m_add = msub.add_parser("add")
    m_add.add_argument("--id", required=True)
    m_add.add_argument("--name")
    m_add.add_argument("--task", choices=[t.value for t in Task], default="NER")
    m_add.add_argument("--version", default="0")
    m_add.add_argument("--extractor", help="registered feature extractor name")
    m_add.add_argument("--adapter", help="adapter factory name (default toy)")
    m_add.set_defaults(func=cmd_model_add)
    msub.add_parser("list").set_defaults(func=cmd_model_list)

    p = sub.add_parser("embed", help="manage embedding files")
    esub = p.add_subparsers(dest="action", required=True)
    e_imp = esub.add_parser("import")
    e_imp.add_argument("--dataset", required=True)
    e_imp.add_argument("--file", required=True)
    e_imp.set_defaults(func=cmd_embed_import)

    p = sub.add_parser("similarity", help="compare two embedding files")
    p.add_argument("--a", required=True)
    p.add_argument("--b", required=True)
    p.add_argument("--metrics", default="mmd,fbd,pr,mauve")
    p.add_argument("--sample-size", type=int, default=1000)
    p.add_argument("--repeats", type=int, default=10)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--report-dir", help="write CSV + figures under this directory")
    p.set_defaults(func=cmd_similarity)

    p = sub.add_parser("recommend", help="recommend a model for a target dataset")
    p.add_argument("--target", required=True)
    p.add_argument("--desired-metric", default="f1", choices=["precision", "recall", "f1"])
    p.add_argument("--metrics", help="comma-separated metric subset")
    p.add_argument("--weights", help="per-metric weights, e.g. mmd=1,fbd=2")
    p.add_argument("--fixture", help="precomputed pairwise metric table (JSON)")
    p.add_argument("--sample-size", type=int, default=1000)
    p.add_argument("--repeats", type=int, default=10)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--report-dir", help="write CSV + figures under this directory")
    p.set_defaults(func=cmd_recommend)

    p = sub.add_parser("experiment", help="run and inspect experiments")
    xsub = p.add_subparsers(dest="action", required=True)
    x_run = xsub.add_parser("run")
    x_run.add_argument("--config", required=True, help="YAML or JSON experiment config")
    x_run.set_defaults(func=cmd_experiment_run)
    x_status = xsub.add_parser("status")
    x_status.add_argument("experiment_id")
    x_status.set_defaults(func=cmd_experiment_status)
    xsub.add_parser("list").set_defaults(func=cmd_experiment_list)

    p = sub.add_parser("serve", help="run a scheduler role")
    ssub = p.add_subparsers(dest="role", required=True)
    s_gw = ssub.add_parser("gateway")
    s_gw.add_argument("--machines", required=True, help="JSON machines file")
    s_gw.add_argument("--host", default="127.0.0.1")
    s_gw.add_argument("--port", type=int, default=7070)
    s_gw.set_defaults(func=cmd_serve_gateway)
    s_ai = ssub.add_parser("aiserver")
    s_ai.add_argument("--machine-id", required=True)
    s_ai.add_argument("--workers", type=int, required=True)
    s_ai.add_argument("--gateway", help="gateway host:port for result reports")
    s_ai.add_argument("--host", default="127.0.0.1")
    s_ai.add_argument("--port", type=int, default=0)
    s_ai.set_defaults(func=cmd_serve_aiserver)

    p = sub.add_parser("submit", help="submit an experiment to a gateway")
    p.add_argument("--config", required=True)
    p.add_argument("--gateway", required=True, help="gateway host:port")
    p.add_argument("--task-id")
    p.set_defaults(func=cmd_submit)

    p = sub.add_parser("status", help="query a task envelope")
    p.add_argument("task_id")
    p.add_argument("--gateway", required=True)
    p.set_defaults(func=cmd_status)

    p = sub.add_parser("result", help="fetch a finished task's experiment record")
    p.add_argument("task_id")
    p.add_argument("--gateway", required=True)
    p.set_defaults(func=cmd_result)

    p = sub.add_parser("simulate", help="discrete-event scheduler simulation")
    p.add_argument("--cluster", required=True, help="JSON cluster spec")
    p.add_argument("--trace", required=True, help="JSON task trace")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", help="write the event log JSON here")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("demo", help="bundled fixture utilities")
    demo_sub = p.add_subparsers(dest="action", required=True)
    demo_sub.add_parser("seed").set_defaults(func=cmd_demo_seed)

    return parser


def main(argv: list[str] | None = None) -> int:
    logging.basicConfig(stream=sys.stderr, level=logging.WARNING, format="%(message)s")
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except KexopsError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except FileNotFoundError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
