"""Command-line entry point.

Subcommands: run (execute a tour, write log + metrics), keywords (extract or
batch through an external LLM), graph (export JSON/DOT), metrics (score
existing tour logs), ablate (run with a restricted keyword mode).
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

from . import __version__
from .ablation import ABLATION_MODES, make_keyword_strategy
from .config import ENV_CONFIG_PATH, EngineConfig
from .detection import make_detector
from .errors import OmninavError
from .graph import Omnigraph, deserialize, serialize
from .keywords import (
    KeywordCache,
    extract_keywords_rule_based,
    instruction_hash,
    parse_llm_response,
    render_llm_prompt,
)
from .metrics import t_ndtw
from .reporting import render_report, score_tour
from .sim import load_scene, load_tour, make_agent, run_tour
from .sim.tour import TourLog


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="omninav", description=__doc__)
    parser.add_argument("--version", action="version", version=__version__)
    parser.add_argument(
        "--config",
        default=None,
        help=f"config JSON path (default: ${ENV_CONFIG_PATH} if set)",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="execute a tour and write log + metrics")
    p_run.add_argument("--scene", required=True)
    p_run.add_argument("--tour", required=True)
    p_run.add_argument("--agent", default="oracle", help='"oracle" or "noisy[:p]"')
    p_run.add_argument("--seed", type=int, default=None, help="override config seed")
    p_run.add_argument("--d-n", type=float, default=None, help="override fusion neighbourhood")
    p_run.add_argument("--out", default=".", help="output directory")
    p_run.set_defaults(func=cmd_run)

    p_kw = sub.add_parser("keywords", help="extract keywords / LLM batch plumbing")
    p_kw.add_argument("--instructions", required=True, help="JSON array of instruction strings")
    p_kw.add_argument("--mode", choices=("rule", "prompt-emit", "response-ingest"), default="rule")
    p_kw.add_argument("--cache", required=True, help="keyword cache file (JSONL)")
    p_kw.add_argument("--responses", help="JSONL responses for response-ingest")
    p_kw.add_argument("--out", default="-", help="output file for prompt-emit")
    p_kw.set_defaults(func=cmd_keywords)

    p_graph = sub.add_parser("graph", help="export an omnigraph")
    p_graph.add_argument("--log", help="tour log JSON holding the graph")
    p_graph.add_argument("--graph", help="serialized omnigraph JSON")
    p_graph.add_argument("--format", choices=("json", "dot"), default="json")
    p_graph.add_argument("--out", default="-")
    p_graph.set_defaults(func=cmd_graph)

    p_metrics = sub.add_parser("metrics", help="score existing tour logs")
    p_metrics.add_argument("--scene", required=True)
    p_metrics.add_argument("--tour", required=True)
    p_metrics.add_argument("--log", required=True, nargs="+")
    p_metrics.add_argument("--out", default="-")
    p_metrics.set_defaults(func=cmd_metrics)

    p_ablate = sub.add_parser("ablate", help="run a tour under a keyword ablation mode")
    p_ablate.add_argument("--scene", required=True)
    p_ablate.add_argument("--tour", required=True)
    p_ablate.add_argument("--mode", choices=ABLATION_MODES, default="full")
    p_ablate.add_argument("--agent", default="oracle")
    p_ablate.add_argument("--seed", type=int, default=None)
    p_ablate.add_argument("--out", default=".")
    p_ablate.set_defaults(func=cmd_ablate)
    return parser


def load_config(args) -> EngineConfig:
    path = args.config or os.environ.get(ENV_CONFIG_PATH)
    return EngineConfig.from_file(path) if path else EngineConfig()


def _write(path: str, text: str) -> None:
    if path == "-":
        sys.stdout.write(text if text.endswith("\n") else text + "\n")
    else:
        Path(path).parent.mkdir(parents=True, exist_ok=True)
        Path(path).write_text(text, encoding="utf-8")


def _dump_json(payload) -> str:
    return json.dumps(payload, indent=2, sort_keys=True, ensure_ascii=False)


def _execute_tour(args, cfg: EngineConfig, extractor=None) -> int:
    cfg = cfg.with_overrides(seed=getattr(args, "seed", None), d_n=getattr(args, "d_n", None))
    scene = load_scene(args.scene)
    tour = load_tour(args.tour, scene)
    agent = make_agent(args.agent, seed=cfg.seed)
    detector = make_detector(cfg.detector)
    log = run_tour(scene, agent, tour, cfg, detector=detector, extractor=extractor)
    report = score_tour(log, tour, scene, cfg)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    mode = getattr(args, "mode", None)
    stem = log.tour_id if mode is None else f"{log.tour_id}.{mode}"
    (out / f"{stem}.log.json").write_text(_dump_json(log.to_payload()), encoding="utf-8")
    if mode is not None:
        report["mode"] = mode
        report["keywords_used"] = {ep.episode_id: list(ep.keywords) for ep in log.episodes}
    (out / f"{stem}.metrics.json").write_text(_dump_json(report), encoding="utf-8")
    print(render_report(report))
    return 0


def cmd_run(args) -> int:
    return _execute_tour(args, load_config(args))


def cmd_ablate(args) -> int:
    strategy = make_keyword_strategy(args.mode)
    return _execute_tour(args, load_config(args), extractor=strategy)


def cmd_keywords(args) -> int:
    with open(args.instructions, encoding="utf-8") as fh:
        instructions = json.load(fh)
    if not isinstance(instructions, list):
        raise OmninavError("instructions file must be a JSON array of strings")
    cache = KeywordCache(args.cache)

    if args.mode == "rule":
        for instruction in instructions:
            if cache.lookup(instruction) is None:
                cache.store(extract_keywords_rule_based(instruction))
        print(f"cache entries: {len(cache)}")
        return 0

    if args.mode == "prompt-emit":
        lines = []
        for instruction in instructions:
            system, user = render_llm_prompt(instruction)
            lines.append(
                json.dumps(
                    {"hash": instruction_hash(instruction), "system": system, "user": user},
                    ensure_ascii=False,
                )
            )
        _write(args.out, "\n".join(lines) + "\n")
        return 0

    # response-ingest
    if not args.responses:
        raise OmninavError("--responses is required for response-ingest")
    by_hash = {instruction_hash(i): i for i in instructions}
    with open(args.responses, encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if not line:
                continue
            rec = json.loads(line)
            instruction = rec.get("instruction") or by_hash.get(rec.get("hash", ""))
            if instruction is None:
                raise OmninavError(f"response record matches no instruction: {line[:80]}")
            cache.store(parse_llm_response(rec["response"], instruction))
    print(f"cache entries: {len(cache)}")
    return 0


def cmd_graph(args) -> int:
    if bool(args.log) == bool(args.graph):
        raise OmninavError("provide exactly one of --log or --graph")
    if args.log:
        with open(args.log, encoding="utf-8") as fh:
            graph = TourLog.from_payload(json.load(fh)).graph
    else:
        graph = deserialize(Path(args.graph).read_bytes())
    if args.format == "json":
        _write(args.out, serialize(graph).decode("utf-8"))
    else:
        _write(args.out, graph_to_dot(graph))
    return 0


def graph_to_dot(graph: Omnigraph, max_keywords: int = 3) -> str:
    """DOT rendering; each node shows at most max_keywords keywords."""
    lines = [f'graph "{graph.scene_id}" {{', "  node [shape=box];"]
    for vid in sorted(graph.nodes):
        vp = graph.nodes[vid]
        top = sorted(vp.detections.values(), key=lambda d: (-d.confidence, d.label))
        shown = ", ".join(d.label for d in top[:max_keywords])
        label = vid if not shown else f"{vid}\\n{shown}"
        lines.append(f'  "{vid}" [label="{label}"];')
    for a, b in sorted(graph.edges):
        lines.append(f'  "{a}" -- "{b}";')
    lines.append("}")
    return "\n".join(lines) + "\n"


def cmd_metrics(args) -> int:
    cfg = load_config(args)
    scene = load_scene(args.scene)
    tour = load_tour(args.tour, scene)
    reports = []
    tours_for_aggregate = []
    for log_path in args.log:
        with open(log_path, encoding="utf-8") as fh:
            log = TourLog.from_payload(json.load(fh))
        report = score_tour(log, tour, scene, cfg)
        reports.append(report)
        executed = [[p.position for p in ep.executed_path] for ep in log.episodes]
        reference = [[p.position for p in ep.gt_path] for ep in tour.episodes]
        tours_for_aggregate.append((executed, reference))
    payload = {
        "tours": {r["tour_id"]: r for r in reports},
        "t_ndtw": t_ndtw(
            tours_for_aggregate,
            d_th=cfg.d_th,
            weighted=cfg.tour_weighting == "reference_length",
        ),
    }
    _write(args.out, _dump_json(payload))
    for r in reports:
        print(render_report(r))
    return 0


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except OmninavError as exc:
        print(f"error[{exc.code}]: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
