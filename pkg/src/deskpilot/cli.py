"""Command line entry points: serve, replay, bench-oracle, gen-world."""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .benches import (
    bench_closed_loop,
    bench_deterministic_planner,
    bench_distance_kernel,
    bench_swept_checker,
    bench_target_selection,
)
from .config import EngineConfig, load_config
from .orchestrator import (
    Scenario,
    bundled_canned_responses,
    canonical_report_json,
    make_planner,
    replay,
)
from .segmentation import random_world


def _add_config_arg(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--config", help="path to an engine config JSON file")


def _config_from(args) -> EngineConfig:
    return load_config(args.config) if args.config else EngineConfig()


def cmd_serve(args) -> int:
    import uvicorn

    from .server import create_app

    app = create_app(_config_from(args))
    uvicorn.run(app, host=args.host, port=args.port, log_level="info")
    return 0


def cmd_replay(args) -> int:
    config = _config_from(args)
    scenario = Scenario.load(args.scenario)
    planner = None
    if args.planner:
        responses = None
        if args.planner == "canned":
            responses = bundled_canned_responses(scenario.name)
        from dataclasses import replace

        config = replace(config, planner=replace(config.planner, backend=args.planner))
        planner = make_planner(config, canned_responses=responses)
    report = replay(scenario, config, planner=planner)
    if args.out:
        Path(args.out).write_text(canonical_report_json(report))
    print(json.dumps(report, indent=2, sort_keys=True))
    return 0 if report["passed"] else 1


def cmd_bench_oracle(args) -> int:
    config = _config_from(args)
    suites = {
        "distance": lambda: bench_distance_kernel(args.cases or 1000, args.seed),
        "selection": lambda: bench_target_selection(args.cases or 1000, args.seed),
        "swept": lambda: bench_swept_checker(args.cases or 10000, args.seed),
        "planner": lambda: bench_deterministic_planner(args.cases or 500, args.seed, config),
        "closed-loop": lambda: bench_closed_loop(seed=args.seed, config=config),
    }
    names = [args.suite] if args.suite else list(suites)
    failed = False
    for name in names:
        stats = suites[name]()
        print(f"== {name}")
        print(json.dumps(stats, indent=2, sort_keys=True))
        if stats.get("mismatches") or stats.get("false_negatives") or stats.get(
            "band_violations"
        ) or stats.get("unsafe_returns"):
            failed = True
    return 1 if failed else 0


def cmd_gen_world(args) -> int:
    config = _config_from(args)
    world = random_world(
        args.seed, config.intrinsics, config.base_from_camera, n_boxes=args.boxes
    )
    text = json.dumps(world.to_dict(), indent=2, sort_keys=True)
    if args.out:
        Path(args.out).write_text(text)
    else:
        print(text)
    return 0


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(prog="deskpilot")
    sub = parser.add_subparsers(dest="command", required=True)

    serve = sub.add_parser("serve", help="run the HTTP API")
    serve.add_argument("--host", default="127.0.0.1")
    serve.add_argument("--port", type=int, default=8321)
    _add_config_arg(serve)
    serve.set_defaults(func=cmd_serve)

    rep = sub.add_parser("replay", help="run a scenario file headless")
    rep.add_argument("scenario", help="path to a scenario JSON file")
    rep.add_argument("--planner", choices=["deterministic", "external", "canned"])
    rep.add_argument("--out", help="write the canonical report to this path")
    _add_config_arg(rep)
    rep.set_defaults(func=cmd_replay)

    bench = sub.add_parser("bench-oracle", help="run the oracle comparison suites")
    bench.add_argument("--suite", choices=["distance", "selection", "swept", "planner", "closed-loop"])
    bench.add_argument("--cases", type=int, default=0)
    bench.add_argument("--seed", type=int, default=7)
    _add_config_arg(bench)
    bench.set_defaults(func=cmd_bench_oracle)

    gen = sub.add_parser("gen-world", help="generate a random box world")
    gen.add_argument("--seed", type=int, required=True)
    gen.add_argument("--boxes", type=int, default=0)
    gen.add_argument("--out")
    _add_config_arg(gen)
    gen.set_defaults(func=cmd_gen_world)

    args = parser.parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
