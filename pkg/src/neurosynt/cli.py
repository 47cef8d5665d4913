"""Command-line entry points: synthesize single specifications, run
benchmark batches to CSV, serve the built-in solvers, and generate or
inspect training datasets.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
from pathlib import Path

from . import datagen, services
from .aiger import AigerFormatError, parse_aag, stats
from .ltl import DecompSpec, LtlSyntaxError
from .portfolio import (AllServicesUnavailable, ConfigError, Mode,
                        PortfolioConfig, SolverConfig, load_config,
                        run_portfolio)
from .synth import SynStatus
from .wire import UnsoundSynSolution

EXIT_OK = 0
EXIT_PARSE = 1
EXIT_NO_SOLUTION = 2
EXIT_SERVICE = 3

BUILTIN_ROLES = {"bounded-synth": "symbolic", "mc": "mc"}


def _default_config() -> PortfolioConfig:
    return PortfolioConfig(
        symbolic_solver=SolverConfig("bounded-synth"),
        model_checker=SolverConfig("mc"))


def _load_spec(path: str) -> DecompSpec:
    with open(path, encoding="utf-8") as fh:
        return DecompSpec.from_dict(json.load(fh))


def _start_builtins(cfg: PortfolioConfig):
    """Start in-process services for built-in tools lacking a url."""
    started = []
    sections = {}
    for name in ("symbolic_solver", "model_checker", "neural_solver"):
        sc: SolverConfig = getattr(cfg, name)
        if sc is None or sc.url is not None:
            sections[name] = sc
            continue
        role = BUILTIN_ROLES.get(sc.tool)
        if role is None:
            print(f"warning: no url for tool {sc.tool!r}; section {name} "
                  "disabled", file=sys.stderr)
            sections[name] = None
            continue
        svc = services.serve(role)
        started.append(svc)
        params = {str(k): str(v) for k, v in sc.tool_args.items()}
        response = services.setup(svc.url, params)
        if not response.success:
            for s in started:
                s.stop()
            raise AllServicesUnavailable(
                f"{sc.tool} setup failed: {response.error}")
        sections[name] = SolverConfig(sc.tool, url=svc.url,
                                      tool_args=sc.tool_args,
                                      service_args=sc.service_args,
                                      tool_setup_args=sc.tool_setup_args)
    return PortfolioConfig(symbolic_solver=sections["symbolic_solver"],
                           model_checker=sections["model_checker"],
                           neural_solver=sections["neural_solver"],
                           mode=cfg.mode), started


def cmd_synthesize(args) -> int:
    try:
        spec = _load_spec(args.spec)
    except (OSError, json.JSONDecodeError, LtlSyntaxError, ValueError,
            KeyError) as exc:
        print(f"error: cannot parse {args.spec}: {exc}", file=sys.stderr)
        return EXIT_PARSE
    try:
        cfg = load_config(args.config) if args.config else _default_config()
    except (OSError, ConfigError) as exc:
        print(f"error: bad configuration: {exc}", file=sys.stderr)
        return EXIT_PARSE
    if args.mode:
        cfg = PortfolioConfig(cfg.symbolic_solver, cfg.model_checker,
                              cfg.neural_solver,
                              Mode.FASTEST_WINS if args.mode == "fastest"
                              else Mode.WAIT_ALL)
    try:
        cfg, started = _start_builtins(cfg)
    except AllServicesUnavailable as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_SERVICE
    try:
        result = run_portfolio(spec, cfg, timeout=args.timeout)
    except AllServicesUnavailable as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_SERVICE
    finally:
        for svc in started:
            svc.stop()
    chosen = result.chosen
    if chosen.status is SynStatus.REALIZABLE:
        print("REALIZABLE")
    elif chosen.status is SynStatus.UNREALIZABLE:
        print("UNREALIZABLE")
    elif chosen.status is SynStatus.ERROR:
        print(f"error: {chosen.detailed_status}", file=sys.stderr)
        return EXIT_SERVICE
    else:
        print(f"no solution: {chosen.status.value} {chosen.detailed_status}",
              file=sys.stderr)
        return EXIT_NO_SOLUTION
    if chosen.circuit:
        sys.stdout.write(chosen.circuit)
    return EXIT_OK


BENCHMARK_COLUMNS = ["sample_id", "tool", "status", "realizable",
                     "wall_time_s", "mc_status", "mc_time_s",
                     "num_latches", "num_ands", "max_var"]


def _benchmark_rows(sample_id: str, result) -> list[dict]:
    rows = []
    for tool, answer in result.all_results:
        if isinstance(answer, UnsoundSynSolution):
            inner = answer.synthesis_solution
            graded = answer.model_checking_solution
        else:
            inner = answer
            graded = None
        row = {"sample_id": sample_id, "tool": tool,
               "status": inner.status.value,
               "realizable": ("" if inner.realizable is None
                              else str(inner.realizable).lower()),
               "wall_time_s": f"{result.wall_times.get(tool, 0.0):.6f}",
               "mc_status": graded.status.value if graded else "",
               "mc_time_s": f"{graded.time:.6f}" if graded else "",
               "num_latches": "", "num_ands": "", "max_var": ""}
        if inner.circuit:
            try:
                s = stats(parse_aag(inner.circuit))
                row.update({"num_latches": s["num_latches"],
                            "num_ands": s["num_ands"],
                            "max_var": s["max_var"]})
            except AigerFormatError:
                pass
        rows.append(row)
    return rows


def cmd_benchmark(args) -> int:
    try:
        cfg = load_config(args.config) if args.config else _default_config()
    except (OSError, ConfigError) as exc:
        print(f"error: bad configuration: {exc}", file=sys.stderr)
        return EXIT_PARSE
    cfg = PortfolioConfig(cfg.symbolic_solver, cfg.model_checker,
                          cfg.neural_solver, Mode.WAIT_ALL)
    sample_paths = sorted(Path(args.dataset).glob("*.json"))
    try:
        cfg, started = _start_builtins(cfg)
    except AllServicesUnavailable as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_SERVICE
    rows = []
    try:
        for path in sample_paths:
            sample_id = path.stem
            try:
                spec = _load_spec(str(path))
            except (OSError, json.JSONDecodeError, LtlSyntaxError, ValueError,
                    KeyError) as exc:
                rows.append({c: "" for c in BENCHMARK_COLUMNS}
                            | {"sample_id": sample_id, "status": "error",
                               "tool": "-"})
                print(f"warning: {path}: {exc}", file=sys.stderr)
                continue
            result = run_portfolio(spec, cfg, timeout=args.timeout)
            rows.extend(_benchmark_rows(sample_id, result))
    finally:
        for svc in started:
            svc.stop()
    with open(args.out, "w", newline="", encoding="utf-8") as fh:
        writer = csv.DictWriter(fh, fieldnames=BENCHMARK_COLUMNS)
        writer.writeheader()
        writer.writerows(rows)
    print(f"wrote {len(rows)} rows to {args.out}")
    return EXIT_OK


def cmd_serve(args) -> int:
    svc = services.serve(args.role, port=args.port)
    print(f"serving {args.role} on {svc.url}")
    try:
        svc._thread.join()
    except KeyboardInterrupt:
        svc.stop()
    return EXIT_OK


def cmd_generate(args) -> int:
    corpus = []
    for path in sorted(Path(args.corpus).glob("*.json")):
        try:
            corpus.append(_load_spec(str(path)))
        except (json.JSONDecodeError, LtlSyntaxError, ValueError, KeyError) as exc:
            print(f"warning: skipping {path}: {exc}", file=sys.stderr)
    lib = datagen.mine_patterns(corpus)
    if not lib.guarantees:
        print("error: no usable guarantee patterns in corpus", file=sys.stderr)
        return EXIT_PARSE
    oracle = datagen.local_oracle(budget=args.oracle_timeout)
    samples = []
    seed = args.seed
    attempts = 0
    while len(samples) < args.count and attempts < args.count * 10:
        target = len(samples) % 2 == 0  # alternate for an even split
        try:
            samples.append(datagen.assemble(lib, rng_seed=seed + attempts,
                                            oracle=oracle, target=target))
        except datagen.GenerationExhausted:
            pass
        attempts += 1
    samples = datagen.filter_circuits(samples)
    datagen.write_dataset(samples, args.out)
    print(f"wrote {len(samples)} samples to {args.out}")
    return EXIT_OK


def cmd_dataset_stats(args) -> int:
    try:
        samples = datagen.read_dataset(args.dataset)
    except (OSError, json.JSONDecodeError, KeyError, ValueError) as exc:
        print(f"error: cannot read {args.dataset}: {exc}", file=sys.stderr)
        return EXIT_PARSE
    report = datagen.dataset_stats(samples)
    print(f"samples: {report['count']}")
    print(f"realizable: {report['realizable']}  "
          f"unrealizable: {report['unrealizable']}")
    print(f"mean property AST size: {report['mean_property_size']:.2f}")
    for key in ("num_aps", "max_var", "num_latches"):
        hist = " ".join(f"{k}:{v}" for k, v in report[key].items())
        print(f"{key}: {hist}")
    if args.out:
        with open(args.out, "w", newline="", encoding="utf-8") as fh:
            writer = csv.writer(fh)
            writer.writerow(["metric", "value", "count"])
            writer.writerow(["count", "", report["count"]])
            writer.writerow(["realizable", "", report["realizable"]])
            writer.writerow(["unrealizable", "", report["unrealizable"]])
            writer.writerow(["mean_property_size", "",
                             f"{report['mean_property_size']:.4f}"])
            for key in ("num_aps", "max_var", "num_latches"):
                for k, v in report[key].items():
                    writer.writerow([key, k, v])
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="neurosynt",
        description="Portfolio reactive-synthesis toolkit")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("synthesize", help="solve one specification")
    p.add_argument("spec", help="assume-guarantee JSON file")
    p.add_argument("--config", help="portfolio YAML configuration")
    p.add_argument("--mode", choices=["fastest", "all"])
    p.add_argument("--timeout", type=float, default=60.0)
    p.set_defaults(fn=cmd_synthesize)

    p = sub.add_parser("benchmark", help="solve a directory of specifications")
    p.add_argument("dataset", help="directory of spec JSON files")
    p.add_argument("--config", help="portfolio YAML configuration")
    p.add_argument("--out", default="results.csv")
    p.add_argument("--timeout", type=float, default=60.0)
    p.set_defaults(fn=cmd_benchmark)

    p = sub.add_parser("serve", help="run a built-in service")
    p.add_argument("role", choices=["symbolic", "mc"])
    p.add_argument("--port", type=int, default=0)
    p.set_defaults(fn=cmd_serve)

    p = sub.add_parser("generate", help="generate a labeled dataset")
    p.add_argument("corpus", help="directory of corpus spec JSON files")
    p.add_argument("--out", default="dataset.jsonl")
    p.add_argument("--count", type=int, default=10)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--oracle-timeout", type=float, default=5.0)
    p.set_defaults(fn=cmd_generate)

    p = sub.add_parser("dataset-stats", help="summarize a JSONL dataset")
    p.add_argument("dataset", help="JSONL dataset file")
    p.add_argument("--out", help="optional CSV report path")
    p.set_defaults(fn=cmd_dataset_stats)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.fn(args)


if __name__ == "__main__":
    sys.exit(main())
