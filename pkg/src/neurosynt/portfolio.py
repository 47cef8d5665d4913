"""Portfolio orchestration: run the symbolic and neural solvers in
parallel, gate every unsound answer through the model checker, and pick
either the fastest verified result or report all of them.
"""

from __future__ import annotations

import threading
import time
import warnings
from dataclasses import dataclass, field
from enum import Enum
from typing import Optional

import yaml

from . import services
from .ltl import DecompSpec
from .mc import McStatus
from .synth import SynStatus
from .wire import (McProblem, SynProblem, SynSolution, UnsoundSynSolution)


class ConfigError(ValueError):
    pass


class MissingSection(ConfigError):
    pass


class BadType(ConfigError):
    pass


class AllServicesUnavailable(RuntimeError):
    pass


class Mode(Enum):
    FASTEST_WINS = "fastest"
    WAIT_ALL = "all"


@dataclass(frozen=True)
class SolverConfig:
    tool: str
    url: Optional[str] = None
    tool_args: dict = field(default_factory=dict)
    service_args: dict = field(default_factory=dict)
    tool_setup_args: dict = field(default_factory=dict)


@dataclass(frozen=True)
class PortfolioConfig:
    symbolic_solver: Optional[SolverConfig]
    model_checker: Optional[SolverConfig]
    neural_solver: Optional[SolverConfig] = None
    mode: Mode = Mode.FASTEST_WINS

    def to_dict(self) -> dict:
        out = {}
        for name in ("symbolic_solver", "model_checker", "neural_solver"):
            sc: SolverConfig = getattr(self, name)
            if sc is None:
                continue
            section = {"tool": sc.tool}
            if sc.url is not None:
                section["url"] = sc.url
            if sc.tool_args:
                section["tool_args"] = dict(sc.tool_args)
            if sc.service_args:
                section["service_args"] = dict(sc.service_args)
            if sc.tool_setup_args:
                section["tool_setup_args"] = dict(sc.tool_setup_args)
            out[name] = section
        out["mode"] = self.mode.value
        return out


def _parse_section(name: str, raw) -> SolverConfig:
    if not isinstance(raw, dict):
        raise BadType(f"section {name!r} must be a mapping")
    if "tool" not in raw:
        raise MissingSection(f"section {name!r} is missing 'tool'")
    for key in ("tool_args", "service_args", "tool_setup_args"):
        if key in raw and not isinstance(raw[key], dict):
            raise BadType(f"{name}.{key} must be a mapping")
    service_args = dict(raw.get("service_args", {}))
    if "start_containerized_service" in service_args:
        warnings.warn(f"{name}.service_args.start_containerized_service "
                      "is ignored: container lifecycle is not managed here")
        service_args.pop("start_containerized_service")
    url = raw.get("url")
    if url is not None and not isinstance(url, str):
        raise BadType(f"{name}.url must be a string")
    return SolverConfig(
        tool=str(raw["tool"]),
        url=url,
        tool_args={str(k): v for k, v in raw.get("tool_args", {}).items()},
        service_args=service_args,
        tool_setup_args={str(k): v
                         for k, v in raw.get("tool_setup_args", {}).items()})


def parse_config(raw: dict) -> PortfolioConfig:
    if not isinstance(raw, dict):
        raise BadType("configuration must be a mapping")
    if "symbolic_solver" not in raw and "neural_solver" not in raw:
        raise MissingSection("need at least one of symbolic_solver/neural_solver")
    if "model_checker" not in raw and "neural_solver" in raw:
        raise MissingSection("neural_solver requires a model_checker section")
    sections = {}
    for name in ("symbolic_solver", "model_checker", "neural_solver"):
        sections[name] = (_parse_section(name, raw[name])
                          if name in raw else None)
    mode_raw = raw.get("mode", "fastest")
    try:
        mode = Mode(mode_raw)
    except ValueError:
        raise BadType(f"unknown mode {mode_raw!r}; expected 'fastest' or 'all'")
    return PortfolioConfig(symbolic_solver=sections["symbolic_solver"],
                           model_checker=sections["model_checker"],
                           neural_solver=sections["neural_solver"],
                           mode=mode)


def load_config(path: str) -> PortfolioConfig:
    with open(path, encoding="utf-8") as fh:
        raw = yaml.safe_load(fh)
    return parse_config(raw)


# -- portfolio run -------------------------------------------------------


@dataclass(frozen=True)
class PortfolioResult:
    chosen: SynSolution
    all_results: tuple = ()
    wall_times: dict = field(default_factory=dict)


_FAILURE_RANK = {SynStatus.NONSUCCESS: 0, SynStatus.TIMEOUT: 1,
                 SynStatus.ERROR: 2}


def _params(args: dict) -> dict:
    return {str(k): str(v) for k, v in args.items()}


def _error_solution(tool: str, detail: str) -> SynSolution:
    return SynSolution(SynStatus.ERROR, detailed_status=detail, tool=tool)


class _Run:
    """Shared state for one portfolio run; single-writer result slots."""

    def __init__(self, spec: DecompSpec, cfg: PortfolioConfig, timeout: float):
        self.spec = spec
        self.cfg = cfg
        self.timeout = timeout
        self.deadline = time.monotonic() + timeout
        self.lock = threading.Lock()
        self.results: list[tuple[str, object]] = []
        self.wall_times: dict[str, float] = {}
        self.winner: Optional[SynSolution] = None
        self.done = threading.Event()

    def remaining(self) -> float:
        return self.deadline - time.monotonic()

    def record(self, tool: str, result, verdict: Optional[SynSolution],
               started: float):
        with self.lock:
            self.results.append((tool, result))
            self.wall_times[tool] = time.monotonic() - started
            if verdict is not None and self.winner is None:
                self.winner = verdict
                if self.cfg.mode is Mode.FASTEST_WINS:
                    self.done.set()

    def verify(self, circuit: str, realizable: bool):
        """Grade an untrusted circuit through the configured model checker."""
        mc_cfg = self.cfg.model_checker
        if mc_cfg is None or mc_cfg.url is None:
            return None
        problem = McProblem(self.spec, circuit=circuit, realizable=realizable,
                            parameters=_params(mc_cfg.tool_args))
        return services.model_check(mc_cfg.url, problem,
                                    deadline=max(self.remaining(), 0.1))


def _run_symbolic(run: _Run):
    cfg = run.cfg.symbolic_solver
    started = time.monotonic()
    try:
        problem = SynProblem(run.spec, parameters=_params(cfg.tool_args))
        solution = services.synthesize(cfg.url, problem,
                                       deadline=run.remaining())
    except services.DeadlineExceeded:
        run.record(cfg.tool, SynSolution(SynStatus.TIMEOUT, tool=cfg.tool),
                   None, started)
        return
    except (services.ConnectionRefused, services.ProtocolError) as exc:
        run.record(cfg.tool, _error_solution(cfg.tool, str(exc)), None, started)
        return
    verdict = solution if solution.realizable is not None else None
    run.record(cfg.tool, solution, verdict, started)


def _run_neural(run: _Run):
    cfg = run.cfg.neural_solver
    started = time.monotonic()
    try:
        problem = SynProblem(run.spec, parameters=_params(cfg.tool_args))
        unsound = services.synthesize(cfg.url, problem,
                                      deadline=run.remaining(), unsound=True)
    except services.DeadlineExceeded:
        run.record(cfg.tool,
                   UnsoundSynSolution(SynSolution(SynStatus.TIMEOUT,
                                                  tool=cfg.tool),
                                      tool=cfg.tool),
                   None, started)
        return
    except (services.ConnectionRefused, services.ProtocolError) as exc:
        run.record(cfg.tool,
                   UnsoundSynSolution(_error_solution(cfg.tool, str(exc)),
                                      tool=cfg.tool),
                   None, started)
        return

    inner = unsound.synthesis_solution
    verdict = None
    if inner.circuit is not None and inner.realizable is not None:
        # Never trust the attached model-checking result; re-verify.
        try:
            graded = run.verify(inner.circuit, inner.realizable)
        except (services.ConnectionRefused, services.DeadlineExceeded,
                services.ProtocolError):
            run.record(cfg.tool,
                       UnsoundSynSolution(inner, None, tool=cfg.tool,
                                          time=unsound.time),
                       None, started)
            return
        unsound = UnsoundSynSolution(
            inner, graded.solution if graded else None,
            tool=cfg.tool, time=unsound.time)
        if graded is not None and graded.solution.status is McStatus.SATISFIED:
            verdict = inner
    run.record(cfg.tool, unsound, verdict, started)


def run_portfolio(spec: DecompSpec, cfg: PortfolioConfig,
                  timeout: float = 60.0) -> PortfolioResult:
    run = _Run(spec, cfg, timeout)
    workers = []
    if cfg.symbolic_solver is not None and cfg.symbolic_solver.url is not None:
        workers.append(threading.Thread(target=_run_symbolic, args=(run,),
                                        daemon=True))
    if cfg.neural_solver is not None and cfg.neural_solver.url is not None:
        workers.append(threading.Thread(target=_run_neural, args=(run,),
                                        daemon=True))
    if not workers:
        raise AllServicesUnavailable("no solver service configured")
    for w in workers:
        w.start()
    if cfg.mode is Mode.FASTEST_WINS:
        run.done.wait(timeout=timeout)
        # Losing calls keep running on daemon threads; their results are
        # dropped, which is the cooperative form of cancellation here.
        if run.winner is None:
            for w in workers:
                w.join(timeout=max(run.remaining(), 0))
    else:
        for w in workers:
            w.join(timeout=max(run.remaining(), 0) + 1.0)

    with run.lock:
        chosen = run.winner
        results = tuple(run.results)
        wall_times = dict(run.wall_times)
    if chosen is None:
        chosen = _best_failure(results)
    return PortfolioResult(chosen=chosen, all_results=results,
                           wall_times=wall_times)


def _best_failure(results: tuple) -> SynSolution:
    candidates = []
    for tool, result in results:
        inner = (result.synthesis_solution
                 if isinstance(result, UnsoundSynSolution) else result)
        status = inner.status
        if status in (SynStatus.REALIZABLE, SynStatus.UNREALIZABLE):
            # A definitive claim that failed verification carries no
            # trustworthy information; report it as nonsuccess.
            status = SynStatus.NONSUCCESS
        candidates.append(SynSolution(status,
                                      detailed_status=inner.detailed_status,
                                      tool=inner.tool, time=inner.time))
    if not candidates:
        return SynSolution(SynStatus.TIMEOUT,
                           detailed_status="no solver answered in time")
    return min(candidates, key=lambda s: _FAILURE_RANK.get(s.status, 3))
