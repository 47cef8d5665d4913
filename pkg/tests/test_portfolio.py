import random
import time

import pytest
import yaml

from neurosynt.ltl import DecompSpec
from neurosynt.mc import McSolution, McStatus
from neurosynt.portfolio import (AllServicesUnavailable, BadType,
                                 MissingSection, Mode, PortfolioConfig,
                                 SolverConfig, load_config, parse_config,
                                 run_portfolio)
from neurosynt.services import WireService, serve, setup
from neurosynt.synth import SynStatus
from neurosynt.wire import SetupResponse, SynProblem, SynSolution, UnsoundSynSolution

from helpers import ARBITER_AAG, ARBITER_SPEC_JSON

ARBITER_SPEC = DecompSpec.from_dict(ARBITER_SPEC_JSON)
BAD_ARBITER_AAG = ("aag 2 2 0 2 0\n2\n4\n1\n1\n"
                   "i0 r_0\ni1 r_1\no0 g_0\no1 g_1\n")

APPENDIX_CONFIG = """\
symbolic_solver:
  tool: bounded-synth
  tool_args:
    "timeout": 120
  service_args:
    "mem_limit": "2g"
    "start_containerized_service": True
model_checker:
  tool: mc
  tool_args:
    "timeout": 10
  service_args:
    "mem_limit": "2g"
    "start_containerized_service": True
neural_solver:
  tool: neural
  service_args:
    "nvidia_gpus": False
    "mem_limit": "100g"
    "start_containerized_service": True
    "start_service": False
  tool_setup_args:
    "batch_size": 1
    "alpha": 0.5
    "num_properties": 40
    "length_properties": 70
    "beam_size": 32
    "check_setup": True
    "model": "ht-50"
"""


class TestLoadConfig:
    def test_appendix_shape(self, tmp_path):
        path = tmp_path / "cfg.yaml"
        path.write_text(APPENDIX_CONFIG)
        with pytest.warns(UserWarning):
            cfg = load_config(str(path))
        assert cfg.symbolic_solver.tool_args["timeout"] == 120
        assert cfg.neural_solver.tool_setup_args["beam_size"] == 32
        assert cfg.neural_solver.tool_setup_args["alpha"] == 0.5
        assert cfg.mode is Mode.FASTEST_WINS
        assert "start_containerized_service" not in \
            cfg.symbolic_solver.service_args

    def test_minimal_symbolic_only(self):
        cfg = parse_config({"symbolic_solver": {"tool": "bounded-synth"}})
        assert cfg.neural_solver is None
        assert cfg.model_checker is None

    def test_round_trip_preserves_keys(self, tmp_path):
        path = tmp_path / "cfg.yaml"
        path.write_text(APPENDIX_CONFIG)
        with pytest.warns(UserWarning):
            cfg = load_config(str(path))
        again = parse_config(yaml.safe_load(yaml.safe_dump(cfg.to_dict())))
        assert again == cfg

    def test_missing_sections(self):
        with pytest.raises(MissingSection):
            parse_config({})
        with pytest.raises(MissingSection):
            parse_config({"neural_solver": {"tool": "x"}})
        with pytest.raises(MissingSection):
            parse_config({"symbolic_solver": {}})

    def test_bad_types(self):
        with pytest.raises(BadType):
            parse_config({"symbolic_solver": "strix"})
        with pytest.raises(BadType):
            parse_config({"symbolic_solver": {"tool": "x", "tool_args": 3}})
        with pytest.raises(BadType):
            parse_config({"symbolic_solver": {"tool": "x"}, "mode": "soonest"})


class StubSolver:
    """Configurable symbolic stub: optional delay, fixed answer."""

    endpoint = "/synthesize"
    request_type = SynProblem

    def __init__(self, tool, solution_fn, delay=0.0):
        self.tool = tool
        self.solution_fn = solution_fn
        self.delay = delay

    def setup(self, parameters):
        return SetupResponse(True)

    def handle(self, problem):
        if self.delay:
            time.sleep(self.delay)
        return self.solution_fn(problem)


def good_neural(problem):
    inner = SynSolution(SynStatus.REALIZABLE, circuit=ARBITER_AAG,
                        realizable=True, tool="neural", time=0.01)
    # Attaches a (true) verification verdict; orchestrator re-checks anyway.
    return UnsoundSynSolution(inner, McSolution(McStatus.SATISFIED),
                              tool="neural", time=0.01)


def lying_neural(problem):
    inner = SynSolution(SynStatus.REALIZABLE, circuit=BAD_ARBITER_AAG,
                        realizable=True, tool="neural", time=0.01)
    # Claims the broken circuit was verified; the gate must catch this.
    return UnsoundSynSolution(inner, McSolution(McStatus.SATISFIED),
                              tool="neural", time=0.01)


def slow_symbolic(problem):
    return SynSolution(SynStatus.REALIZABLE, circuit=ARBITER_AAG,
                       realizable=True, tool="slow-symbolic", time=2.0)


def timeout_answer(tool):
    def fn(problem):
        return SynSolution(SynStatus.TIMEOUT, tool=tool,
                           detailed_status="gave up")
    return fn


def make_config(symbolic_url=None, neural_url=None, mc_url=None,
                mode=Mode.FASTEST_WINS):
    return PortfolioConfig(
        symbolic_solver=(SolverConfig("symbolic", url=symbolic_url)
                         if symbolic_url else None),
        model_checker=(SolverConfig("mc", url=mc_url) if mc_url else None),
        neural_solver=(SolverConfig("neural", url=neural_url)
                       if neural_url else None),
        mode=mode)


@pytest.fixture(scope="module")
def mc_service():
    with serve("mc") as svc:
        setup(svc.url, {})
        yield svc


def start_stub(solver):
    svc = WireService(solver).start()
    setup(svc.url, {})
    return svc


class TestRunPortfolio:
    def test_fast_verified_neural_wins(self, mc_service):
        neural = start_stub(StubSolver("neural", good_neural))
        symbolic = start_stub(StubSolver("slow-symbolic", slow_symbolic,
                                         delay=5.0))
        try:
            started = time.monotonic()
            result = run_portfolio(ARBITER_SPEC,
                                   make_config(symbolic.url, neural.url,
                                               mc_service.url),
                                   timeout=20.0)
            elapsed = time.monotonic() - started
            assert result.chosen.tool == "neural"
            assert result.chosen.status is SynStatus.REALIZABLE
            assert elapsed < 2.0
        finally:
            neural.stop()
            symbolic.stop()

    def test_lying_neural_never_chosen(self, mc_service):
        neural = start_stub(StubSolver("neural", lying_neural))
        symbolic = serve("symbolic")
        setup(symbolic.url, {"timeout": "20"})
        try:
            result = run_portfolio(ARBITER_SPEC,
                                   make_config(symbolic.url, neural.url,
                                               mc_service.url,
                                               mode=Mode.WAIT_ALL),
                                   timeout=30.0)
            assert result.chosen.tool == "bounded-synth"
            neural_results = [r for t, r in result.all_results if t == "neural"]
            assert len(neural_results) == 1
            graded = neural_results[0].model_checking_solution
            assert graded.status is McStatus.VIOLATED
        finally:
            neural.stop()
            symbolic.stop()

    def test_both_timeout(self, mc_service):
        a = start_stub(StubSolver("a", timeout_answer("a")))
        b = start_stub(StubSolver("b", timeout_answer("b")))

        def neural_timeout(problem):
            return UnsoundSynSolution(
                SynSolution(SynStatus.TIMEOUT, tool="b"), tool="b")

        b.solver.solution_fn = neural_timeout
        try:
            result = run_portfolio(ARBITER_SPEC,
                                   make_config(a.url, b.url, mc_service.url,
                                               mode=Mode.WAIT_ALL),
                                   timeout=10.0)
            assert result.chosen.status is SynStatus.TIMEOUT
        finally:
            a.stop()
            b.stop()

    def test_neural_down_falls_back_to_symbolic(self, mc_service):
        symbolic = serve("symbolic")
        setup(symbolic.url, {"timeout": "20"})
        try:
            cfg = make_config(symbolic.url, "http://127.0.0.1:1",
                              mc_service.url, mode=Mode.WAIT_ALL)
            result = run_portfolio(ARBITER_SPEC, cfg, timeout=30.0)
            assert result.chosen.tool == "bounded-synth"
            assert result.chosen.status is SynStatus.REALIZABLE

            only = run_portfolio(ARBITER_SPEC, make_config(symbolic.url),
                                 timeout=30.0)
            assert only.chosen.status == result.chosen.status
            assert only.chosen.realizable == result.chosen.realizable
        finally:
            symbolic.stop()

    def test_no_services(self):
        with pytest.raises(AllServicesUnavailable):
            run_portfolio(ARBITER_SPEC, make_config(), timeout=1.0)

    def test_soundness_with_random_lying_stub(self, mc_service):
        rng = random.Random(42)

        def random_lying(problem):
            grants = rng.randrange(4)
            circuit = ("aag 2 2 0 2 0\n2\n4\n"
                       f"{grants & 1}\n{(grants >> 1) & 1}\n"
                       "i0 r_0\ni1 r_1\no0 g_0\no1 g_1\n")
            inner = SynSolution(SynStatus.REALIZABLE, circuit=circuit,
                                realizable=True, tool="liar", time=0.001)
            return UnsoundSynSolution(inner, McSolution(McStatus.SATISFIED),
                                      tool="liar", time=0.001)

        neural = start_stub(StubSolver("liar", random_lying))
        try:
            for _ in range(50):
                result = run_portfolio(
                    ARBITER_SPEC,
                    make_config(neural_url=neural.url, mc_url=mc_service.url,
                                mode=Mode.WAIT_ALL),
                    timeout=10.0)
                # No constant-grant circuit satisfies the arbiter spec.
                assert result.chosen.status not in (SynStatus.REALIZABLE,
                                                    SynStatus.UNREALIZABLE)
        finally:
            neural.stop()
