"""HTTP services and clients for the solver wire protocol.

A WireService exposes one solver endpoint plus /setup and /health on a
background thread. Problem requests made before a successful setup are
rejected, and every request is appended to a timestamped message log so
call orderings can be asserted in tests.
"""

from __future__ import annotations

import json
import threading
import time
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer

import requests

from . import mc, synth
from .aiger import AigerFormatError, parse_aag, serialize_aag
from .wire import (DecodeError, McProblem, McResponse, SetupRequest,
                   SetupResponse, SynProblem, SynSolution, UnsoundSynSolution,
                   decode, encode)


class ConnectionRefused(ConnectionError):
    pass


class DeadlineExceeded(TimeoutError):
    pass


class ProtocolError(ValueError):
    pass


# -- built-in solver backends -------------------------------------------


class BoundedSynthesisSolver:
    """Sound synthesis backend; answers /synthesize with SynSolution."""

    tool = "bounded-synth"
    endpoint = "/synthesize"
    request_type = SynProblem

    def __init__(self, default_timeout: float = 10.0, max_states: int = 4):
        self.default_timeout = default_timeout
        self.max_states = max_states

    def setup(self, parameters: dict) -> SetupResponse:
        try:
            self.default_timeout = float(
                parameters.get("timeout", self.default_timeout))
            self.max_states = int(parameters.get("max_states", self.max_states))
        except ValueError as exc:
            return SetupResponse(False, error=str(exc))
        return SetupResponse(True)

    def handle(self, problem: SynProblem) -> SynSolution:
        budget = float(problem.parameters.get("timeout", self.default_timeout))
        result = synth.synthesize(problem.decomp_specification,
                                  max_states=self.max_states, budget=budget)
        circuit = serialize_aag(result.circuit) if result.circuit else None
        return SynSolution(
            status=result.status,
            circuit=circuit,
            realizable=result.realizable,
            detailed_status=result.detail,
            tool=self.tool,
            time=result.time)


class ModelCheckingSolver:
    """Answers /model-check with an McResponse."""

    tool = "mc"
    endpoint = "/model-check"
    request_type = McProblem

    def __init__(self, default_timeout: float = 10.0):
        self.default_timeout = default_timeout

    def setup(self, parameters: dict) -> SetupResponse:
        try:
            self.default_timeout = float(
                parameters.get("timeout", self.default_timeout))
        except ValueError as exc:
            return SetupResponse(False, error=str(exc))
        return SetupResponse(True)

    def handle(self, problem: McProblem) -> McResponse:
        budget = float(problem.parameters.get("timeout", self.default_timeout))
        try:
            circuit = parse_aag(problem.circuit)
        except AigerFormatError as exc:
            return McResponse(
                mc.McSolution(mc.McStatus.INVALID, detail=str(exc)),
                tool=self.tool)
        solution = mc.check(circuit, problem.decomp_specification,
                            realizable_claim=problem.realizable, budget=budget)
        return McResponse(solution, tool=self.tool)


# -- server --------------------------------------------------------------


class _Handler(BaseHTTPRequestHandler):
    protocol_version = "HTTP/1.1"

    def log_message(self, fmt, *args):
        pass

    def _reply(self, code: int, payload: dict | bytes):
        body = payload if isinstance(payload, bytes) else \
            json.dumps(payload, sort_keys=True).encode("utf-8")
        self.send_response(code)
        self.send_header("Content-Type", "application/json")
        self.send_header("Content-Length", str(len(body)))
        self.end_headers()
        self.wfile.write(body)

    def do_GET(self):
        service: WireService = self.server.service
        service._log("GET", self.path)
        if self.path == "/health":
            self._reply(200, {"status": "ok", "tool": service.solver.tool})
        else:
            self._reply(404, {"error": f"unknown path {self.path}"})

    def do_POST(self):
        service: WireService = self.server.service
        service._log("POST", self.path)
        length = int(self.headers.get("Content-Length", 0))
        body = self.rfile.read(length)
        if self.path == "/setup":
            try:
                request = decode(body, SetupRequest)
            except DecodeError as exc:
                self._reply(400, {"success": False, "error": str(exc)})
                return
            response = service.solver.setup(request.parameters)
            if response.success:
                service.ready = True
            self._reply(200, encode(response))
            return
        if self.path != service.solver.endpoint:
            self._reply(404, {"error": f"unknown path {self.path}"})
            return
        if not service.ready:
            self._reply(409, {"error": "setup required before problem requests"})
            return
        try:
            problem = decode(body, service.solver.request_type)
        except DecodeError as exc:
            self._reply(400, {"error": str(exc)})
            return
        try:
            self._reply(200, encode(service.solver.handle(problem)))
        except Exception as exc:  # noqa: BLE001 - surface as a protocol error
            self._reply(500, {"error": f"{type(exc).__name__}: {exc}"})


class WireService:
    """One solver behind an HTTP server on a daemon thread."""

    def __init__(self, solver, port: int = 0):
        self.solver = solver
        self.ready = False
        self.message_log: list[tuple[float, str, str]] = []
        self._log_lock = threading.Lock()
        self._server = ThreadingHTTPServer(("127.0.0.1", port), _Handler)
        self._server.service = self
        self._thread = threading.Thread(target=self._server.serve_forever,
                                        daemon=True)

    def _log(self, method: str, path: str):
        with self._log_lock:
            self.message_log.append((time.monotonic(), method, path))

    @property
    def port(self) -> int:
        return self._server.server_address[1]

    @property
    def url(self) -> str:
        return f"http://127.0.0.1:{self.port}"

    def start(self) -> "WireService":
        if not self._thread.is_alive():
            self._thread.start()
        return self

    def stop(self):
        self._server.shutdown()
        self._server.server_close()
        self._thread.join(timeout=5)

    def __enter__(self):
        return self.start()

    def __exit__(self, *exc):
        self.stop()


def serve(role: str, port: int = 0, **kwargs) -> WireService:
    solvers = {"symbolic": BoundedSynthesisSolver,
               "mc": ModelCheckingSolver}
    if role not in solvers:
        raise ValueError(f"unknown role {role!r}; expected one of {sorted(solvers)}")
    return WireService(solvers[role](**kwargs), port=port).start()


# -- client --------------------------------------------------------------


def call(url: str, msg, response_type, deadline: float):
    """POST an encoded message; decode the reply as response_type.

    deadline is in seconds from now and covers the whole exchange.
    """
    if deadline <= 0:
        raise DeadlineExceeded(f"no time left for {url}")
    try:
        reply = requests.post(
            url, data=encode(msg), timeout=deadline,
            headers={"Content-Type": "application/json"})
    except requests.exceptions.Timeout as exc:
        raise DeadlineExceeded(str(exc))
    except requests.exceptions.ConnectionError as exc:
        raise ConnectionRefused(f"{url}: {exc}")
    if reply.status_code != 200:
        raise ProtocolError(f"{url} answered {reply.status_code}: "
                            f"{reply.text[:200]}")
    try:
        return decode(reply.content, response_type)
    except DecodeError as exc:
        raise ProtocolError(f"{url}: {exc}")


def setup(base_url: str, parameters: dict, deadline: float = 5.0) -> SetupResponse:
    return call(base_url + "/setup", SetupRequest(parameters),
                SetupResponse, deadline)


def synthesize(base_url: str, problem: SynProblem, deadline: float,
               unsound: bool = False):
    response_type = UnsoundSynSolution if unsound else SynSolution
    return call(base_url + "/synthesize", problem, response_type, deadline)


def model_check(base_url: str, problem: McProblem,
                deadline: float) -> McResponse:
    return call(base_url + "/model-check", problem, McResponse, deadline)


def health(base_url: str, deadline: float = 2.0) -> bool:
    try:
        reply = requests.get(base_url + "/health", timeout=deadline)
    except requests.exceptions.RequestException:
        return False
    return reply.status_code == 200
