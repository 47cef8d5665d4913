"""HTTP service exposing the model behind the portfolio wire protocol.

The service answers /synthesize with candidate circuits decoded by the
model.  Every candidate is model checked through a separate verification
endpoint before it is returned, and the verdict travels along in the
response so the caller can see the evidence (and re-check it).
"""

from __future__ import annotations

import json
import threading
import time
from dataclasses import dataclass, field
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer
from pathlib import Path

import requests

from .data import SpecTooLarge, collate, encode_spec
from .decode import beam_search
from .ltl_tokens import LtlParseError
from .train import load_checkpoint
from .vocab import CircuitTokenError, detokenize_circuit

TOOL_NAME = "neural-candidate"


class ModelNotFound(FileNotFoundError):
    pass


def attach_symbols(aag_text: str, inputs: list[str], outputs: list[str],
                   realizable: bool = True) -> str:
    """Append a symbol table naming inputs and outputs, as the wire's
    consumers match interface variables by name.  An unrealizability
    witness is an environment circuit, so its interface is swapped: it
    reads the specification's outputs and drives its inputs."""
    if not realizable:
        inputs, outputs = outputs, inputs
    header = aag_text.splitlines()[0].split()
    n_in, n_out = int(header[2]), int(header[4])
    if n_in != len(inputs) or n_out != len(outputs):
        raise CircuitTokenError(
            f"interface mismatch: circuit has {n_in} inputs/{n_out} outputs,"
            f" expected {len(inputs)}/{len(outputs)}")
    lines = [f"i{k} {name}" for k, name in enumerate(inputs)]
    lines += [f"o{k} {name}" for k, name in enumerate(outputs)]
    return aag_text + "\n".join(lines) + "\n"


def wire_spec(spec_obj: dict) -> dict:
    """Normalize a specification object to the wire's formula-entry shape
    (datasets store formulas as plain infix strings)."""

    def entries(values):
        return [v if isinstance(v, dict)
                else {"formula": v, "notation": "infix"} for v in values]

    return {"semantics": spec_obj.get("semantics", "mealy"),
            "inputs": list(spec_obj["inputs"]),
            "outputs": list(spec_obj["outputs"]),
            "assumptions": entries(spec_obj.get("assumptions", [])),
            "guarantees": entries(spec_obj.get("guarantees", []))}


@dataclass
class SolverState:
    model: object = None
    mc_url: str = ""
    beam_size: int = 3
    alpha: float = 0.5
    timeout: float = 30.0
    ready: bool = False
    lock: threading.Lock = field(default_factory=threading.Lock)


class NeuralSolver:
    """Request logic, independent of the HTTP plumbing."""

    def __init__(self, models_dir: str = "models", model=None):
        self.models_dir = Path(models_dir)
        self.state = SolverState(model=model)

    def setup(self, parameters: dict) -> dict:
        st = self.state
        name = parameters.get("model")
        if name is not None:
            path = self.models_dir / f"{name}.pt"
            if not path.exists():
                return {"success": False,
                        "error": f"model {name!r} not found in"
                                 f" {self.models_dir}"}
            st.model = load_checkpoint(str(path))
        if st.model is None:
            return {"success": False, "error": "no model configured"}
        st.mc_url = str(parameters.get("mc_url", st.mc_url))
        st.beam_size = int(parameters.get("beam_size", st.beam_size))
        st.alpha = float(parameters.get("alpha", st.alpha))
        st.timeout = float(parameters.get("timeout", st.timeout))
        st.ready = True
        return {"success": True}

    def _model_check(self, spec_obj: dict, circuit: str, realizable: bool,
                     deadline: float) -> dict:
        problem = {"parameters": {},
                   "decomp_specification": wire_spec(spec_obj),
                   "circuit": circuit, "realizable": realizable}
        resp = requests.post(self.state.mc_url.rstrip("/") + "/model-check",
                             json=problem,
                             timeout=max(0.1, deadline - time.monotonic()))
        resp.raise_for_status()
        return resp.json()

    def synthesize(self, problem: dict) -> dict:
        st = self.state
        started = time.monotonic()
        deadline = started + st.timeout
        spec_obj = problem["decomp_specification"]

        def solution(status, detail, circuit=None, realizable=None,
                     mc_obj=None):
            syn = {"status": status, "detailed_status": detail,
                   "tool": TOOL_NAME,
                   "time": time.monotonic() - started}
            if circuit is not None:
                syn["circuit"] = circuit
                syn["realizable"] = realizable
            out = {"synthesis_solution": syn, "tool": TOOL_NAME,
                   "time": time.monotonic() - started}
            if mc_obj is not None:
                out["model_checking_solution"] = mc_obj
            return out

        try:
            cfg = st.model.cfg
            encoded = encode_spec(spec_obj, cfg.max_properties,
                                  cfg.max_property_ast)
        except (SpecTooLarge, LtlParseError, KeyError, TypeError) as exc:
            return solution("nonsuccess", f"specification rejected: {exc}")

        with st.lock:
            batch = collate([encoded], None, st.model.cfg.max_tree_depth)
            candidates = beam_search(st.model, batch,
                                     beam_size=st.beam_size, alpha=st.alpha)[0]

        checked = 0
        best = None  # best-ranked parseable candidate, for diagnostics
        for tokens in candidates:
            try:
                realizable, bare = detokenize_circuit(tokens)
                circuit = attach_symbols(bare, spec_obj["inputs"],
                                         spec_obj["outputs"], realizable)
            except CircuitTokenError:
                continue
            if best is None:
                best = (circuit, realizable)
            try:
                verdict = self._model_check(spec_obj, circuit, realizable,
                                            deadline)
            except requests.RequestException as exc:
                return solution(
                    "error",
                    f"model checker at {st.mc_url} unreachable: {exc}")
            checked += 1
            if verdict.get("status") == "satisfied":
                status = "realizable" if realizable else "unrealizable"
                return solution(status, "verified candidate",
                                circuit=circuit, realizable=realizable,
                                mc_obj=verdict)
        detail = (f"no candidate verified ({checked} of"
                  f" {len(candidates)} beams checked)")
        if best is None:
            return solution("nonsuccess", detail)
        return solution("nonsuccess", detail + "; best unverified"
                        " candidate attached",
                        circuit=best[0], realizable=best[1])


class _Handler(BaseHTTPRequestHandler):
    def log_message(self, *args):  # quiet
        pass

    def _reply(self, code: int, obj: dict):
        body = json.dumps(obj, sort_keys=True).encode("utf-8")
        self.send_response(code)
        self.send_header("Content-Type", "application/json")
        self.send_header("Content-Length", str(len(body)))
        self.end_headers()
        self.wfile.write(body)

    def do_GET(self):
        self.server.service._log(self.command, self.path)
        if self.path == "/health":
            self._reply(200, {"status": "ok", "tool": TOOL_NAME})
        else:
            self._reply(404, {"error": "not found"})

    def do_POST(self):
        service = self.server.service
        service._log(self.command, self.path)
        length = int(self.headers.get("Content-Length", 0))
        try:
            obj = json.loads(self.rfile.read(length).decode("utf-8"))
        except (UnicodeDecodeError, json.JSONDecodeError) as exc:
            self._reply(400, {"error": f"bad request body: {exc}"})
            return
        solver = service.solver
        if self.path == "/setup":
            self._reply(200, solver.setup(obj.get("parameters", {})))
        elif self.path == "/synthesize":
            if not solver.state.ready:
                self._reply(409, {"error": "setup required first"})
                return
            try:
                self._reply(200, solver.synthesize(obj))
            except Exception as exc:  # keep the server alive
                self._reply(500, {"error": str(exc)})
        else:
            self._reply(404, {"error": "not found"})


class NeuralService:
    """Threaded HTTP server around a NeuralSolver."""

    def __init__(self, solver: NeuralSolver, host: str = "127.0.0.1",
                 port: int = 0):
        self.solver = solver
        self.message_log: list[tuple[float, str, str]] = []
        self._server = ThreadingHTTPServer((host, port), _Handler)
        self._server.service = self
        self._thread = threading.Thread(target=self._server.serve_forever,
                                        daemon=True)

    def _log(self, method: str, path: str):
        self.message_log.append((time.monotonic(), method, path))

    @property
    def port(self) -> int:
        return self._server.server_address[1]

    @property
    def url(self) -> str:
        host = self._server.server_address[0]
        return f"http://{host}:{self.port}"

    def start(self):
        if not self._thread.is_alive():
            self._thread.start()
        return self

    def stop(self):
        self._server.shutdown()
        self._server.server_close()

    def __enter__(self):
        return self.start()

    def __exit__(self, *exc):
        self.stop()
