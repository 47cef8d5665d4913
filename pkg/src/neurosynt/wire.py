"""JSON message schemas for the solver services.

Every message encodes to a JSON object with a fixed set of field names;
optional fields are omitted when absent and unknown fields are ignored
on decode, so services of different versions can interoperate.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Optional

from .ltl import DecompSpec, LassoTrace, Notation, Semantics, parse_ltl, serialize_ltl
from .mc import McSolution, McStatus
from .synth import SynStatus


class DecodeError(ValueError):
    def __init__(self, field_name: str, reason: str):
        super().__init__(f"field {field_name!r}: {reason}")
        self.field = field_name


def _require(obj: dict, name: str, types):
    if name not in obj:
        raise DecodeError(name, "missing")
    value = obj[name]
    if not isinstance(value, types):
        raise DecodeError(name, f"expected {types}, got {type(value).__name__}")
    return value


def _optional(obj: dict, name: str, types):
    if name not in obj or obj[name] is None:
        return None
    return _require(obj, name, types)


# -- specification payload ----------------------------------------------


def spec_to_wire(spec: DecompSpec, notation: Notation = Notation.INFIX) -> dict:
    def formulas(fs):
        return [{"formula": serialize_ltl(f, notation), "notation": notation.value}
                for f in fs]

    return {
        "semantics": spec.semantics.value,
        "inputs": list(spec.inputs),
        "outputs": list(spec.outputs),
        "assumptions": formulas(spec.assumptions),
        "guarantees": formulas(spec.guarantees),
    }


def spec_from_wire(obj: dict) -> DecompSpec:
    if not isinstance(obj, dict):
        raise DecodeError("decomp_specification", "expected object")

    def formulas(name):
        out = []
        for entry in _require(obj, name, list):
            if not isinstance(entry, dict):
                raise DecodeError(name, "entries must be objects")
            text = _require(entry, "formula", str)
            try:
                notation = Notation(_require(entry, "notation", str))
            except ValueError:
                raise DecodeError("notation", f"unknown value {entry['notation']!r}")
            try:
                out.append(parse_ltl(text, notation))
            except ValueError as exc:
                raise DecodeError("formula", str(exc))
        return tuple(out)

    try:
        semantics = Semantics(obj.get("semantics", "mealy"))
    except ValueError:
        raise DecodeError("semantics", f"unknown value {obj['semantics']!r}")
    try:
        return DecompSpec(
            inputs=tuple(_require(obj, "inputs", list)),
            outputs=tuple(_require(obj, "outputs", list)),
            assumptions=formulas("assumptions"),
            guarantees=formulas("guarantees"),
            semantics=semantics,
        )
    except DecodeError:
        raise
    except ValueError as exc:
        raise DecodeError("decomp_specification", str(exc))


# -- messages ------------------------------------------------------------


@dataclass(frozen=True)
class SetupRequest:
    parameters: dict = field(default_factory=dict)

    def to_obj(self) -> dict:
        return {"parameters": dict(self.parameters)}

    @classmethod
    def from_obj(cls, obj: dict) -> "SetupRequest":
        return cls(parameters=_require(obj, "parameters", dict))


@dataclass(frozen=True)
class SetupResponse:
    success: bool
    error: Optional[str] = None

    def to_obj(self) -> dict:
        out = {"success": self.success}
        if self.error is not None:
            out["error"] = self.error
        return out

    @classmethod
    def from_obj(cls, obj: dict) -> "SetupResponse":
        return cls(success=_require(obj, "success", bool),
                   error=_optional(obj, "error", str))


@dataclass(frozen=True)
class SynProblem:
    decomp_specification: DecompSpec
    parameters: dict = field(default_factory=dict)

    def to_obj(self) -> dict:
        return {"parameters": dict(self.parameters),
                "decomp_specification": spec_to_wire(self.decomp_specification)}

    @classmethod
    def from_obj(cls, obj: dict) -> "SynProblem":
        return cls(
            decomp_specification=spec_from_wire(
                _require(obj, "decomp_specification", dict)),
            parameters=_require(obj, "parameters", dict))


@dataclass(frozen=True)
class SynSolution:
    status: SynStatus
    circuit: Optional[str] = None
    realizable: Optional[bool] = None
    detailed_status: str = ""
    tool: str = ""
    time: Optional[float] = None

    def __post_init__(self):
        if self.circuit is not None and self.realizable is None:
            raise ValueError("a solution carrying a circuit must state realizability")

    def to_obj(self) -> dict:
        out = {"status": self.status.value,
               "detailed_status": self.detailed_status,
               "tool": self.tool}
        if self.circuit is not None:
            out["circuit"] = self.circuit
        if self.realizable is not None:
            out["realizable"] = self.realizable
        if self.time is not None:
            out["time"] = self.time
        return out

    @classmethod
    def from_obj(cls, obj: dict) -> "SynSolution":
        try:
            status = SynStatus(_require(obj, "status", str))
        except ValueError:
            raise DecodeError("status", f"unknown value {obj['status']!r}")
        time = _optional(obj, "time", (int, float))
        try:
            return cls(
                status=status,
                circuit=_optional(obj, "circuit", str),
                realizable=_optional(obj, "realizable", bool),
                detailed_status=obj.get("detailed_status", ""),
                tool=obj.get("tool", ""),
                time=float(time) if time is not None else None)
        except ValueError as exc:
            raise DecodeError("circuit", str(exc))


def mc_solution_to_obj(sol: McSolution) -> dict:
    out = {"status": sol.status.value,
           "detailed_status": sol.detail,
           "time": sol.time}
    if sol.counterexample is not None:
        out["counterexample"] = sol.counterexample.to_dict()
    return out


def mc_solution_from_obj(obj: dict) -> McSolution:
    try:
        status = McStatus(_require(obj, "status", str))
    except ValueError:
        raise DecodeError("status", f"unknown value {obj['status']!r}")
    cex = _optional(obj, "counterexample", dict)
    try:
        return McSolution(
            status=status,
            counterexample=LassoTrace.from_dict(cex) if cex is not None else None,
            time=float(obj.get("time", 0.0)),
            detail=obj.get("detailed_status", ""))
    except (ValueError, KeyError) as exc:
        raise DecodeError("counterexample", str(exc))


@dataclass(frozen=True)
class UnsoundSynSolution:
    synthesis_solution: SynSolution
    model_checking_solution: Optional[McSolution] = None
    tool: str = ""
    time: Optional[float] = None

    def to_obj(self) -> dict:
        out = {"synthesis_solution": self.synthesis_solution.to_obj(),
               "tool": self.tool}
        if self.model_checking_solution is not None:
            out["model_checking_solution"] = mc_solution_to_obj(
                self.model_checking_solution)
        if self.time is not None:
            out["time"] = self.time
        return out

    @classmethod
    def from_obj(cls, obj: dict) -> "UnsoundSynSolution":
        mc_obj = _optional(obj, "model_checking_solution", dict)
        time = _optional(obj, "time", (int, float))
        return cls(
            synthesis_solution=SynSolution.from_obj(
                _require(obj, "synthesis_solution", dict)),
            model_checking_solution=(mc_solution_from_obj(mc_obj)
                                     if mc_obj is not None else None),
            tool=obj.get("tool", ""),
            time=float(time) if time is not None else None)


@dataclass(frozen=True)
class McProblem:
    decomp_specification: DecompSpec
    circuit: str
    realizable: bool
    parameters: dict = field(default_factory=dict)

    def to_obj(self) -> dict:
        return {"parameters": dict(self.parameters),
                "decomp_specification": spec_to_wire(self.decomp_specification),
                "circuit": self.circuit,
                "realizable": self.realizable}

    @classmethod
    def from_obj(cls, obj: dict) -> "McProblem":
        return cls(
            decomp_specification=spec_from_wire(
                _require(obj, "decomp_specification", dict)),
            circuit=_require(obj, "circuit", str),
            realizable=_require(obj, "realizable", bool),
            parameters=_require(obj, "parameters", dict))


@dataclass(frozen=True)
class McResponse:
    """Wrapper for an McSolution on the wire, with the answering tool."""

    solution: McSolution
    tool: str = ""

    def to_obj(self) -> dict:
        out = mc_solution_to_obj(self.solution)
        out["tool"] = self.tool
        return out

    @classmethod
    def from_obj(cls, obj: dict) -> "McResponse":
        return cls(solution=mc_solution_from_obj(obj), tool=obj.get("tool", ""))


def encode(msg) -> bytes:
    return json.dumps(msg.to_obj(), sort_keys=True).encode("utf-8")


def decode(data: bytes, msg_type):
    try:
        obj = json.loads(data.decode("utf-8"))
    except (UnicodeDecodeError, json.JSONDecodeError) as exc:
        raise DecodeError("<body>", str(exc))
    if not isinstance(obj, dict):
        raise DecodeError("<body>", "expected a JSON object")
    return msg_type.from_obj(obj)
