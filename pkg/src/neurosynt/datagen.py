"""Training-data pipeline: mine property patterns from a corpus of
specifications, assemble labeled samples with a synthesis oracle in the
loop, augment patterns by fusion, and filter the resulting circuits.
"""

from __future__ import annotations

import json
from collections import Counter
from dataclasses import dataclass
from enum import Enum
from random import Random
from typing import Callable, Optional

from . import mc, synth
from .aiger import AigerCircuit, parse_aag, serialize_aag, stats
from .ltl import (And, Atom, ConstFalse, ConstTrue, DecompSpec, LtlFormula,
                  ast_size, atoms)
from .mc import McStatus
from .synth import SynStatus

MAX_PATTERN_AST = 30
MAX_GUARANTEES = 10
MAX_ASSUMPTIONS = 3
MAX_ASSUMPTION_ATTEMPTS = 7
MAX_ROLE_ATOMS = 15
MAX_CIRCUIT_VAR = 60
BUCKET_SHARE = 0.2
ATOM_BIAS = 4


class OracleUnavailable(RuntimeError):
    pass


class GenerationExhausted(RuntimeError):
    pass


class PatternKind(Enum):
    ASSUMPTION = "assumption"
    GUARANTEE = "guarantee"


@dataclass(frozen=True)
class Pattern:
    kind: PatternKind
    template: LtlFormula  # over placeholder atoms pi_k / po_k
    n_in: int
    n_out: int


@dataclass(frozen=True)
class PatternLibrary:
    assumptions: tuple[Pattern, ...]
    guarantees: tuple[Pattern, ...]

    def of_kind(self, kind: PatternKind) -> tuple[Pattern, ...]:
        return (self.assumptions if kind is PatternKind.ASSUMPTION
                else self.guarantees)


@dataclass(frozen=True)
class DatasetSample:
    spec: DecompSpec
    circuit: AigerCircuit
    realizable: bool

    def to_obj(self) -> dict:
        return {"spec": self.spec.to_dict(),
                "circuit": serialize_aag(self.circuit),
                "realizable": self.realizable}

    @classmethod
    def from_obj(cls, obj: dict) -> "DatasetSample":
        return cls(spec=DecompSpec.from_dict(obj["spec"]),
                   circuit=parse_aag(obj["circuit"]),
                   realizable=obj["realizable"])


def map_atoms(f: LtlFormula, mapping: dict[str, str]) -> LtlFormula:
    if isinstance(f, Atom):
        return Atom(mapping.get(f.name, f.name))
    if isinstance(f, (ConstTrue, ConstFalse)):
        return f
    if hasattr(f, "operand"):
        return type(f)(map_atoms(f.operand, mapping))
    return type(f)(map_atoms(f.left, mapping), map_atoms(f.right, mapping))


def _first_occurrence_atoms(f: LtlFormula) -> list[str]:
    out: list[str] = []

    def walk(g: LtlFormula):
        if isinstance(g, Atom):
            if g.name not in out:
                out.append(g.name)
        elif hasattr(g, "operand"):
            walk(g.operand)
        elif hasattr(g, "left"):
            walk(g.left)
            walk(g.right)

    walk(f)
    return out


def _to_pattern(f: LtlFormula, kind: PatternKind,
                inputs: frozenset[str]) -> Optional[Pattern]:
    names = _first_occurrence_atoms(f)
    in_names = [n for n in names if n in inputs]
    out_names = [n for n in names if n not in inputs]
    if len(in_names) > MAX_ROLE_ATOMS or len(out_names) > MAX_ROLE_ATOMS:
        return None
    if ast_size(f) > MAX_PATTERN_AST:
        return None
    mapping = {n: f"pi_{k}" for k, n in enumerate(in_names)}
    mapping.update({n: f"po_{k}" for k, n in enumerate(out_names)})
    return Pattern(kind=kind, template=map_atoms(f, mapping),
                   n_in=len(in_names), n_out=len(out_names))


def mine_patterns(corpus: list[DecompSpec]) -> PatternLibrary:
    """One pattern per structurally distinct property after placeholder
    renaming in first-occurrence order."""
    seen: dict[PatternKind, dict] = {k: {} for k in PatternKind}
    for spec in corpus:
        inputs = frozenset(spec.inputs)
        for kind, formulas in ((PatternKind.ASSUMPTION, spec.assumptions),
                               (PatternKind.GUARANTEE, spec.guarantees)):
            for f in formulas:
                p = _to_pattern(f, kind, inputs)
                if p is not None:
                    seen[kind].setdefault(p.template, p)
    return PatternLibrary(
        assumptions=tuple(seen[PatternKind.ASSUMPTION].values()),
        guarantees=tuple(seen[PatternKind.GUARANTEE].values()))


# -- sampling ------------------------------------------------------------


def sample_atom(rng: Random, candidates: list[str], used: set[str]) -> str:
    """Pick a candidate; atoms already used in the partial specification
    carry a sampling weight of ATOM_BIAS against 1 for fresh ones."""
    weights = [ATOM_BIAS if c in used else 1 for c in candidates]
    return rng.choices(candidates, weights=weights, k=1)[0]


def instantiate(rng: Random, pattern: Pattern, input_pool: list[str],
                output_pool: list[str], used: set[str]) -> LtlFormula:
    mapping = {}
    for k in range(pattern.n_in):
        mapping[f"pi_{k}"] = sample_atom(rng, input_pool, used)
    for k in range(pattern.n_out):
        mapping[f"po_{k}"] = sample_atom(rng, output_pool, used)
    return map_atoms(pattern.template, mapping)


def local_oracle(max_states: int = 3, budget: float = 5.0) -> Callable:
    """In-process labeling oracle backed by the bounded synthesizer."""

    def oracle(spec: DecompSpec):
        result = synth.synthesize(spec, max_states=max_states, budget=budget)
        circuit = serialize_aag(result.circuit) if result.circuit else None
        return SynStatusAnswer(result.status, circuit)

    return oracle


def wire_oracle(url: str, timeout: float = 5.0) -> Callable:
    """Labeling oracle behind a wire-protocol /synthesize endpoint."""
    from . import services
    from .wire import SynProblem

    def oracle(spec: DecompSpec):
        try:
            sol = services.synthesize(
                url, SynProblem(spec, parameters={"timeout": str(timeout)}),
                deadline=timeout + 5.0)
        except (services.ConnectionRefused, services.ProtocolError) as exc:
            raise OracleUnavailable(str(exc))
        except services.DeadlineExceeded:
            return SynStatusAnswer(SynStatus.TIMEOUT, None)
        return SynStatusAnswer(sol.status, sol.circuit)

    return oracle


@dataclass(frozen=True)
class SynStatusAnswer:
    status: SynStatus
    circuit: Optional[str]


def _narrow(assumptions: tuple, guarantees: tuple, input_pool: list[str],
            output_pool: list[str]) -> DecompSpec:
    """Declare only the atoms the formulas use; unused pool atoms would
    otherwise blow up the oracle's input alphabet."""
    used: set[str] = set()
    for f in assumptions + guarantees:
        used |= atoms(f)
    return DecompSpec(
        inputs=tuple(n for n in input_pool if n in used),
        outputs=tuple(n for n in output_pool if n in used),
        assumptions=assumptions, guarantees=guarantees)


def assemble(lib: PatternLibrary, rng_seed: int, oracle: Callable,
             target: bool, n_inputs: int = 5,
             n_outputs: int = 5) -> DatasetSample:
    """Build one labeled sample; target True asks for a realizable spec.

    Guarantees are added until the oracle reports unrealizable, then
    assumptions until it flips back, and so on; the returned sample is
    the most recent specification whose verdict matches the target.
    """
    if not lib.guarantees:
        raise GenerationExhausted("pattern library has no guarantees")
    rng = Random(rng_seed)
    input_pool = [f"i_{k}" for k in range(n_inputs)]
    output_pool = [f"o_{k}" for k in range(n_outputs)]
    assumptions: tuple = ()
    guarantees: tuple = ()
    used: set[str] = set()
    history: list = []  # (spec, realizable, aag text)
    assumption_failures = 0
    verdict: Optional[bool] = None
    calls = 0

    def query(spec: DecompSpec) -> SynStatusAnswer:
        nonlocal calls
        calls += 1
        answer = oracle(spec)
        if answer.status is SynStatus.TIMEOUT:
            raise _OracleTimeout
        return answer

    try:
        while calls < 200:
            if verdict in (None, True):
                # Guarantee phase: tighten until unrealizable.
                if len(guarantees) >= MAX_GUARANTEES:
                    break
                g = instantiate(rng, rng.choice(lib.guarantees),
                                input_pool, output_pool, used)
                candidate = _narrow(assumptions, guarantees + (g,),
                                    input_pool, output_pool)
                answer = query(candidate)
                if answer.status not in (SynStatus.REALIZABLE,
                                         SynStatus.UNREALIZABLE):
                    continue
                guarantees += (g,)
                used |= atoms(g)
                verdict = answer.status is SynStatus.REALIZABLE
                history.append((candidate, verdict, answer.circuit))
            else:
                # Assumption phase: relax until realizable again.
                if not lib.assumptions:
                    break
                if len(assumptions) >= MAX_ASSUMPTIONS:
                    break
                if assumption_failures >= MAX_ASSUMPTION_ATTEMPTS:
                    break
                a = instantiate(rng, rng.choice(lib.assumptions),
                                input_pool, output_pool, used)
                candidate = _narrow(assumptions + (a,), guarantees,
                                    input_pool, output_pool)
                answer = query(candidate)
                if answer.status is SynStatus.REALIZABLE:
                    assumptions += (a,)
                    used |= atoms(a)
                    verdict = True
                    assumption_failures = 0
                    history.append((candidate, True, answer.circuit))
                else:
                    assumption_failures += 1
    except _OracleTimeout:
        pass

    for spec, realizable, circuit in reversed(history):
        if realizable == target and circuit is not None:
            return DatasetSample(spec=spec, circuit=parse_aag(circuit),
                                 realizable=realizable)
    raise GenerationExhausted(
        f"no {'realizable' if target else 'unrealizable'} spec was mined")


class _OracleTimeout(Exception):
    pass


# -- augmentation --------------------------------------------------------


def augment(lib: PatternLibrary, rng_seed: int,
            kind: PatternKind = PatternKind.GUARANTEE) -> Pattern:
    """Fuse same-kind patterns into one conjunction, sharing placeholders
    with the usual bias, until the AST-size cap would be exceeded."""
    pool = lib.of_kind(kind)
    if not pool:
        raise GenerationExhausted(f"no {kind.value} patterns to fuse")
    rng = Random(rng_seed)
    fused = rng.choice(pool)
    template, n_in, n_out = fused.template, fused.n_in, fused.n_out
    for _ in range(32):
        if ast_size(template) >= MAX_PATTERN_AST:
            break
        extra = rng.choice(pool)
        if ast_size(template) + ast_size(extra.template) + 1 > MAX_PATTERN_AST:
            break
        mapping = {}
        for k in range(extra.n_in):
            existing = [f"pi_{j}" for j in range(n_in)]
            pick = sample_atom(rng, existing + [f"pi_{n_in}"], set(existing))
            mapping[f"pi_{k}"] = pick
            if pick == f"pi_{n_in}":
                n_in += 1
        for k in range(extra.n_out):
            existing = [f"po_{j}" for j in range(n_out)]
            pick = sample_atom(rng, existing + [f"po_{n_out}"], set(existing))
            mapping[f"po_{k}"] = pick
            if pick == f"po_{n_out}":
                n_out += 1
        template = And(template, map_atoms(extra.template, mapping))
    return Pattern(kind=kind, template=template, n_in=n_in, n_out=n_out)


# -- filtering and stats -------------------------------------------------


def filter_circuits(samples: list[DatasetSample]) -> list[DatasetSample]:
    """Drop oversized circuits; cap each AND-count bucket at a fixed
    share of the running output, greedily in stream order."""
    kept: list[DatasetSample] = []
    buckets: Counter = Counter()
    for sample in samples:
        s = stats(sample.circuit)
        if s["max_var"] > MAX_CIRCUIT_VAR:
            continue
        b = buckets[s["num_ands"]]
        if b + 1 > max(1, BUCKET_SHARE * (len(kept) + 1)):
            continue
        kept.append(sample)
        buckets[s["num_ands"]] += 1
    return kept


def dataset_stats(samples: list[DatasetSample]) -> dict:
    num_aps: Counter = Counter()
    max_vars: Counter = Counter()
    num_latches: Counter = Counter()
    property_sizes: list[float] = []
    realizable = 0
    for sample in samples:
        names: set[str] = set()
        for f in sample.spec.assumptions + sample.spec.guarantees:
            names |= atoms(f)
        num_aps[len(names)] += 1
        s = stats(sample.circuit)
        max_vars[s["max_var"]] += 1
        num_latches[s["num_latches"]] += 1
        props = sample.spec.assumptions + sample.spec.guarantees
        if props:
            property_sizes.append(
                sum(ast_size(f) for f in props) / len(props))
        realizable += sample.realizable
    return {
        "count": len(samples),
        "realizable": realizable,
        "unrealizable": len(samples) - realizable,
        "num_aps": dict(sorted(num_aps.items())),
        "max_var": dict(sorted(max_vars.items())),
        "num_latches": dict(sorted(num_latches.items())),
        "mean_property_size": (sum(property_sizes) / len(property_sizes)
                               if property_sizes else 0.0),
    }


def verify_sample(sample: DatasetSample, budget: float = 10.0) -> bool:
    solution = mc.check(sample.circuit, sample.spec,
                        realizable_claim=sample.realizable, budget=budget)
    return solution.status is McStatus.SATISFIED


def write_dataset(samples: list[DatasetSample], path: str) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for sample in samples:
            fh.write(json.dumps(sample.to_obj(), sort_keys=True) + "\n")


def read_dataset(path: str) -> list[DatasetSample]:
    out = []
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            if line.strip():
                out.append(DatasetSample.from_obj(json.loads(line)))
    return out
