"""Produce a small JSONL dataset for overfitting experiments.

Assembles verified samples from a handful of specification patterns and
keeps only those whose circuits fit the compact integer vocabulary used
by downstream sequence models (all literals <= 199, short token count).
"""

import json
import sys

from neurosynt.datagen import assemble, local_oracle, mine_patterns, GenerationExhausted
from neurosynt.ltl import ConstTrue, DecompSpec, parse_ltl

CORPUS = [
    DecompSpec(inputs=("i_0",), outputs=("o_0", "o_1"),
               guarantees=(parse_ltl("G ((! o_0) | (! o_1))"),
                           parse_ltl("G (i_0 -> F o_0)"),
                           parse_ltl("G (i_0 -> X o_1)"),
                           parse_ltl("G F o_0")),
               assumptions=(ConstTrue(), parse_ltl("G F i_0"))),
    DecompSpec(inputs=("i_0",), outputs=("o_0",),
               guarantees=(parse_ltl("G (o_0 <-> X i_0)"),
                           parse_ltl("G (o_0 -> X (! o_0))")),
               assumptions=(parse_ltl("G (! i_0)"),)),
]


def token_count(aag_text: str) -> int:
    n = 2  # realizability token + trailing sentinel
    for line in aag_text.splitlines():
        fields = line.split()
        if fields and fields[0] == "aag":
            fields = fields[1:]
        elif not (fields and fields[0].isdigit()):
            break
        if any(int(f) > 199 for f in fields):
            return 10 ** 9
        n += len(fields) + 1
    return n


def main(out_path: str, want: int = 100) -> None:
    lib = mine_patterns(CORPUS)
    oracle = local_oracle(max_states=3, budget=5.0)
    seen = {}
    seed = 0
    while len(seen) < want and seed < 5000:
        target = seed % 2 == 0
        try:
            sample = assemble(lib, rng_seed=seed, oracle=oracle,
                              target=target, n_inputs=3, n_outputs=3)
        except GenerationExhausted:
            seed += 1
            continue
        seed += 1
        obj = sample.to_obj()
        if token_count(obj["circuit"]) > 126:
            continue
        spec = obj["spec"]
        if len(spec.get("assumptions", [])) + len(spec["guarantees"]) > 12:
            continue
        key = json.dumps(obj["spec"], sort_keys=True)
        if key in seen:
            continue  # keep the dataset free of conflicting duplicates
        seen[key] = obj
    rows = list(seen.values())
    with open(out_path, "w", encoding="utf-8") as fh:
        for obj in rows:
            fh.write(json.dumps(obj, sort_keys=True) + "\n")
    n_real = sum(1 for r in rows if r["realizable"])
    print(f"wrote {len(rows)} samples ({n_real} realizable) to {out_path}")


if __name__ == "__main__":
    main(sys.argv[1], int(sys.argv[2]) if len(sys.argv) > 2 else 100)
