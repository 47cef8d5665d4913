"""Token vocabularies for specification inputs and circuit targets."""

from __future__ import annotations

PAD = "<pad>"
UNK = "<unk>"
BOS = "<s>"
EOS = "</s>"
NL = "<nl>"

OPERATORS = ["true", "false", "!", "&", "|", "->", "<->", "X", "F", "G",
             "U", "R"]
ATOMS = [f"i_{k}" for k in range(5)] + [f"o_{k}" for k in range(5)]

SPEC_TOKENS = [PAD, UNK] + OPERATORS + ATOMS
SPEC_INDEX = {tok: k for k, tok in enumerate(SPEC_TOKENS)}

# Circuit targets: a realizability token, then the header and definition
# integers of the aag text, with <nl> separating lines.
MAX_INT = 199
TARGET_TOKENS = ([PAD, BOS, EOS, NL, "REALIZABLE", "UNREALIZABLE"]
                 + [str(n) for n in range(MAX_INT + 1)])
TARGET_INDEX = {tok: k for k, tok in enumerate(TARGET_TOKENS)}

SPEC_VOCAB = len(SPEC_TOKENS)
TARGET_VOCAB = len(TARGET_TOKENS)


def spec_token_id(tok: str) -> int:
    return SPEC_INDEX.get(tok, SPEC_INDEX[UNK])


class CircuitTokenError(ValueError):
    pass


def tokenize_circuit(realizable: bool, aag_text: str) -> list[str]:
    """Definition lines of the aag text as integer tokens; symbol table
    and comments are dropped (the service re-attaches interface names)."""
    tokens = ["REALIZABLE" if realizable else "UNREALIZABLE"]
    for line in aag_text.splitlines():
        line = line.strip()
        if not line:
            continue
        fields = line.split()
        if fields[0] == "aag":
            fields = fields[1:]
        elif not fields[0].lstrip("-").isdigit():
            break  # symbol table or comment section
        for f in fields:
            if not f.isdigit() or int(f) > MAX_INT:
                raise CircuitTokenError(f"field {f!r} not representable")
            tokens.append(f)
        tokens.append(NL)
    return tokens


def detokenize_circuit(tokens: list[str]) -> tuple[bool, str]:
    """Inverse of tokenize_circuit; raises CircuitTokenError on malformed
    sequences (candidate beams are allowed to be garbage)."""
    if not tokens or tokens[0] not in ("REALIZABLE", "UNREALIZABLE"):
        raise CircuitTokenError("missing realizability token")
    realizable = tokens[0] == "REALIZABLE"
    lines: list[list[str]] = [[]]
    for tok in tokens[1:]:
        if tok == NL:
            lines.append([])
        elif tok.isdigit():
            lines[-1].append(tok)
        else:
            raise CircuitTokenError(f"unexpected token {tok!r}")
    lines = [ln for ln in lines if ln]
    if not lines or len(lines[0]) != 5:
        raise CircuitTokenError("bad header")
    text = "aag " + " ".join(lines[0]) + "\n"
    for ln in lines[1:]:
        text += " ".join(ln) + "\n"
    return realizable, text
