"""Beam search over circuit token sequences."""

from __future__ import annotations

import torch

from . import vocab
from .model import HierarchicalTransformer
from .vocab import TARGET_INDEX, TARGET_TOKENS


def beam_search(model: HierarchicalTransformer, batch: dict,
                beam_size: int = 3, alpha: float = 1.0,
                max_len: int | None = None) -> list[list[list[str]]]:
    """Decode each batch element into up to beam_size candidate token
    lists (best first), scored by log-probability divided by length to
    the power alpha.  beam_size=1 is greedy decoding."""
    if max_len is None:
        max_len = model.cfg.max_target_tokens
    bos, eos = TARGET_INDEX[vocab.BOS], TARGET_INDEX[vocab.EOS]
    model.eval()
    with torch.no_grad():
        memory, memory_pad = model.encode(batch)
        results = []
        for i in range(memory.shape[0]):
            mem = memory[i:i + 1]
            pad = memory_pad[i:i + 1]
            beams = [([bos], 0.0)]  # (token ids, summed logprob)
            finished: list[tuple[list[int], float]] = []
            while beams and len(beams[0][0]) < max_len:
                seqs = torch.tensor([b[0] for b in beams])
                logits = model.decode(
                    seqs, mem.expand(len(beams), -1, -1),
                    pad.expand(len(beams), -1))
                logprobs = torch.log_softmax(logits[:, -1], dim=-1)
                scored = []
                for (seq, score), row in zip(beams, logprobs):
                    top = torch.topk(row, beam_size)
                    for lp, tok in zip(top.values, top.indices):
                        scored.append((seq + [int(tok)], score + float(lp)))
                scored.sort(key=lambda s: s[1], reverse=True)
                beams = []
                for seq, score in scored[:beam_size]:
                    if seq[-1] == eos:
                        finished.append((seq, score))
                    else:
                        beams.append((seq, score))
            finished.extend(beams)
            finished.sort(key=lambda s: s[1] / max(1, len(s[0]) - 1) ** alpha,
                          reverse=True)
            results.append([
                [TARGET_TOKENS[t] for t in seq[1:-1 if seq[-1] == eos else None]]
                for seq, _ in finished[:beam_size]])
    return results
