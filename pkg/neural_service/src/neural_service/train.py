"""Training loop with warmup learning-rate schedule."""

from __future__ import annotations

import random

import torch
from torch import nn

from . import vocab
from .data import collate
from .model import HierarchicalTransformer, ModelConfig


def lr_at(step: int, d_model: int, warmup: int) -> float:
    """Inverse-sqrt schedule with linear warmup."""
    step = max(1, step)
    return d_model ** -0.5 * min(step ** -0.5, step * warmup ** -1.5)


def train(model: HierarchicalTransformer, specs, targets, steps: int,
          batch_size: int = 16, warmup: int = 50, seed: int = 0,
          log_every: int = 0) -> list[float]:
    """Teacher-forced cross-entropy training; returns per-step losses."""
    cfg = model.cfg
    rng = random.Random(seed)
    opt = torch.optim.Adam(model.parameters(), lr=1.0,
                           betas=(0.9, 0.98), eps=1e-9)
    sched = torch.optim.lr_scheduler.LambdaLR(
        opt, lambda s: lr_at(s + 1, cfg.d_model, warmup))
    loss_fn = nn.CrossEntropyLoss(
        ignore_index=vocab.TARGET_INDEX[vocab.PAD])
    losses = []
    model.train()
    indices = list(range(len(specs)))
    for step in range(steps):
        picks = [rng.choice(indices) for _ in range(batch_size)]
        batch = collate([specs[i] for i in picks],
                        [targets[i] for i in picks], cfg.max_tree_depth)
        logits = model(batch)
        loss = loss_fn(logits.reshape(-1, vocab.TARGET_VOCAB),
                       batch["target_out"].reshape(-1))
        opt.zero_grad()
        loss.backward()
        opt.step()
        sched.step()
        losses.append(float(loss.detach()))
        if log_every and (step + 1) % log_every == 0:
            window = losses[-log_every:]
            print(f"step {step + 1}: loss {sum(window) / len(window):.4f}")
    return losses


def save_checkpoint(path: str, model: HierarchicalTransformer) -> None:
    torch.save({"config": vars(model.cfg),
                "state": model.state_dict()}, path)


def load_checkpoint(path: str) -> HierarchicalTransformer:
    blob = torch.load(path, map_location="cpu", weights_only=True)
    model = HierarchicalTransformer(ModelConfig(**blob["config"]))
    model.load_state_dict(blob["state"])
    model.eval()
    return model


def exact_match_rate(model: HierarchicalTransformer, specs, targets,
                     batch_size: int = 16) -> float:
    """Fraction of samples whose greedy decode reproduces the target."""
    from .decode import beam_search
    hits = 0
    for start in range(0, len(specs), batch_size):
        chunk = specs[start:start + batch_size]
        batch = collate(chunk, None, model.cfg.max_tree_depth)
        decoded = beam_search(model, batch, beam_size=1)
        for k, cands in enumerate(decoded):
            want = [vocab.TARGET_TOKENS[t]
                    for t in targets[start + k][1:-1]]
            if cands and cands[0] == want:
                hits += 1
    return hits / len(specs)
