"""Dataset loading and tensor assembly for training and inference."""

from __future__ import annotations

import json
from dataclasses import dataclass

import torch

from . import vocab
from .ltl_prefix import parse_prefix
from .ltl_tokens import Node, parse_infix, prefix_tokens, tree_positions
from .vocab import (BOS, EOS, TARGET_INDEX, spec_token_id, tokenize_circuit)


class SpecTooLarge(ValueError):
    pass


@dataclass(frozen=True)
class EncodedProperty:
    role: int  # 0 assumption, 1 guarantee
    token_ids: tuple[int, ...]
    paths: tuple[tuple[int, ...], ...]


@dataclass(frozen=True)
class EncodedSpec:
    properties: tuple[EncodedProperty, ...]


def _formula_node(entry) -> Node:
    if isinstance(entry, str):
        return parse_infix(entry)
    text = entry["formula"]
    if entry.get("notation", "infix") == "prefix":
        return parse_prefix(text)
    return parse_infix(text)


def encode_spec(spec_obj: dict, max_properties: int,
                max_property_ast: int) -> EncodedSpec:
    properties = []
    for role, key in ((0, "assumptions"), (1, "guarantees")):
        for entry in spec_obj.get(key, []):
            node = _formula_node(entry)
            tokens = prefix_tokens(node)
            if len(tokens) > max_property_ast:
                raise SpecTooLarge(
                    f"property has {len(tokens)} nodes > {max_property_ast}")
            properties.append(EncodedProperty(
                role=role,
                token_ids=tuple(spec_token_id(t) for t in tokens),
                paths=tuple(tree_positions(node))))
    if len(properties) > max_properties:
        raise SpecTooLarge(
            f"{len(properties)} properties > {max_properties}")
    if not properties:
        raise SpecTooLarge("specification has no properties")
    return EncodedSpec(tuple(properties))


def path_vector(path: tuple[int, ...], max_depth: int) -> list[float]:
    """Two slots per tree level, one-hot on the child index taken."""
    vec = [0.0] * (2 * max_depth)
    for depth, child in enumerate(path[:max_depth]):
        vec[2 * depth + min(child, 1)] = 1.0
    return vec


def encode_target(realizable: bool, aag_text: str,
                  max_target_tokens: int) -> list[int]:
    tokens = [BOS] + tokenize_circuit(realizable, aag_text) + [EOS]
    if len(tokens) > max_target_tokens:
        raise SpecTooLarge(
            f"target has {len(tokens)} tokens > {max_target_tokens}")
    return [TARGET_INDEX[t] for t in tokens]


def collate(specs: list[EncodedSpec], targets: list[list[int]] | None,
            max_depth: int):
    """Pad a batch into tensors.

    Returns a dict with spec tokens [B,P,L], tree encodings [B,P,L,2D],
    roles [B,P], padding masks, and (optionally) shifted target tensors.
    """
    b = len(specs)
    n_props = max(len(s.properties) for s in specs)
    n_len = max(len(p.token_ids) for s in specs for p in s.properties)
    pad = vocab.SPEC_INDEX[vocab.PAD]

    tokens = torch.full((b, n_props, n_len), pad, dtype=torch.long)
    tree = torch.zeros((b, n_props, n_len, 2 * max_depth))
    roles = torch.zeros((b, n_props), dtype=torch.long)
    token_pad = torch.ones((b, n_props, n_len), dtype=torch.bool)
    prop_pad = torch.ones((b, n_props), dtype=torch.bool)
    for i, s in enumerate(specs):
        for j, p in enumerate(s.properties):
            roles[i, j] = p.role
            prop_pad[i, j] = False
            for k, tid in enumerate(p.token_ids):
                tokens[i, j, k] = tid
                token_pad[i, j, k] = False
                tree[i, j, k] = torch.tensor(
                    path_vector(p.paths[k], max_depth))
    # Fully masked rows make attention softmax NaN; expose the first
    # (PAD-embedded) position of dummy properties instead.
    token_pad[:, :, 0] = False

    batch = {"tokens": tokens, "tree": tree, "roles": roles,
             "token_pad": token_pad, "prop_pad": prop_pad}
    if targets is not None:
        t_len = max(len(t) for t in targets)
        pad_t = TARGET_INDEX[vocab.PAD]
        full = torch.full((b, t_len), pad_t, dtype=torch.long)
        for i, t in enumerate(targets):
            full[i, :len(t)] = torch.tensor(t, dtype=torch.long)
        batch["target_in"] = full[:, :-1]
        batch["target_out"] = full[:, 1:]
    return batch


def load_dataset(path: str, max_properties: int, max_property_ast: int,
                 max_target_tokens: int):
    """Read a JSONL dataset of {spec, circuit, realizable} rows; rows
    beyond the model caps are skipped."""
    specs, targets, raw = [], [], []
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            if not line.strip():
                continue
            obj = json.loads(line)
            try:
                spec = encode_spec(obj["spec"], max_properties,
                                   max_property_ast)
                target = encode_target(obj["realizable"], obj["circuit"],
                                       max_target_tokens)
            except (SpecTooLarge, vocab.CircuitTokenError):
                continue
            specs.append(spec)
            targets.append(target)
            raw.append(obj)
    return specs, targets, raw
