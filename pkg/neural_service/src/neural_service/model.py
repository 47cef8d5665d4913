"""Hierarchical transformer over assume-guarantee specifications.

Local encoder layers attend within each property, global layers across
the concatenated property sequences, and a standard autoregressive
decoder emits circuit tokens.  Properties carry no order encoding, so
the encoder output is equivariant under property permutation.
"""

from __future__ import annotations

from dataclasses import dataclass

import torch
from torch import nn

from . import vocab


@dataclass(frozen=True)
class ModelConfig:
    d_model: int = 64
    ffn_width: int = 128
    n_heads: int = 2
    n_local_layers: int = 2
    n_global_layers: int = 2
    n_decoder_layers: int = 2
    dropout: float = 0.0
    max_properties: int = 12
    max_property_ast: int = 32
    max_target_tokens: int = 128
    max_tree_depth: int = 8
    beam_size: int = 3


def _encoder_layers(cfg: ModelConfig, n: int) -> nn.ModuleList:
    return nn.ModuleList(
        nn.TransformerEncoderLayer(
            cfg.d_model, cfg.n_heads, cfg.ffn_width, cfg.dropout,
            batch_first=True, norm_first=True)
        for _ in range(n))


class HierarchicalTransformer(nn.Module):
    def __init__(self, cfg: ModelConfig):
        super().__init__()
        self.cfg = cfg
        self.spec_embed = nn.Embedding(vocab.SPEC_VOCAB, cfg.d_model)
        self.role_embed = nn.Embedding(2, cfg.d_model)
        self.tree_proj = nn.Linear(2 * cfg.max_tree_depth, cfg.d_model)
        self.local_layers = _encoder_layers(cfg, cfg.n_local_layers)
        self.global_layers = _encoder_layers(cfg, cfg.n_global_layers)

        self.target_embed = nn.Embedding(vocab.TARGET_VOCAB, cfg.d_model)
        self.target_pos = nn.Embedding(cfg.max_target_tokens, cfg.d_model)
        self.decoder = nn.TransformerDecoder(
            nn.TransformerDecoderLayer(
                cfg.d_model, cfg.n_heads, cfg.ffn_width, cfg.dropout,
                batch_first=True, norm_first=True),
            cfg.n_decoder_layers)
        self.out_proj = nn.Linear(cfg.d_model, vocab.TARGET_VOCAB)

    def encode(self, batch: dict) -> tuple[torch.Tensor, torch.Tensor]:
        """Returns (memory [B, P*L, d], memory_pad [B, P*L])."""
        tokens, tree, roles = batch["tokens"], batch["tree"], batch["roles"]
        b, p, length = tokens.shape
        x = (self.spec_embed(tokens)
             + self.tree_proj(tree.to(self.tree_proj.weight.dtype))
             + self.role_embed(roles)[:, :, None, :])
        x = x.reshape(b * p, length, -1)
        token_pad = batch["token_pad"].reshape(b * p, length)
        for layer in self.local_layers:
            x = layer(x, src_key_padding_mask=token_pad)
        x = x.reshape(b, p * length, -1)
        memory_pad = batch["token_pad"].reshape(b, p * length).clone()
        # Keep dummy properties out of global attention entirely, except
        # one slot per row so the softmax stays finite.
        memory_pad |= batch["prop_pad"][:, :, None].expand(
            b, p, length).reshape(b, p * length)
        memory_pad[:, 0] = False
        for layer in self.global_layers:
            x = layer(x, src_key_padding_mask=memory_pad)
        return x, memory_pad

    def local_outputs(self, batch: dict) -> torch.Tensor:
        """Per-property local encodings [B, P, L, d], before the global
        layers mix properties (used by the equivariance check)."""
        tokens, tree, roles = batch["tokens"], batch["tree"], batch["roles"]
        b, p, length = tokens.shape
        x = (self.spec_embed(tokens)
             + self.tree_proj(tree.to(self.tree_proj.weight.dtype))
             + self.role_embed(roles)[:, :, None, :])
        x = x.reshape(b * p, length, -1)
        token_pad = batch["token_pad"].reshape(b * p, length)
        for layer in self.local_layers:
            x = layer(x, src_key_padding_mask=token_pad)
        return x.reshape(b, p, length, -1)

    def decode(self, target_in: torch.Tensor, memory: torch.Tensor,
               memory_pad: torch.Tensor) -> torch.Tensor:
        t = target_in.shape[1]
        pos = torch.arange(t, device=target_in.device)
        y = self.target_embed(target_in) + self.target_pos(pos)[None]
        causal = nn.Transformer.generate_square_subsequent_mask(
            t, device=target_in.device, dtype=y.dtype)
        y = self.decoder(y, memory, tgt_mask=causal,
                         memory_key_padding_mask=memory_pad)
        return self.out_proj(y)

    def forward(self, batch: dict) -> torch.Tensor:
        memory, memory_pad = self.encode(batch)
        return self.decode(batch["target_in"], memory, memory_pad)
