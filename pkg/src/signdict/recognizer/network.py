"""Sequence classifier: transformer encoder with a single learned query.

The encoder contextualizes per-frame pose features; one learned query
vector then cross-attends over the encoded sequence and a small
feed-forward block turns the attended summary into class logits. With a
single query there is nothing for decoder self-attention to do, so the
decoder reduces to the cross-attention block.
"""

from __future__ import annotations

import torch
from torch import nn


class SignNetwork(nn.Module):
    def __init__(
        self,
        in_dim: int,
        hidden: int,
        num_classes: int,
        num_layers: int,
        num_heads: int,
        max_frames: int,
        dropout: float = 0.0,
    ):
        super().__init__()
        if hidden % num_heads != 0:
            raise ValueError(f"hidden {hidden} not divisible by {num_heads} heads")
        self.max_frames = max_frames
        self.in_proj = nn.Linear(in_dim, hidden)
        self.pos = nn.Parameter(torch.randn(max_frames, hidden) * 0.02)
        layer = nn.TransformerEncoderLayer(
            d_model=hidden,
            nhead=num_heads,
            dim_feedforward=hidden,
            dropout=dropout,
            batch_first=True,
        )
        self.encoder = nn.TransformerEncoder(layer, num_layers, enable_nested_tensor=False)
        self.query = nn.Parameter(torch.randn(1, hidden) * 0.02)
        self.cross = nn.MultiheadAttention(hidden, num_heads, dropout=dropout, batch_first=True)
        self.norm1 = nn.LayerNorm(hidden)
        self.ffn = nn.Sequential(nn.Linear(hidden, hidden), nn.ReLU(), nn.Linear(hidden, hidden))
        self.norm2 = nn.LayerNorm(hidden)
        self.head = nn.Linear(hidden, num_classes)

    def forward(self, x: torch.Tensor, pad_mask: torch.Tensor | None = None) -> torch.Tensor:
        """x: (B, T, in_dim); pad_mask: (B, T) bool, True marks padding."""
        b, t, _ = x.shape
        if t > self.max_frames:
            raise ValueError(f"sequence length {t} exceeds max_frames {self.max_frames}")
        h = self.in_proj(x) + self.pos[:t]
        h = self.encoder(h, src_key_padding_mask=pad_mask)
        q = self.query.expand(b, -1, -1)
        attended, _ = self.cross(q, h, h, key_padding_mask=pad_mask, need_weights=False)
        z = self.norm1(attended + q)
        z = self.norm2(z + self.ffn(z))
        return self.head(z[:, 0, :])
