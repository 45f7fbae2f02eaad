"""Tiny transformer encoder with hashing token features.

The default configuration trains from scratch in seconds on CPU, which is
what the desk-scale sweep needs; weights for a locally available
pretrained encoder can be loaded via `pretrained_path`. Tokens are mapped
to embedding buckets with a stable hash, so any spelling variant gets its
own bucket without a fitted vocabulary.
"""

from __future__ import annotations

import hashlib

import torch
from torch import nn

PAD_ID = 0
SEP_ID = 1
RESERVED = 2

DEFAULT_BUCKETS = 4096
DEFAULT_DIM = 64
DEFAULT_LAYERS = 2
DEFAULT_HEADS = 2
MAX_LEN = 64


def bucket_id(token: str, buckets: int = DEFAULT_BUCKETS) -> int:
    """Stable across processes; case kept because capitalisation is signal."""
    digest = hashlib.blake2b(token.encode("utf-8"), digest_size=8).digest()
    return RESERVED + int.from_bytes(digest, "big") % (buckets - RESERVED)


def encode_text(text: str, sep_token: str, buckets: int = DEFAULT_BUCKETS) -> list[int]:
    ids = []
    for token in text.split():
        ids.append(SEP_ID if token == sep_token else bucket_id(token, buckets))
    return ids[:MAX_LEN]


def encode_tokens(tokens, buckets: int = DEFAULT_BUCKETS) -> list[int]:
    return [bucket_id(t, buckets) for t in tokens][:MAX_LEN]


class TinyEncoder(nn.Module):
    def __init__(self, buckets=DEFAULT_BUCKETS, dim=DEFAULT_DIM,
                 layers=DEFAULT_LAYERS, heads=DEFAULT_HEADS, max_len=MAX_LEN):
        super().__init__()
        self.embed = nn.Embedding(buckets, dim, padding_idx=PAD_ID)
        self.position = nn.Embedding(max_len, dim)
        layer = nn.TransformerEncoderLayer(
            d_model=dim, nhead=heads, dim_feedforward=4 * dim,
            dropout=0.1, batch_first=True,
        )
        self.encoder = nn.TransformerEncoder(layer, num_layers=layers,
                                             enable_nested_tensor=False)
        self.dim = dim

    def forward(self, ids: torch.Tensor) -> tuple[torch.Tensor, torch.Tensor]:
        mask = ids.eq(PAD_ID)
        positions = torch.arange(ids.size(1), device=ids.device).unsqueeze(0)
        hidden = self.embed(ids) + self.position(positions)
        hidden = self.encoder(hidden, src_key_padding_mask=mask)
        return hidden, mask


class SequenceClassifier(nn.Module):
    def __init__(self, n_classes: int, **encoder_kwargs):
        super().__init__()
        self.backbone = TinyEncoder(**encoder_kwargs)
        self.head = nn.Linear(self.backbone.dim, n_classes)

    def forward(self, ids: torch.Tensor) -> torch.Tensor:
        hidden, mask = self.backbone(ids)
        keep = (~mask).unsqueeze(-1).float()
        pooled = (hidden * keep).sum(dim=1) / keep.sum(dim=1).clamp(min=1.0)
        return self.head(pooled)


class TokenClassifier(nn.Module):
    def __init__(self, n_classes: int, **encoder_kwargs):
        super().__init__()
        self.backbone = TinyEncoder(**encoder_kwargs)
        self.head = nn.Linear(self.backbone.dim, n_classes)

    def forward(self, ids: torch.Tensor) -> torch.Tensor:
        hidden, _ = self.backbone(ids)
        return self.head(hidden)
