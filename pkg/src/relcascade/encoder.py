"""Text encoders: per-subtoken context vectors plus a pooled sentence vector.

The trainable desk-scale encoder is a token embedding followed by a
bidirectional LSTM; the pooler is affine + tanh on the first row. A
pretrained-transformer adapter exposes the same interface over released
weight files.
"""

from __future__ import annotations

import torch
from torch import Tensor, nn
from torch.nn.utils.rnn import pack_padded_sequence, pad_packed_sequence


def run_bilstm(lstm: nn.LSTM, x: Tensor, lengths: Tensor) -> Tensor:
    """Run a batch-first bidirectional LSTM over padded input; padded output."""
    packed = pack_padded_sequence(
        x, lengths.cpu(), batch_first=True, enforce_sorted=False
    )
    out, _ = lstm(packed)
    padded, _ = pad_packed_sequence(out, batch_first=True, total_length=x.shape[1])
    return padded


class Pooler(nn.Module):
    """tanh(W @ h0 + b); output bounded in (-1, 1)."""

    def __init__(self, d: int):
        super().__init__()
        self.dense = nn.Linear(d, d)

    def forward(self, h0: Tensor) -> Tensor:
        return torch.tanh(self.dense(h0))


class ToyEncoder(nn.Module):
    """Trainable embeddings + BiLSTM contextualization, CPU-friendly.

    Output dimension d must be even (d/2 hidden units per direction).
    """

    def __init__(self, vocab_size: int, d: int, embedding_dim: int, dropout: float = 0.0):
        super().__init__()
        if d % 2 != 0:
            raise ValueError(f"encoder output dimension must be even, got {d}")
        self.d = d
        self.embedding = nn.Embedding(vocab_size, embedding_dim)
        self.lstm = nn.LSTM(
            embedding_dim, d // 2, batch_first=True, bidirectional=True
        )
        self.pooler = Pooler(d)
        self.dropout = nn.Dropout(dropout)

    def forward(self, token_ids: Tensor, lengths: Tensor) -> tuple[Tensor, Tensor]:
        """token_ids: (B, L) padded; lengths include the two markers.

        Returns H (B, L, d) and the pooled vector (B, d).
        """
        emb = self.embedding(token_ids)
        H = run_bilstm(self.lstm, emb, lengths)
        H = self.dropout(H)
        pooled = self.pooler(H[:, 0, :])
        return H, pooled


class PretrainedEncoderAdapter(nn.Module):
    """Adapter over a released transformer checkpoint (same interface as ToyEncoder).

    Requires the ``transformers`` package and locally available weight files;
    kept out of the default dependency set because the rest of the toolkit is
    CPU desk-scale.
    """

    def __init__(self, model_name_or_path: str, dropout: float = 0.0):
        super().__init__()
        try:
            from transformers import AutoModel
        except ImportError as exc:
            raise RuntimeError(
                "the pretrained encoder requires the 'transformers' package"
            ) from exc
        self.backbone = AutoModel.from_pretrained(model_name_or_path)
        self.d = self.backbone.config.hidden_size
        self.dropout = nn.Dropout(dropout)

    def forward(self, token_ids: Tensor, lengths: Tensor) -> tuple[Tensor, Tensor]:
        mask = (
            torch.arange(token_ids.shape[1], device=token_ids.device)[None, :]
            < lengths[:, None]
        ).long()
        out = self.backbone(input_ids=token_ids, attention_mask=mask)
        H = self.dropout(out.last_hidden_state)
        pooled = out.pooler_output if out.pooler_output is not None else H[:, 0, :]
        return H, pooled
