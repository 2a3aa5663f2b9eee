"""The dual-decoder: text-level relation detection, then relation-conditioned
head/tail span tagging, with the decomposed NLL training objective.

All span tensors run over interior subtoken positions (length m, markers
excluded). Per-token start/end tagging uses a 2-logit softmax whose
positive-class probability is thresholded strictly.
"""

from __future__ import annotations

from dataclasses import dataclass

import torch
from torch import Tensor, nn

from .config import ModelConfig
from .encoder import run_bilstm

EPS = 1e-12


@dataclass
class RelationPrediction:
    probs: Tensor           # (K,) in [0, 1]
    selected: list[int]     # ids with prob strictly above the threshold


@dataclass
class SpanProbs:
    start: Tensor  # (m,) positive-class probabilities
    end: Tensor    # (m,)


def clamp_probs(p: Tensor) -> Tensor:
    # 1 - 1e-12 is unrepresentable below float64; widen so the clamp actually
    # bites (xlogy(0, 0) has a NaN gradient when saturation reaches exactly 1)
    eps = EPS if p.dtype == torch.float64 else 1e-7
    return p.clamp(eps, 1.0 - eps)


def bernoulli_nll(p: Tensor, y: Tensor) -> Tensor:
    """Elementwise -[y log p + (1-y) log(1-p)]; xlogy keeps 0*log(0) = 0 when
    clamping is a no-op at the working precision."""
    p = clamp_probs(p)
    yf = y.to(p.dtype)
    return -(torch.xlogy(yf, p) + torch.xlogy(1.0 - yf, 1.0 - p))


def relation_nll(probs: Tensor, y_r: Tensor) -> Tensor:
    """Negative log of the product of per-relation Bernoulli likelihoods."""
    return bernoulli_nll(probs, y_r).sum()


def span_nll(probs: SpanProbs, y_sta: Tensor, y_end: Tensor) -> Tensor:
    """Start + end Bernoulli NLL over all interior positions."""
    return bernoulli_nll(probs.start, y_sta).sum() + bernoulli_nll(probs.end, y_end).sum()


def distance_buckets(start_mask: Tensor, max_rel_distance: int) -> Tensor:
    """Distance to the nearest start at or before each position.

    start_mask: (P, m) bool. Distances clamp to max_rel_distance - 1; positions
    with no preceding start get the sentinel bucket max_rel_distance.
    """
    P, m = start_mask.shape
    idx = torch.arange(m, device=start_mask.device).expand(P, m)
    last = torch.cummax(torch.where(start_mask, idx, idx.new_full((), -1)), dim=1).values
    dist = (idx - last).clamp(0, max_rel_distance - 1)
    return torch.where(last >= 0, dist, dist.new_full((), max_rel_distance))


def head_vector(H_interior: Tensor, span: tuple[int, int]) -> Tensor:
    """Average of the start and end token vectors of an entity span."""
    s, e = span
    m = H_interior.shape[0]
    if not (0 <= s <= e < m):
        raise IndexError(f"span ({s}, {e}) out of range for length {m}")
    return (H_interior[s] + H_interior[e]) / 2.0


def length_mask(lengths: Tensor, m: int) -> Tensor:
    return torch.arange(m, device=lengths.device)[None, :] < lengths[:, None]


class CascadeModel(nn.Module):
    """Relation classifier plus four tagger stacks (head/tail x start/end)."""

    def __init__(self, config: ModelConfig, n_relations: int, encoder: nn.Module):
        super().__init__()
        config.validate()
        self.config = config
        self.n_relations = n_relations
        self.encoder = encoder
        d = config.d
        hid = config.lstm_hidden
        self.rel_classifier = nn.Linear(d, n_relations)
        self.rel_emb = nn.Embedding(n_relations, config.relation_emb_dim)
        nn.init.normal_(self.rel_emb.weight, std=0.02)
        self.pos_emb = nn.Embedding(config.max_rel_distance + 1, config.pos_emb_dim)
        def bilstm(in_dim: int) -> nn.LSTM:
            return nn.LSTM(in_dim, hid, batch_first=True, bidirectional=True)
        self.head_start_lstm = bilstm(d + config.relation_emb_dim)
        self.head_start_out = nn.Linear(2 * hid, 2)
        self.head_end_lstm = bilstm(2 * hid + config.pos_emb_dim)
        self.head_end_out = nn.Linear(2 * hid, 2)
        self.tail_start_lstm = bilstm(d + config.relation_emb_dim + d)
        self.tail_start_out = nn.Linear(2 * hid, 2)
        self.tail_end_lstm = bilstm(2 * hid + config.pos_emb_dim)
        self.tail_end_out = nn.Linear(2 * hid, 2)

    # --- TR decoder ---------------------------------------------------------

    def relation_probs(self, pooled: Tensor) -> Tensor:
        """Sigmoid over K relation logits; pooled may be (d,) or (B, d)."""
        return torch.sigmoid(self.rel_classifier(pooled))

    def predict_relations(self, pooled: Tensor, delta: float | None = None) -> RelationPrediction:
        delta = self.config.delta if delta is None else delta
        probs = self.relation_probs(pooled)
        selected = [i for i, p in enumerate(probs.tolist()) if p > delta]
        return RelationPrediction(probs=probs, selected=selected)

    # --- RE decoder ---------------------------------------------------------

    def _start_positions(self, p_sta: Tensor, mask: Tensor) -> Tensor:
        return (p_sta > self.config.span_threshold) & mask

    def _end_pass(self, lstm: nn.LSTM, out: nn.Linear, h_sta: Tensor,
                  start_mask: Tensor, lengths: Tensor) -> Tensor:
        buckets = distance_buckets(start_mask, self.config.max_rel_distance)
        x = torch.cat([h_sta, self.pos_emb(buckets)], dim=-1)
        h_end = run_bilstm(lstm, x, lengths)
        return torch.softmax(out(h_end), dim=-1)[..., 1]

    def head_probs_batch(
        self,
        H_interior: Tensor,       # (P, m, d)
        lengths: Tensor,          # (P,) interior lengths
        rel_ids: Tensor,          # (P,)
        gold_start_mask: Tensor | None = None,
    ) -> tuple[Tensor, Tensor]:
        """Start/end probabilities for the head extractor, (P, m) each.

        The end pass conditions on gold start positions when supplied
        (training) and on the thresholded predicted starts otherwise.
        """
        P, m, _ = H_interior.shape
        rel = self.rel_emb(rel_ids)[:, None, :].expand(P, m, -1)
        x = torch.cat([H_interior, rel], dim=-1)
        h_sta = run_bilstm(self.head_start_lstm, x, lengths)
        p_sta = torch.softmax(self.head_start_out(h_sta), dim=-1)[..., 1]
        mask = length_mask(lengths, m)
        start_mask = gold_start_mask if gold_start_mask is not None \
            else self._start_positions(p_sta, mask)
        p_end = self._end_pass(self.head_end_lstm, self.head_end_out,
                               h_sta, start_mask, lengths)
        return p_sta, p_end

    def tail_probs_batch(
        self,
        H_interior: Tensor,       # (P, m, d)
        lengths: Tensor,
        rel_ids: Tensor,
        v_head: Tensor,           # (P, d)
        gold_start_mask: Tensor | None = None,
    ) -> tuple[Tensor, Tensor]:
        """Start/end probabilities for the tail extractor, conditioned on the
        relation embedding and the head-entity vector."""
        P, m, _ = H_interior.shape
        rel = self.rel_emb(rel_ids)[:, None, :].expand(P, m, -1)
        vh = v_head[:, None, :].expand(P, m, -1)
        x = torch.cat([H_interior, rel, vh], dim=-1)
        h_sta = run_bilstm(self.tail_start_lstm, x, lengths)
        p_sta = torch.softmax(self.tail_start_out(h_sta), dim=-1)[..., 1]
        mask = length_mask(lengths, m)
        start_mask = gold_start_mask if gold_start_mask is not None \
            else self._start_positions(p_sta, mask)
        p_end = self._end_pass(self.tail_end_lstm, self.tail_end_out,
                               h_sta, start_mask, lengths)
        return p_sta, p_end

    # --- single-sentence conveniences --------------------------------------

    def encode(self, token_ids: list[int]) -> tuple[Tensor, Tensor]:
        ids = torch.tensor([token_ids], dtype=torch.long)
        lengths = torch.tensor([len(token_ids)])
        H, pooled = self.encoder(ids, lengths)
        return H[0], pooled[0]

    def extract_head_probs(
        self, H: Tensor, rel_id: int, gold_starts: list[int] | None = None
    ) -> SpanProbs:
        """H: (m + 2, d) including markers; probabilities over interior tokens."""
        H_int = H[1:-1][None, :, :]
        m = H_int.shape[1]
        lengths = torch.tensor([m])
        mask = None
        if gold_starts is not None:
            mask = torch.zeros(1, m, dtype=torch.bool)
            mask[0, gold_starts] = True
        p_sta, p_end = self.head_probs_batch(
            H_int, lengths, torch.tensor([rel_id]), mask
        )
        return SpanProbs(start=p_sta[0], end=p_end[0])

    def extract_tail_probs(
        self, H: Tensor, rel_id: int, v_head: Tensor,
        gold_starts: list[int] | None = None,
    ) -> SpanProbs:
        H_int = H[1:-1][None, :, :]
        m = H_int.shape[1]
        lengths = torch.tensor([m])
        mask = None
        if gold_starts is not None:
            mask = torch.zeros(1, m, dtype=torch.bool)
            mask[0, gold_starts] = True
        p_sta, p_end = self.tail_probs_batch(
            H_int, lengths, torch.tensor([rel_id]), v_head[None, :], mask
        )
        return SpanProbs(start=p_sta[0], end=p_end[0])

    def zero_decoder_parameters(self) -> None:
        """Zero every non-encoder parameter (symmetry diagnostics)."""
        with torch.no_grad():
            for name, param in self.named_parameters():
                if not name.startswith("encoder."):
                    param.zero_()
