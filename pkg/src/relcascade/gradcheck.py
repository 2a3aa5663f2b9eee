"""Finite-difference verification of the analytic gradients of the joint loss.

Runs at float64. Every parameter tensor is checked; large tensors are probed
at a deterministic random sample of entries to keep the runtime bounded.
"""

from __future__ import annotations

import random
from dataclasses import dataclass

import torch

from .config import ModelConfig
from .data import RelationSchema
from .engine import PreparedSentence, batch_loss, build_model, prepare_sentence
from .model import CascadeModel
from .synthetic import SyntheticSpec, generate_synthetic_corpus
from .tokenization import Vocabulary


@dataclass
class GradCheckResult:
    max_rel_err: float
    worst_param: str
    per_param: dict[str, float]

    def passed(self, tol: float) -> bool:
        return self.max_rel_err < tol


def _loss_value(model: CascadeModel, batch: list[PreparedSentence]) -> torch.Tensor:
    total, _ = batch_loss(model, batch)
    return total


def check_gradients(
    model: CascadeModel,
    batch: list[PreparedSentence],
    eps: float = 1e-5,
    max_entries_per_tensor: int = 8,
    seed: int = 0,
) -> GradCheckResult:
    """Compare autograd gradients against central finite differences."""
    model = model.double()
    model.eval()  # dropout off: finite differences need a deterministic loss
    rng = random.Random(seed)
    model.zero_grad()
    loss = _loss_value(model, batch)
    loss.backward()
    per_param: dict[str, float] = {}
    worst = ("", 0.0)
    for name, param in model.named_parameters():
        grad = param.grad
        if grad is None:
            continue
        flat = param.data.view(-1)
        gflat = grad.view(-1)
        n = flat.numel()
        entries = range(n) if n <= max_entries_per_tensor else sorted(
            rng.sample(range(n), max_entries_per_tensor)
        )
        worst_here = 0.0
        for i in entries:
            orig = flat[i].item()
            with torch.no_grad():
                flat[i] = orig + eps
                up = _loss_value(model, batch).item()
                flat[i] = orig - eps
                down = _loss_value(model, batch).item()
                flat[i] = orig
            numeric = (up - down) / (2 * eps)
            analytic = gflat[i].item()
            # Central differences cannot resolve gradients much below the
            # step size: the (up - down) subtraction loses ~ulp(loss)/(2*eps)
            # to roundoff. Flooring the denominator at eps compares such
            # entries in absolute terms at the resolvable scale.
            denom = max(abs(numeric), abs(analytic), eps)
            rel = abs(numeric - analytic) / denom
            worst_here = max(worst_here, rel)
        per_param[name] = worst_here
        if worst_here > worst[1]:
            worst = (name, worst_here)
    return GradCheckResult(max_rel_err=worst[1], worst_param=worst[0], per_param=per_param)


def default_gradcheck(
    config: ModelConfig | None = None,
    seed: int = 0,
    eps: float = 1e-5,
    n_sentences: int = 2,
) -> GradCheckResult:
    """Self-contained check on a tiny synthetic batch with a toy encoder."""
    if config is None:
        config = ModelConfig(
            d=32, embedding_dim=16, relation_emb_dim=12, lstm_hidden=16,
            pos_emb_dim=8, max_rel_distance=16, dropout=0.0,
        )
    torch.manual_seed(seed)
    spec = SyntheticSpec(n_sentences=n_sentences, n_relations=3,
                         frac_normal=0.5, frac_epo=0.5, frac_seo=0.0)
    sentences, schema = generate_synthetic_corpus(spec, seed)
    vocab = Vocabulary.build(w for s in sentences for w in s.words)
    model = build_model(config, schema, vocab)
    batch = [prepare_sentence(s, vocab, RelationSchema(schema.names)) for s in sentences]
    return check_gradients(model, batch, eps=eps, seed=seed)
