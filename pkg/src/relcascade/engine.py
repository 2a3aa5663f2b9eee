"""Training loop, cascade inference, and checkpoint I/O."""

from __future__ import annotations

import random
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Optional, Sequence

import torch
from torch import Tensor

from . import evaluation
from .config import ModelConfig
from .data import RelationSchema, Sentence, Triple, sentence_to_json
from .encoder import PretrainedEncoderAdapter, ToyEncoder
from .model import CascadeModel, SpanProbs, bernoulli_nll, head_vector, length_mask
from .tagging import TaggedExample, build_tagged_example
from .tokenization import TokenizedText, Vocabulary, tokenize_and_align

CHECKPOINT_FORMAT = "relcascade-ckpt-v1"


class TrainingDivergedError(Exception):
    pass


@dataclass
class ExtractedTriple:
    head: str
    relation: str
    tail: str
    head_span: tuple[int, int]  # interior subtoken span
    tail_span: tuple[int, int]
    score: float

    def as_strings(self) -> tuple[str, str, str]:
        return (self.head, self.relation, self.tail)


@dataclass
class TrainReport:
    seed: int
    config: dict
    epoch_losses: list[float] = field(default_factory=list)
    dev_f1: list[tuple[int, float]] = field(default_factory=list)
    best_f1: float = 0.0
    best_epoch: int = -1
    checkpoint_path: Optional[str] = None


# --- span pairing -----------------------------------------------------------


def pair_spans(
    probs: SpanProbs | tuple[Sequence[float], Sequence[float]],
    threshold: float,
    fallback_single_token: bool = False,
) -> list[tuple[int, int]]:
    """Greedy start/end pairing.

    Each position with start probability strictly above the threshold pairs
    with the nearest end position at or after it that precedes the next start;
    unmatched starts are discarded (or become single-token spans with the
    fallback enabled).
    """
    if isinstance(probs, SpanProbs):
        start_p = probs.start.tolist()
        end_p = probs.end.tolist()
    else:
        start_p, end_p = (list(p) for p in probs)
    starts = [i for i, p in enumerate(start_p) if p > threshold]
    ends = [i for i, p in enumerate(end_p) if p > threshold]
    spans = []
    for idx, s in enumerate(starts):
        nxt = starts[idx + 1] if idx + 1 < len(starts) else len(start_p)
        matched = None
        for e in ends:
            if s <= e < nxt:
                matched = e
                break
        if matched is not None:
            spans.append((s, matched))
        elif fallback_single_token:
            spans.append((s, s))
    return spans


# --- batching and loss ------------------------------------------------------


@dataclass
class PreparedSentence:
    sentence: Sentence
    tok: TokenizedText
    tagged: TaggedExample


def prepare_sentence(sentence: Sentence, vocab: Vocabulary, schema: RelationSchema) -> PreparedSentence:
    tok = tokenize_and_align(sentence.words, vocab)
    tagged = build_tagged_example(sentence, tok, schema)
    return PreparedSentence(sentence=sentence, tok=tok, tagged=tagged)


def _masked_bce(p: Tensor, y: Tensor, mask: Tensor) -> Tensor:
    bce = bernoulli_nll(p, y)
    return (bce * mask.to(bce.dtype)).sum()


def batch_loss(
    model: CascadeModel, batch: Sequence[PreparedSentence]
) -> tuple[Tensor, dict[str, Tensor]]:
    """Summed teacher-forced loss over a batch of sentences.

    Relation BCE runs over all relations; head extractors run once per gold
    relation, tail extractors once per gold (relation, head span), with gold
    start positions feeding the relative-distance features.
    """
    device = next(model.parameters()).device
    dtype = next(model.parameters()).dtype
    K = model.n_relations
    B = len(batch)
    lengths = torch.tensor([len(ps.tok.ids) for ps in batch], device=device)
    L = int(lengths.max())
    ids = torch.zeros(B, L, dtype=torch.long, device=device)
    for b, ps in enumerate(batch):
        ids[b, : len(ps.tok.ids)] = torch.tensor(ps.tok.ids)
    H, pooled = model.encoder(ids, lengths)

    y_r = torch.tensor([ps.tagged.y_r for ps in batch], device=device)
    rel_loss = _masked_bce(
        model.relation_probs(pooled), y_r, torch.ones(B, K, dtype=torch.bool, device=device)
    )

    H_int = H[:, 1 : L - 1, :]
    m = H_int.shape[1]
    int_lengths = lengths - 2

    def pad_tags(vecs: list[list[int]]) -> Tensor:
        out = torch.zeros(len(vecs), m, device=device)
        for i, v in enumerate(vecs):
            out[i, : len(v)] = torch.tensor(v, dtype=out.dtype)
        return out

    # head sub-batch: one row per (sentence, gold relation)
    h_sent, h_rel, h_sta, h_end = [], [], [], []
    for b, ps in enumerate(batch):
        for rid in sorted(ps.tagged.head_tags):
            sta, end = ps.tagged.head_tags[rid]
            h_sent.append(b)
            h_rel.append(rid)
            h_sta.append(sta)
            h_end.append(end)
    head_loss = rel_loss.new_zeros(())
    if h_sent:
        sel = torch.tensor(h_sent, device=device)
        sub_H = H_int[sel]
        sub_len = int_lengths[sel]
        sta_t = pad_tags(h_sta)
        end_t = pad_tags(h_end)
        p_sta, p_end = model.head_probs_batch(
            sub_H, sub_len, torch.tensor(h_rel, device=device), sta_t > 0.5
        )
        mask = length_mask(sub_len, m)
        head_loss = _masked_bce(p_sta, sta_t, mask) + _masked_bce(p_end, end_t, mask)

    # tail sub-batch: one row per (sentence, gold relation, gold head span)
    t_sent, t_rel, t_span, t_sta, t_end = [], [], [], [], []
    for b, ps in enumerate(batch):
        for rid, span in sorted(ps.tagged.tail_tags):
            sta, end = ps.tagged.tail_tags[(rid, span)]
            t_sent.append(b)
            t_rel.append(rid)
            t_span.append(span)
            t_sta.append(sta)
            t_end.append(end)
    tail_loss = rel_loss.new_zeros(())
    if t_sent:
        sel = torch.tensor(t_sent, device=device)
        sub_H = H_int[sel]
        sub_len = int_lengths[sel]
        v_head = torch.stack(
            [
                (H_int[b, s, :] + H_int[b, e, :]) / 2.0
                for b, (s, e) in zip(t_sent, t_span)
            ]
        )
        sta_t = pad_tags(t_sta)
        end_t = pad_tags(t_end)
        p_sta, p_end = model.tail_probs_batch(
            sub_H, sub_len, torch.tensor(t_rel, device=device), v_head, sta_t > 0.5
        )
        mask = length_mask(sub_len, m)
        tail_loss = _masked_bce(p_sta, sta_t, mask) + _masked_bce(p_end, end_t, mask)

    total = rel_loss + head_loss + tail_loss
    return total, {"relation": rel_loss, "head": head_loss, "tail": tail_loss}


def joint_loss(model: CascadeModel, prepared: PreparedSentence) -> tuple[Tensor, dict[str, Tensor]]:
    """Single-example teacher-forced loss and its three components."""
    return batch_loss(model, [prepared])


# --- inference --------------------------------------------------------------


def decode_sentence(
    model: CascadeModel,
    sentence: Sentence,
    vocab: Vocabulary,
    schema: RelationSchema,
    delta: float | None = None,
    span_threshold: float | None = None,
) -> list[ExtractedTriple]:
    """Cascade decode: relations, then heads per relation, then tails per head.

    Output is deduplicated on (head, relation, tail) surface strings, keeping
    the highest-scoring instance, ordered by relation id then span position.
    """
    cfg = model.config
    delta = cfg.delta if delta is None else delta
    thr = cfg.span_threshold if span_threshold is None else span_threshold
    was_training = model.training
    model.eval()
    words = sentence.words
    try:
        with torch.no_grad():
            tok = tokenize_and_align(words, vocab)
            H, pooled = model.encode(tok.ids)
            H_int = H[1:-1]
            relpred = model.predict_relations(pooled, delta)
            found: dict[tuple[str, str, str], ExtractedTriple] = {}
            for rid in relpred.selected:
                p_rel = float(relpred.probs[rid])
                head_probs = model.extract_head_probs(H, rid)
                for hs, he in pair_spans(head_probs, thr, cfg.span_fallback_single_token):
                    v_head = head_vector(H_int, (hs, he))
                    tail_probs = model.extract_tail_probs(H, rid, v_head)
                    for ts, te in pair_spans(tail_probs, thr, cfg.span_fallback_single_token):
                        head_str = _surface(words, tok, hs, he)
                        tail_str = _surface(words, tok, ts, te)
                        score = (
                            p_rel
                            * float(head_probs.start[hs]) * float(head_probs.end[he])
                            * float(tail_probs.start[ts]) * float(tail_probs.end[te])
                        )
                        triple = ExtractedTriple(
                            head=head_str,
                            relation=schema.names[rid],
                            tail=tail_str,
                            head_span=(hs, he),
                            tail_span=(ts, te),
                            score=score,
                        )
                        key = triple.as_strings()
                        if key not in found or score > found[key].score:
                            found[key] = triple
            return list(found.values())
    finally:
        if was_training:
            model.train()


def _surface(words: Sequence[str], tok: TokenizedText, s: int, e: int) -> str:
    ws, we = tok.token_span_to_word_span(s, e)
    return " ".join(words[ws : we + 1])


def predict_corpus(
    model: CascadeModel,
    sentences: Sequence[Sentence],
    vocab: Vocabulary,
    schema: RelationSchema,
    path: str | Path,
    delta: float | None = None,
    span_threshold: float | None = None,
) -> None:
    """One canonical-format record per sentence, triples carrying scores."""
    with open(path, "w", encoding="utf-8") as fh:
        for sent in sentences:
            extracted = decode_sentence(model, sent, vocab, schema, delta, span_threshold)
            out = Sentence(
                text=sent.text,
                triples=[
                    Triple(t.head, t.relation, t.tail, score=round(t.score, 6))
                    for t in extracted
                ],
            )
            fh.write(sentence_to_json(out) + "\n")


# --- model construction and checkpoints -------------------------------------


def build_encoder(config: ModelConfig, vocab_size: int, pretrained_path: str | None = None):
    if config.encoder == "toy":
        return ToyEncoder(vocab_size, config.d, config.embedding_dim, config.dropout)
    if config.encoder == "pretrained":
        if pretrained_path is None:
            raise ValueError("pretrained encoder requires a weights path")
        return PretrainedEncoderAdapter(pretrained_path, config.dropout)
    raise ValueError(f"unknown encoder kind: {config.encoder!r}")


def build_model(
    config: ModelConfig,
    schema: RelationSchema,
    vocab: Vocabulary,
    pretrained_path: str | None = None,
) -> CascadeModel:
    encoder = build_encoder(config, len(vocab), pretrained_path)
    return CascadeModel(config, len(schema), encoder)


def save_checkpoint(
    model: CascadeModel, schema: RelationSchema, vocab: Vocabulary, path: str | Path
) -> None:
    torch.save(
        {
            "format": CHECKPOINT_FORMAT,
            "config": asdict(model.config),
            "schema": list(schema.names),
            "vocab": list(vocab.tokens),
            "state_dict": model.state_dict(),
        },
        path,
    )


def load_checkpoint(path: str | Path) -> tuple[CascadeModel, RelationSchema, Vocabulary]:
    blob = torch.load(path, map_location="cpu", weights_only=False)
    if blob.get("format") != CHECKPOINT_FORMAT:
        raise ValueError(f"unrecognized checkpoint format in {path}")
    config = ModelConfig(**blob["config"])
    schema = RelationSchema(blob["schema"])
    vocab = Vocabulary(blob["vocab"])
    model = build_model(config, schema, vocab)
    model.load_state_dict(blob["state_dict"])
    model.eval()
    return model, schema, vocab


# --- training ---------------------------------------------------------------


def exact_f1(
    model: CascadeModel,
    sentences: Sequence[Sentence],
    vocab: Vocabulary,
    schema: RelationSchema,
) -> float:
    pred = [
        [t.as_strings() for t in decode_sentence(model, s, vocab, schema)]
        for s in sentences
    ]
    gold = [evaluation.triples_of(s) for s in sentences]
    return evaluation.score(pred, gold, evaluation.EXACT).f1


def train(
    train_corpus: Sequence[Sentence],
    dev_corpus: Sequence[Sentence],
    schema: RelationSchema,
    config: ModelConfig,
    seed: int,
    out_path: str | Path | None = None,
    vocab: Vocabulary | None = None,
    pretrained_path: str | None = None,
) -> tuple[CascadeModel, TrainReport]:
    """Adam on the joint objective with early stopping on dev exact-match F1."""
    if not train_corpus or not dev_corpus:
        raise ValueError("train and dev corpora must be non-empty")
    torch.manual_seed(seed)
    rng = random.Random(seed)
    if vocab is None:
        words = (w for corpus in (train_corpus, dev_corpus) for s in corpus for w in s.words)
        vocab = Vocabulary.build(words)
    model = build_model(config, schema, vocab, pretrained_path)
    prepared = [prepare_sentence(s, vocab, schema) for s in train_corpus]
    opt = torch.optim.Adam(
        model.parameters(), lr=config.learning_rate, betas=(0.9, 0.999), eps=1e-8
    )
    report = TrainReport(seed=seed, config=asdict(config))
    best_state = None
    evals_since_best = 0
    for epoch in range(1, config.max_epochs + 1):
        model.train()
        order = list(range(len(prepared)))
        rng.shuffle(order)
        epoch_loss = 0.0
        for i in range(0, len(order), config.batch_size):
            batch = [prepared[j] for j in order[i : i + config.batch_size]]
            opt.zero_grad()
            total, _ = batch_loss(model, batch)
            loss = total / len(batch)
            if not torch.isfinite(loss):
                raise TrainingDivergedError(
                    f"non-finite loss at epoch {epoch}; try a lower learning rate"
                )
            loss.backward()
            if config.grad_clip > 0:
                torch.nn.utils.clip_grad_norm_(model.parameters(), config.grad_clip)
            opt.step()
            epoch_loss += float(total.detach())
        report.epoch_losses.append(epoch_loss / len(prepared))
        if epoch % config.eval_every == 0 or epoch == config.max_epochs:
            f1 = exact_f1(model, dev_corpus, vocab, schema)
            report.dev_f1.append((epoch, f1))
            if f1 > report.best_f1 or best_state is None:
                report.best_f1 = f1
                report.best_epoch = epoch
                best_state = {k: v.clone() for k, v in model.state_dict().items()}
                evals_since_best = 0
            else:
                evals_since_best += 1
            if f1 >= 1.0 or evals_since_best >= config.patience:
                break
    if best_state is not None:
        model.load_state_dict(best_state)
    model.eval()
    if out_path is not None:
        save_checkpoint(model, schema, vocab, out_path)
        report.checkpoint_path = str(out_path)
    return model, report
