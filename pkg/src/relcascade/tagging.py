"""Supervision tags: multi-hot relation labels plus start/end span tags.

Tag vectors are binary, length m, indexed over interior subtoken positions.
Head tags for a relation are the union over all gold triples with that
relation; tail tags are keyed by (relation id, head token span).
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .data import AnnotationError, RelationSchema, Sentence, Triple, locate_entity
from .tokenization import TokenizedText

Span = tuple[int, int]  # inclusive interior subtoken span


@dataclass
class TaggedExample:
    y_r: list[int]  # multi-hot over relations
    head_tags: dict[int, tuple[list[int], list[int]]] = field(default_factory=dict)
    tail_tags: dict[tuple[int, Span], tuple[list[int], list[int]]] = field(default_factory=dict)
    # gold head spans per relation, kept for teacher forcing and decoding checks
    head_spans: dict[int, list[Span]] = field(default_factory=dict)
    tail_spans: dict[tuple[int, Span], list[Span]] = field(default_factory=dict)


def resolve_word_span(sentence: Sentence, entity: str, span: Span | None) -> Span:
    if span is not None:
        return span
    return locate_entity(sentence.words, entity)


def triple_token_spans(
    sentence: Sentence, tok: TokenizedText, triple: Triple
) -> tuple[Span, Span]:
    """Gold (head, tail) token spans for one triple."""
    hw = resolve_word_span(sentence, triple.head, triple.head_span)
    tw = resolve_word_span(sentence, triple.tail, triple.tail_span)
    n = len(sentence.words)
    for s, e in (hw, tw):
        if not (0 <= s <= e < n):
            raise AnnotationError(f"word span ({s}, {e}) out of range for {n} words")
    return (tok.word_span_to_token_span(*hw), tok.word_span_to_token_span(*tw))


def _mark(vec: list[int], pos: int) -> None:
    vec[pos] = 1


def build_tagged_example(
    sentence: Sentence, tok: TokenizedText, schema: RelationSchema
) -> TaggedExample:
    m = tok.m
    ex = TaggedExample(y_r=[0] * len(schema))
    for triple in sentence.triples:
        rid = schema.id_of(triple.relation)
        ex.y_r[rid] = 1
        head_span, tail_span = triple_token_spans(sentence, tok, triple)
        if rid not in ex.head_tags:
            ex.head_tags[rid] = ([0] * m, [0] * m)
            ex.head_spans[rid] = []
        sta, end = ex.head_tags[rid]
        _mark(sta, head_span[0])
        _mark(end, head_span[1])
        if head_span not in ex.head_spans[rid]:
            ex.head_spans[rid].append(head_span)
        key = (rid, head_span)
        if key not in ex.tail_tags:
            ex.tail_tags[key] = ([0] * m, [0] * m)
            ex.tail_spans[key] = []
        tsta, tend = ex.tail_tags[key]
        _mark(tsta, tail_span[0])
        _mark(tend, tail_span[1])
        if tail_span not in ex.tail_spans[key]:
            ex.tail_spans[key].append(tail_span)
    return ex


def decode_gold_spans(sta: list[int], end: list[int]) -> list[Span]:
    """Pair gold start/end tags: each start pairs with the nearest end at or
    after it and before the next start."""
    starts = [i for i, v in enumerate(sta) if v]
    ends = [i for i, v in enumerate(end) if v]
    spans = []
    for idx, s in enumerate(starts):
        nxt = starts[idx + 1] if idx + 1 < len(starts) else len(sta)
        for e in ends:
            if s <= e < nxt:
                spans.append((s, e))
                break
    return spans
