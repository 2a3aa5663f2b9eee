"""Corpus ingestion: sentences with gold triples, overlap taxonomy, corpus statistics.

Canonical file format: UTF-8, one JSON record per line,
``{"text": str, "triples": [{"head", "relation", "tail"}, ...]}``.
Triple records may optionally carry "head_span"/"tail_span" word spans
(inclusive ``[start, end]``) and a "score" field on predictions.
A legacy reader accepts ``{"text", "triple_list": [[h, r, t], ...]}``.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Optional, Sequence


class CorpusError(Exception):
    """Malformed corpus line; carries the offending line number."""


class SchemaError(Exception):
    """Relation label not present in the schema."""


class AnnotationError(Exception):
    """Gold entity cannot be located in the sentence words."""


class RelationSchema:
    """Ordered set of relation labels with a label <-> id bijection."""

    def __init__(self, names: Sequence[str]):
        names = list(names)
        if not names:
            raise SchemaError("schema must contain at least one relation")
        if len(set(names)) != len(names):
            raise SchemaError("duplicate relation labels in schema")
        self.names = names
        self.index = {name: i for i, name in enumerate(names)}

    def __len__(self) -> int:
        return len(self.names)

    def __contains__(self, name: str) -> bool:
        return name in self.index

    def id_of(self, name: str) -> int:
        try:
            return self.index[name]
        except KeyError:
            raise SchemaError(f"unknown relation label: {name!r}") from None

    @classmethod
    def load(cls, path: str | Path) -> "RelationSchema":
        """One relation label per line; blank lines ignored."""
        lines = Path(path).read_text(encoding="utf-8").splitlines()
        return cls([ln.strip() for ln in lines if ln.strip()])

    def save(self, path: str | Path) -> None:
        Path(path).write_text("".join(n + "\n" for n in self.names), encoding="utf-8")


@dataclass(frozen=True)
class Triple:
    head: str
    relation: str
    tail: str
    head_span: Optional[tuple[int, int]] = None  # inclusive word span
    tail_span: Optional[tuple[int, int]] = None
    score: Optional[float] = None

    def as_strings(self) -> tuple[str, str, str]:
        return (self.head, self.relation, self.tail)


@dataclass
class Sentence:
    text: str
    triples: list[Triple] = field(default_factory=list)

    @property
    def words(self) -> list[str]:
        return self.text.split()


@dataclass(frozen=True)
class OverlapFlags:
    normal: bool
    epo: bool
    seo: bool


@dataclass
class CorpusStats:
    n_normal: int = 0
    n_epo: int = 0
    n_seo: int = 0
    n_all: int = 0
    n_relations: int = 0


def classify_overlap(triples: Sequence[Triple]) -> OverlapFlags:
    """EPO: two triples share an unordered entity pair; SEO: share exactly one entity."""
    epo = False
    seo = False
    for i, a in enumerate(triples):
        for b in triples[i + 1 :]:
            pair_a = frozenset((a.head, a.tail))
            pair_b = frozenset((b.head, b.tail))
            shared = len({a.head, a.tail} & {b.head, b.tail})
            # swapped head/tail still counts as sharing the entity pair
            if pair_a == pair_b:
                epo = True
            elif shared == 1:
                seo = True
    return OverlapFlags(normal=not (epo or seo), epo=epo, seo=seo)


def _triple_from_record(rec: dict, lineno: int) -> Triple:
    try:
        head_span = tuple(rec["head_span"]) if "head_span" in rec else None
        tail_span = tuple(rec["tail_span"]) if "tail_span" in rec else None
        return Triple(
            head=rec["head"],
            relation=rec["relation"],
            tail=rec["tail"],
            head_span=head_span,
            tail_span=tail_span,
            score=rec.get("score"),
        )
    except (KeyError, TypeError) as exc:
        raise CorpusError(f"line {lineno}: malformed triple record: {exc}") from exc


def parse_corpus(
    path: str | Path,
    fmt: str = "canonical",
    schema: Optional[RelationSchema] = None,
    strict: bool = True,
) -> list[Sentence]:
    """Read one sentence per line.

    With a schema and strict=True, an unknown relation label raises SchemaError.
    """
    if fmt not in ("canonical", "legacy-list"):
        raise ValueError(f"unknown corpus format: {fmt!r}")
    sentences = []
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                rec = json.loads(line)
                text = rec["text"]
            except (json.JSONDecodeError, KeyError, TypeError) as exc:
                raise CorpusError(f"line {lineno}: malformed record: {exc}") from exc
            if fmt == "legacy-list":
                raw = rec.get("triple_list", [])
                triples = [Triple(h, r, t) for h, r, t in raw]
            else:
                raw = rec.get("triples", [])
                triples = [_triple_from_record(tr, lineno) for tr in raw]
            if schema is not None and strict:
                for tr in triples:
                    if tr.relation not in schema:
                        raise SchemaError(
                            f"line {lineno}: relation {tr.relation!r} not in schema"
                        )
            sentences.append(Sentence(text=text, triples=triples))
    return sentences


def serialize_corpus(sentences: Iterable[Sentence], path: str | Path) -> None:
    """Write the canonical line-delimited format (round-trips with parse_corpus)."""
    with open(path, "w", encoding="utf-8") as fh:
        for sent in sentences:
            fh.write(sentence_to_json(sent) + "\n")


def sentence_to_json(sent: Sentence) -> str:
    triples = []
    for tr in sent.triples:
        rec = {"head": tr.head, "relation": tr.relation, "tail": tr.tail}
        if tr.head_span is not None:
            rec["head_span"] = list(tr.head_span)
        if tr.tail_span is not None:
            rec["tail_span"] = list(tr.tail_span)
        if tr.score is not None:
            rec["score"] = tr.score
        triples.append(rec)
    return json.dumps({"text": sent.text, "triples": triples}, ensure_ascii=False)


def infer_schema(sentences: Iterable[Sentence]) -> RelationSchema:
    """Schema from corpus relation labels, in first-appearance order."""
    names: dict[str, None] = {}
    for sent in sentences:
        for tr in sent.triples:
            names.setdefault(tr.relation)
    return RelationSchema(list(names))


def locate_entity(words: Sequence[str], entity: str) -> tuple[int, int]:
    """First whole-word match of the entity string; inclusive word span."""
    ent_words = entity.split()
    if not ent_words:
        raise AnnotationError("empty entity string")
    n = len(ent_words)
    for i in range(len(words) - n + 1):
        if list(words[i : i + n]) == ent_words:
            return (i, i + n - 1)
    raise AnnotationError(f"entity {entity!r} not found in sentence words")


def corpus_stats(sentences: Sequence[Sentence], schema: RelationSchema) -> CorpusStats:
    stats = CorpusStats(n_all=len(sentences), n_relations=len(schema))
    for sent in sentences:
        flags = classify_overlap(sent.triples)
        stats.n_normal += flags.normal
        stats.n_epo += flags.epo
        stats.n_seo += flags.seo
    return stats


def format_stats(stats: CorpusStats) -> str:
    rows = [
        ("#Normal", stats.n_normal),
        ("#EPO", stats.n_epo),
        ("#SEO", stats.n_seo),
        ("#ALL", stats.n_all),
        ("#Relation", stats.n_relations),
    ]
    width = max(len(k) for k, _ in rows)
    return "".join(f"{k:<{width}}  {v}\n" for k, v in rows)
