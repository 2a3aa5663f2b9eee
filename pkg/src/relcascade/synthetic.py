"""Deterministic synthetic corpora realizing the three overlap patterns.

Sentences are templated clause chains like
``alice rel_2 bob_corp and alice rel_4 delta_city .`` where every relation
surface form appears in the text, so a small model can learn the mapping.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field

from .data import RelationSchema, Sentence, Triple, classify_overlap

DEFAULT_ENTITIES = [
    "alice", "bruno", "carla", "dimitri", "elena", "farid", "greta", "hiro",
    "ines", "jonas", "karim", "lena", "marco", "nadia",
    "red fort", "blue lagoon",
]


class SpecError(Exception):
    pass


@dataclass
class SyntheticSpec:
    n_sentences: int = 200
    n_relations: int = 6
    frac_normal: float = 0.4
    frac_epo: float = 0.3
    frac_seo: float = 0.3
    entities: list[str] = field(default_factory=lambda: list(DEFAULT_ENTITIES))
    max_triples: int = 3

    def validate(self) -> None:
        total = self.frac_normal + self.frac_epo + self.frac_seo
        if abs(total - 1.0) > 1e-9:
            raise SpecError(f"pattern fractions must sum to 1, got {total}")
        if self.n_relations < 1:
            raise SpecError("need at least one relation")
        if self.frac_epo > 0 and self.n_relations < 2:
            raise SpecError("EPO sentences need at least two relations")
        if self.frac_seo > 0 and len(self.entities) < 3:
            raise SpecError("SEO sentences need at least three entities")
        if len(self.entities) < 2:
            raise SpecError("need at least two entities")


def relation_names(k: int) -> list[str]:
    return [f"rel_{i}" for i in range(k)]


def _clause(h: str, r: str, t: str) -> str:
    return f"{h} {r} {t}"


def _render(triples: list[Triple]) -> Sentence:
    text = " and ".join(_clause(t.head, t.relation, t.tail) for t in triples) + " ."
    return Sentence(text=text, triples=triples)


def _pick_distinct(rng: random.Random, pool: list[str], n: int) -> list[str]:
    return rng.sample(pool, n)


def _normal_sentence(rng: random.Random, rels: list[str], ents: list[str], max_triples: int) -> Sentence:
    n = rng.randint(1, max(1, min(max_triples, len(ents) // 2)))
    chosen = _pick_distinct(rng, ents, 2 * n)
    triples = []
    for i in range(n):
        r = rng.choice(rels)
        triples.append(Triple(chosen[2 * i], r, chosen[2 * i + 1]))
    return _render(triples)


def _epo_sentence(rng: random.Random, rels: list[str], ents: list[str]) -> Sentence:
    h, t = _pick_distinct(rng, ents, 2)
    r1, r2 = rng.sample(rels, 2)
    return _render([Triple(h, r1, t), Triple(h, r2, t)])


def _seo_sentence(rng: random.Random, rels: list[str], ents: list[str]) -> Sentence:
    a, b, c = _pick_distinct(rng, ents, 3)
    r1 = rng.choice(rels)
    r2 = rng.choice(rels)
    return _render([Triple(a, r1, b), Triple(a, r2, c)])


def generate_synthetic_corpus(spec: SyntheticSpec, seed: int) -> tuple[list[Sentence], RelationSchema]:
    """Deterministic given (spec, seed)."""
    spec.validate()
    rng = random.Random(seed)
    rels = relation_names(spec.n_relations)
    schema = RelationSchema(rels)
    n_epo = round(spec.n_sentences * spec.frac_epo)
    n_seo = round(spec.n_sentences * spec.frac_seo)
    n_normal = spec.n_sentences - n_epo - n_seo
    sentences = []
    for _ in range(n_normal):
        sentences.append(_normal_sentence(rng, rels, spec.entities, spec.max_triples))
    for _ in range(n_epo):
        sent = _epo_sentence(rng, rels, spec.entities)
        assert classify_overlap(sent.triples).epo
        sentences.append(sent)
    for _ in range(n_seo):
        sent = _seo_sentence(rng, rels, spec.entities)
        sentences.append(sent)
    rng.shuffle(sentences)
    return sentences, schema
