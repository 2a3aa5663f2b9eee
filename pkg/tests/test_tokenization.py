import pytest

from relcascade.data import RelationSchema, Sentence, Triple
from relcascade.tagging import build_tagged_example, decode_gold_spans
from relcascade.tokenization import (
    CLS,
    SEP,
    SPECIALS,
    TokenizationError,
    Vocabulary,
    tokenize_and_align,
)


def vocab_of(*tokens):
    return Vocabulary(SPECIALS + list(tokens))


class TestTokenizeAndAlign:
    def test_minimal_one_word(self):
        tok = tokenize_and_align(["hello"], vocab_of("hello"))
        assert tok.subtokens == [CLS, "hello", SEP]
        assert tok.m == 1
        assert tok.word_to_subtoken == [(0, 0)]

    def test_subword_split(self):
        # "packing" splits into a stem and a continuation piece
        tok = tokenize_and_align(["packing"], vocab_of("pack", "##ing"))
        assert tok.subtokens == [CLS, "pack", "##ing", SEP]
        assert tok.word_to_subtoken == [(0, 1)]

    def test_unknown_word_maps_to_unk(self):
        tok = tokenize_and_align(["zzz"], vocab_of("hello"))
        assert tok.subtokens[1] == "[UNK]"
        assert tok.m == 1

    def test_ranges_cover_interior_in_order(self):
        vocab = vocab_of("a", "bc", "##d", "e")
        tok = tokenize_and_align(["a", "bcd", "e"], vocab)
        covered = [i for a, b in tok.word_to_subtoken for i in range(a, b + 1)]
        assert covered == list(range(tok.m))

    def test_empty_sentence_rejected(self):
        with pytest.raises(TokenizationError):
            tokenize_and_align([], vocab_of("a"))

    def test_span_mapping_round_trip(self):
        vocab = vocab_of("new", "york", "ci", "##ty")
        tok = tokenize_and_align(["new", "york", "city"], vocab)
        span = tok.word_span_to_token_span(0, 2)
        assert span == (0, 3)
        assert tok.token_span_to_word_span(*span) == (0, 2)


class TestBuildTaggedExample:
    def make(self, text, triples, extra_vocab=()):
        sent = Sentence(text, triples)
        vocab = Vocabulary.build(sent.words, extra=list(extra_vocab))
        schema = RelationSchema(sorted({t.relation for t in triples} | {"pad_rel"}))
        tok = tokenize_and_align(sent.words, vocab)
        return sent, tok, schema, build_tagged_example(sent, tok, schema)

    def test_relation_label_and_head_tags(self):
        _, tok, schema, ex = self.make(
            "Maria was born in Leipzig",
            [Triple("Maria", "Born_in", "Leipzig")],
        )
        rid = schema.id_of("Born_in")
        assert ex.y_r[rid] == 1
        assert sum(ex.y_r) == 1
        sta, end = ex.head_tags[rid]
        assert sta[0] == 1 and end[0] == 1  # "Maria" is the first token
        assert sum(sta) == 1 and sum(end) == 1

    def test_no_triples_vacuous(self):
        _, _, schema, ex = self.make("nothing to see", [Triple("nothing", "pad_rel", "see")])
        # rebuild with an empty-triple sentence sharing the schema
        sent = Sentence("nothing to see", [])
        vocab = Vocabulary.build(sent.words)
        tok = tokenize_and_align(sent.words, vocab)
        ex = build_tagged_example(sent, tok, schema)
        assert sum(ex.y_r) == 0
        assert ex.head_tags == {} and ex.tail_tags == {}

    def test_union_over_same_relation(self):
        _, _, schema, ex = self.make(
            "alice r bob and carla r dave",
            [Triple("alice", "r", "bob"), Triple("carla", "r", "dave")],
        )
        rid = schema.id_of("r")
        sta, _ = ex.head_tags[rid]
        assert sum(sta) == 2
        assert len(ex.head_spans[rid]) == 2

    def test_head_tag_keys_subset_of_gold_relations(self):
        _, _, schema, ex = self.make(
            "a r1 b and c r2 d",
            [Triple("a", "r1", "b"), Triple("c", "r2", "d")],
        )
        assert set(ex.head_tags) <= {i for i, y in enumerate(ex.y_r) if y}

    def test_round_trip_gold_spans(self):
        _, tok, schema, ex = self.make(
            "alice r bob and carla r dave",
            [Triple("alice", "r", "bob"), Triple("carla", "r", "dave")],
        )
        rid = schema.id_of("r")
        sta, end = ex.head_tags[rid]
        assert decode_gold_spans(sta, end) == sorted(ex.head_spans[rid])

    def test_multiword_entity_span_convention(self):
        sent = Sentence(
            "the red fort stands", [Triple("red fort", "r", "the")]
        )
        vocab = Vocabulary.build(sent.words)
        schema = RelationSchema(["r"])
        tok = tokenize_and_align(sent.words, vocab)
        ex = build_tagged_example(sent, tok, schema)
        sta, end = ex.head_tags[0]
        assert sta.index(1) == 1  # first subtoken of "red"
        assert end.index(1) == 2  # last subtoken of "fort"
