import pytest

from relcascade.data import classify_overlap
from relcascade.synthetic import SpecError, SyntheticSpec, generate_synthetic_corpus


class TestGenerateSyntheticCorpus:
    def test_deterministic_given_seed(self):
        spec = SyntheticSpec(n_sentences=30, n_relations=4)
        a, _ = generate_synthetic_corpus(spec, 5)
        b, _ = generate_synthetic_corpus(SyntheticSpec(n_sentences=30, n_relations=4), 5)
        assert a == b

    def test_different_seed_differs(self):
        spec = SyntheticSpec(n_sentences=30, n_relations=4)
        a, _ = generate_synthetic_corpus(spec, 1)
        b, _ = generate_synthetic_corpus(SyntheticSpec(n_sentences=30, n_relations=4), 2)
        assert a != b

    def test_sentence_count(self):
        sents, _ = generate_synthetic_corpus(SyntheticSpec(n_sentences=200), 0)
        assert len(sents) == 200

    def test_all_epo_fraction(self):
        spec = SyntheticSpec(
            n_sentences=25, n_relations=3, frac_normal=0.0, frac_epo=1.0, frac_seo=0.0
        )
        sents, _ = generate_synthetic_corpus(spec, 3)
        assert all(classify_overlap(s.triples).epo for s in sents)

    def test_epo_with_single_relation_rejected(self):
        spec = SyntheticSpec(n_relations=1, frac_normal=0.0, frac_epo=1.0, frac_seo=0.0)
        with pytest.raises(SpecError):
            generate_synthetic_corpus(spec, 0)

    def test_fractions_must_sum_to_one(self):
        spec = SyntheticSpec(frac_normal=0.5, frac_epo=0.5, frac_seo=0.5)
        with pytest.raises(SpecError):
            generate_synthetic_corpus(spec, 0)

    def test_entities_locatable(self):
        from relcascade.data import locate_entity

        sents, _ = generate_synthetic_corpus(SyntheticSpec(n_sentences=50), 11)
        for sent in sents:
            for tr in sent.triples:
                locate_entity(sent.words, tr.head)
                locate_entity(sent.words, tr.tail)
