import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from relcascade.data import Sentence, Triple
from relcascade.evaluation import (
    EXACT,
    PARTIAL,
    EvalResult,
    breakdown_scores,
    element_scores,
    emit_report,
    format_report,
    normalize_entity,
    score,
    score_sentence,
)

# --- independent brute-force oracle ----------------------------------------


def oracle_normalize(entity, mode):
    words = entity.split()
    return words[-1] if mode == PARTIAL else " ".join(words)


def oracle_counts(pred, gold, mode):
    """Explicit set intersection of normalized triples, one sentence."""
    pn = {(oracle_normalize(h, mode), r, oracle_normalize(t, mode)) for h, r, t in pred}
    gn = {(oracle_normalize(h, mode), r, oracle_normalize(t, mode)) for h, r, t in gold}
    tp = sum(1 for x in pn if x in gn)
    return tp, len(pn) - tp, len(gn) - tp


def random_triples(rng, max_n=10):
    entities = ["alpha", "beta", "gamma corp", "delta", "ep si", "zeta"]
    rels = ["r1", "r2", "r3"]
    return [
        (rng.choice(entities), rng.choice(rels), rng.choice(entities))
        for _ in range(rng.randint(0, max_n))
    ]


class TestNormalizeEntity:
    def test_partial_takes_last_word(self):
        assert normalize_entity("New York City", PARTIAL) == "City"

    def test_partial_single_word(self):
        assert normalize_entity("Leipzig", PARTIAL) == "Leipzig"

    def test_exact_whitespace_normalized(self):
        assert normalize_entity("  U.S. ", EXACT) == "U.S."
        assert normalize_entity("New    York", EXACT) == "New York"

    def test_empty_rejected(self):
        with pytest.raises(ValueError):
            normalize_entity("   ", EXACT)


class TestScore:
    def test_identity(self):
        triples = [[("Maria", "Born_in", "Leipzig")]]
        res = score(triples, triples, EXACT)
        assert (res.precision, res.recall, res.f1) == (1.0, 1.0, 1.0)

    def test_partial_recall(self):
        pred = [[("Washington", "Capital_of", "U.S.")]]
        gold = [[("Washington", "Capital_of", "U.S."), ("A", "r", "B")]]
        res = score(pred, gold, EXACT)
        assert res.precision == 1.0
        assert res.recall == 0.5
        assert abs(res.f1 - 2 / 3) < 1e-9

    def test_partial_mode_matches_last_words(self):
        pred = [[("George Washington", "Capital_of", "U.S.")]]
        gold = [[("Washington", "Capital_of", "U.S.")]]
        assert score(pred, gold, PARTIAL).tp == 1
        assert score(pred, gold, EXACT).tp == 0

    def test_empty_sets(self):
        res = score([[]], [[]], EXACT)
        assert (res.tp, res.fp, res.fn) == (0, 0, 0)
        assert res.f1 == 0.0

    def test_matches_brute_force_oracle(self):
        rng = random.Random(1234)
        for _ in range(1000):
            pred = [random_triples(rng)]
            gold = [random_triples(rng)]
            for mode in (PARTIAL, EXACT):
                res = score(pred, gold, mode)
                assert (res.tp, res.fp, res.fn) == oracle_counts(pred[0], gold[0], mode)

    def test_exact_tp_never_exceeds_partial_tp(self):
        rng = random.Random(99)
        for _ in range(300):
            pred = [random_triples(rng)]
            gold = [random_triples(rng)]
            assert score(pred, gold, EXACT).tp <= score(pred, gold, PARTIAL).tp

    def test_misaligned_lengths(self):
        with pytest.raises(ValueError):
            score([[]], [[], []], EXACT)


class TestElementScores:
    def test_identity_all_ones(self):
        triples = [[("A", "r", "B")]]
        res = element_scores(triples, triples, EXACT)
        assert all(r.f1 == 1.0 for r in res.values())

    def test_projection_rule(self):
        pred = [[("A", "r_wrong", "B")]]
        gold = [[("A", "r_true", "B")]]
        res = element_scores(pred, gold, EXACT)
        assert res["(h,t)"].f1 == 1.0
        assert res["r"].f1 == 0.0
        assert res["(h,r,t)"].f1 == 0.0

    def test_full_triple_bounded_by_pair_and_relation_counts(self):
        rng = random.Random(7)
        for _ in range(500):
            pred = [random_triples(rng, 6)]
            gold = [random_triples(rng, 6)]
            res = element_scores(pred, gold, EXACT)
            assert res["(h,r,t)"].tp <= res["(h,t)"].tp
            assert res["(h,r,t)"].tp <= res["r"].tp


class TestBreakdownScores:
    def make_corpus(self):
        return [
            Sentence("a", [Triple("A", "r1", "B")]),                       # Normal
            Sentence("b", [Triple("A", "r1", "B"), Triple("A", "r2", "B")]),  # EPO
            Sentence("c", [Triple("A", "r1", "B"), Triple("A", "r2", "C")]),  # SEO
        ]

    def test_overlap_axis(self):
        corpus = self.make_corpus()
        gold = [[t.as_strings() for t in s.triples] for s in corpus]
        table = breakdown_scores(gold, gold, corpus, "overlap", EXACT)
        assert table.rows["Normal"].tp == 1
        assert table.rows["EPO"].tp == 2
        assert table.rows["SEO"].tp == 2

    def test_count_buckets_partition_total(self):
        corpus = [
            Sentence(str(i), [Triple(f"E{j}", "r", f"F{j}") for j in range(n)])
            for i, n in enumerate([1, 2, 3, 4, 7])
        ]
        gold = [[t.as_strings() for t in s.triples] for s in corpus]
        table = breakdown_scores(gold, gold, corpus, "triple_count", EXACT)
        assert table.rows[">=5"].tp == 7
        total = sum(r.tp for r in table.rows.values())
        assert total == score(gold, gold, EXACT).tp

    def test_misalignment_rejected(self):
        with pytest.raises(ValueError):
            breakdown_scores([[]], [[]], [], "overlap", EXACT)


class TestReports:
    def test_deterministic_bytes(self, tmp_path):
        results = {"triples": EvalResult(tp=3, fp=1, fn=2)}
        p1, p2 = tmp_path / "a.txt", tmp_path / "b.txt"
        emit_report(results, p1, EXACT)
        emit_report(results, p2, EXACT)
        assert p1.read_bytes() == p2.read_bytes()

    def test_four_decimal_f1(self):
        text = format_report({"triples": EvalResult(tp=1, fp=1, fn=1)}, EXACT)
        assert "0.5000" in text

    def test_empty_results_header_only(self):
        text = format_report({}, EXACT, fmt="delimited")
        lines = text.strip().splitlines()
        assert len(lines) == 2  # comment header + column header

    def test_delimited_format(self):
        text = format_report({"x": EvalResult(tp=2, fp=0, fn=0)}, PARTIAL, fmt="delimited")
        assert "x\t2\t0\t0\t1.0000\t1.0000\t1.0000" in text


@settings(max_examples=200)
@given(
    pred=st.lists(
        st.tuples(st.sampled_from(["a", "b c", "d"]), st.sampled_from(["r1", "r2"]),
                  st.sampled_from(["a", "b c", "d"])),
        max_size=8,
    ),
    gold=st.lists(
        st.tuples(st.sampled_from(["a", "b c", "d"]), st.sampled_from(["r1", "r2"]),
                  st.sampled_from(["a", "b c", "d"])),
        max_size=8,
    ),
    mode=st.sampled_from([PARTIAL, EXACT]),
)
def test_score_sentence_matches_oracle_property(pred, gold, mode):
    res = score_sentence(pred, gold, mode)
    assert (res.tp, res.fp, res.fn) == oracle_counts(pred, gold, mode)
