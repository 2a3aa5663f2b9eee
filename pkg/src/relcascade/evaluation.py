"""Triple-set scoring: Partial/Exact match, element-level F1, and breakdowns
by overlap pattern or gold triple count. Counts are micro-averaged over the
corpus; both sides are deduplicated after normalization.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

from .data import Sentence, classify_overlap

StrTriple = tuple[str, str, str]

PARTIAL = "partial"
EXACT = "exact"
MODES = (PARTIAL, EXACT)

ELEMENTS = ("(h,t)", "r", "(h,r,t)")
COUNT_BUCKETS = ("1", "2", "3", "4", ">=5")
OVERLAP_CATEGORIES = ("Normal", "EPO", "SEO")


@dataclass
class EvalResult:
    tp: int = 0
    fp: int = 0
    fn: int = 0

    @property
    def precision(self) -> float:
        return self.tp / (self.tp + self.fp) if self.tp + self.fp else 0.0

    @property
    def recall(self) -> float:
        return self.tp / (self.tp + self.fn) if self.tp + self.fn else 0.0

    @property
    def f1(self) -> float:
        p, r = self.precision, self.recall
        return 2 * p * r / (p + r) if p + r else 0.0

    def add(self, other: "EvalResult") -> None:
        self.tp += other.tp
        self.fp += other.fp
        self.fn += other.fn


@dataclass
class BreakdownTable:
    axis: str
    rows: dict[str, EvalResult] = field(default_factory=dict)


def normalize_entity(entity: str, mode: str) -> str:
    """Exact: whitespace-normalized full name; partial: its last word."""
    words = entity.split()
    if not words:
        raise ValueError("empty entity string")
    if mode == PARTIAL:
        return words[-1]
    if mode == EXACT:
        return " ".join(words)
    raise ValueError(f"unknown match mode: {mode!r}")


def normalize_triples(triples: Sequence[StrTriple], mode: str) -> set[StrTriple]:
    return {
        (normalize_entity(h, mode), r, normalize_entity(t, mode))
        for h, r, t in triples
    }


def _counts(pred: set, gold: set) -> EvalResult:
    tp = len(pred & gold)
    return EvalResult(tp=tp, fp=len(pred) - tp, fn=len(gold) - tp)


def score_sentence(pred: Sequence[StrTriple], gold: Sequence[StrTriple], mode: str) -> EvalResult:
    return _counts(normalize_triples(pred, mode), normalize_triples(gold, mode))


def score(
    pred: Sequence[Sequence[StrTriple]],
    gold: Sequence[Sequence[StrTriple]],
    mode: str,
) -> EvalResult:
    """Micro-averaged counts over per-sentence prediction/gold triple lists."""
    if len(pred) != len(gold):
        raise ValueError(f"prediction/gold length mismatch: {len(pred)} vs {len(gold)}")
    total = EvalResult()
    for p, g in zip(pred, gold):
        total.add(score_sentence(p, g, mode))
    return total


def _project(triples: set[StrTriple], element: str) -> set:
    if element == "(h,t)":
        return {(h, t) for h, _, t in triples}
    if element == "r":
        return {r for _, r, _ in triples}
    if element == "(h,r,t)":
        return set(triples)
    raise ValueError(f"unknown element: {element!r}")


def element_scores(
    pred: Sequence[Sequence[StrTriple]],
    gold: Sequence[Sequence[StrTriple]],
    mode: str,
) -> dict[str, EvalResult]:
    """Per-element scoring: an element is correct iff its own items match,
    regardless of the rest of the triple. Projections are deduplicated."""
    if len(pred) != len(gold):
        raise ValueError(f"prediction/gold length mismatch: {len(pred)} vs {len(gold)}")
    results = {el: EvalResult() for el in ELEMENTS}
    for p, g in zip(pred, gold):
        pn = normalize_triples(p, mode)
        gn = normalize_triples(g, mode)
        for el in ELEMENTS:
            results[el].add(_counts(_project(pn, el), _project(gn, el)))
    return results


def count_bucket(n: int) -> str:
    return str(n) if n < 5 else ">=5"


def breakdown_scores(
    pred: Sequence[Sequence[StrTriple]],
    gold: Sequence[Sequence[StrTriple]],
    corpus: Sequence[Sentence],
    axis: str,
    mode: str,
) -> BreakdownTable:
    """Per-category scoring; overlap categories are non-exclusive for EPO/SEO."""
    if not (len(pred) == len(gold) == len(corpus)):
        raise ValueError(
            f"misaligned lengths: pred={len(pred)} gold={len(gold)} corpus={len(corpus)}"
        )
    if axis == "overlap":
        table = BreakdownTable(axis=axis, rows={c: EvalResult() for c in OVERLAP_CATEGORIES})
        for p, g, sent in zip(pred, gold, corpus):
            flags = classify_overlap(sent.triples)
            counts = score_sentence(p, g, mode)
            if flags.normal:
                table.rows["Normal"].add(counts)
            if flags.epo:
                table.rows["EPO"].add(counts)
            if flags.seo:
                table.rows["SEO"].add(counts)
        return table
    if axis == "triple_count":
        table = BreakdownTable(axis=axis, rows={c: EvalResult() for c in COUNT_BUCKETS})
        for p, g, sent in zip(pred, gold, corpus):
            bucket = count_bucket(len(sent.triples))
            table.rows[bucket].add(score_sentence(p, g, mode))
        return table
    raise ValueError(f"unknown breakdown axis: {axis!r}")


def triples_of(sentence: Sentence) -> list[StrTriple]:
    return [t.as_strings() for t in sentence.triples]


def _config_hash(parts: Sequence[str]) -> str:
    return hashlib.sha256("\x1f".join(parts).encode("utf-8")).hexdigest()[:12]


def format_report(
    results: dict[str, EvalResult],
    mode: str,
    fmt: str = "table",
    extra_header: Sequence[str] = (),
) -> str:
    """Deterministic report text; F1 and friends printed to 4 decimals."""
    header_parts = [f"mode={mode}", f"config={_config_hash([mode, fmt, *extra_header])}"]
    lines = ["# " + "  ".join(header_parts)]
    if fmt == "delimited":
        lines.append("\t".join(["name", "tp", "fp", "fn", "precision", "recall", "f1"]))
        for name, res in results.items():
            lines.append(
                "\t".join([
                    name, str(res.tp), str(res.fp), str(res.fn),
                    f"{res.precision:.4f}", f"{res.recall:.4f}", f"{res.f1:.4f}",
                ])
            )
    elif fmt == "table":
        width = max((len(n) for n in results), default=4)
        width = max(width, len("name"))
        lines.append(
            f"{'name':<{width}}  {'tp':>6} {'fp':>6} {'fn':>6}  {'prec':>7} {'rec':>7} {'f1':>7}"
        )
        for name, res in results.items():
            lines.append(
                f"{name:<{width}}  {res.tp:>6} {res.fp:>6} {res.fn:>6}  "
                f"{res.precision:>7.4f} {res.recall:>7.4f} {res.f1:>7.4f}"
            )
    else:
        raise ValueError(f"unknown report format: {fmt!r}")
    return "\n".join(lines) + "\n"


def emit_report(
    results: dict[str, EvalResult],
    path: str | Path,
    mode: str,
    fmt: str = "table",
    extra_header: Sequence[str] = (),
) -> None:
    Path(path).write_text(format_report(results, mode, fmt, extra_header), encoding="utf-8")
