"""Subtoken vocabulary and word-to-subtoken alignment.

Sentences are wrapped in classification/separator markers; each word is split
into one or more subtokens by greedy longest-match, with continuation pieces
prefixed ``##`` (so "packing" can map to ["pack", "##ing"] given a suitable
vocabulary). Words with no match map to the reserved unknown token.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Sequence

CLS = "[CLS]"
SEP = "[SEP]"
UNK = "[UNK]"
PAD = "[PAD]"

SPECIALS = [PAD, CLS, SEP, UNK]


class TokenizationError(Exception):
    pass


class Vocabulary:
    """Closed subtoken vocabulary; stored one subtoken per line."""

    def __init__(self, subtokens: Iterable[str]):
        self.tokens = list(subtokens)
        for sp in SPECIALS:
            if sp not in self.tokens:
                raise TokenizationError(f"vocabulary missing special token {sp}")
        self.ids = {tok: i for i, tok in enumerate(self.tokens)}

    def __len__(self) -> int:
        return len(self.tokens)

    def id_of(self, token: str) -> int:
        return self.ids.get(token, self.ids[UNK])

    @classmethod
    def build(cls, corpus_words: Iterable[str], extra: Sequence[str] = ()) -> "Vocabulary":
        """Whole-word vocabulary over a corpus, plus optional subword pieces."""
        seen: dict[str, None] = {}
        for w in corpus_words:
            seen.setdefault(w)
        return cls(SPECIALS + list(seen) + [t for t in extra if t not in seen])

    @classmethod
    def load(cls, path: str | Path) -> "Vocabulary":
        lines = Path(path).read_text(encoding="utf-8").splitlines()
        return cls([ln for ln in lines if ln])

    def save(self, path: str | Path) -> None:
        Path(path).write_text("".join(t + "\n" for t in self.tokens), encoding="utf-8")


@dataclass
class TokenizedText:
    """Subtokens with markers at both ends and a total word -> subtoken-range map.

    ``word_to_subtoken[w] = (a, b)`` is an inclusive range over interior
    positions 0..m-1 (i.e. excluding the markers).
    """

    subtokens: list[str]
    ids: list[int]
    word_to_subtoken: list[tuple[int, int]]

    @property
    def m(self) -> int:
        return len(self.subtokens) - 2

    def word_span_to_token_span(self, start_word: int, end_word: int) -> tuple[int, int]:
        """Inclusive word span -> inclusive interior subtoken span.

        Start = first subtoken of the first word, end = last subtoken of the
        last word.
        """
        return (self.word_to_subtoken[start_word][0], self.word_to_subtoken[end_word][1])

    def token_span_to_word_span(self, start_tok: int, end_tok: int) -> tuple[int, int]:
        """Snap an interior subtoken span back to the covering word span."""
        start_word = end_word = None
        for w, (a, b) in enumerate(self.word_to_subtoken):
            if a <= start_tok <= b and start_word is None:
                start_word = w
            if a <= end_tok <= b:
                end_word = w
        if start_word is None or end_word is None:
            raise IndexError(f"token span ({start_tok}, {end_tok}) out of range")
        return (start_word, end_word)


def split_word(word: str, vocab: Vocabulary) -> list[str]:
    """Greedy longest-match wordpiece split; [UNK] when nothing matches."""
    if not word:
        raise TokenizationError("empty word")
    pieces = []
    pos = 0
    while pos < len(word):
        prefix = "##" if pos > 0 else ""
        end = len(word)
        piece = None
        while end > pos:
            cand = prefix + word[pos:end]
            if cand in vocab.ids:
                piece = cand
                break
            end -= 1
        if piece is None:
            return [UNK]
        pieces.append(piece)
        pos = end
    return pieces


def tokenize_and_align(words: Sequence[str], vocab: Vocabulary) -> TokenizedText:
    if not words:
        raise TokenizationError("sentence has no words")
    subtokens = [CLS]
    ranges = []
    for word in words:
        pieces = split_word(word, vocab)
        start = len(subtokens) - 1  # interior index of first piece
        subtokens.extend(pieces)
        ranges.append((start, len(subtokens) - 2))
    subtokens.append(SEP)
    ids = [vocab.id_of(t) for t in subtokens]
    return TokenizedText(subtokens=subtokens, ids=ids, word_to_subtoken=ranges)
