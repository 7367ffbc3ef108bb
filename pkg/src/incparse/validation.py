"""Input validation helpers shared across estimators and operations."""

from __future__ import annotations

from typing import Sequence

from .trees import ConstituentTree, Sentence


class EmptyCorpus(ValueError):
    pass


class LengthMismatch(ValueError):
    """Gold and predicted corpora disagree in size or tokenization."""


def check_corpus(trees: Sequence[ConstituentTree], what: str = "corpus") -> Sequence[ConstituentTree]:
    if len(trees) == 0:
        raise EmptyCorpus("%s is empty" % what)
    for tree in trees:
        if not isinstance(tree, ConstituentTree):
            raise TypeError("expected ConstituentTree, got %r" % type(tree).__name__)
    return trees


def check_sentences(sentences: Sequence[Sentence]) -> Sequence[Sentence]:
    for sent in sentences:
        if not isinstance(sent, Sentence):
            raise TypeError("expected Sentence, got %r" % type(sent).__name__)
    return sentences


def check_paired_corpora(gold: Sequence[ConstituentTree], pred: Sequence[ConstituentTree]):
    if len(gold) != len(pred):
        raise LengthMismatch(
            "gold corpus has %d sentences, predicted has %d" % (len(gold), len(pred))
        )
    for index, (g, p) in enumerate(zip(gold, pred)):
        if g.sentence.tokens != p.sentence.tokens:
            raise LengthMismatch(
                "sentence %d: gold and predicted tokens differ (%d vs %d tokens)"
                % (index, len(g.sentence), len(p.sentence))
            )
