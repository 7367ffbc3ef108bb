"""Constituent trees as per-token label sequences.

Token i (for i < n) is labeled with a pair ``(d, c)`` describing the boundary
between w_i and w_{i+1}: the number of tree levels the two tokens share and
the label of their lowest common ancestor.  The last token carries a
dedicated FINAL label.  Depths are written either as the shared-level count
itself (absolute mode) or as the difference against the previous boundary
(relative mode).

The scheme is injective over normalized trees in which every non-terminal
has at least two children; a non-terminal dominating a single terminal is
never a lowest common ancestor of an adjacent pair, so no label sequence can
express it.  ``decode`` is total: ill-formed sequences are repaired (depths
below 1 raised to 1, stray FINAL labels neutralized, the last label forced
FINAL, unlabeled nodes spliced out or given a fallback label) and always
yield a valid tree.

The text form of a label is ``"d@c"``, e.g. ``2@NP`` or ``-1@S``, and
``FINAL`` for the end-of-sentence label.  The tabular file format is one
``token<TAB>pos<TAB>label`` row per token ("_" for a missing tag) with a
blank line between sentences.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from typing import Iterable, Iterator, List, Literal, Optional, Sequence, Tuple

from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_is_fitted

from .trees import ConstituentTree, Sentence, TreeNode, collapse_unary, expand_unary
from .validation import check_corpus

SLMode = Literal["absolute", "relative"]
MODES: Tuple[str, ...] = ("absolute", "relative")

#: Label given to still-open nodes in a prefix decode.
PENDING_LABEL = "<?>"


class IndexOutOfRange(IndexError):
    pass


class EmptyInput(ValueError):
    pass


class NonPositiveDepth(ValueError):
    pass


@dataclass(frozen=True)
class SLLabel:
    d: int
    c: Optional[str]
    is_final: bool = False

    def __str__(self) -> str:
        if self.is_final:
            return "FINAL"
        return "%d@%s" % (self.d, self.c)


FINAL = SLLabel(0, None, is_final=True)


def parse_label(text: str) -> SLLabel:
    if text == "FINAL":
        return FINAL
    head, sep, tail = text.partition("@")
    if not sep or not tail:
        raise ValueError("malformed label %r (expected 'd@c' or 'FINAL')" % text)
    return SLLabel(int(head), tail)


def _check_mode(mode: str):
    if mode not in MODES:
        raise ValueError("mode must be one of %r, got %r" % (MODES, mode))


def _leaf_paths(tree: ConstituentTree) -> List[tuple]:
    """Root-first ancestor tuple for every terminal, left to right."""
    paths: List[tuple] = []

    def walk(node: TreeNode, ancestors: tuple):
        if node.is_terminal:
            paths.append(ancestors)
            return
        if len(node.children) == 1 and not node.children[0].is_terminal:
            raise ValueError(
                "tree contains a unary chain at %r; collapse it first" % node.label
            )
        extended = ancestors + (node,)
        for child in node.children:
            walk(child, extended)

    walk(tree.root, ())
    return paths


def _shared_levels(left: tuple, right: tuple) -> Tuple[int, str]:
    count = 0
    for a, b in zip(left, right):
        if a is not b:
            break
        count += 1
    return count, left[count - 1].label


def common_levels(tree: ConstituentTree, i: int) -> Tuple[int, str]:
    """Shared ancestor count and lowest common ancestor label of w_i, w_{i+1}."""
    n = len(tree.sentence)
    if not 1 <= i <= n - 1:
        raise IndexOutOfRange("boundary index %d outside 1..%d" % (i, n - 1))
    paths = _leaf_paths(tree)
    return _shared_levels(paths[i - 1], paths[i])


def encode(tree: ConstituentTree, mode: SLMode = "absolute") -> List[SLLabel]:
    """One label per token; the last is FINAL."""
    _check_mode(mode)
    paths = _leaf_paths(tree)
    labels: List[SLLabel] = []
    previous = 0
    for i in range(len(paths) - 1):
        levels, lca = _shared_levels(paths[i], paths[i + 1])
        d = levels if mode == "absolute" else levels - previous
        labels.append(SLLabel(d, lca))
        previous = levels
    labels.append(FINAL)
    return labels


def rel_to_abs(labels: Sequence[SLLabel]) -> List[SLLabel]:
    """Prefix-sum relative depths into absolute ones."""
    out: List[SLLabel] = []
    total = 0
    for lab in labels:
        if lab.is_final:
            out.append(lab)
            continue
        total += lab.d
        if total < 1:
            raise NonPositiveDepth("depth %d at boundary %d" % (total, len(out) + 1))
        out.append(SLLabel(total, lab.c))
    return out


def _repaired_boundaries(
    labels: Sequence[SLLabel],
    mode: str,
    vocab: Optional[frozenset],
    unknown_label: str,
) -> Tuple[List[int], List[Optional[str]]]:
    """Absolute depth and label vote per boundary, never failing."""
    depths: List[int] = []
    votes: List[Optional[str]] = []
    previous = 0
    for lab in labels:
        if lab.is_final:
            depth = previous if previous >= 1 else 1
            vote = None
        else:
            depth = previous + lab.d if mode == "relative" else lab.d
            if depth < 1:
                depth = 1
            vote = lab.c
            if vote is not None and vocab is not None and vote not in vocab:
                vote = unknown_label
        depths.append(depth)
        votes.append(vote)
        previous = depth
    return depths, votes


class _Open:
    __slots__ = ("label", "children")

    def __init__(self):
        self.label = None
        self.children = []


def _build(depths: List[int], votes: List[Optional[str]], n: int, fallback_label: str) -> TreeNode:
    """Place n leaves along an open rightmost spine.

    ``depths`` holds one entry per boundary: n - 1 entries seal the spine
    after the last token (full decode), n entries leave the rightmost chain
    open with PENDING_LABEL on unnamed nodes (prefix decode).
    """
    spine: List[_Open] = []

    def seal(node: _Open) -> TreeNode:
        if node.label is None and len(node.children) == 1:
            return node.children[0]
        label = node.label if node.label is not None else fallback_label
        return TreeNode(label, node.children)

    root: Optional[TreeNode] = None
    previous = 0
    for i in range(1, n + 1):
        if i <= len(depths):
            current, vote = depths[i - 1], votes[i - 1]
        else:
            current, vote = 0, None
        for _ in range(len(spine), current):
            spine.append(_Open())
        if vote is not None:
            target = spine[current - 1]
            if target.label is None:
                target.label = vote
        attach_at = max(previous, current)
        if attach_at == 0:
            root = TreeNode(fallback_label, [TreeNode(i)])
            break
        spine[attach_at - 1].children.append(TreeNode(i))
        while len(spine) > current:
            done = seal(spine.pop())
            if spine:
                spine[-1].children.append(done)
            else:
                root = done
        previous = current

    for node in reversed(spine):  # open rightmost chain of a prefix decode
        kids = list(node.children)
        if root is not None:
            kids.append(root)
        root = TreeNode(node.label if node.label is not None else PENDING_LABEL, kids)
    assert root is not None
    return root


def decode(
    labels: Sequence[SLLabel],
    sentence: Sentence,
    mode: SLMode = "absolute",
    fallback_label: str = "X",
    vocab: Optional[Iterable[str]] = None,
    unknown_label: Optional[str] = None,
) -> ConstituentTree:
    """Total inverse of :func:`encode`; repairs ill-formed sequences."""
    _check_mode(mode)
    if not labels:
        raise EmptyInput("no labels to decode")
    n = len(sentence)
    if len(labels) != n:
        raise ValueError("%d labels for %d tokens" % (len(labels), n))
    vocab_set = frozenset(vocab) if vocab is not None else None
    unknown = unknown_label if unknown_label is not None else fallback_label
    # the last label is forced FINAL: its payload is dropped either way
    depths, votes = _repaired_boundaries(labels[:-1], mode, vocab_set, unknown)
    root = _build(depths, votes, n, fallback_label)
    return ConstituentTree(root, sentence, normalized=True).validate()


def decode_prefix(
    labels: Sequence[SLLabel],
    sentence: Sentence,
    mode: SLMode = "absolute",
    fallback_label: str = "X",
) -> ConstituentTree:
    """Partial tree over the first m tokens given the first m labels.

    The rightmost chain stays open; nodes not yet named get PENDING_LABEL.
    """
    _check_mode(mode)
    if not labels:
        raise EmptyInput("no labels to decode")
    m = len(labels)
    if m > len(sentence):
        raise ValueError("%d labels for %d tokens" % (m, len(sentence)))
    if labels[-1].is_final and m == len(sentence):
        return decode(labels, sentence, mode, fallback_label)
    depths, votes = _repaired_boundaries(labels, mode, None, fallback_label)
    root = _build(depths, votes, m, fallback_label)
    prefix = Sentence(
        sentence.tokens[:m],
        sentence.pos_tags[:m] if sentence.pos_tags is not None else None,
    )
    return ConstituentTree(root, prefix, normalized=True).validate()


# ---------------------------------------------------------------------------
# tabular label files


def write_labeled(pairs: Iterable[Tuple[Sentence, Sequence[SLLabel]]], handle):
    first = True
    for sentence, labels in pairs:
        if not first:
            handle.write("\n")
        first = False
        tags = sentence.pos_tags or ("_",) * len(sentence)
        for token, tag, label in zip(sentence.tokens, tags, labels):
            handle.write("%s\t%s\t%s\n" % (token, tag, label))


def iter_labeled(lines: Iterable[str]) -> Iterator[Tuple[Sentence, List[SLLabel]]]:
    tokens: List[str] = []
    tags: List[str] = []
    labels: List[SLLabel] = []

    def flush():
        nonlocal tokens, tags, labels
        if tokens:
            yield_pair = (Sentence(tuple(tokens), tuple(tags)), labels)
            tokens, tags, labels = [], [], []
            return yield_pair
        return None

    for lineno, raw in enumerate(lines, start=1):
        line = raw.rstrip("\n")
        if not line.strip():
            pair = flush()
            if pair:
                yield pair
            continue
        fields = line.split("\t")
        if len(fields) != 3:
            raise ValueError("line %d: expected 3 tab-separated fields" % lineno)
        tokens.append(fields[0])
        tags.append(fields[1])
        try:
            labels.append(parse_label(fields[2]))
        except ValueError as err:
            raise ValueError("line %d: %s" % (lineno, err)) from None
    pair = flush()
    if pair:
        yield pair


def read_labeled(path) -> List[Tuple[Sentence, List[SLLabel]]]:
    with open(path, encoding="utf-8") as handle:
        return list(iter_labeled(handle))


# ---------------------------------------------------------------------------


class TreeLinearizer(BaseEstimator, TransformerMixin):
    """Transformer between trees and label sequences.

    Fitting records the non-terminal inventory of the (collapsed) training
    trees; ``inverse_transform`` then maps out-of-inventory labels to the most
    frequent training non-terminal before decoding.
    """

    def __init__(self, mode: SLMode = "absolute", join_char: str = "+", fallback_label: str = "X"):
        self.mode = mode
        self.join_char = join_char
        self.fallback_label = fallback_label

    def _normalize(self, tree: ConstituentTree) -> ConstituentTree:
        return tree if tree.normalized else collapse_unary(tree, self.join_char)

    def fit(self, X: Sequence[ConstituentTree], y=None):
        _check_mode(self.mode)
        check_corpus(X)
        counts: Counter = Counter()
        for tree in X:
            for label in encode(self._normalize(tree), self.mode):
                if not label.is_final:
                    counts[label.c] += 1
        self.labels_ = tuple(sorted(counts))
        self.most_common_ = (
            min(counts, key=lambda c: (-counts[c], c)) if counts else self.fallback_label
        )
        return self

    def transform(self, X: Sequence[ConstituentTree]) -> List[List[SLLabel]]:
        check_is_fitted(self, "labels_")
        return [encode(self._normalize(tree), self.mode) for tree in X]

    def inverse_transform(
        self, Xt: Sequence[Sequence[SLLabel]], sentences: Sequence[Sentence]
    ) -> List[ConstituentTree]:
        check_is_fitted(self, "labels_")
        trees = []
        for labels, sentence in zip(Xt, sentences):
            tree = decode(
                labels,
                sentence,
                self.mode,
                fallback_label=self.fallback_label,
                vocab=self.labels_,
                unknown_label=self.most_common_,
            )
            trees.append(expand_unary(tree, self.join_char))
        return trees
