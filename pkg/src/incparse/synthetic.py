"""Seeded tree and corpus generators for tests and capacity experiments.

``random_tree`` and ``all_trees`` stay inside the domain where boundary-label
encoding is invertible: every nonterminal has at least two children, so no
node is invisible to the shared-ancestor counts.  ``random_tree_general``
drops that restriction (singleton wraps, unary chains) to exercise the
normalizing collapse.

``grammar_corpus`` builds flat sentences of NP/VP phrases under S.  In
ambiguous mode every phrase starts from shared pools and only the final
token of the phrase reveals the label, so a delay-0 labeler cannot separate
the classes, one token of lookahead resolves two-token phrases, and a second
token helps only on the rarer three-token phrases.  In unambiguous mode the
pools are disjoint per label and position, so delay 0 suffices.
"""

from __future__ import annotations

import random
from functools import lru_cache
from itertools import combinations
from typing import Iterator, List, Sequence, Tuple

from .trees import ConstituentTree, Sentence, TreeNode

DEFAULT_LABELS = ("S", "NP")


def _compose(rng: random.Random, lo: int, hi: int, labels: Sequence[str]) -> TreeNode:
    """Subtree over terminals lo+1..hi with every nonterminal at least binary."""
    size = hi - lo
    if size == 1:
        raise ValueError("cannot build a nonterminal over a single terminal here")
    arity = rng.randint(2, min(4, size))
    cuts = sorted(rng.sample(range(lo + 1, hi), arity - 1))
    bounds = [lo] + cuts + [hi]
    children = []
    for left, right in zip(bounds, bounds[1:]):
        if right - left == 1:
            children.append(TreeNode(right))
        else:
            children.append(_compose(rng, left, right, labels))
    return TreeNode(rng.choice(labels), tuple(children))


def random_tree(
    rng: random.Random, tokens: Sequence[str], labels: Sequence[str] = DEFAULT_LABELS
) -> ConstituentTree:
    """Random normalized tree over the given tokens (all arities >= 2)."""
    sentence = Sentence(tuple(tokens))
    n = len(sentence)
    if n == 1:
        root = TreeNode(rng.choice(labels), (TreeNode(1),))
        return ConstituentTree(root, sentence, normalized=True)
    return ConstituentTree(_compose(rng, 0, n, labels), sentence, normalized=True)


def random_tree_general(
    rng: random.Random,
    tokens: Sequence[str],
    labels: Sequence[str] = DEFAULT_LABELS,
    p_wrap: float = 0.2,
    p_chain: float = 0.2,
) -> ConstituentTree:
    """Random tree that may contain singleton nodes and unary chains."""

    def build(lo: int, hi: int) -> TreeNode:
        size = hi - lo
        if size == 1:
            node: TreeNode = TreeNode(hi)
            while rng.random() < p_wrap:
                node = TreeNode(rng.choice(labels), (node,))
            return node
        arity = rng.randint(2, min(4, size))
        cuts = sorted(rng.sample(range(lo + 1, hi), arity - 1))
        bounds = [lo] + cuts + [hi]
        node = TreeNode(rng.choice(labels), tuple(build(a, b) for a, b in zip(bounds, bounds[1:])))
        while rng.random() < p_chain:
            node = TreeNode(rng.choice(labels), (node,))
        return node

    sentence = Sentence(tuple(tokens))
    n = len(sentence)
    if n == 1:
        node = build(0, 1)
        if node.is_terminal:
            node = TreeNode(rng.choice(labels), (node,))
        return ConstituentTree(node, sentence)
    return ConstituentTree(build(0, n), sentence)


_WORDS = (
    "the", "a", "dog", "cat", "bird", "saw", "ran", "barks", "old", "red",
    "big", "house", "tree", "fast", "very", "on", "in", "with", "ball", "sun",
    "(", ")",
)


def random_corpus(
    n_trees: int,
    seed: int = 0,
    min_tokens: int = 5,
    max_tokens: int = 40,
    labels: Sequence[str] = DEFAULT_LABELS,
) -> List[ConstituentTree]:
    """Seeded corpus of normalized random trees; tokens include brackets."""
    rng = random.Random(seed)
    corpus = []
    for _ in range(n_trees):
        n = rng.randint(min_tokens, max_tokens)
        tokens = [rng.choice(_WORDS) for _ in range(n)]
        corpus.append(random_tree(rng, tokens, labels))
    return corpus


def all_trees(
    n: int, labels: Sequence[str] = DEFAULT_LABELS, terminal_wraps: bool = True
) -> Iterator[ConstituentTree]:
    """Every normalized tree over n placeholder tokens, exhaustively.

    With ``terminal_wraps`` a terminal may sit alone under one nonterminal
    (the full no-unary-chain domain); without it every nonterminal has at
    least two children, the domain where boundary labels are invertible.
    """
    sentence = Sentence(tuple("t%d" % i for i in range(1, n + 1)))
    labels = tuple(labels)

    @lru_cache(maxsize=None)
    def options(lo: int, hi: int) -> Tuple[TreeNode, ...]:
        if hi - lo == 1:
            leaf = TreeNode(hi)
            if terminal_wraps:
                return (leaf,) + tuple(TreeNode(label, (leaf,)) for label in labels)
            return (leaf,)
        inner = tuple(range(lo + 1, hi))
        out = []
        for r in range(1, len(inner) + 1):
            for cuts in combinations(inner, r):
                bounds = (lo,) + cuts + (hi,)
                parts = [options(a, b) for a, b in zip(bounds, bounds[1:])]
                for combo in _product(parts):
                    for label in labels:
                        out.append(TreeNode(label, combo))
        return tuple(out)

    if n == 1:
        for label in labels:
            yield ConstituentTree(TreeNode(label, (TreeNode(1),)), sentence, normalized=True)
        return
    for root in options(0, n):
        yield ConstituentTree(root, sentence, normalized=True)


def _product(pools: Sequence[Tuple[TreeNode, ...]]) -> Iterator[Tuple[TreeNode, ...]]:
    if not pools:
        yield ()
        return
    for head in pools[0]:
        for rest in _product(pools[1:]):
            yield (head,) + rest


_HEADS = ("h1", "h2", "h3", "h4")
_PRES = ("m1", "m2", "m3")
_NP_TAILS = ("ta",)
_VP_TAILS = ("tb",)


def _phrase(rng: random.Random, label: str, ambiguous: bool) -> List[str]:
    if ambiguous:
        heads, pres = _HEADS, _PRES
        tails = _NP_TAILS if label == "NP" else _VP_TAILS
    else:
        suffix = "n" if label == "NP" else "v"
        heads = tuple(h + suffix for h in _HEADS)
        pres = tuple(p + suffix for p in _PRES)
        tails = ("ta" + suffix,) if label == "NP" else ("tb" + suffix,)
    words = [rng.choice(heads), rng.choice(tails)]
    if rng.random() < 0.2:
        words.insert(0, rng.choice(pres))
    return words


def grammar_corpus(
    n_sentences: int, seed: int = 0, ambiguous: bool = True
) -> List[ConstituentTree]:
    """Flat S-over-phrases corpus; phrase labels NP/VP, 2 or 3 tokens each."""
    rng = random.Random(seed)
    corpus = []
    for _ in range(n_sentences):
        phrases = []
        tokens: List[str] = []
        for _ in range(rng.randint(2, 4)):
            label = rng.choice(("NP", "VP"))
            words = _phrase(rng, label, ambiguous)
            start = len(tokens)
            tokens.extend(words)
            phrases.append(
                TreeNode(label, tuple(TreeNode(start + j + 1) for j in range(len(words))))
            )
        root = TreeNode("S", tuple(phrases))
        corpus.append(ConstituentTree(root, Sentence(tuple(tokens)), normalized=True))
    return corpus


def prefix_pairs(
    n_pairs: int, seed: int = 0, ambiguous: bool = True
) -> List[Tuple[Sentence, Sentence]]:
    """Sentence pairs sharing a prefix of length >= 4 and diverging after it."""
    rng = random.Random(seed)
    pairs = []
    while len(pairs) < n_pairs:
        base = grammar_corpus(1, seed=rng.randrange(1 << 30), ambiguous=ambiguous)[0]
        tokens = list(base.sentence.tokens)
        if len(tokens) < 6:
            continue
        shared = rng.randint(4, len(tokens) - 2)
        fresh = grammar_corpus(1, seed=rng.randrange(1 << 30), ambiguous=ambiguous)[0]
        suffix = list(fresh.sentence.tokens)
        if suffix and suffix[0] == tokens[shared]:
            suffix[0] = "h1" if suffix[0] != "h1" else "h2"
        pairs.append(
            (
                Sentence(tuple(tokens)),
                Sentence(tuple(tokens[:shared] + suffix)),
            )
        )
    return pairs
