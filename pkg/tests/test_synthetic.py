import random
from functools import lru_cache

from incparse.trees import serialize
from incparse.synthetic import (
    all_trees,
    grammar_corpus,
    random_corpus,
    random_tree,
    random_tree_general,
)


def _count_trees(n, n_labels, terminal_wraps):
    """Count the domain by recurrence instead of enumeration.

    A unit over one token is a bare terminal plus, when wraps are allowed,
    one wrapped form per label; a unit over m >= 2 tokens picks a label and
    splits into at least two smaller units.
    """

    @lru_cache(maxsize=None)
    def unit(m):
        if m == 1:
            return 1 + (n_labels if terminal_wraps else 0)
        return n_labels * splits(m)

    @lru_cache(maxsize=None)
    def splits(m):
        total = 0
        for first in range(1, m):
            rest = m - first
            # the remainder is either a single sibling or splits further
            ways_rest = unit(rest) + (splits(rest) if rest >= 2 else 0)
            total += unit(first) * ways_rest
        return total

    if n == 1:
        return n_labels
    return n_labels * splits(n)


def _nonterminal_arities(tree):
    arities = []
    stack = [tree.root]
    while stack:
        node = stack.pop()
        if node.is_terminal:
            continue
        arities.append(len(node.children))
        stack.extend(node.children)
    return arities


class TestAllTrees:
    def test_counts_match_recurrence_with_wraps(self):
        for n, expected in [(2, 18), (3, 270), (4, 5022), (5, 104490)]:
            assert _count_trees(n, 2, True) == expected
            assert sum(1 for _ in all_trees(n, labels=("S", "NP"))) == expected

    def test_counts_match_recurrence_single_label(self):
        for n in range(1, 7):
            got = sum(1 for _ in all_trees(n, labels=("S",)))
            assert got == _count_trees(n, 1, True)
        assert _count_trees(6, 1, True) == 12608

    def test_counts_without_wraps_are_schroeder(self):
        # One label and strictly branching nodes: the little Schroeder numbers.
        for n, expected in [(2, 1), (3, 3), (4, 11), (5, 45), (6, 197)]:
            got = sum(1 for _ in all_trees(n, labels=("S",), terminal_wraps=False))
            assert got == expected
            assert _count_trees(n, 1, False) == expected

    def test_counts_without_wraps_two_labels(self):
        for n, expected in [(2, 2), (3, 10), (4, 62), (5, 430)]:
            got = sum(1 for _ in all_trees(n, labels=("S", "NP"), terminal_wraps=False))
            assert got == expected
            assert _count_trees(n, 2, False) == expected

    def test_enumeration_has_no_duplicates(self):
        seen = set()
        for tree in all_trees(4, labels=("S", "NP")):
            text = serialize(tree)
            assert text not in seen
            seen.add(text)

    def test_trees_are_normalized(self):
        for tree in all_trees(4, labels=("S", "NP")):
            assert tree.normalized
            tree.validate()
            stack = [tree.root]
            while stack:
                node = stack.pop()
                if node.is_terminal:
                    continue
                if len(node.children) == 1:
                    assert node.children[0].is_terminal
                stack.extend(node.children)

    def test_no_wraps_means_all_arities_at_least_two(self):
        for tree in all_trees(5, labels=("S",), terminal_wraps=False):
            assert min(_nonterminal_arities(tree)) >= 2


class TestRandomTree:
    def test_stays_in_invertible_domain(self):
        rng = random.Random(0)
        for _ in range(200):
            n = rng.randint(2, 20)
            tree = random_tree(rng, ["w%d" % j for j in range(n)])
            tree.validate()
            assert min(_nonterminal_arities(tree)) >= 2

    def test_single_token(self):
        tree = random_tree(random.Random(0), ["w"])
        assert serialize(tree) in ("(S w)", "(NP w)")

    def test_deterministic_per_seed(self):
        a = [serialize(random_tree(random.Random(5), ["x", "y", "z"])) for _ in range(5)]
        b = [serialize(random_tree(random.Random(5), ["x", "y", "z"])) for _ in range(5)]
        assert a == b


class TestRandomTreeGeneral:
    def test_produces_wraps_and_chains(self):
        rng = random.Random(1)
        saw_wrap = saw_chain = False
        for _ in range(300):
            tree = random_tree_general(rng, ["w%d" % j for j in range(6)])
            tree.validate()
            stack = [tree.root]
            while stack:
                node = stack.pop()
                if node.is_terminal:
                    continue
                if len(node.children) == 1:
                    if node.children[0].is_terminal:
                        saw_wrap = True
                    else:
                        saw_chain = True
                stack.extend(node.children)
        assert saw_wrap and saw_chain


class TestRandomCorpus:
    def test_sizes_and_token_range(self):
        corpus = random_corpus(50, seed=2, min_tokens=5, max_tokens=40)
        assert len(corpus) == 50
        assert all(5 <= len(t.sentence) <= 40 for t in corpus)

    def test_deterministic(self):
        a = [serialize(t) for t in random_corpus(20, seed=9)]
        b = [serialize(t) for t in random_corpus(20, seed=9)]
        assert a == b

    def test_includes_bracket_tokens(self):
        corpus = random_corpus(100, seed=0)
        tokens = {tok for tree in corpus for tok in tree.sentence.tokens}
        assert "(" in tokens and ")" in tokens


class TestGrammarCorpus:
    def test_shape(self):
        for tree in grammar_corpus(100, seed=0):
            assert tree.root.label == "S"
            assert 2 <= len(tree.root.children) <= 4
            for phrase in tree.root.children:
                assert phrase.label in ("NP", "VP")
                assert 2 <= len(phrase.children) <= 3
                assert all(child.is_terminal for child in phrase.children)

    def test_ambiguous_mode_shares_heads(self):
        corpus = grammar_corpus(200, seed=1, ambiguous=True)
        np_heads = set()
        vp_heads = set()
        for tree in corpus:
            for phrase in tree.root.children:
                head = tree.sentence.tokens[phrase.children[-2].label - 1]
                (np_heads if phrase.label == "NP" else vp_heads).add(head)
        assert np_heads & vp_heads

    def test_ambiguous_tail_reveals_label(self):
        for tree in grammar_corpus(100, seed=2, ambiguous=True):
            for phrase in tree.root.children:
                tail = tree.sentence.tokens[phrase.children[-1].label - 1]
                assert tail == ("ta" if phrase.label == "NP" else "tb")

    def test_unambiguous_vocabularies_are_disjoint(self):
        corpus = grammar_corpus(200, seed=3, ambiguous=False)
        np_words = set()
        vp_words = set()
        for tree in corpus:
            for phrase in tree.root.children:
                words = [tree.sentence.tokens[c.label - 1] for c in phrase.children]
                (np_words if phrase.label == "NP" else vp_words).update(words)
        assert not (np_words & vp_words)

    def test_deterministic(self):
        assert grammar_corpus(20, seed=7) == grammar_corpus(20, seed=7)
