import io
import random

import pytest
from sklearn.base import clone

from incparse.linearize import (
    FINAL,
    MODES,
    PENDING_LABEL,
    EmptyInput,
    IndexOutOfRange,
    NonPositiveDepth,
    SLLabel,
    TreeLinearizer,
    common_levels,
    decode,
    decode_prefix,
    encode,
    iter_labeled,
    parse_label,
    rel_to_abs,
    write_labeled,
)
from incparse.trees import Sentence, parse_bracketed, serialize, spans
from incparse.synthetic import all_trees, random_tree


def _ancestor_path(tree, index):
    """Labels from the root down to the terminal numbered ``index``."""
    path = []
    node = tree.root
    while not node.is_terminal:
        path.append(node)
        for child in node.children:
            left, right = (child.span if not child.is_terminal else (child.label - 1, child.label))
            if left < index <= right:
                node = child
                break
        else:
            raise AssertionError("terminal %d not under %r" % (index, node))
    return path


def _levels_by_paths(tree, index):
    """Count shared ancestors of terminals ``index`` and ``index + 1``."""
    a = _ancestor_path(tree, index)
    b = _ancestor_path(tree, index + 1)
    shared = 0
    for x, y in zip(a, b):
        if x is not y:
            break
        shared += 1
    return shared, a[shared - 1].label


class TestCommonLevels:
    def test_running_example(self):
        tree = parse_bracketed("(S (NP the dog) (VP barks))")
        assert common_levels(tree, 1) == (2, "NP")
        assert common_levels(tree, 2) == (1, "S")

    def test_matches_ancestor_walk_on_random_trees(self):
        rng = random.Random(23)
        for _ in range(300):
            n = rng.randint(2, 18)
            tree = random_tree(rng, ["w%d" % j for j in range(n)])
            for i in range(1, n):
                assert common_levels(tree, i) == _levels_by_paths(tree, i)

    def test_rejects_last_terminal(self):
        tree = parse_bracketed("(S (NP the dog) (VP barks))")
        with pytest.raises(IndexOutOfRange):
            common_levels(tree, 3)
        with pytest.raises(IndexOutOfRange):
            common_levels(tree, 0)


class TestEncode:
    def test_absolute_example(self):
        tree = parse_bracketed("(S (NP the dog) (VP barks))")
        labels = encode(tree, mode="absolute")
        assert [str(lab) for lab in labels] == ["2@NP", "1@S", "FINAL"]

    def test_relative_example(self):
        tree = parse_bracketed("(S (NP the dog) (VP barks))")
        labels = encode(tree, mode="relative")
        assert [str(lab) for lab in labels] == ["2@NP", "-1@S", "FINAL"]

    def test_first_relative_label_equals_absolute(self):
        rng = random.Random(3)
        for _ in range(50):
            tree = random_tree(rng, ["w%d" % j for j in range(rng.randint(2, 10))])
            assert encode(tree, mode="relative")[0] == encode(tree, mode="absolute")[0]

    def test_single_token_tree_is_one_final(self):
        tree = parse_bracketed("(S w)")
        assert encode(tree, mode="absolute") == [FINAL]

    def test_rejects_unknown_mode(self):
        tree = parse_bracketed("(S a b)")
        with pytest.raises(ValueError):
            encode(tree, mode="sideways")
        assert set(MODES) == {"absolute", "relative"}


class TestDecode:
    def test_example_round_trip(self):
        tree = parse_bracketed("(S (NP the dog) (VP barks fast))")
        for mode in MODES:
            assert decode(encode(tree, mode=mode), tree.sentence, mode=mode) == tree

    def test_singleton_over_terminal_is_invisible(self):
        # (VP barks) adds no boundary anywhere, so the label sequence is the
        # same as for the flat tree and decoding returns the flat tree.
        wrapped = parse_bracketed("(S (NP the dog) (VP barks))")
        flat = parse_bracketed("(S (NP the dog) barks)")
        for mode in MODES:
            assert encode(wrapped, mode=mode) == encode(flat, mode=mode)
            assert decode(encode(wrapped, mode=mode), wrapped.sentence, mode=mode) == flat

    def test_left_branching_depth_jump(self):
        text = "(S (A (B (C a b) c) d) e)"
        tree = parse_bracketed(text)
        for mode in MODES:
            got = decode(encode(tree, mode=mode), tree.sentence, mode=mode)
            assert serialize(got) == text

    def test_right_branching(self):
        text = "(S a (B b (C c (D d e))))"
        tree = parse_bracketed(text)
        for mode in MODES:
            assert decode(encode(tree, mode=mode), tree.sentence, mode=mode) == tree

    def test_round_trip_random(self):
        rng = random.Random(101)
        for _ in range(500):
            n = rng.randint(2, 25)
            tree = random_tree(rng, ["w%d" % j for j in range(n)])
            for mode in MODES:
                assert decode(encode(tree, mode=mode), tree.sentence, mode=mode) == tree

    def test_round_trip_exhaustive_small(self):
        for n in range(2, 6):
            for tree in all_trees(n, labels=("S", "NP"), terminal_wraps=False):
                for mode in MODES:
                    labels = encode(tree, mode=mode)
                    assert decode(labels, tree.sentence, mode=mode) == tree

    def test_single_token_root_label_is_lost(self):
        tree = parse_bracketed("(S w)")
        got = decode(encode(tree, mode="absolute"), tree.sentence, mode="absolute")
        assert serialize(got) == "(X w)"

    def test_length_mismatch_rejected(self):
        tree = parse_bracketed("(S a b)")
        labels = encode(tree, mode="absolute")
        with pytest.raises(ValueError):
            decode(labels, Sentence(("a", "b", "c")), mode="absolute")

    def test_empty_rejected(self):
        with pytest.raises(EmptyInput):
            decode((), Sentence(("a",)), mode="absolute")


class TestRelToAbs:
    def test_cross_mode_identity(self):
        rng = random.Random(7)
        for _ in range(200):
            n = rng.randint(2, 20)
            tree = random_tree(rng, ["w%d" % j for j in range(n)])
            rel = encode(tree, mode="relative")
            assert rel_to_abs(rel) == encode(tree, mode="absolute")

    def test_rejects_nonpositive_running_depth(self):
        labels = (SLLabel(2, "S"), SLLabel(-2, "S"), FINAL)
        with pytest.raises(NonPositiveDepth):
            rel_to_abs(labels)


class TestRepair:
    def test_interior_final_is_replaced(self):
        tree = parse_bracketed("(S (NP the dog) (VP barks))")
        labels = list(encode(tree, mode="absolute"))
        labels[0] = FINAL
        got = decode(labels, tree.sentence, mode="absolute", vocab=["NP", "S", "VP"])
        assert got.sentence == tree.sentence
        assert sorted(spans(got))

    def test_missing_final_is_forced(self):
        tree = parse_bracketed("(S (NP the dog) (VP barks))")
        labels = list(encode(tree, mode="absolute"))
        labels[-1] = SLLabel(4, "NP")
        got = decode(labels, tree.sentence, mode="absolute")
        assert got.sentence == tree.sentence

    def test_depth_below_one_is_clamped(self):
        labels = (SLLabel(-5, "NP"), FINAL)
        got = decode(labels, Sentence(("a", "b")), mode="absolute", fallback_label="X")
        assert got.sentence.tokens == ("a", "b")

    def test_decode_total_on_junk(self):
        rng = random.Random(55)
        pool = [SLLabel(d, lab) for d in range(-3, 7) for lab in ("A", "B")]
        for _ in range(300):
            n = rng.randint(1, 12)
            labels = [pool[rng.randrange(len(pool))] for _ in range(n - 1)] + [FINAL]
            for mode in MODES:
                got = decode(labels, Sentence(tuple("w%d" % j for j in range(n))), mode=mode)
                assert got.sentence.tokens == tuple("w%d" % j for j in range(n))
                got.validate()


class TestDecodePrefix:
    def test_pending_spine(self):
        tree = parse_bracketed("(S (NP the dog) (VP barks))")
        labels = encode(tree, mode="absolute")
        partial = decode_prefix(labels[:1], Sentence(("the",)), mode="absolute")
        assert serialize(partial) == "(%s (NP the))" % PENDING_LABEL

    def test_closed_prefix_spans_appear_in_full_tree(self):
        rng = random.Random(77)
        for _ in range(100):
            n = rng.randint(2, 15)
            tree = random_tree(rng, ["w%d" % j for j in range(n)])
            labels = encode(tree, mode="absolute")
            full = set(spans(tree))
            for cut in range(1, n):
                part = decode_prefix(
                    labels[:cut], Sentence(tree.sentence.tokens[:cut]), mode="absolute"
                )
                for span in spans(part):
                    # Constituents ending at the frontier are still open: the
                    # label may be pending and the right edge can still move.
                    if span.right == cut:
                        continue
                    assert span in full


class TestLabelText:
    def test_parse_label_round_trip(self):
        assert parse_label("2@NP") == SLLabel(2, "NP")
        assert parse_label("-1@S") == SLLabel(-1, "S")
        assert parse_label("FINAL") is FINAL
        assert str(SLLabel(3, "VP")) == "3@VP"

    def test_label_may_contain_separator(self):
        lab = parse_label("2@A@B")
        assert lab.d == 2
        assert lab.c == "A@B"

    def test_rejects_garbage(self):
        with pytest.raises(ValueError):
            parse_label("NP")
        with pytest.raises(ValueError):
            parse_label("x@NP")


class TestLabeledFile:
    def test_round_trip(self):
        tree = parse_bracketed("(S (NP the dog) (VP barks))")
        pairs = [(tree.sentence, [str(lab) for lab in encode(tree, mode="absolute")])]
        buf = io.StringIO()
        write_labeled(pairs, buf)
        text = buf.getvalue()
        assert text == "the\t_\t2@NP\ndog\t_\t1@S\nbarks\t_\tFINAL\n"
        back = list(iter_labeled(text.splitlines()))
        assert len(back) == 1
        sentence, labels = back[0]
        assert sentence.tokens == tree.sentence.tokens
        assert [str(lab) for lab in labels] == ["2@NP", "1@S", "FINAL"]

    def test_blank_line_separates_sentences(self):
        lines = ["a\tD\tFINAL", "", "b\t_\t1@S", "c\t_\tFINAL"]
        got = list(iter_labeled(lines))
        assert len(got) == 2
        assert got[0][0].pos_tags == ("D",)

    def test_bad_field_count_reports_line(self):
        with pytest.raises(ValueError) as info:
            list(iter_labeled(["a\tFINAL"]))
        assert str(info.value).startswith("line 1:")


class TestTreeLinearizer:
    def test_transform_inverse(self):
        trees = [parse_bracketed("(S (NP the dog) (VP barks fast))"), parse_bracketed("(S a b)")]
        enc = TreeLinearizer(mode="relative").fit(trees)
        seqs = enc.transform(trees)
        assert enc.inverse_transform(seqs, [t.sentence for t in trees]) == trees

    def test_get_params_and_clone(self):
        enc = TreeLinearizer(mode="relative")
        params = enc.get_params()
        assert params["mode"] == "relative"
        twin = clone(enc)
        assert twin.get_params() == params

    def test_set_params(self):
        enc = TreeLinearizer()
        enc.set_params(mode="relative")
        assert enc.mode == "relative"

    def test_invalid_mode_rejected_at_fit(self):
        with pytest.raises(ValueError):
            TreeLinearizer(mode="bogus").fit([parse_bracketed("(S a b)")])
