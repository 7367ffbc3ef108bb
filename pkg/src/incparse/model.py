"""Trainable incremental parsers.

Both estimators are greedy averaged-perceptron classifiers over prefix
windows: ``SequenceLabelingParser`` predicts one boundary label per token and
decodes them into a tree; ``TransitionParser`` predicts one attach-juxtapose
action per token with a factored score over (kind, target bucket, parent
label, new label) and legality enforced by construction, since candidate sets
are exactly the legal component values for the current state.

Targets are bucketed by chain position counted from the bottom (0 = lowest)
with a single overflow bucket.  Ties are broken toward the lexicographically
smallest class (for labels) or the bucket closest to the bottom (for
targets), so prediction is deterministic.

Model files are JSON: a magic string, a format version, the decoder kind,
the constructor parameters, the label inventory, and integer averaged
weights.  Loading any other version is an error.  Training with the same
seed on the same corpus writes byte-identical files.
"""

from __future__ import annotations

import json
import random
from collections import Counter
from typing import List, Optional, Sequence, Tuple

from sklearn.base import BaseEstimator
from sklearn.utils.validation import check_is_fitted

from .features import DelayConfig, extract_sl_features, extract_tb_features
from .linearize import FINAL, SLLabel, decode, encode, parse_label
from .perceptron import AveragedPerceptron
from .transitions import Action, ParserState, apply, format_action, iter_oracle_states
from .trees import ConstituentTree, Sentence, collapse_unary, expand_unary
from .validation import check_corpus

MAGIC = "incparse-model"
FORMAT_VERSION = 1


class ModelFormatError(ValueError):
    pass


def _argmax(scores: Sequence[int], keys: Sequence[str]) -> int:
    """Index of the best score; the first (lowest-sorted) key wins ties."""
    best = 0
    for j in range(1, len(keys)):
        if scores[j] > scores[best]:
            best = j
    return best


def _runner_up(scores: Sequence[int], skip: int) -> Optional[int]:
    """Index of the best score other than ``skip``; None if there is none."""
    best = None
    for j, value in enumerate(scores):
        if j == skip:
            continue
        if best is None or value > scores[best]:
            best = j
    return best


class SequenceLabelingParser(BaseEstimator):
    """Greedy per-token labeler with delay-k lookahead."""

    def __init__(
        self,
        mode: str = "absolute",
        delay: int = 0,
        context: int = 2,
        epochs: int = 10,
        seed: int = 0,
        margin: int = 1,
        pad_symbol: str = "<pad>",
        join_char: str = "+",
        fallback_label: str = "X",
    ):
        self.mode = mode
        self.delay = delay
        self.context = context
        self.epochs = epochs
        self.seed = seed
        self.margin = margin
        self.pad_symbol = pad_symbol
        self.join_char = join_char
        self.fallback_label = fallback_label

    def _cfg(self) -> DelayConfig:
        return DelayConfig(self.delay, self.pad_symbol, self.context)

    def _normalize(self, tree: ConstituentTree) -> ConstituentTree:
        return tree if tree.normalized else collapse_unary(tree, self.join_char)

    def fit(self, X: Sequence[ConstituentTree], y=None):
        check_corpus(X)
        cfg = self._cfg()
        data = []
        constituent_counts: Counter = Counter()
        classes = set()
        for tree in X:
            normalized = self._normalize(tree)
            labels = encode(normalized, self.mode)
            strings = [str(label) for label in labels]
            for label in labels:
                if not label.is_final:
                    constituent_counts[label.c] += 1
            classes.update(strings)
            data.append((normalized.sentence, strings))
        self.classes_ = tuple(sorted(classes))
        self.nonfinal_classes_ = tuple(c for c in self.classes_ if c != "FINAL")
        self.label_counts_ = dict(constituent_counts)
        self.most_common_ = (
            min(constituent_counts, key=lambda c: (-constituent_counts[c], c))
            if constituent_counts
            else self.fallback_label
        )

        model = AveragedPerceptron()
        rng = random.Random(self.seed)
        order = list(range(len(data)))
        keys = self.nonfinal_classes_
        position = {cls: at for at, cls in enumerate(keys)}
        per_epoch = sum(len(sentence) - 1 for sentence, _ in data)
        for epoch in range(self.epochs):
            rng.shuffle(order)
            updates = 0
            for idx in order:
                sentence, gold = data[idx]
                for i in range(1, len(sentence)):  # position n is forced FINAL
                    feats = extract_sl_features(sentence, i, cfg)
                    model.tick()
                    scores = model.scores(feats, keys, averaged=False)
                    at = position[gold[i - 1]]
                    rival = _runner_up(scores, at)
                    if rival is not None and scores[at] - scores[rival] <= self.margin:
                        model.update(feats, keys[at], keys[rival])
                        updates += 1
            if updates == 0:
                # weights are now fixed points; credit the remaining epochs
                # to the averaging clock instead of replaying them
                model.tick((self.epochs - 1 - epoch) * per_epoch)
                break
        model.finalize()
        self.model_ = model
        self.train_accuracy_ = self._accuracy(data, cfg)
        return self

    def _best(self, model: AveragedPerceptron, feats: List[str], averaged: bool) -> str:
        keys = self.nonfinal_classes_
        if not keys:
            return "FINAL"
        scores = model.scores(feats, keys, averaged)
        return keys[_argmax(scores, keys)]

    def _accuracy(self, data, cfg) -> float:
        correct = total = 0
        for sentence, gold in data:
            for i in range(1, len(sentence)):
                feats = extract_sl_features(sentence, i, cfg)
                total += 1
                if self._best(self.model_, feats, averaged=True) == gold[i - 1]:
                    correct += 1
        return correct / total if total else 1.0

    def predict_labels(self, sentences: Sequence[Sentence]) -> List[List[SLLabel]]:
        check_is_fitted(self, "model_")
        cfg = self._cfg()
        out = []
        for sentence in sentences:
            labels = [
                parse_label(self._best(self.model_, extract_sl_features(sentence, i, cfg), True))
                for i in range(1, len(sentence))
            ]
            labels.append(FINAL)
            out.append(labels)
        return out

    def predict(self, sentences: Sequence[Sentence]) -> List[ConstituentTree]:
        vocab = set(self.label_counts_)
        trees = []
        for sentence, labels in zip(sentences, self.predict_labels(sentences)):
            tree = decode(
                labels,
                sentence,
                self.mode,
                fallback_label=self.fallback_label,
                vocab=vocab,
                unknown_label=self.most_common_,
            )
            trees.append(expand_unary(tree, self.join_char))
        return trees

    def decisions(self, sentence: Sentence) -> List[str]:
        """Per-token decision strings, for incrementality audits."""
        return [str(label) for label in self.predict_labels([sentence])[0]]

    def _payload(self) -> dict:
        return {
            "format": MAGIC,
            "version": FORMAT_VERSION,
            "decoder": "sl",
            "params": self.get_params(),
            "classes": list(self.classes_),
            "label_counts": self.label_counts_,
            "weights": self.model_.averaged_table(),
            "steps": self.model_.steps,
        }

    def save(self, path):
        check_is_fitted(self, "model_")
        with open(path, "w", encoding="utf-8") as handle:
            json.dump(self._payload(), handle, sort_keys=True, separators=(",", ":"))
            handle.write("\n")


class TransitionParser(BaseEstimator):
    """Greedy attach-juxtapose parser with delay-k lookahead."""

    def __init__(
        self,
        delay: int = 0,
        context: int = 2,
        epochs: int = 10,
        seed: int = 0,
        margin: int = 1,
        pad_symbol: str = "<pad>",
        join_char: str = "+",
        tgt_buckets: int = 8,
    ):
        self.delay = delay
        self.context = context
        self.epochs = epochs
        self.seed = seed
        self.margin = margin
        self.pad_symbol = pad_symbol
        self.join_char = join_char
        self.tgt_buckets = tgt_buckets

    def _cfg(self) -> DelayConfig:
        return DelayConfig(self.delay, self.pad_symbol, self.context)

    def _normalize(self, tree: ConstituentTree) -> ConstituentTree:
        return tree if tree.normalized else collapse_unary(tree, self.join_char)

    def _bucket(self, position: int, chain_len: int) -> str:
        distance = chain_len - 1 - position
        return str(distance) if distance < self.tgt_buckets else "%d+" % self.tgt_buckets

    def _components(self, action: Action, chain_len: int) -> Tuple[str, str, str, str]:
        tgt = "_" if action.tgt is None else self._bucket(action.tgt, chain_len)
        prt = action.prt if action.prt is not None else "_"
        new = action.new if action.new is not None else "_"
        return (action.kind, tgt, prt, new)

    def _tgt_values(self, chain_len: int) -> List[str]:
        values = [str(d) for d in range(min(chain_len, self.tgt_buckets))]
        if chain_len > self.tgt_buckets:
            values.append("%d+" % self.tgt_buckets)
        return values

    def _group_candidates(self, chain_len: int) -> List[Tuple[str, List[str]]]:
        """Legal values per score group in the current state."""
        if chain_len == 0:
            return [("prt", list(self.labels_))]
        return [
            ("kind", ["attach", "juxtapose"]),
            ("tgt", self._tgt_values(chain_len)),
            ("prt", ["_"] + list(self.labels_)),
            ("new", ["_"] + list(self.labels_)),
        ]

    def _predict_components(
        self, model: AveragedPerceptron, feats: List[str], chain_len: int, averaged: bool
    ) -> Tuple[str, str, str, str]:
        labels = self.labels_
        if chain_len == 0:
            keys = ["prt=%s" % lab for lab in labels]
            scores = model.scores(feats, keys, averaged)
            return ("attach", "_", labels[_argmax(scores, keys)], "_")
        tgt_values = self._tgt_values(chain_len)
        prt_values = ["_"] + list(labels)
        kind_keys = ["kind=attach", "kind=juxtapose"]
        tgt_keys = ["tgt=%s" % v for v in tgt_values]
        prt_keys = ["prt=%s" % v for v in prt_values]
        new_keys = ["new=_"] + ["new=%s" % lab for lab in labels]
        keys = kind_keys + tgt_keys + prt_keys + new_keys
        scores = model.scores(feats, keys, averaged)
        at = 2
        tgt_scores = scores[at : at + len(tgt_keys)]
        at += len(tgt_keys)
        prt_scores = scores[at : at + len(prt_keys)]
        at += len(prt_keys)
        new_none_score = scores[at]
        new_scores = scores[at + 1 :]
        best_tgt = _argmax(tgt_scores, tgt_keys)
        best_prt = _argmax(prt_scores, prt_keys)
        best_new = _argmax(new_scores, labels) if labels else None
        attach_total = scores[0] + tgt_scores[best_tgt] + prt_scores[best_prt] + new_none_score
        if best_new is None:
            juxtapose_total = attach_total - 1  # no labels to create: attach only
        else:
            juxtapose_total = (
                scores[1] + tgt_scores[best_tgt] + prt_scores[best_prt] + new_scores[best_new]
            )
        if attach_total >= juxtapose_total:
            return ("attach", tgt_values[best_tgt], prt_values[best_prt], "_")
        return ("juxtapose", tgt_values[best_tgt], prt_values[best_prt], labels[best_new])

    def _to_action(self, comps: Tuple[str, str, str, str], chain_len: int) -> Action:
        kind, tgt, prt, new = comps
        if tgt == "_":
            position = None
        else:
            distance = self.tgt_buckets if tgt.endswith("+") else int(tgt)
            position = chain_len - 1 - distance
        return Action(
            kind,
            position,
            None if prt == "_" else prt,
            None if new == "_" else new,
        )

    def fit(self, X: Sequence[ConstituentTree], y=None):
        check_corpus(X)
        cfg = self._cfg()
        normalized = [self._normalize(tree) for tree in X]
        labels = set()
        for tree in normalized:
            stack = [tree.root]
            while stack:
                node = stack.pop()
                if not node.is_terminal:
                    labels.add(node.label)
                    stack.extend(node.children)
        self.labels_ = tuple(sorted(labels))

        data = []
        for tree in normalized:
            block = []
            for state, action in iter_oracle_states(tree):
                feats = extract_tb_features(state, cfg)
                block.append((feats, self._components(action, len(state.chain)), len(state.chain)))
            data.append(block)

        model = AveragedPerceptron()
        rng = random.Random(self.seed)
        order = list(range(len(data)))
        per_epoch = sum(len(block) for block in data)
        groups = ("kind", "tgt", "prt", "new")
        for epoch in range(self.epochs):
            rng.shuffle(order)
            updates = 0
            for idx in order:
                for feats, gold, chain_len in data[idx]:
                    model.tick()
                    gold_value = dict(zip(groups, gold))
                    for group, values in self._group_candidates(chain_len):
                        keys = ["%s=%s" % (group, v) for v in values]
                        scores = model.scores(feats, keys, averaged=False)
                        at = values.index(gold_value[group])
                        rival = _runner_up(scores, at)
                        if rival is not None and scores[at] - scores[rival] <= self.margin:
                            model.update(feats, keys[at], keys[rival])
                            updates += 1
            if updates == 0:
                # weights are now fixed points; credit the remaining epochs
                # to the averaging clock instead of replaying them
                model.tick((self.epochs - 1 - epoch) * per_epoch)
                break
        model.finalize()
        self.model_ = model
        self.train_accuracy_ = self._accuracy(normalized, cfg)
        return self

    def _accuracy(self, trees: Sequence[ConstituentTree], cfg: DelayConfig) -> float:
        correct = total = 0
        for tree in trees:
            for state, action in iter_oracle_states(tree):
                feats = extract_tb_features(state, cfg)
                comps = self._predict_components(self.model_, feats, len(state.chain), True)
                total += 1
                if self._to_action(comps, len(state.chain)) == action:
                    correct += 1
        return correct / total if total else 1.0

    def predict_actions(self, sentences: Sequence[Sentence]) -> List[List[Action]]:
        check_is_fitted(self, "model_")
        cfg = self._cfg()
        out = []
        for sentence in sentences:
            state = ParserState(sentence)
            actions = []
            while not state.done:
                feats = extract_tb_features(state, cfg)
                comps = self._predict_components(self.model_, feats, len(state.chain), True)
                action = self._to_action(comps, len(state.chain))
                actions.append(action)
                state = apply(state, action)
            out.append(actions)
        return out

    def predict(self, sentences: Sequence[Sentence]) -> List[ConstituentTree]:
        check_is_fitted(self, "model_")
        cfg = self._cfg()
        trees = []
        for sentence in sentences:
            state = ParserState(sentence)
            while not state.done:
                feats = extract_tb_features(state, cfg)
                comps = self._predict_components(self.model_, feats, len(state.chain), True)
                state = apply(state, self._to_action(comps, len(state.chain)))
            trees.append(expand_unary(state.partial, self.join_char))
        return trees

    def decisions(self, sentence: Sentence) -> List[str]:
        """Per-token decision strings, for incrementality audits."""
        return [format_action(a) for a in self.predict_actions([sentence])[0]]

    def _payload(self) -> dict:
        return {
            "format": MAGIC,
            "version": FORMAT_VERSION,
            "decoder": "tb",
            "params": self.get_params(),
            "labels": list(self.labels_),
            "weights": self.model_.averaged_table(),
            "steps": self.model_.steps,
        }

    def save(self, path):
        check_is_fitted(self, "model_")
        with open(path, "w", encoding="utf-8") as handle:
            json.dump(self._payload(), handle, sort_keys=True, separators=(",", ":"))
            handle.write("\n")


def train_sl(corpus: Sequence[ConstituentTree], **params) -> SequenceLabelingParser:
    return SequenceLabelingParser(**params).fit(corpus)


def train_tb(corpus: Sequence[ConstituentTree], **params) -> TransitionParser:
    return TransitionParser(**params).fit(corpus)


def load_model(path):
    """Load a saved parser; refuses files with the wrong magic or version."""
    with open(path, encoding="utf-8") as handle:
        try:
            payload = json.load(handle)
        except json.JSONDecodeError as err:
            raise ModelFormatError("not a model file: %s" % err) from None
    if not isinstance(payload, dict) or payload.get("format") != MAGIC:
        raise ModelFormatError("not a model file (missing %r magic)" % MAGIC)
    if payload.get("version") != FORMAT_VERSION:
        raise ModelFormatError(
            "unsupported model format version %r (expected %d)"
            % (payload.get("version"), FORMAT_VERSION)
        )
    decoder = payload.get("decoder")
    model = AveragedPerceptron.from_averaged(payload["weights"])
    model.steps = payload.get("steps", 0)
    if decoder == "sl":
        parser = SequenceLabelingParser(**payload["params"])
        parser.classes_ = tuple(payload["classes"])
        parser.nonfinal_classes_ = tuple(c for c in parser.classes_ if c != "FINAL")
        parser.label_counts_ = dict(payload["label_counts"])
        parser.most_common_ = (
            min(parser.label_counts_, key=lambda c: (-parser.label_counts_[c], c))
            if parser.label_counts_
            else parser.fallback_label
        )
        parser.model_ = model
        return parser
    if decoder == "tb":
        parser = TransitionParser(**payload["params"])
        parser.labels_ = tuple(payload["labels"])
        parser.model_ = model
        return parser
    raise ModelFormatError("unknown decoder kind %r" % decoder)
