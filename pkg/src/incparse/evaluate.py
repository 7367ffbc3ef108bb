"""Labeled bracketing scores, per-label breakdowns, and corpus statistics.

Scoring is evalb-flavored: each sentence contributes the multiset
intersection of its gold and predicted span sets, computed after unary
expansion, optional functional-tag stripping, label equivalence mapping, and
delete-label filtering.  Parameter files support the DELETE_LABEL and
EQ_LABEL directives; anything else is ignored with a warning.
"""

from __future__ import annotations

import warnings
from collections import Counter, defaultdict
from dataclasses import dataclass, field
from typing import Dict, List, Mapping, NamedTuple, Sequence, Tuple

from .trees import ConstituentTree, expand_unary, spans
from .validation import check_corpus, check_paired_corpora


def strip_functional_tag(label: str) -> str:
    """Cut at the first "-" or "=".

    Labels that begin with a separator (-NONE-, -LRB-) are trace and bracket
    symbols, not tagged categories; they pass through untouched so that
    DELETE_LABEL entries naming them still match.
    """
    if label and label[0] in "-=":
        return label
    for at, ch in enumerate(label):
        if ch in "-=":
            return label[:at]
    return label


@dataclass(frozen=True)
class EvalParams:
    delete_labels: frozenset = frozenset()
    eq_labels: Mapping[str, str] = field(default_factory=dict)
    strip_functional: bool = False

    def normalize(self, label: str) -> str:
        if self.strip_functional:
            label = strip_functional_tag(label)
        return self.eq_labels.get(label, label)


def read_prm(path, strip_functional: bool = False) -> EvalParams:
    """Parse an evalb parameter file; unsupported directives warn and drop."""
    deletes = set()
    eq: Dict[str, str] = {}
    unsupported = set()
    with open(path, encoding="utf-8") as handle:
        for raw in handle:
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            parts = line.split()
            if parts[0] == "DELETE_LABEL" and len(parts) == 2:
                deletes.add(parts[1])
            elif parts[0] == "EQ_LABEL" and len(parts) == 3:
                eq[parts[2]] = parts[1]
            else:
                unsupported.add(parts[0])
    for directive in sorted(unsupported):
        warnings.warn("ignoring unsupported parameter directive %r" % directive)
    return EvalParams(frozenset(deletes), eq, strip_functional)


class LabelScore(NamedTuple):
    matched: int
    gold: int
    pred: int
    f1: float


@dataclass
class EvalReport:
    matched: int
    gold_total: int
    pred_total: int
    precision: float
    recall: float
    f1: float
    per_label: Dict[str, LabelScore]
    exact_match: int
    sentences: int


def _ratio(num: int, den: int) -> float:
    return num / den if den else 0.0


def _f1(precision: float, recall: float) -> float:
    total = precision + recall
    return 2 * precision * recall / total if total else 0.0


def scored_spans(tree: ConstituentTree, params: EvalParams) -> Counter:
    """Span multiset of one tree under the scoring normalization."""
    expanded = expand_unary(tree)
    out: Counter = Counter()
    for left, right, label in spans(expanded):
        label = params.normalize(label)
        if label in params.delete_labels:
            continue
        out[(left, right, label)] += 1
    return out


def score(
    gold: Sequence[ConstituentTree],
    pred: Sequence[ConstituentTree],
    params: EvalParams = EvalParams(),
) -> EvalReport:
    check_paired_corpora(gold, pred)
    matched = gold_total = pred_total = exact = 0
    by_label: Dict[str, List[int]] = defaultdict(lambda: [0, 0, 0])
    for gold_tree, pred_tree in zip(gold, pred):
        gold_set = scored_spans(gold_tree, params)
        pred_set = scored_spans(pred_tree, params)
        common = gold_set & pred_set
        matched += sum(common.values())
        gold_total += sum(gold_set.values())
        pred_total += sum(pred_set.values())
        if gold_set == pred_set:
            exact += 1
        for (_, _, label), count in gold_set.items():
            by_label[label][1] += count
        for (_, _, label), count in pred_set.items():
            by_label[label][2] += count
        for (_, _, label), count in common.items():
            by_label[label][0] += count
    precision = _ratio(matched, pred_total)
    recall = _ratio(matched, gold_total)
    per_label = {
        label: LabelScore(m, g, p, _f1(_ratio(m, p), _ratio(m, g)))
        for label, (m, g, p) in by_label.items()
    }
    return EvalReport(
        matched=matched,
        gold_total=gold_total,
        pred_total=pred_total,
        precision=precision,
        recall=recall,
        f1=_f1(precision, recall),
        per_label=per_label,
        exact_match=exact,
        sentences=len(gold),
    )


def per_constituent(
    gold: Sequence[ConstituentTree],
    pred: Sequence[ConstituentTree],
    params: EvalParams = EvalParams(),
) -> List[Tuple[str, LabelScore]]:
    """Per-label scores ranked by gold frequency (ties alphabetical)."""
    report = score(gold, pred, params)
    return sorted(report.per_label.items(), key=lambda item: (-item[1].gold, item[0]))


def corpus_stats(corpus: Sequence[ConstituentTree]) -> List[Tuple[str, float, float]]:
    """(label, frequency %, average span length) rows, most frequent first.

    The root node and the upper nodes of unary chains are left out; a
    nonterminal alone over one terminal still counts (it is a real
    constituent, not a chain link).
    """
    check_corpus(corpus)
    counts: Counter = Counter()
    lengths: Dict[str, int] = defaultdict(int)
    for tree in corpus:
        expanded = expand_unary(tree)
        stack = list(expanded.root.children)
        while stack:
            node = stack.pop()
            if node.is_terminal:
                continue
            stack.extend(node.children)
            if len(node.children) == 1 and not node.children[0].is_terminal:
                continue
            left, right = node.span
            counts[node.label] += 1
            lengths[node.label] += right - left
    total = sum(counts.values())
    rows = [
        (label, 100.0 * count / total, lengths[label] / count)
        for label, count in counts.items()
    ]
    rows.sort(key=lambda row: (-row[1], row[0]))
    return rows
