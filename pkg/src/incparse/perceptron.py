"""Sparse multiclass averaged perceptron.

Weights are integers throughout: the averaged model is kept as the running
sum of the weight vector over all update ticks, which preserves the argmax of
the true average (a positive constant divisor) while staying exactly
serializable.  Same seed, same data, same bytes.
"""

from __future__ import annotations

from typing import Dict, Iterable, List, Sequence


class AveragedPerceptron:
    def __init__(self):
        self.weights: Dict[str, Dict[str, int]] = {}
        self._acc: Dict[str, Dict[str, int]] = {}
        self._stamp: Dict[str, Dict[str, int]] = {}
        self.steps = 0

    def tick(self, count: int = 1):
        """Advance the averaging clock; call once per training decision.

        A larger count stands in for decisions that provably would not
        change the weights (epochs after the mistake count hits zero), so
        the average still reflects the full training budget.
        """
        self.steps += count

    def _bump(self, feature: str, key: str, delta: int):
        row = self.weights.setdefault(feature, {})
        acc = self._acc.setdefault(feature, {})
        stamp = self._stamp.setdefault(feature, {})
        current = row.get(key, 0)
        acc[key] = acc.get(key, 0) + current * (self.steps - stamp.get(key, 0))
        stamp[key] = self.steps
        row[key] = current + delta

    def update(self, features: Iterable[str], gold: str, predicted: str):
        if gold == predicted:
            return
        for feature in features:
            self._bump(feature, gold, +1)
            self._bump(feature, predicted, -1)

    def finalize(self):
        """Flush pending averaging sums; call once after the last epoch."""
        for feature, row in self.weights.items():
            acc = self._acc.setdefault(feature, {})
            stamp = self._stamp.setdefault(feature, {})
            for key, value in row.items():
                acc[key] = acc.get(key, 0) + value * (self.steps - stamp.get(key, 0))
                stamp[key] = self.steps

    def scores(self, features: Sequence[str], keys: Sequence[str], averaged: bool = False) -> List[int]:
        """Summed weight per key; unknown features contribute nothing."""
        table = self._acc if averaged else self.weights
        out = [0] * len(keys)
        index = {key: pos for pos, key in enumerate(keys)}
        for feature in features:
            row = table.get(feature)
            if not row:
                continue
            for key, value in row.items():
                pos = index.get(key)
                if pos is not None:
                    out[pos] += value
        return out

    def averaged_table(self) -> Dict[str, Dict[str, int]]:
        """Accumulated weights, dropping all-zero entries."""
        out: Dict[str, Dict[str, int]] = {}
        for feature, row in self._acc.items():
            kept = {key: value for key, value in row.items() if value != 0}
            if kept:
                out[feature] = kept
        return out

    @classmethod
    def from_averaged(cls, table: Dict[str, Dict[str, int]]) -> "AveragedPerceptron":
        model = cls()
        model._acc = {f: dict(row) for f, row in table.items()}
        return model
