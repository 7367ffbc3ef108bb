"""Prefix-determinism auditing.

A delay-k incremental parser may read w_1..w_{i+k} when deciding at token i.
Two sentences agreeing on their first L tokens therefore pin down every
decision at positions i with i + k <= L; any earlier divergence proves the
parser peeked past its window.  The audit runs a predictor over sentence
pairs with shared prefixes and reports the first diverging position per
pair (1-based), flagging those at or before L - k.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, List, Optional, Sequence, Tuple

from .trees import Sentence

Decider = Callable[[Sentence], Sequence[str]]


@dataclass(frozen=True)
class PairAudit:
    shared: int
    divergence: Optional[int]
    boundary: int

    @property
    def violation(self) -> bool:
        return self.divergence is not None and self.divergence <= self.boundary


@dataclass(frozen=True)
class AuditReport:
    k: int
    pairs: Tuple[PairAudit, ...]

    @property
    def violations(self) -> int:
        return sum(1 for pair in self.pairs if pair.violation)

    @property
    def passed(self) -> bool:
        return self.violations == 0


def shared_prefix_length(a: Sentence, b: Sentence) -> int:
    length = 0
    for x, y in zip(a.tokens, b.tokens):
        if x != y:
            break
        length += 1
    return length


def first_divergence(da: Sequence[str], db: Sequence[str]) -> Optional[int]:
    """1-based position of the first differing decision, None if none differ."""
    for at, (x, y) in enumerate(zip(da, db), start=1):
        if x != y:
            return at
    return None


def audit_incrementality(
    decide: Decider, pairs: Sequence[Tuple[Sentence, Sentence]], k: int = 0
) -> AuditReport:
    """Run the predictor over each pair and check the k-shifted boundary.

    ``decide`` maps a sentence to one decision string per token; parser
    objects with a ``decisions`` method are accepted directly.
    """
    if hasattr(decide, "decisions"):
        decide = decide.decisions  # type: ignore[union-attr]
    audited: List[PairAudit] = []
    for a, b in pairs:
        shared = shared_prefix_length(a, b)
        divergence = first_divergence(decide(a), decide(b))
        audited.append(PairAudit(shared, divergence, shared - k))
    return AuditReport(k, tuple(audited))
