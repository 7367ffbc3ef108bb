"""Prefix-faithful feature extraction.

Every feature of a decision at token i is computed from the window
w_{i-context}..w_{i+k} (and the partial tree built so far); nothing to the
right of i + k is ever read, so a delay-k model is incremental by
construction.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import List, Tuple

from .trees import Sentence


@dataclass(frozen=True)
class DelayConfig:
    """Lookahead k, the pad symbol for positions off the sentence, and the
    width of the left context window."""

    k: int = 0
    pad_symbol: str = "<pad>"
    context: int = 2

    def __post_init__(self):
        if self.k < 0:
            raise ValueError("delay k must be >= 0")
        if self.context < 0:
            raise ValueError("context width must be >= 0")


def window(sentence: Sentence, i: int, cfg: DelayConfig) -> Tuple[str, ...]:
    """Tokens w_{i-context}..w_{i+k}, padded beyond the sentence."""
    tokens = sentence.tokens
    n = len(tokens)
    return tuple(
        tokens[j - 1] if 1 <= j <= n else cfg.pad_symbol
        for j in range(i - cfg.context, i + cfg.k + 1)
    )


def _tag_window(sentence: Sentence, i: int, cfg: DelayConfig) -> Tuple[str, ...]:
    tags = sentence.pos_tags
    n = len(tags)
    return tuple(
        tags[j - 1] if 1 <= j <= n else cfg.pad_symbol
        for j in range(i - cfg.context, i + cfg.k + 1)
    )


def extract_sl_features(sentence: Sentence, i: int, cfg: DelayConfig) -> List[str]:
    """Token unigrams and bigrams over the delay window, plus a bias."""
    win = window(sentence, i, cfg)
    c = cfg.context
    feats = ["bias"]
    for offset, token in enumerate(win, start=-c):
        feats.append("w[%d]=%s" % (offset, token))
    for idx in range(1, len(win)):
        feats.append("w[%d,%d]=%s|%s" % (idx - 1 - c, idx - c, win[idx - 1], win[idx]))
    if sentence.pos_tags is not None:
        for offset, tag in enumerate(_tag_window(sentence, i, cfg), start=-c):
            feats.append("p[%d]=%s" % (offset, tag))
    return feats


def extract_tb_features(state, cfg: DelayConfig) -> List[str]:
    """Window features at the next token plus rightmost-chain symbols.

    Chain features address nodes from the bottom (0 = lowest): label, depth
    bucket, and capped span width, plus a conjunction of the bottom label
    with the incoming token.
    """
    sentence = state.sentence
    i = state.next
    feats = extract_sl_features(sentence, i, cfg)
    chain = state.chain
    feats.append("clen=%d" % min(len(chain), 8))
    if not chain:
        feats.append("empty-tree")
        return feats
    token = sentence.tokens[i - 1] if i <= len(sentence) else cfg.pad_symbol
    for up in range(min(3, len(chain))):
        node = chain[-1 - up]
        left, right = node.span
        feats.append("chain[%d]=%s" % (up, node.label))
        feats.append("chain[%d].w=%d" % (up, min(right - left, 5)))
    feats.append("root=%s" % chain[0].label)
    feats.append("chain[0]|w=%s|%s" % (chain[-1].label, token))
    feats.append("clen|w=%d|%s" % (min(len(chain), 8), token))
    return feats
