"""Strictly incremental constituent parsing toolkit.

Two interchangeable decoders over the same prefix-windowed classifier: a
sequence-labeling linearizer (per-token depth/label codes) and an
attach-juxtapose transition parser (monotonic tree edits), plus treebank
I/O, a bracketing scorer, and a prefix-determinism auditor.
"""

from .audit import AuditReport, PairAudit, audit_incrementality
from .evaluate import (
    EvalParams,
    EvalReport,
    LabelScore,
    corpus_stats,
    per_constituent,
    read_prm,
    score,
)
from .features import DelayConfig, extract_sl_features, extract_tb_features, window
from .linearize import (
    FINAL,
    SLLabel,
    TreeLinearizer,
    common_levels,
    decode,
    decode_prefix,
    encode,
    parse_label,
    read_labeled,
    rel_to_abs,
    write_labeled,
)
from .model import (
    ModelFormatError,
    SequenceLabelingParser,
    TransitionParser,
    load_model,
    train_sl,
    train_tb,
)
from .perceptron import AveragedPerceptron
from .transitions import (
    Action,
    ParserState,
    TransitionCodec,
    TransitionError,
    apply,
    legal_actions,
    oracle,
    replay,
    rightmost_chain,
)
from .trees import (
    ConstituentTree,
    Sentence,
    Span,
    TreeNode,
    TreebankError,
    collapse_unary,
    expand_unary,
    parse_bracketed,
    read_treebank,
    serialize,
    spans,
    write_treebank,
)

__version__ = "0.1.0"

__all__ = [
    "Action",
    "AuditReport",
    "AveragedPerceptron",
    "ConstituentTree",
    "DelayConfig",
    "EvalParams",
    "EvalReport",
    "FINAL",
    "LabelScore",
    "ModelFormatError",
    "PairAudit",
    "ParserState",
    "Sentence",
    "SequenceLabelingParser",
    "SLLabel",
    "Span",
    "TransitionCodec",
    "TransitionError",
    "TransitionParser",
    "TreebankError",
    "TreeLinearizer",
    "TreeNode",
    "apply",
    "audit_incrementality",
    "collapse_unary",
    "common_levels",
    "corpus_stats",
    "decode",
    "decode_prefix",
    "encode",
    "expand_unary",
    "extract_sl_features",
    "extract_tb_features",
    "legal_actions",
    "load_model",
    "oracle",
    "parse_bracketed",
    "parse_label",
    "per_constituent",
    "read_labeled",
    "read_prm",
    "read_treebank",
    "rel_to_abs",
    "replay",
    "rightmost_chain",
    "score",
    "serialize",
    "spans",
    "train_sl",
    "train_tb",
    "window",
    "write_labeled",
    "write_treebank",
    "__version__",
]
