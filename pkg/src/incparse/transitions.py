"""Attach-juxtapose transitions: one terminal enters the tree per step.

The rightmost chain of a partial tree is the root-first list of non-terminals
whose right fencepost touches the last word read.  An ``attach`` adds the next
token (optionally wrapped in a freshly created parent ``prt``) as the new
rightmost child of a chain node.  A ``juxtapose`` creates a node ``new`` that
takes the chain node's place in the tree, keeps that node (with all its
descendants) as its left child, and adds the token (again optionally under
``prt``) as its right child.  Both address their target by position in the
chain, root first.  The very first action is an attach against the empty-tree
sentinel (``tgt`` is None) and must name a parent label.

Partial trees grow monotonically: existing nodes keep their label, left
fencepost, and children prefix; each step adds exactly one terminal and at
most two non-terminals.

The action-log file format is one record per line: the space-joined escaped
tokens, a tab, then the space-joined actions written as
``attach(tgt=K,prt=L)`` / ``juxtapose(tgt=K,prt=L,new=M)`` with ``_`` for an
absent parent label or the empty-tree sentinel.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Iterable, Iterator, List, Optional, Sequence, Tuple

from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_is_fitted

from .trees import (
    ConstituentTree,
    Sentence,
    TreeNode,
    collapse_unary,
    escape_token,
    expand_unary,
    unescape_token,
)
from .validation import check_corpus


class TransitionError(ValueError):
    pass


class IllegalTarget(TransitionError):
    pass


class JuxtaposeWithoutNew(TransitionError):
    pass


class NonEmptyTreeOnFirstAction(TransitionError):
    pass


class UnaryChainPresent(ValueError):
    pass


@dataclass(frozen=True)
class Action:
    """``tgt`` is a root-first chain position; None is the empty-tree sentinel."""

    kind: str  # "attach" | "juxtapose"
    tgt: Optional[int]
    prt: Optional[str] = None
    new: Optional[str] = None

    def __str__(self) -> str:
        return format_action(self)


def rightmost_chain(root: Optional[TreeNode]) -> Tuple[TreeNode, ...]:
    """Non-terminals on the path from the root to the last terminal."""
    chain = []
    node = root
    while node is not None and not node.is_terminal:
        chain.append(node)
        node = node.children[-1]
    return tuple(chain)


class ParserState:
    """Partial tree over the tokens read so far; ``next`` is the next index."""

    __slots__ = ("sentence", "root", "chain", "next")

    def __init__(self, sentence: Sentence, root: Optional[TreeNode] = None, next: int = 1):
        self.sentence = sentence
        self.root = root
        self.chain = rightmost_chain(root)
        self.next = next

    @property
    def done(self) -> bool:
        return self.next > len(self.sentence)

    @property
    def partial(self) -> Optional[ConstituentTree]:
        """Tree over w_1..w_{next-1}, or None before the first step."""
        if self.root is None:
            return None
        read = self.next - 1
        prefix = Sentence(
            self.sentence.tokens[:read],
            self.sentence.pos_tags[:read] if self.sentence.pos_tags is not None else None,
        )
        return ConstituentTree(self.root, prefix, normalized=True)

    def __repr__(self):
        return "ParserState(next=%d, chain=%r)" % (
            self.next,
            [node.label for node in self.chain],
        )


def apply(state: ParserState, action: Action, token: Optional[int] = None) -> ParserState:
    """Apply one action, attaching token ``state.next``; returns a new state.

    Shares all untouched subtrees with the previous state, so earlier states
    remain valid snapshots.
    """
    i = state.next
    if token is not None and token != i:
        raise TransitionError("action for token %d applied at step %d" % (token, i))
    if i > len(state.sentence):
        raise TransitionError("all %d tokens already attached" % len(state.sentence))
    if action.kind not in ("attach", "juxtapose"):
        raise TransitionError("unknown action kind %r" % action.kind)
    if action.kind == "attach" and action.new is not None:
        raise TransitionError("attach takes no new-node label")
    leaf = TreeNode(i)

    if state.root is None:
        if action.tgt is not None:
            raise IllegalTarget("the tree is empty; the first action targets the sentinel")
        if action.kind != "attach":
            raise IllegalTarget("the first action must be an attach")
        if action.prt is None:
            raise IllegalTarget("the first attach must name a parent label")
        return ParserState(state.sentence, TreeNode(action.prt, [leaf]), i + 1)

    if action.tgt is None:
        raise NonEmptyTreeOnFirstAction("empty-tree attach applied to a non-empty tree")
    chain = state.chain
    if not 0 <= action.tgt < len(chain):
        raise IllegalTarget(
            "target %d outside the rightmost chain (length %d)" % (action.tgt, len(chain))
        )
    target = chain[action.tgt]
    unit = TreeNode(action.prt, [leaf]) if action.prt is not None else leaf

    if action.kind == "attach":
        replacement = TreeNode(target.label, target.children + (unit,))
    else:
        if action.new is None:
            raise JuxtaposeWithoutNew("juxtapose requires a new-node label")
        replacement = TreeNode(action.new, (target, unit))

    for ancestor in reversed(chain[: action.tgt]):
        replacement = TreeNode(ancestor.label, ancestor.children[:-1] + (replacement,))
    return ParserState(state.sentence, replacement, i + 1)


def legal_actions(state: ParserState, labels: Iterable[str]) -> List[Action]:
    """Every action applicable in ``state`` over the given label set."""
    inventory = sorted(set(labels))
    if state.root is None:
        return [Action("attach", None, lab) for lab in inventory]
    parents: List[Optional[str]] = [None] + inventory
    actions = [
        Action("attach", pos, prt)
        for pos in range(len(state.chain))
        for prt in parents
    ]
    actions.extend(
        Action("juxtapose", pos, prt, new)
        for pos in range(len(state.chain))
        for prt in parents
        for new in inventory
    )
    return actions


def oracle(tree: ConstituentTree) -> List[Action]:
    """Deterministic action sequence rebuilding a normalized tree.

    Token w_i enters under a fresh parent exactly when it is the first child
    of its parent in the gold tree.  The landing site q is the lowest gold
    ancestor of the added unit already created: a node is created at its first
    terminal when its first child is a terminal, and at the first terminal of
    its second child otherwise.  If q itself is created at this very step, the
    action is a juxtapose splicing q in above its first child.
    """
    n = len(tree.sentence)
    paths: List[tuple] = []
    first_term: dict = {}
    created: dict = {}

    def walk(node: TreeNode, ancestors: tuple) -> int:
        if node.is_terminal:
            paths.append(ancestors)
            return node.label
        if len(node.children) == 1 and not node.children[0].is_terminal:
            raise UnaryChainPresent("unary chain at %r; collapse the tree first" % node.label)
        extended = ancestors + (node,)
        first = None
        for child in node.children:
            f = walk(child, extended)
            if first is None:
                first = f
        first_term[id(node)] = first
        return first

    walk(tree.root, ())

    def first_of(node: TreeNode) -> int:
        return node.label if node.is_terminal else first_term[id(node)]

    def created_at(node: TreeNode) -> int:
        if id(node) not in created:
            head = node.children[0]
            created[id(node)] = first_of(node) if head.is_terminal else first_of(node.children[1])
        return created[id(node)]

    actions: List[Action] = []
    for i in range(1, n + 1):
        path = paths[i - 1]
        p = path[-1]
        head = p.children[0]
        is_first = head.is_terminal and head.label == i
        prt = p.label if is_first else None
        if i == 1:
            actions.append(Action("attach", None, prt))
            continue
        unit_ancestors = path[:-1] if is_first else path
        q = None
        for candidate in reversed(unit_ancestors):
            if created_at(candidate) <= i:
                q = candidate
                break
        assert q is not None, "no created ancestor for token %d" % i
        chain = [a for a in paths[i - 2] if created_at(a) <= i - 1]
        if created_at(q) < i:
            tgt_node = q
            kind, new = "attach", None
        else:
            tgt_node = q.children[0]
            kind, new = "juxtapose", q.label
        position = next(
            (k for k, node in enumerate(chain) if node is tgt_node), None
        )
        assert position is not None, "oracle target off the rightmost chain at token %d" % i
        actions.append(Action(kind, position, prt, new))
    return actions


def replay(sentence: Sentence, actions: Sequence[Action]) -> ConstituentTree:
    """Fold actions from the empty tree; a truncated list gives a partial tree."""
    if not actions:
        raise ValueError("no actions to replay")
    if len(actions) > len(sentence):
        raise ValueError("%d actions for %d tokens" % (len(actions), len(sentence)))
    state = ParserState(sentence)
    for step, action in enumerate(actions, start=1):
        try:
            state = apply(state, action)
        except TransitionError as err:
            err.args = ("step %d: %s" % (step, err.args[0]),)
            raise
    return state.partial


def iter_oracle_states(tree: ConstituentTree) -> Iterator[Tuple[ParserState, Action]]:
    """(state, gold action) pairs with gold state advancement."""
    state = ParserState(tree.sentence)
    for action in oracle(tree):
        yield state, action
        state = apply(state, action)


# ---------------------------------------------------------------------------
# action-log files

_ATTACH = re.compile(r"^attach\(tgt=([^,]*),prt=(.*)\)$")
_JUXTAPOSE = re.compile(r"^juxtapose\(tgt=([^,]*),prt=(.*?),new=(.*)\)$")


def format_action(action: Action) -> str:
    tgt = "_" if action.tgt is None else str(action.tgt)
    prt = "_" if action.prt is None else action.prt
    if action.kind == "attach":
        return "attach(tgt=%s,prt=%s)" % (tgt, prt)
    return "juxtapose(tgt=%s,prt=%s,new=%s)" % (tgt, prt, action.new)


def parse_action(text: str) -> Action:
    match = _ATTACH.match(text)
    if match:
        tgt, prt = match.groups()
        return Action("attach", None if tgt == "_" else int(tgt), None if prt == "_" else prt)
    match = _JUXTAPOSE.match(text)
    if match:
        tgt, prt, new = match.groups()
        return Action(
            "juxtapose", None if tgt == "_" else int(tgt), None if prt == "_" else prt, new
        )
    raise ValueError("malformed action %r" % text)


def write_actions(pairs: Iterable[Tuple[Sentence, Sequence[Action]]], handle):
    for sentence, actions in pairs:
        handle.write(" ".join(escape_token(t) for t in sentence.tokens))
        handle.write("\t")
        handle.write(" ".join(format_action(a) for a in actions))
        handle.write("\n")


def iter_actions(lines: Iterable[str]) -> Iterator[Tuple[Sentence, List[Action]]]:
    for lineno, raw in enumerate(lines, start=1):
        line = raw.rstrip("\n")
        if not line.strip():
            continue
        try:
            token_part, _, action_part = line.partition("\t")
            tokens = tuple(unescape_token(t) for t in token_part.split(" "))
            actions = [parse_action(a) for a in action_part.split(" ") if a]
            yield Sentence(tokens), actions
        except ValueError as err:
            raise ValueError("line %d: %s" % (lineno, err)) from None


# ---------------------------------------------------------------------------


class TransitionCodec(BaseEstimator, TransformerMixin):
    """Transformer between trees and attach-juxtapose action sequences."""

    def __init__(self, join_char: str = "+"):
        self.join_char = join_char

    def _normalize(self, tree: ConstituentTree) -> ConstituentTree:
        return tree if tree.normalized else collapse_unary(tree, self.join_char)

    def fit(self, X: Sequence[ConstituentTree], y=None):
        check_corpus(X)
        labels = set()
        for tree in X:
            stack = [self._normalize(tree).root]
            while stack:
                node = stack.pop()
                if not node.is_terminal:
                    labels.add(node.label)
                    stack.extend(node.children)
        self.labels_ = tuple(sorted(labels))
        return self

    def transform(self, X: Sequence[ConstituentTree]) -> List[List[Action]]:
        check_is_fitted(self, "labels_")
        return [oracle(self._normalize(tree)) for tree in X]

    def inverse_transform(
        self, Xt: Sequence[Sequence[Action]], sentences: Sequence[Sentence]
    ) -> List[ConstituentTree]:
        check_is_fitted(self, "labels_")
        return [
            expand_unary(replay(sentence, actions), self.join_char)
            for actions, sentence in zip(Xt, sentences)
        ]
