"""Bracketed constituent trees and treebank files.

A tree node is either a terminal (a 1-based token index with no children) or a
non-terminal (a string label over one or more children).  Token strings and
optional part-of-speech tags live on the ``Sentence``, not in the tree, so the
same structure can be rendered with or without a preterminal layer.

Fenceposts are 0-based: token i occupies the span ``(i - 1, i)``.

The file format is one bracketed tree per line, UTF-8, with ``#`` comment
lines.  Bracket characters inside tokens are escaped as ``-LRB-`` / ``-RRB-``
and the escaping round-trips bit-exactly.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Iterator, NamedTuple, Optional, Tuple, Union


class TreebankError(ValueError):
    """Malformed bracketed input; ``offset`` is the byte position in the line."""

    def __init__(self, message: str, offset: Optional[int] = None):
        self.offset = offset
        if offset is not None:
            message = "%s (byte %d)" % (message, offset)
        super().__init__(message)


class UnbalancedBrackets(TreebankError):
    pass


class EmptyConstituent(TreebankError):
    pass


class NoTerminals(TreebankError):
    pass


class JoinCharacterCollision(ValueError):
    """A label already contains the unary join character."""


class Span(NamedTuple):
    left: int
    right: int
    label: str


@dataclass(frozen=True)
class Sentence:
    """Tokens plus optional part-of-speech tags ("_" marks a missing tag)."""

    tokens: Tuple[str, ...]
    pos_tags: Optional[Tuple[str, ...]] = None

    def __post_init__(self):
        object.__setattr__(self, "tokens", tuple(self.tokens))
        if not self.tokens:
            raise ValueError("a sentence must contain at least one token")
        if self.pos_tags is not None:
            object.__setattr__(self, "pos_tags", tuple(self.pos_tags))
            if len(self.pos_tags) != len(self.tokens):
                raise ValueError("pos_tags length does not match token count")

    def __len__(self) -> int:
        return len(self.tokens)


class TreeNode:
    """Immutable node; ``label`` is a non-terminal string or a token index."""

    __slots__ = ("label", "children", "_span")

    def __init__(self, label: Union[str, int], children: Iterable["TreeNode"] = ()):
        self.label = label
        self.children = tuple(children)
        self._span = None
        if isinstance(label, int):
            if self.children:
                raise ValueError("terminal nodes take no children")
        elif not self.children:
            raise ValueError("non-terminal %r has no children" % (label,))

    @property
    def is_terminal(self) -> bool:
        return isinstance(self.label, int)

    @property
    def span(self) -> Tuple[int, int]:
        """(left, right) fenceposts covered by this node."""
        if self._span is None:
            if self.is_terminal:
                self._span = (self.label - 1, self.label)
            else:
                self._span = (self.children[0].span[0], self.children[-1].span[1])
        return self._span

    def leaves(self) -> Iterator[int]:
        """Terminal indices, left to right."""
        if self.is_terminal:
            yield self.label
        else:
            for child in self.children:
                yield from child.leaves()

    def __eq__(self, other):
        if self is other:
            return True
        if not isinstance(other, TreeNode):
            return NotImplemented
        return self.label == other.label and self.children == other.children

    __hash__ = None  # structural equality; key by id() where needed

    def __repr__(self):
        if self.is_terminal:
            return "TreeNode(%d)" % self.label
        return "TreeNode(%r, %d children)" % (self.label, len(self.children))


class ConstituentTree:
    """A parse over a sentence; ``normalized`` marks collapsed unary chains."""

    __slots__ = ("root", "sentence", "normalized")

    def __init__(self, root: TreeNode, sentence: Sentence, normalized: bool = False):
        self.root = root
        self.sentence = sentence
        self.normalized = normalized

    def validate(self) -> "ConstituentTree":
        """Check that terminal indices are exactly 1..n, left to right."""
        got = list(self.root.leaves())
        want = list(range(1, len(self.sentence) + 1))
        if got != want:
            raise ValueError("terminal indices %r do not cover 1..%d" % (got, len(self.sentence)))
        return self

    def __eq__(self, other):
        if not isinstance(other, ConstituentTree):
            return NotImplemented
        return self.sentence.tokens == other.sentence.tokens and self.root == other.root

    __hash__ = None

    def __repr__(self):
        return "ConstituentTree(%s)" % serialize(self)


def escape_token(token: str) -> str:
    return token.replace("(", "-LRB-").replace(")", "-RRB-")


def unescape_token(text: str) -> str:
    return text.replace("-LRB-", "(").replace("-RRB-", ")")


def parse_bracketed(line: str, strip_pos: bool = False) -> ConstituentTree:
    """Parse a single bracketed tree.

    With ``strip_pos`` every non-terminal dominating exactly one terminal is
    removed and its label recorded as that token's part-of-speech tag, except
    at the root.
    """
    text = line
    n = len(text)
    pos = 0

    def byte_at(p: int) -> int:
        return len(text[:p].encode("utf-8"))

    def skip_ws():
        nonlocal pos
        while pos < n and text[pos] in " \t":
            pos += 1

    tokens: list = []

    def parse_node() -> TreeNode:
        nonlocal pos
        start = pos
        pos += 1  # consume '('
        skip_ws()
        label_start = pos
        while pos < n and text[pos] not in "() \t":
            pos += 1
        label = text[label_start:pos]
        if not label:
            raise EmptyConstituent("constituent with no label", byte_at(start))
        children = []
        while True:
            skip_ws()
            if pos >= n:
                raise UnbalancedBrackets("missing closing bracket", byte_at(n))
            ch = text[pos]
            if ch == ")":
                pos += 1
                break
            if ch == "(":
                children.append(parse_node())
            else:
                word_start = pos
                while pos < n and text[pos] not in "() \t":
                    pos += 1
                tokens.append(unescape_token(text[word_start:pos]))
                children.append(TreeNode(len(tokens)))
        if not children:
            raise EmptyConstituent("constituent %r has no children" % label, byte_at(start))
        return TreeNode(label, children)

    skip_ws()
    if pos >= n:
        raise NoTerminals("no tree on line", 0)
    if text[pos] != "(":
        raise UnbalancedBrackets("expected '('", byte_at(pos))
    root = parse_node()
    skip_ws()
    if pos < n:
        raise UnbalancedBrackets("trailing text after tree", byte_at(pos))

    tags: list = [None] * len(tokens)
    if strip_pos:

        def strip(node: TreeNode) -> TreeNode:
            if node.is_terminal:
                return node
            kids = []
            for child in node.children:
                if (
                    not child.is_terminal
                    and len(child.children) == 1
                    and child.children[0].is_terminal
                ):
                    terminal = child.children[0]
                    tags[terminal.label - 1] = child.label
                    kids.append(terminal)
                else:
                    kids.append(strip(child))
            return TreeNode(node.label, kids)

        root = strip(root)

    pos_tags = tuple(t if t is not None else "_" for t in tags) if strip_pos else None
    sentence = Sentence(tuple(tokens), pos_tags)
    return ConstituentTree(root, sentence).validate()


def serialize(tree: ConstituentTree, include_pos: bool = False) -> str:
    """Render a tree on one line; inverse of :func:`parse_bracketed`."""
    tokens = tree.sentence.tokens
    tags = tree.sentence.pos_tags
    if include_pos and tags is None:
        raise ValueError("tree has no pos_tags to include")

    def render(node: TreeNode) -> str:
        if node.is_terminal:
            word = escape_token(tokens[node.label - 1])
            if include_pos:
                return "(%s %s)" % (tags[node.label - 1], word)
            return word
        return "(%s %s)" % (node.label, " ".join(render(c) for c in node.children))

    return render(tree.root)


def collapse_unary(tree: ConstituentTree, join: str = "+") -> ConstituentTree:
    """Merge chains of single non-terminal children into one joined label.

    A node whose only child is a terminal is left alone.  Raises
    :class:`JoinCharacterCollision` if any label already contains ``join``.
    """
    if tree.normalized:
        return tree

    def walk(node: TreeNode) -> TreeNode:
        if node.is_terminal:
            return node
        labels = [node.label]
        current = node
        while len(current.children) == 1 and not current.children[0].is_terminal:
            current = current.children[0]
            labels.append(current.label)
        for lab in labels:
            if join in lab:
                raise JoinCharacterCollision(
                    "label %r contains the join character %r" % (lab, join)
                )
        return TreeNode(join.join(labels), [walk(c) for c in current.children])

    return ConstituentTree(walk(tree.root), tree.sentence, normalized=True)


def expand_unary(tree: ConstituentTree, join: str = "+") -> ConstituentTree:
    """Split joined labels back into unary chains; inverse of collapse."""

    def walk(node: TreeNode) -> TreeNode:
        if node.is_terminal:
            return node
        parts = node.label.split(join)
        rebuilt = TreeNode(parts[-1], [walk(c) for c in node.children])
        for lab in reversed(parts[:-1]):
            rebuilt = TreeNode(lab, [rebuilt])
        return rebuilt

    return ConstituentTree(walk(tree.root), tree.sentence, normalized=False)


def spans(tree: ConstituentTree) -> list:
    """Multiset of labeled spans, one per non-terminal, preorder."""
    out = []

    def walk(node: TreeNode):
        if node.is_terminal:
            return
        left, right = node.span
        out.append(Span(left, right, node.label))
        for child in node.children:
            walk(child)

    walk(tree.root)
    return out


def iter_treebank(lines: Iterable[str], strip_pos: bool = False) -> Iterator[ConstituentTree]:
    """Parse trees from lines, skipping blanks and ``#`` comments."""
    for lineno, raw in enumerate(lines, start=1):
        line = raw.rstrip("\n")
        if not line.strip() or line.lstrip().startswith("#"):
            continue
        try:
            yield parse_bracketed(line, strip_pos=strip_pos)
        except TreebankError as err:
            err.args = ("line %d: %s" % (lineno, err.args[0]),)
            raise


def read_treebank(path, strip_pos: bool = False) -> list:
    with open(path, encoding="utf-8") as handle:
        return list(iter_treebank(handle, strip_pos=strip_pos))


def write_treebank(trees: Iterable[ConstituentTree], path, include_pos: bool = False):
    with open(path, "w", encoding="utf-8") as handle:
        for tree in trees:
            handle.write(serialize(tree, include_pos=include_pos))
            handle.write("\n")
