"""Chart parser over token spans.

Items are keyed by (tree, node address, span, foot span).  A foot span is
present only while parsing inside an auxiliary tree whose foot lies below
the node; it is the span covered by the material the tree adjoins to.
"""
from __future__ import annotations

from typing import Iterable

from ..grammar import (
    ANCHOR,
    CLAUSE_TREE,
    FOOT,
    INTERIOR,
    SUBSTITUTION,
    UNIT,
    Address,
    ElementaryTree,
    Grammar,
    slot_accepts,
)
from .inputs import DiscourseInput, InputError, Token
from .model import Attachment, CueRealization, DerivationNode, canonical

Span = tuple[int, int]
Fill = tuple  # tuple of ("anchor", CueRealization) | ("attach", Attachment) | ("unit", str)


class _Chart:
    def __init__(self, grammar: Grammar, tokens: tuple[Token, ...]):
        self.g = grammar
        self.tokens = tokens
        self.initials = (CLAUSE_TREE,) + grammar.initial_trees
        self.auxes = grammar.auxiliary_trees
        self.feet = {t.name: t.foot_address for t in grammar.auxiliary_trees}
        self._min = {t.name: _min_yields(t) for t in self.initials + self.auxes}
        self._memo: dict = {}

    def _cached(self, key, compute):
        if key not in self._memo:
            self._memo[key] = tuple(compute())
        return self._memo[key]

    def units_in(self, i: int, j: int) -> int:
        return sum(1 for t in self.tokens[i:j] if t.kind == "unit")

    # ------------------------------------------------------------ instances

    def initial(self, i: int, j: int) -> tuple[DerivationNode, ...]:
        return self._cached(("init", i, j), lambda: self._initial(i, j))

    def _initial(self, i, j):
        for tree in self.initials:
            for fill in self.node(tree, (), i, j, None):
                inst = _assemble(tree, fill)
                if _lexical_ok(tree, inst):
                    yield inst

    def aux(self, tree: ElementaryTree, i: int, j: int, foot: Span) -> tuple[DerivationNode, ...]:
        return self._cached(("aux", tree.name, i, j, foot), lambda: self._aux(tree, i, j, foot))

    def _aux(self, tree, i, j, foot):
        for fill in self.node(tree, (), i, j, foot):
            inst = _assemble(tree, fill)
            if not _lexical_ok(tree, inst):
                continue
            if any(c.position == "medial" for c in inst.anchors) and self.units_in(*foot) != 1:
                continue
            yield inst

    # ------------------------------------------------------------ nodes

    def node(self, tree, address, i, j, foot) -> tuple[Fill, ...]:
        return self._cached(("node", tree.name, address, i, j, foot),
                            lambda: self._node(tree, address, i, j, foot))

    def _node(self, tree, address, i, j, foot):
        here = tree.root.at(address)
        yield from self.bare(tree, address, i, j, foot)
        if here.kind != INTERIOR or not here.adjoinable:
            return
        for aux in self.auxes:
            if not self.g.category_matches(aux.root.category, here.category):
                continue
            for k in range(i, j):
                for l in range(k + 1, j + 1):
                    if (k, l) == (i, j):
                        continue
                    if foot is not None and not (k <= foot[0] and foot[1] <= l):
                        continue
                    inner = self.bare(tree, address, k, l, foot)
                    if not inner:
                        continue
                    for inst in self.aux(aux, i, j, (k, l)):
                        att = ("attach", Attachment(address, "adjoin", inst))
                        for fill in inner:
                            yield fill + (att,)

    def bare(self, tree, address, i, j, foot) -> tuple[Fill, ...]:
        return self._cached(("bare", tree.name, address, i, j, foot),
                            lambda: self._bare(tree, address, i, j, foot))

    def _bare(self, tree, address, i, j, foot):
        here = tree.root.at(address)
        if here.kind == INTERIOR:
            yield from self.children(tree, address, 0, i, j, foot)
        elif here.kind == SUBSTITUTION:
            if j > i:
                for inst in self.initial(i, j):
                    root_cat = self.g.tree(inst.tree).root.category
                    if self.g.category_matches(here.category, root_cat):
                        yield (("attach", Attachment(address, "substitute", inst)),)
        elif here.kind == FOOT:
            if foot == (i, j):
                yield ()
        elif here.kind == ANCHOR:
            slot = tree.slot(here.slot)
            if i == j:
                if slot.optional:
                    yield (("anchor", CueRealization(slot.id, "", "empty", None)),)
            elif j == i + 1 and self.tokens[i].kind == "cue":
                tok = self.tokens[i]
                for entry in self.g.entries(tok.value):
                    if slot_accepts(slot, entry, tok.position):
                        yield (("anchor", CueRealization(slot.id, entry.lexeme, entry.cls, tok.position)),)
        elif here.kind == UNIT:
            if j == i + 1 and self.tokens[i].kind == "unit":
                yield (("unit", self.tokens[i].value),)

    def children(self, tree, address, idx, i, j, foot) -> tuple[Fill, ...]:
        return self._cached(("kids", tree.name, address, idx, i, j, foot),
                            lambda: self._children(tree, address, idx, i, j, foot))

    def _children(self, tree, address, idx, i, j, foot):
        kids = tree.root.at(address).children
        if idx == len(kids):
            if i == j:
                yield ()
            return
        child = address + (idx,)
        foot_addr = self.feet.get(tree.name)
        child_foot = foot if foot_addr is not None and foot_addr[: len(child)] == child else None
        lows = self._min[tree.name]
        rest_min = sum(lows[address + (n,)] for n in range(idx + 1, len(kids)))
        for mid in range(i + lows[child], j - rest_min + 1):
            if child_foot is not None and not (i <= child_foot[0] and child_foot[1] <= mid):
                continue
            head = self.node(tree, child, i, mid, child_foot)
            if not head:
                continue
            rest = self.children(tree, address, idx + 1, mid, j, foot)
            for a in head:
                for b in rest:
                    yield a + b


def _min_yields(tree: ElementaryTree) -> dict[Address, int]:
    """Fewest tokens each node can cover."""
    out: dict[Address, int] = {}
    for address, node in sorted(tree.root.walk(), key=lambda p: -len(p[0])):
        if node.kind == INTERIOR:
            out[address] = sum(out[address + (i,)] for i in range(len(node.children)))
        elif node.kind == ANCHOR:
            out[address] = 0 if tree.slot(node.slot).optional else 1
        else:
            out[address] = 1
    return out


def _assemble(tree: ElementaryTree, fill: Fill) -> DerivationNode:
    anchors, attachments, unit = [], [], None
    for item in fill:
        if item[0] == "anchor":
            anchors.append(item[1])
        elif item[0] == "attach":
            attachments.append(item[1])
        else:
            unit = item[1]
    return DerivationNode.make(tree.name, unit, anchors, attachments)


def _lexical_ok(tree: ElementaryTree, inst: DerivationNode) -> bool:
    return sum(1 for c in inst.anchors if c.lexeme) >= tree.min_lexical


def derive(grammar: Grammar, discourse: DiscourseInput) -> list[DerivationNode]:
    """All complete derivations whose yield is the input's token sequence."""
    discourse.validate(grammar)
    tokens = discourse.tokens()
    if not discourse.units:
        return []
    chart = _Chart(grammar, tokens)
    return canonical(grammar, chart.initial(0, len(tokens)))


def derive_many(grammar: Grammar, inputs: Iterable[DiscourseInput]) -> list[list[DerivationNode]]:
    return [derive(grammar, d) for d in inputs]


__all__ = ["derive", "derive_many", "InputError"]
