"""Exhaustive generate-and-test enumeration of derivations.

Used as the oracle for the chart parser.  It never looks at spans: it
expands every derivation tree whose material fits the input's units and
cues, replays each one with the real tree operations, and keeps those
whose linearization equals the input.
"""
from __future__ import annotations

from typing import Iterator

from ..grammar import (
    ANCHOR,
    CLAUSE_TREE,
    INTERIOR,
    SUBSTITUTION,
    UNIT,
    ElementaryTree,
    Grammar,
    slot_accepts,
)
from .inputs import DiscourseInput, InputError, Token
from .model import Attachment, BoundExceeded, CueRealization, DerivationNode, canonical
from .ops import build_derived, find_origin, linearize

DEFAULT_MAX_UNITS = 5

Budget = tuple[int, tuple[tuple[str, str], ...]]  # units left, sorted cue tokens left


def default_bound(discourse: DiscourseInput) -> int:
    return 4 * len(discourse.units)


class _Search:
    def __init__(self, grammar: Grammar, bound: int):
        self.g = grammar
        self.bound = bound
        self.hit_bound = False
        self.initials = (CLAUSE_TREE,) + grammar.initial_trees
        self._memo: dict = {}

    @staticmethod
    def _affordable(tree: ElementaryTree, budget: Budget) -> bool:
        units, cues = budget
        leaves = [n for _, n in tree.root.walk()]
        need_units = sum(1 for n in leaves if n.kind in (SUBSTITUTION, UNIT))
        required = sum(1 for s in tree.anchors if not s.optional)
        return units >= need_units and len(cues) >= max(required, tree.min_lexical)

    def initial(self, budget: Budget, used: int) -> Iterator[tuple[DerivationNode, Budget, int]]:
        for tree in self.initials:
            if self._affordable(tree, budget):
                yield from self.instance(tree, budget, used)

    def instance(self, tree: ElementaryTree, budget: Budget, used: int):
        # every expansion is a pure function of these three, so share them
        key = (tree.name, budget, used)
        if key not in self._memo:
            self._memo[key] = list(self._instance(tree, budget, used))
        return self._memo[key]

    def _instance(self, tree: ElementaryTree, budget: Budget, used: int):
        nodes = list(tree.root.walk())
        leaves = [(a, n) for a, n in nodes if n.kind in (ANCHOR, SUBSTITUTION, UNIT)]
        sites = [(a, n) for a, n in nodes if n.kind == INTERIOR and n.adjoinable]
        plan = leaves + sites
        # units still owed to later leaves; a child never gets to spend them
        owed = [sum(1 for _, n in plan[k + 1:] if n.kind in (SUBSTITUTION, UNIT)) for k in range(len(plan))]

        def lend(budget, k):
            return (budget[0] - owed[k], budget[1])

        def repay(left, k):
            return (left[0] + owed[k], left[1])

        def expand(k, budget, used, anchors, attachments, unit):
            if k == len(plan):
                if sum(1 for c in anchors if c.lexeme) >= tree.min_lexical:
                    yield DerivationNode.make(tree.name, unit, anchors, attachments), budget, used
                return
            address, node = plan[k]
            units, cues = budget
            if node.kind == UNIT:
                if units:
                    yield from expand(k + 1, (units - 1, cues), used, anchors, attachments, "?")
            elif node.kind == ANCHOR:
                slot = tree.slot(node.slot)
                if slot.optional:
                    empty = CueRealization(slot.id, "", "empty", None)
                    yield from expand(k + 1, budget, used, anchors + [empty], attachments, unit)
                for cue in sorted(set(cues)):
                    lexeme, position = cue
                    rest = list(cues)
                    rest.remove(cue)
                    for entry in self.g.entries(lexeme):
                        if slot_accepts(slot, entry, position):
                            real = CueRealization(slot.id, entry.lexeme, entry.cls, position)
                            yield from expand(k + 1, (units, tuple(rest)), used,
                                              anchors + [real], attachments, unit)
            elif node.kind == SUBSTITUTION:
                if not units:
                    return
                if used + 1 > self.bound:
                    self.hit_bound = True
                    return
                for child, left, u in self.initial(lend(budget, k), used + 1):
                    if self.g.category_matches(node.category, self.g.tree(child.tree).root.category):
                        att = Attachment(address, "substitute", child)
                        yield from expand(k + 1, repay(left, k), u, anchors, attachments + [att], unit)
            else:  # adjunction site
                yield from expand(k + 1, budget, used, anchors, attachments, unit)
                for aux in self.g.auxiliary_trees:
                    if not self.g.category_matches(aux.root.category, node.category):
                        continue
                    if not self._affordable(aux, lend(budget, k)):
                        continue
                    if used + 1 > self.bound:
                        self.hit_bound = True
                        continue
                    for child, left, u in self.instance(aux, lend(budget, k), used + 1):
                        att = Attachment(address, "adjoin", child)
                        yield from expand(k + 1, repay(left, k), u, anchors, attachments + [att], unit)

        yield from expand(0, budget, used, [], [], None)


def _number_units(root: DerivationNode) -> DerivationNode:
    counter = iter(range(10**9))

    def walk(node: DerivationNode) -> DerivationNode:
        unit = f"?{next(counter)}" if node.unit is not None else None
        atts = tuple(Attachment(a.address, a.operation, walk(a.node)) for a in node.attachments)
        return DerivationNode(node.tree, unit, node.anchors, atts)

    return walk(root)


def _medial_cues_are_unit_internal(grammar: Grammar, root: DerivationNode, derived) -> bool:
    for ref, inst in root.instances():
        tree = grammar.tree(inst.tree)
        if not tree.is_auxiliary or not any(c.position == "medial" for c in inst.anchors):
            continue
        top = find_origin(derived, ref, ())
        content = derived.at(top + tree.foot_address)
        if sum(1 for _, n in content.walk() if n.kind == UNIT) != 1:
            return False
    return True


def enumerate_all(
    grammar: Grammar,
    discourse: DiscourseInput,
    bound: int | None = None,
    max_units: int = DEFAULT_MAX_UNITS,
) -> list[DerivationNode]:
    """Every derivation of ``discourse``, found by exhaustive search.

    ``bound`` caps the number of substitute/adjoin operations per
    derivation (default four per unit); if the cap prunes any branch,
    ``BoundExceeded`` is raised rather than returning a partial answer.
    """
    discourse.validate(grammar)
    if len(discourse.units) > max_units:
        raise InputError(f"exhaustive search is limited to {max_units} units")
    if not discourse.units:
        return []
    target = discourse.tokens()
    bound = default_bound(discourse) if bound is None else bound
    cues = tuple(sorted((t.value, t.position) for t in target if t.kind == "cue"))
    search = _Search(grammar, bound)

    found = []
    for shape, left, _ in search.initial((len(discourse.units), cues), 0):
        if left != (0, ()):
            continue
        shape = _number_units(shape)
        derived = build_derived(grammar, shape)
        got = linearize(derived)
        placeholders = [t.value for t in got if t.kind == "unit"]
        real = [t.value for t in target if t.kind == "unit"]
        mapping = dict(zip(placeholders, real))
        renamed = tuple(Token("unit", mapping[t.value]) if t.kind == "unit" else t for t in got)
        if renamed != target:
            continue
        if not _medial_cues_are_unit_internal(grammar, shape, derived):
            continue
        found.append(shape.map_units(mapping))
    if search.hit_bound:
        raise BoundExceeded(f"search exceeded the bound of {bound} operations")
    return canonical(grammar, found)
