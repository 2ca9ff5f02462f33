"""Substitution, adjunction and linearization on derived trees.

Every operation returns a new tree; the host is never modified.
"""
from __future__ import annotations

from dataclasses import replace

from ..grammar import (
    ANCHOR,
    FOOT,
    INTERIOR,
    SUBSTITUTION,
    UNIT,
    Address,
    ElementaryTree,
    Grammar,
    TreeNode,
    format_address,
    slot_accepts,
)
from .inputs import Token
from .model import CueRealization, DerivationError, DerivationNode, IncompleteError

DerivedTree = TreeNode


def instantiate(tree: ElementaryTree, ref: str = "0") -> TreeNode:
    """Copy of ``tree``'s skeleton with every node stamped by its origin."""

    def stamp(node: TreeNode, address: Address) -> TreeNode:
        kids = tuple(stamp(c, address + (i,)) for i, c in enumerate(node.children))
        return replace(node, children=kids, origin=(ref, tree.name, address))

    return stamp(tree.root, ())


def _node(host: TreeNode, at: Address) -> TreeNode:
    try:
        return host.at(at)
    except IndexError:
        raise DerivationError(f"bad address {format_address(at)}") from None


def _categories_match(grammar: Grammar | None, a: str, b: str) -> bool:
    return a == b if grammar is None else grammar.category_matches(a, b)


def substitute(
    host: DerivedTree,
    at: Address,
    tree: ElementaryTree,
    *,
    grammar: Grammar | None = None,
    ref: str = "0",
) -> DerivedTree:
    site = _node(host, at)
    if site.kind != SUBSTITUTION:
        if site.substituted:
            raise DerivationError(f"site {format_address(at)} is already filled")
        raise DerivationError(f"node at {format_address(at)} is not a substitution site")
    if tree.kind != "initial":
        raise DerivationError(f"cannot substitute {tree.kind} tree {tree.name!r}")
    if not _categories_match(grammar, site.category, tree.root.category):
        raise DerivationError(
            f"category mismatch: site {site.category} vs tree root {tree.root.category}"
        )
    new = replace(instantiate(tree, ref), substituted=True)
    return host.replace_at(at, new)


def adjoin(
    host: DerivedTree,
    at: Address,
    tree: ElementaryTree,
    *,
    grammar: Grammar | None = None,
    ref: str = "0",
) -> DerivedTree:
    target = _node(host, at)
    if target.kind == SUBSTITUTION:
        raise DerivationError(f"cannot adjoin at substitution site {format_address(at)}")
    if target.kind != INTERIOR:
        raise DerivationError(f"cannot adjoin at {target.kind} node {format_address(at)}")
    if not target.adjoinable:
        raise DerivationError(f"node at {format_address(at)} does not accept adjunction")
    if tree.kind != "auxiliary":
        raise DerivationError(f"cannot adjoin {tree.kind} tree {tree.name!r}")
    if not _categories_match(grammar, tree.root.category, target.category):
        raise DerivationError(
            f"category mismatch: node {target.category} vs tree root {tree.root.category}"
        )
    foot = tree.foot_address
    assert foot is not None
    excised = replace(target, adjoinable=False, substituted=False)
    planted = instantiate(tree, ref).replace_at(foot, excised)
    return host.replace_at(at, replace(planted, substituted=target.substituted))


def realize_anchor(
    host: DerivedTree, at: Address, cue: CueRealization, grammar: Grammar
) -> DerivedTree:
    slot_node = _node(host, at)
    if slot_node.kind != ANCHOR:
        raise DerivationError(f"node at {format_address(at)} is not an anchor slot")
    if slot_node.cue is not None:
        raise DerivationError(f"anchor at {format_address(at)} is already realized")
    if slot_node.origin is None:
        raise DerivationError("anchor slot has no origin tree")
    slot = grammar.tree(slot_node.origin[1]).slot(slot_node.slot)
    if cue.slot != slot.id:
        raise DerivationError(f"cue is meant for slot {cue.slot!r}, not {slot.id!r}")
    entry = grammar.empty_cue if cue.lexeme == "" else grammar.entry(cue.lexeme, cue.cls)
    if not slot_accepts(slot, entry, cue.position):
        raise DerivationError(f"{entry.label()} cannot realize anchor {slot.id!r}")
    return host.replace_at(at, replace(slot_node, cue=cue))


def fill_leaf(host: DerivedTree, at: Address, unit: str) -> DerivedTree:
    leaf = _node(host, at)
    if leaf.kind != UNIT:
        raise DerivationError(f"node at {format_address(at)} is not a leaf unit")
    if leaf.unit is not None:
        raise DerivationError(f"leaf at {format_address(at)} is already filled")
    return host.replace_at(at, replace(leaf, unit=unit))


def linearize(tree: DerivedTree) -> tuple[Token, ...]:
    """Leaves left to right; the empty cue produces no token."""
    out: list[Token] = []
    for address, node in tree.walk():
        if node.kind == UNIT:
            if node.unit is None:
                raise IncompleteError(f"unfilled leaf unit at {format_address(address)}")
            out.append(Token("unit", node.unit))
        elif node.kind == ANCHOR:
            if node.cue is None:
                raise IncompleteError(f"unrealized anchor at {format_address(address)}")
            if node.cue.lexeme:
                out.append(Token("cue", node.cue.lexeme, node.cue.position))
        elif node.kind in (SUBSTITUTION, FOOT):
            raise IncompleteError(f"open {node.kind} at {format_address(address)}")
    return tuple(out)


def find_origin(tree: DerivedTree, ref: str, address: Address) -> Address:
    for addr, node in tree.walk():
        if node.origin is not None and node.origin[0] == ref and node.origin[2] == address:
            return addr
    raise DerivationError(f"no node from instance {ref} at {format_address(address)}")


def build_derived(
    grammar: Grammar, root: DerivationNode, order: str = "preorder"
) -> DerivedTree:
    """Replay a derivation with the tree operations above.

    ``order`` only changes the sequence in which independent steps are
    applied ("preorder" or "postorder"); the result must not depend on it.
    """
    derived = instantiate(grammar.tree(root.tree), "0")

    def own_steps(node: DerivationNode, ref: str, tree: TreeNode) -> TreeNode:
        for cue in node.anchors:
            at = _slot_address(tree, ref, cue.slot)
            tree = realize_anchor(tree, at, cue, grammar)
        if node.unit is not None:
            leaf = next(a for a, n in grammar.tree(node.tree).root.walk() if n.kind == UNIT)
            tree = fill_leaf(tree, find_origin(tree, ref, leaf), node.unit)
        return tree

    def visit(node: DerivationNode, ref: str, tree: TreeNode) -> TreeNode:
        if order == "preorder":
            tree = own_steps(node, ref, tree)
        for i, att in enumerate(node.attachments):
            child_ref = f"{ref}.{i}"
            at = find_origin(tree, ref, att.address)
            elem = grammar.tree(att.node.tree)
            op = substitute if att.operation == "substitute" else adjoin
            tree = op(tree, at, elem, grammar=grammar, ref=child_ref)
            tree = visit(att.node, child_ref, tree)
        if order != "preorder":
            tree = own_steps(node, ref, tree)
        return tree

    return visit(root, "0", derived)


def _slot_address(tree: TreeNode, ref: str, slot: str) -> Address:
    for addr, node in tree.walk():
        if node.kind == ANCHOR and node.slot == slot and node.origin is not None and node.origin[0] == ref:
            return addr
    raise DerivationError(f"instance {ref} has no anchor slot {slot!r}")


def derived_yield(grammar: Grammar, root: DerivationNode) -> tuple[Token, ...]:
    return linearize(build_derived(grammar, root))
