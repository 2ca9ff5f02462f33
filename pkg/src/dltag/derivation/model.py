"""Derivation trees: which elementary trees combined, how, and where."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator

from ..grammar import ANCHOR, UNIT, Address, Grammar, format_address


class DerivationError(ValueError):
    """An operation's precondition does not hold."""


class IncompleteError(DerivationError):
    pass


class BoundExceeded(RuntimeError):
    """Exhaustive search was cut off by its step bound."""


@dataclass(frozen=True, order=True)
class CueRealization:
    slot: str
    lexeme: str  # "" for the empty cue
    cls: str
    position: str | None = None

    def label(self) -> str:
        return self.lexeme if self.lexeme else "<empty>"


@dataclass(frozen=True)
class Attachment:
    address: Address
    operation: str  # "substitute" or "adjoin"
    node: DerivationNode


@dataclass(frozen=True)
class DerivationNode:
    """One elementary tree instance plus everything attached to it.

    ``unit`` is set only for the built-in clause tree.  Anchors are kept
    sorted by slot id and attachments by address, so two derivations that
    differ only in step order compare equal.
    """

    tree: str
    unit: str | None = None
    anchors: tuple[CueRealization, ...] = ()
    attachments: tuple[Attachment, ...] = ()

    @classmethod
    def make(cls, tree, unit=None, anchors=(), attachments=()) -> DerivationNode:
        return cls(
            tree,
            unit,
            tuple(sorted(anchors)),
            tuple(sorted(attachments, key=lambda a: (a.address, a.operation))),
        )

    def instances(self, ref: str = "0") -> Iterator[tuple[str, DerivationNode]]:
        yield ref, self
        for i, att in enumerate(self.attachments):
            yield from att.node.instances(f"{ref}.{i}")

    def units(self) -> list[str]:
        return [n.unit for _, n in self.instances() if n.unit is not None]

    def map_units(self, mapping: dict[str, str]) -> DerivationNode:
        return DerivationNode(
            self.tree,
            mapping.get(self.unit, self.unit) if self.unit is not None else None,
            self.anchors,
            tuple(
                Attachment(a.address, a.operation, a.node.map_units(mapping))
                for a in self.attachments
            ),
        )


# Alias for readability at API boundaries: a derivation is its root instance.
DerivationTree = DerivationNode


@dataclass(frozen=True)
class DerivationStep:
    operation: str  # substitute | adjoin | realize-anchor | fill-leaf
    source: str
    target: str
    address: Address

    def key(self) -> tuple[str, str, str, str]:
        return (self.operation, self.source, self.target, format_address(self.address))

    def __str__(self) -> str:
        return f"{self.operation} {self.source or '<empty>'} -> {self.target}@{format_address(self.address)}"


def _slot_address(grammar: Grammar, tree: str, slot: str) -> Address:
    for address, node in grammar.tree(tree).root.walk():
        if node.kind == ANCHOR and node.slot == slot:
            return address
    raise KeyError(f"tree {tree!r} has no slot {slot!r}")


def _unit_address(grammar: Grammar, tree: str) -> Address:
    for address, node in grammar.tree(tree).root.walk():
        if node.kind == UNIT:
            return address
    raise KeyError(f"tree {tree!r} has no leaf unit")


def steps(grammar: Grammar, root: DerivationNode) -> list[DerivationStep]:
    """Flatten a derivation into steps, parents before children."""
    out: list[DerivationStep] = []

    def visit(node: DerivationNode, ref: str) -> None:
        for cue in node.anchors:
            out.append(
                DerivationStep("realize-anchor", cue.lexeme, ref, _slot_address(grammar, node.tree, cue.slot))
            )
        if node.unit is not None:
            out.append(DerivationStep("fill-leaf", node.unit, ref, _unit_address(grammar, node.tree)))
        for i, att in enumerate(node.attachments):
            out.append(DerivationStep(att.operation, att.node.tree, ref, att.address))
            visit(att.node, f"{ref}.{i}")

    visit(root, "0")
    return out


def canonical_key(grammar: Grammar, root: DerivationNode) -> tuple:
    return (root.tree, tuple(s.key() for s in steps(grammar, root)))


def canonical(grammar: Grammar, derivations) -> list[DerivationNode]:
    """Deduplicate and order derivations by (root tree, step list)."""
    return sorted(set(derivations), key=lambda d: canonical_key(grammar, d))


def tree_steps(root: DerivationNode) -> int:
    """Number of substitute/adjoin operations, the unit the search bound counts."""
    return sum(len(n.attachments) for _, n in root.instances())
