"""Flat feature structures for discourse cues and tree anchors.

A cue or anchor signals values for some features and is undefined for the
rest.  Substitutability between two cues follows from comparing what each
signals:

* ``synonym``     same features, same values
* ``exclusive``   some shared feature carries different values
* ``hypernym``    compatible, and the first defines a strict subset of the
                  second's features (``hyponym`` is the converse)
* ``contingent``  compatible, and each defines a feature the other lacks
"""
from __future__ import annotations

from enum import Enum
from typing import Iterable, Iterator, Mapping


class Relation(str, Enum):
    SYNONYM = "synonym"
    EXCLUSIVE = "exclusive"
    HYPERNYM = "hypernym"
    HYPONYM = "hyponym"
    CONTINGENT = "contingent"

    def __str__(self) -> str:
        return self.value


class FeatureError(ValueError):
    pass


class FeatureStructure(Mapping[str, str]):
    """Immutable partial map from feature names to atomic values."""

    __slots__ = ("_items", "_hash")

    def __init__(self, bindings: Mapping[str, str] | Iterable[tuple[str, str]] = ()):
        pairs = bindings.items() if isinstance(bindings, Mapping) else bindings
        items: dict[str, str] = {}
        for name, value in pairs:
            if not isinstance(name, str) or not name:
                raise FeatureError(f"feature name must be a non-empty string, got {name!r}")
            if not isinstance(value, str) or not value:
                raise FeatureError(f"value of feature {name!r} must be a non-empty string")
            if name in items:
                raise FeatureError(f"feature {name!r} bound twice")
            items[name] = value
        self._items = tuple(sorted(items.items()))
        self._hash = hash(self._items)

    def __getitem__(self, name: str) -> str:
        for key, value in self._items:
            if key == name:
                return value
        raise KeyError(name)

    def __iter__(self) -> Iterator[str]:
        return (key for key, _ in self._items)

    def __len__(self) -> int:
        return len(self._items)

    def __hash__(self) -> int:
        return self._hash

    def __eq__(self, other: object) -> bool:
        if isinstance(other, FeatureStructure):
            return self._items == other._items
        if isinstance(other, Mapping):
            return dict(self._items) == dict(other)
        return NotImplemented

    def __repr__(self) -> str:
        inner = ", ".join(f"{k}: {v}" for k, v in self._items)
        return "{" + inner + "}"

    def without(self, name: str) -> FeatureStructure:
        return FeatureStructure((k, v) for k, v in self._items if k != name)

    def to_dict(self) -> dict[str, str]:
        return dict(self._items)


EMPTY = FeatureStructure()


def compatible(a: Mapping[str, str], b: Mapping[str, str]) -> bool:
    """False iff some feature defined in both carries different values."""
    return all(a[name] == b[name] for name in a.keys() & b.keys())


def classify(a: Mapping[str, str], b: Mapping[str, str]) -> Relation:
    """Substitutability relation of ``a`` with respect to ``b``.

    Disjoint non-empty structures come out contingent, and the empty
    structure is a hypernym of every non-empty one.
    """
    if not compatible(a, b):
        return Relation.EXCLUSIVE
    da, db = set(a), set(b)
    if da == db:
        return Relation.SYNONYM
    if da < db:
        return Relation.HYPERNYM
    if db < da:
        return Relation.HYPONYM
    return Relation.CONTINGENT


def realizable(anchor: Mapping[str, str], cue: Mapping[str, str]) -> bool:
    """Can ``cue`` realize an anchor carrying ``anchor`` features?"""
    return classify(anchor, cue) is not Relation.EXCLUSIVE


class FeatureInventory(Mapping[str, tuple[str, ...]]):
    """Declared feature names with their finite value sets."""

    def __init__(self, declared: Mapping[str, Iterable[str]]):
        table: dict[str, tuple[str, ...]] = {}
        for name, values in declared.items():
            if not isinstance(name, str) or not name:
                raise FeatureError(f"bad feature name {name!r}")
            vals = tuple(values)
            if not vals:
                raise FeatureError(f"feature {name!r} declares no values")
            if len(set(vals)) != len(vals):
                raise FeatureError(f"feature {name!r} declares a value twice")
            for v in vals:
                if not isinstance(v, str) or not v:
                    raise FeatureError(f"feature {name!r} has a bad value {v!r}")
            table[name] = vals
        self._table = table

    def __getitem__(self, name: str) -> tuple[str, ...]:
        return self._table[name]

    def __iter__(self) -> Iterator[str]:
        return iter(self._table)

    def __len__(self) -> int:
        return len(self._table)

    def __eq__(self, other: object) -> bool:
        if isinstance(other, FeatureInventory):
            return self._table == other._table
        return NotImplemented

    def __repr__(self) -> str:
        return f"FeatureInventory({self._table!r})"

    def structure(self, bindings: Mapping[str, str], where: str = "") -> FeatureStructure:
        """Build a structure, rejecting undeclared features and values."""
        fs = FeatureStructure(bindings)
        prefix = f"{where}: " if where else ""
        for name, value in fs.items():
            if name not in self._table:
                raise FeatureError(f"{prefix}undeclared feature {name!r}")
            if value not in self._table[name]:
                raise FeatureError(
                    f"{prefix}value {value!r} not declared for feature {name!r}"
                )
        return fs

    def universe(self, names: Iterable[str] | None = None) -> list[FeatureStructure]:
        """Every structure over ``names`` (each feature undefined or one value)."""
        chosen = list(self._table) if names is None else list(names)
        out: list[FeatureStructure] = [EMPTY]
        for name in chosen:
            out = out + [
                FeatureStructure({**fs.to_dict(), name: v})
                for fs in out
                for v in self._table[name]
            ]
        return out

    def to_dict(self) -> dict[str, list[str]]:
        return {k: list(v) for k, v in self._table.items()}
