"""Elementary trees, tree families and the cue lexicon.

Grammars are authored as JSON documents (format described in the README).
``load_grammar`` parses and validates one; ``dump_grammar`` writes it back
in the same format.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field, replace
from importlib import resources
from typing import Any, Iterable, Mapping

from .features import FeatureError, FeatureInventory, FeatureStructure, realizable

GRAMMAR_FORMAT = "dltag-grammar/1"
BASE_CATEGORY = "DU"
CLAUSE_TREE_NAME = "clause"

INTERIOR = "interior"
SUBSTITUTION = "substitution-site"
FOOT = "foot"
ANCHOR = "anchor-slot"
UNIT = "leaf-unit"
NODE_KINDS = (INTERIOR, SUBSTITUTION, FOOT, ANCHOR, UNIT)
ARGUMENT_KINDS = (SUBSTITUTION, FOOT, UNIT)

POSITIONS = ("initial", "medial", "final")
CUE_CLASSES = (
    "subordinate-conjunction",
    "adverbial",
    "conjunction",
    "parallel-initial",
    "parallel-medial",
    "empty",
)
PRESUPPOSING_CLASSES = ("adverbial", "conjunction")

_SKELETON_TAGS = {"subst": SUBSTITUTION, "foot": FOOT, "anchor": ANCHOR, "unit": UNIT}


class GrammarError(ValueError):
    """Grammar text is malformed or violates a grammar invariant."""


class GrammarParseError(GrammarError):
    def __init__(self, message: str, line: int | None = None, column: int | None = None):
        self.line = line
        self.column = column
        where = f" (line {line}, column {column})" if line is not None else ""
        super().__init__(f"{message}{where}")


Address = tuple[int, ...]


def format_address(address: Address) -> str:
    return ".".join(str(i) for i in address) if address else "root"


@dataclass(frozen=True)
class TreeNode:
    """Node of an elementary or derived tree.

    ``unit`` and ``cue`` are bindings made during derivation; ``origin``
    records which tree instance and elementary address a derived node came
    from.  ``substituted`` marks the root of a tree that filled a site.
    """

    category: str
    kind: str
    children: tuple[TreeNode, ...] = ()
    adjoinable: bool = False
    arg: int | None = None
    slot: str | None = None
    unit: str | None = None
    cue: Any = None
    origin: tuple[str, Address] | None = None
    substituted: bool = False

    def at(self, address: Address) -> TreeNode:
        node = self
        for i in address:
            if i < 0 or i >= len(node.children):
                raise IndexError(f"no node at address {format_address(address)}")
            node = node.children[i]
        return node

    def walk(self, prefix: Address = ()) -> Iterable[tuple[Address, TreeNode]]:
        yield prefix, self
        for i, child in enumerate(self.children):
            yield from child.walk(prefix + (i,))

    def replace_at(self, address: Address, new: TreeNode) -> TreeNode:
        """Copy of this tree with the node at ``address`` swapped for ``new``."""
        if not address:
            return new
        head, rest = address[0], address[1:]
        if head < 0 or head >= len(self.children):
            raise IndexError(f"no node at address {format_address(address)}")
        kids = list(self.children)
        kids[head] = kids[head].replace_at(rest, new)
        return replace(self, children=tuple(kids))


@dataclass(frozen=True)
class AnchorSlot:
    id: str
    features: FeatureStructure
    position: str
    realization: str = "required"
    classes: tuple[str, ...] = ()
    cue_positions: tuple[str, ...] = ("initial",)

    @property
    def optional(self) -> bool:
        return self.realization == "optional"


@dataclass(frozen=True)
class ElementaryTree:
    name: str
    kind: str
    root: TreeNode
    anchors: tuple[AnchorSlot, ...]
    family: str
    predicate: str = "none"
    min_lexical: int = 1
    precondition: str | None = None
    note: str | None = None

    @property
    def is_auxiliary(self) -> bool:
        return self.kind == "auxiliary"

    def slot(self, slot_id: str) -> AnchorSlot:
        for s in self.anchors:
            if s.id == slot_id:
                return s
        raise KeyError(f"tree {self.name!r} has no anchor slot {slot_id!r}")

    @property
    def foot_address(self) -> Address | None:
        for address, node in self.root.walk():
            if node.kind == FOOT:
                return address
        return None

    def argument_nodes(self) -> dict[int, Address]:
        return {
            node.arg: address
            for address, node in self.root.walk()
            if node.kind in ARGUMENT_KINDS and node.arg is not None
        }

    @property
    def arity(self) -> int:
        return len(self.argument_nodes())


@dataclass(frozen=True)
class Family:
    id: str
    predicate: str
    trees: tuple[str, ...]
    note: str | None = None


@dataclass(frozen=True)
class CueEntry:
    lexeme: str
    cls: str
    features: FeatureStructure
    presupposition: str | None = None
    variant: tuple[tuple[str, str], ...] = ()
    note: str | None = None

    @property
    def is_empty(self) -> bool:
        return self.cls == "empty"

    @property
    def key(self) -> tuple[str, str]:
        return (self.lexeme, self.cls)

    def label(self) -> str:
        return f"{self.lexeme or '<empty>'}/{self.cls}"


@dataclass(frozen=True)
class Category:
    name: str
    refines: str | None = None
    strict: bool = False


# Built-in tree for a single clause: an adjoinable discourse unit over one
# leaf that the clause's proposition fills.
CLAUSE_TREE = ElementaryTree(
    name=CLAUSE_TREE_NAME,
    kind="initial",
    root=TreeNode(
        BASE_CATEGORY,
        INTERIOR,
        (TreeNode(BASE_CATEGORY, UNIT, arg=1),),
        adjoinable=True,
    ),
    anchors=(),
    family=CLAUSE_TREE_NAME,
    predicate="none",
    min_lexical=0,
)


@dataclass(frozen=True)
class Grammar:
    features: FeatureInventory
    categories: tuple[Category, ...]
    trees: tuple[ElementaryTree, ...]
    families: tuple[Family, ...]
    lexicon: tuple[CueEntry, ...]
    variants: tuple[tuple[str, str], ...] = ()
    note: str | None = None
    _index: dict = field(default=None, compare=False, repr=False)  # type: ignore[assignment]

    def __post_init__(self) -> None:
        object.__setattr__(
            self,
            "_index",
            {
                "trees": {t.name: t for t in self.trees},
                "categories": {c.name: c for c in self.categories},
                "families": {f.id: f for f in self.families},
            },
        )

    def tree(self, name: str) -> ElementaryTree:
        if name == CLAUSE_TREE_NAME:
            return CLAUSE_TREE
        try:
            return self._index["trees"][name]
        except KeyError:
            raise KeyError(f"unknown tree {name!r}") from None

    def family(self, family_id: str) -> Family:
        return self._index["families"][family_id]

    @property
    def initial_trees(self) -> tuple[ElementaryTree, ...]:
        return tuple(t for t in self.trees if t.kind == "initial")

    @property
    def auxiliary_trees(self) -> tuple[ElementaryTree, ...]:
        return tuple(t for t in self.trees if t.kind == "auxiliary")

    def is_active(self, entry: CueEntry) -> bool:
        chosen = dict(self.variants)
        return all(chosen.get(k) == v for k, v in entry.variant)

    @property
    def active_lexicon(self) -> tuple[CueEntry, ...]:
        return tuple(e for e in self.lexicon if self.is_active(e))

    def entries(self, lexeme: str) -> tuple[CueEntry, ...]:
        """Active entries for ``lexeme``, in lexicon order."""
        return tuple(e for e in self.active_lexicon if e.lexeme == lexeme)

    def entry(self, lexeme: str, cls: str | None = None) -> CueEntry:
        found = [e for e in self.entries(lexeme) if cls is None or e.cls == cls]
        if not found:
            what = f"{lexeme!r}" + (f" of class {cls!r}" if cls else "")
            raise KeyError(f"unknown cue {what}")
        return found[0]

    @property
    def empty_cue(self) -> CueEntry:
        for e in self.lexicon:
            if e.is_empty:
                return e
        return CueEntry("", "empty", FeatureStructure())

    def category_matches(self, a: str, b: str) -> bool:
        """Whether nodes of categories ``a`` and ``b`` may combine."""
        if a == b:
            return True
        cats = self._index["categories"]
        ca, cb = cats.get(a), cats.get(b)
        if ca is None or cb is None or ca.strict or cb.strict:
            return False
        return _base(a, cats) == _base(b, cats)

    def with_variant(self, key: str, value: str) -> Grammar:
        chosen = dict(self.variants)
        if key not in chosen:
            raise KeyError(f"unknown variant {key!r}")
        chosen[key] = value
        return replace(self, variants=tuple(sorted(chosen.items())))


def _base(name: str, cats: Mapping[str, Category]) -> str:
    seen = set()
    while cats[name].refines is not None and name not in seen:
        seen.add(name)
        name = cats[name].refines  # type: ignore[assignment]
    return name


def slot_accepts(slot: AnchorSlot, entry: CueEntry, position: str | None = None) -> bool:
    """Can ``entry`` (placed at ``position``, if given) realize ``slot``?"""
    if entry.is_empty:
        return slot.optional
    if entry.cls not in slot.classes:
        return False
    if position is not None and position not in slot.cue_positions:
        return False
    return realizable(slot.features, entry.features)


def candidate_trees(grammar: Grammar, cue: CueEntry) -> tuple[ElementaryTree, ...]:
    """Trees with at least one anchor slot that ``cue`` can realize."""
    if cue not in grammar.lexicon:
        raise KeyError(f"cue {cue.label()!r} is not in the lexicon")
    return tuple(
        t for t in grammar.trees if any(slot_accepts(s, cue) for s in t.anchors)
    )


# ---------------------------------------------------------------- loading


def load_grammar(source: str) -> Grammar:
    if not source.strip():
        raise GrammarParseError("empty grammar file", 1, 1)
    try:
        doc = json.loads(source)
    except json.JSONDecodeError as exc:
        raise GrammarParseError(exc.msg, exc.lineno, exc.colno) from None
    if not isinstance(doc, dict):
        raise GrammarParseError("grammar file must hold a JSON object", 1, 1)
    try:
        return _build(doc)
    except FeatureError as exc:
        raise GrammarError(str(exc)) from None


def load_grammar_file(path) -> Grammar:
    with open(path, encoding="utf-8") as fh:
        return load_grammar(fh.read())


def seed_grammar_text() -> str:
    return resources.files("dltag.data").joinpath("seed_grammar.json").read_text("utf-8")


def seed_grammar() -> Grammar:
    return load_grammar(seed_grammar_text())


def _require(doc: Mapping[str, Any], key: str, where: str) -> Any:
    if key not in doc:
        raise GrammarError(f"{where}: missing {key!r}")
    return doc[key]


def _build(doc: Mapping[str, Any]) -> Grammar:
    fmt = doc.get("format", GRAMMAR_FORMAT)
    if fmt != GRAMMAR_FORMAT:
        raise GrammarError(f"unsupported grammar format {fmt!r}")
    for section in ("features", "trees", "families", "lexicon"):
        _require(doc, section, "grammar")

    inventory = FeatureInventory(doc["features"])

    categories = [Category(BASE_CATEGORY)]
    for name, spec in (doc.get("categories") or {}).items():
        if name == BASE_CATEGORY:
            continue
        categories.append(
            Category(name, spec.get("refines", BASE_CATEGORY), bool(spec.get("strict", False)))
        )
    cat_names = {c.name for c in categories}
    for c in categories:
        if c.refines is not None and c.refines not in cat_names:
            raise GrammarError(f"category {c.name!r} refines undeclared {c.refines!r}")

    families = []
    for fid, spec in doc["families"].items():
        families.append(
            Family(
                id=fid,
                predicate=_require(spec, "predicate", f"family {fid!r}"),
                trees=tuple(_require(spec, "trees", f"family {fid!r}")),
                note=spec.get("note"),
            )
        )
    family_by_id = {f.id: f for f in families}

    trees = []
    for spec in doc["trees"]:
        trees.append(_build_tree(spec, inventory, cat_names, family_by_id))
    _check_trees(trees, families)

    variants = tuple(sorted((doc.get("variants") or {}).items()))
    lexicon = [_build_entry(spec, inventory, dict(variants)) for spec in doc["lexicon"]]
    keys = [e.key for e in lexicon]
    dupes = sorted({k for k in keys if keys.count(k) > 1})
    if dupes:
        raise GrammarError(f"duplicate lexicon entries: {dupes}")
    if sum(e.is_empty for e in lexicon) > 1:
        raise GrammarError("lexicon declares more than one empty cue")

    return Grammar(
        features=inventory,
        categories=tuple(categories),
        trees=tuple(trees),
        families=tuple(families),
        lexicon=tuple(lexicon),
        variants=variants,
        note=doc.get("note"),
    )


def parse_skeleton(spec: Any, categories: set[str], where: str) -> TreeNode:
    if isinstance(spec, str):
        parts = spec.split(":")
        tag = parts[0]
        if tag not in _SKELETON_TAGS:
            raise GrammarError(f"{where}: bad leaf {spec!r}")
        kind = _SKELETON_TAGS[tag]
        if kind == ANCHOR:
            if len(parts) != 2 or not parts[1]:
                raise GrammarError(f"{where}: anchor leaf must be 'anchor:<slot>', got {spec!r}")
            return TreeNode("cue", ANCHOR, slot=parts[1])
        if len(parts) != 3:
            raise GrammarError(f"{where}: leaf must be '{tag}:<category>:<arg>', got {spec!r}")
        if parts[1] not in categories:
            raise GrammarError(f"{where}: undeclared category {parts[1]!r}")
        try:
            arg = int(parts[2])
        except ValueError:
            raise GrammarError(f"{where}: bad argument number in {spec!r}") from None
        return TreeNode(parts[1], kind, arg=arg)
    if isinstance(spec, list) and spec and isinstance(spec[0], str):
        category, rest = spec[0], spec[1:]
        if category not in categories:
            raise GrammarError(f"{where}: undeclared category {category!r}")
        adjoinable = True
        if rest and isinstance(rest[0], dict):
            adjoinable = bool(rest[0].get("adjoinable", True))
            rest = rest[1:]
        if not rest:
            raise GrammarError(f"{where}: interior node {category!r} has no children")
        kids = tuple(parse_skeleton(r, categories, where) for r in rest)
        return TreeNode(category, INTERIOR, kids, adjoinable=adjoinable)
    raise GrammarError(f"{where}: cannot read skeleton node {spec!r}")


def _build_tree(spec, inventory, categories, families) -> ElementaryTree:
    name = _require(spec, "name", "tree")
    where = f"tree {name!r}"
    if name == CLAUSE_TREE_NAME:
        raise GrammarError(f"{where}: name is reserved for the built-in clause tree")
    kind = _require(spec, "kind", where)
    if kind not in ("initial", "auxiliary"):
        raise GrammarError(f"{where}: kind must be initial or auxiliary")
    root = parse_skeleton(_require(spec, "skeleton", where), categories, where)
    if root.kind != INTERIOR:
        raise GrammarError(f"{where}: root must be an interior node")
    family_id = _require(spec, "family", where)
    if family_id not in families:
        raise GrammarError(f"{where}: family {family_id!r} is not declared")

    slots = []
    for a in spec.get("anchors", []):
        sid = _require(a, "id", where)
        position = _require(a, "position", f"{where} anchor {sid!r}")
        realization = a.get("realization", "required")
        classes = tuple(a.get("classes", ()))
        cue_positions = tuple(
            a.get("cue_positions", ("medial", "final") if position == "final" else ("initial",))
        )
        if position not in POSITIONS:
            raise GrammarError(f"{where} anchor {sid!r}: bad position {position!r}")
        if realization not in ("required", "optional"):
            raise GrammarError(f"{where} anchor {sid!r}: bad realization {realization!r}")
        bad = [c for c in classes if c not in CUE_CLASSES or c == "empty"]
        if bad or not classes:
            raise GrammarError(f"{where} anchor {sid!r}: bad cue classes {list(classes)}")
        if not cue_positions or any(p not in POSITIONS for p in cue_positions):
            raise GrammarError(f"{where} anchor {sid!r}: bad cue positions {list(cue_positions)}")
        features = inventory.structure(a.get("features", {}), f"{where} anchor {sid!r}")
        slots.append(AnchorSlot(sid, features, position, realization, classes, cue_positions))

    return ElementaryTree(
        name=name,
        kind=kind,
        root=root,
        anchors=tuple(slots),
        family=family_id,
        predicate=families[family_id].predicate,
        min_lexical=int(spec.get("min_lexical", 1)),
        precondition=spec.get("precondition"),
        note=spec.get("note"),
    )


def _check_trees(trees: list[ElementaryTree], families: list[Family]) -> None:
    names = [t.name for t in trees]
    if len(set(names)) != len(names):
        raise GrammarError("duplicate tree names")
    for t in trees:
        _check_tree(t)
    by_name = {t.name: t for t in trees}
    for fam in families:
        members = []
        for tname in fam.trees:
            if tname not in by_name:
                raise GrammarError(f"family {fam.id!r} lists unknown tree {tname!r}")
            if by_name[tname].family != fam.id:
                raise GrammarError(f"tree {tname!r} is listed in family {fam.id!r} but names another")
            members.append(by_name[tname])
        arities = {m.arity for m in members}
        if len(arities) > 1:
            raise GrammarError(f"family {fam.id!r} mixes argument structures {sorted(arities)}")
        if fam.predicate != "none" and arities and arities != {2}:
            raise GrammarError(f"family {fam.id!r} has predicate {fam.predicate!r} but is not binary")
    listed = {(f.id, name) for f in families for name in f.trees}
    for t in trees:
        if (t.family, t.name) not in listed:
            raise GrammarError(f"tree {t.name!r} is missing from family {t.family!r}")


def _check_tree(t: ElementaryTree) -> None:
    where = f"{t.kind} tree {t.name!r}"
    nodes = list(t.root.walk())
    feet = [n for _, n in nodes if n.kind == FOOT]
    if t.kind == "initial" and feet:
        raise GrammarError(f"{where} has a foot node")
    if t.kind == "auxiliary":
        if not feet:
            raise GrammarError(f"{where} has no foot node")
        if len(feet) > 1:
            raise GrammarError(f"{where} has more than one foot node")
        if feet[0].category != t.root.category:
            raise GrammarError(f"{where}: foot category differs from root category")
    if any(n.kind == UNIT for _, n in nodes):
        raise GrammarError(f"{where}: leaf units belong to the built-in clause tree only")

    slot_nodes = [n.slot for _, n in nodes if n.kind == ANCHOR]
    slot_ids = [s.id for s in t.anchors]
    if sorted(slot_nodes) != sorted(slot_ids) or len(set(slot_ids)) != len(slot_ids):
        raise GrammarError(f"{where}: anchor leaves {slot_nodes} do not match declared slots {slot_ids}")
    if not 1 <= len(t.anchors) <= 2:
        raise GrammarError(f"{where} must have one or two anchor slots")
    if len(t.anchors) == 2 and t.kind != "initial":
        raise GrammarError(f"{where}: only initial trees carry a pair of anchors")

    args = [n.arg for _, n in nodes if n.kind in ARGUMENT_KINDS]
    if sorted(args) != list(range(1, len(args) + 1)):
        raise GrammarError(f"{where}: argument numbers {args} must be 1..n, each once")

    for address, node in nodes:
        if node.kind == INTERIOR and not any(
            n.kind in ARGUMENT_KINDS for _, n in node.walk()
        ):
            raise GrammarError(f"{where}: interior node at {format_address(address)} dominates no argument")

    if not 0 <= t.min_lexical <= len(t.anchors):
        raise GrammarError(f"{where}: min_lexical out of range")
    required = sum(not s.optional for s in t.anchors)
    sites = sum(1 for _, n in nodes if n.kind == SUBSTITUTION)
    lexical = max(required, t.min_lexical)
    if t.kind == "auxiliary" and not sites and not lexical:
        raise GrammarError(f"{where} can adjoin without contributing material")
    if t.kind == "initial" and sites < 2 and not lexical:
        raise GrammarError(f"{where} could substitute into its own site without adding material")
    if t.predicate == "none" and t.arity != 1:
        raise GrammarError(f"{where}: trees without a predicate take exactly one argument")

    # anchor position must agree with where the slot sits among the arguments
    order = [n for _, n in nodes if n.kind in ARGUMENT_KINDS or n.kind == ANCHOR]
    for slot in t.anchors:
        idx = next(i for i, n in enumerate(order) if n.kind == ANCHOR and n.slot == slot.id)
        before = any(n.kind in ARGUMENT_KINDS for n in order[:idx])
        after = any(n.kind in ARGUMENT_KINDS for n in order[idx + 1:])
        actual = "medial" if before and after else ("final" if before else "initial")
        if actual != slot.position:
            raise GrammarError(
                f"{where}: anchor {slot.id!r} declared {slot.position} but sits {actual}"
            )


def _build_entry(spec, inventory, variants) -> CueEntry:
    lexeme = _require(spec, "lexeme", "lexicon entry")
    where = f"lexicon entry {lexeme!r}"
    cls = _require(spec, "class", where)
    if not isinstance(lexeme, str):
        raise GrammarError(f"{where}: lexeme must be a string")
    if cls not in CUE_CLASSES:
        raise GrammarError(f"{where}: bad class {cls!r}")
    if (lexeme == "") != (cls == "empty"):
        raise GrammarError(f"{where}: only the empty cue has an empty lexeme")
    presupposition = spec.get("presupposition")
    if presupposition is not None and cls not in PRESUPPOSING_CLASSES:
        raise GrammarError(f"{where}: class {cls!r} cannot carry a presupposition")
    variant = tuple(sorted((spec.get("variant") or {}).items()))
    for key, value in variant:
        if key not in variants:
            raise GrammarError(f"{where}: unknown variant {key!r}")
    return CueEntry(
        lexeme=lexeme,
        cls=cls,
        features=inventory.structure(spec.get("features", {}), where),
        presupposition=presupposition,
        variant=variant,
        note=spec.get("note"),
    )


# ---------------------------------------------------------------- dumping


def skeleton_to_json(node: TreeNode) -> Any:
    if node.kind == INTERIOR:
        head: list[Any] = [node.category]
        if not node.adjoinable:
            head.append({"adjoinable": False})
        return head + [skeleton_to_json(c) for c in node.children]
    if node.kind == ANCHOR:
        return f"anchor:{node.slot}"
    tag = {v: k for k, v in _SKELETON_TAGS.items()}[node.kind]
    return f"{tag}:{node.category}:{node.arg}"


def grammar_to_json(grammar: Grammar) -> dict[str, Any]:
    def _opt(d: dict[str, Any], key: str, value: Any) -> dict[str, Any]:
        if value is not None:
            d[key] = value
        return d

    doc: dict[str, Any] = {"format": GRAMMAR_FORMAT}
    _opt(doc, "note", grammar.note)
    doc["categories"] = {
        c.name: {"refines": c.refines, **({"strict": True} if c.strict else {})}
        for c in grammar.categories
        if c.name != BASE_CATEGORY
    }
    doc["features"] = grammar.features.to_dict()
    doc["variants"] = dict(grammar.variants)
    doc["families"] = {
        f.id: _opt({"predicate": f.predicate, "trees": list(f.trees)}, "note", f.note)
        for f in grammar.families
    }
    trees = []
    for t in grammar.trees:
        d: dict[str, Any] = {"name": t.name, "kind": t.kind, "family": t.family}
        d["skeleton"] = skeleton_to_json(t.root)
        d["anchors"] = [
            {
                "id": s.id,
                "features": s.features.to_dict(),
                "position": s.position,
                "realization": s.realization,
                "classes": list(s.classes),
                "cue_positions": list(s.cue_positions),
            }
            for s in t.anchors
        ]
        d["min_lexical"] = t.min_lexical
        _opt(d, "precondition", t.precondition)
        _opt(d, "note", t.note)
        trees.append(d)
    doc["trees"] = trees
    lexicon = []
    for e in grammar.lexicon:
        d = {"lexeme": e.lexeme, "class": e.cls, "features": e.features.to_dict()}
        _opt(d, "presupposition", e.presupposition)
        if e.variant:
            d["variant"] = dict(e.variant)
        _opt(d, "note", e.note)
        lexicon.append(d)
    doc["lexicon"] = lexicon
    return doc


def dump_grammar(grammar: Grammar) -> str:
    return json.dumps(grammar_to_json(grammar), indent=2, ensure_ascii=False) + "\n"
