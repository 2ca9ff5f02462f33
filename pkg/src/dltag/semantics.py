"""Meaning composition into three separately kept layers.

A derivation yields compositional predications (one per tree that carries
a predicate), presuppositions (one per realized cue with a template) and
defeasible inference hooks (one per description-extension step).  Only
hooks can be cancelled.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field, replace
from typing import Any, Union

from .grammar import FOOT, INTERIOR, UNIT, Address, Grammar
from .derivation.inputs import DiscourseInput
from .derivation.model import DerivationError, DerivationNode

LEDGER_FORMAT = "dltag-ledger/1"
UNCONSTRAINED = "unconstrained"


class CancellationError(ValueError):
    pass


class UnknownTerms(CancellationError):
    pass


class NoRelation(CancellationError):
    pass


@dataclass(frozen=True)
class Pred:
    """A predication used as a term: ``predicate(arg1, arg2)``."""

    predicate: str
    arg1: Term
    arg2: Term

    def __str__(self) -> str:
        return f"{self.predicate}({render(self.arg1)}, {render(self.arg2)})"


Term = Union[str, Pred]


def render(term: Term) -> str:
    return term if isinstance(term, str) else str(term)


def head(term: Term) -> str:
    """The proposition a term is about: its leftmost first argument."""
    while isinstance(term, Pred):
        term = term.arg1
    return term


def propositions(term: Term) -> list[str]:
    if isinstance(term, str):
        return [term]
    return propositions(term.arg1) + propositions(term.arg2)


def subterms(term: Term) -> list[Term]:
    if isinstance(term, str):
        return [term]
    return [term] + subterms(term.arg1) + subterms(term.arg2)


@dataclass(frozen=True)
class Predication:
    predicate: str
    arg1: Term
    arg2: Term
    source: str
    layer: str = "compositional"

    @property
    def term(self) -> Pred:
        return Pred(self.predicate, self.arg1, self.arg2)


@dataclass(frozen=True)
class Presupposition:
    cue: str
    template: str
    scope: Term
    licensed_by: tuple[Term, ...]
    source: str
    layer: str = "presuppositional"


@dataclass(frozen=True)
class InferenceHook:
    candidate: str
    between: tuple[Term, Term]
    source: str
    modality: str | None = None
    status: str = "open"
    defeasible: bool = True
    layer: str = "inferential"


@dataclass(frozen=True)
class MeaningLedger:
    predications: tuple[Predication, ...] = ()
    presuppositions: tuple[Presupposition, ...] = ()
    hooks: tuple[InferenceHook, ...] = ()
    modal_annotations: tuple[tuple[str, str], ...] = ()
    # unit id -> proposition, so callers may name terms either way
    units: tuple[tuple[str, str], ...] = field(default=(), compare=False)

    def to_json(self) -> dict[str, Any]:
        return {
            "format": LEDGER_FORMAT,
            "predications": [
                {"predicate": p.predicate, "arg1": render(p.arg1), "arg2": render(p.arg2),
                 "source": p.source, "layer": p.layer}
                for p in self.predications
            ],
            "presuppositions": [
                {"cue": p.cue, "template": p.template, "scope": render(p.scope),
                 "licensed_by": [render(t) for t in p.licensed_by], "source": p.source,
                 "layer": p.layer}
                for p in self.presuppositions
            ],
            "hooks": [
                {"candidate": h.candidate, "between": [render(t) for t in h.between],
                 "modality": h.modality, "status": h.status, "defeasible": h.defeasible,
                 "source": h.source, "layer": h.layer}
                for h in self.hooks
            ],
            "modal_annotations": dict(self.modal_annotations),
        }

    def to_text(self) -> str:
        lines = ["predications:"]
        lines += [f"  {p.term}  [{p.source}]" for p in self.predications] or ["  (none)"]
        lines.append("presuppositions:")
        lines += [f"  {s}" for s in presupposition_report(self)] or ["  (none)"]
        lines.append("hooks:")
        for h in self.hooks:
            a, b = (render(t) for t in h.between)
            modal = f" {h.modality}" if h.modality else ""
            lines.append(f"  {h.candidate}?({a}, {b}){modal} {h.status}  [{h.source}]")
        if not self.hooks:
            lines.append("  (none)")
        if self.modal_annotations:
            lines.append("modal status:")
            lines += [f"  {u}: {s}" for u, s in self.modal_annotations]
        return "\n".join(lines) + "\n"


def ledger_json(ledger: MeaningLedger) -> str:
    return json.dumps(ledger.to_json(), indent=2, sort_keys=True) + "\n"


def ledgers_json(ledgers, input_id: str | None = None) -> str:
    """Ledgers of all derivations of one input, as a single document."""
    doc = {"format": LEDGER_FORMAT, "input": input_id, "ledgers": [l.to_json() for l in ledgers]}
    return json.dumps(doc, indent=2, sort_keys=True) + "\n"


# ---------------------------------------------------------------- compose


@dataclass
class _Pending:
    """An adverbial presupposition still waiting for its licensing context."""

    cue: str
    template: str
    scope: Term
    source: str


class _Composer:
    def __init__(self, grammar: Grammar, discourse: DiscourseInput | None):
        self.g = grammar
        self.discourse = discourse
        self.predications: list[Predication] = []
        self.presuppositions: list[Presupposition] = []
        self.hooks: list[InferenceHook] = []

    def proposition(self, unit: str) -> str:
        if self.discourse is None:
            return unit
        return self.discourse.unit(unit).proposition

    def _unit_for(self, proposition: str):
        if self.discourse is None:
            return None
        for u in self.discourse.units:
            if u.proposition == proposition:
                return u
        return None

    def predicate_label(self, inst: DerivationNode) -> str:
        tree = self.g.tree(inst.tree)
        lexical = [c.lexeme for c in inst.anchors if c.lexeme]
        cue = lexical[0].replace(" ", "-") if lexical else "empty"
        return tree.predicate.replace("{cue}", cue)

    def instance(self, inst: DerivationNode, ref: str, foot: tuple[Term, list] | None = None):
        """Term for a whole instance plus presuppositions still unlicensed."""
        tree = self.g.tree(inst.tree)
        refs = {id(att): f"{ref}.{i}" for i, att in enumerate(inst.attachments)}
        adjoined = {a.address: a for a in inst.attachments if a.operation == "adjoin"}
        substituted = {a.address: a for a in inst.attachments if a.operation == "substitute"}
        args = tree.argument_nodes()

        def dominated(address: Address) -> list[int]:
            return [n for n, a in args.items() if a[: len(address)] == address]

        def leaf(address: Address) -> tuple[Term, list]:
            node = tree.root.at(address)
            if node.kind == UNIT:
                if inst.unit is None:
                    raise DerivationError(f"instance {ref} has an unfilled leaf")
                return self.proposition(inst.unit), []
            if node.kind == FOOT:
                if foot is None:
                    raise DerivationError(f"instance {ref} has an open foot")
                return foot
            att = substituted.get(address)
            if att is None:
                raise DerivationError(f"instance {ref} has an open substitution site")
            return self.instance(att.node, refs[id(att)])

        def at(address: Address) -> tuple[Term, list]:
            node = tree.root.at(address)
            if node.kind != INTERIOR:
                return leaf(address)
            kids = [address + (i,) for i in range(len(node.children))]
            split = [k for k in kids if dominated(k)]
            if len(split) == 1:
                term, pending = at(split[0])
            else:
                # lowest node over both arguments: the predicate applies here
                parts = {n: at(k) for k in split for n in dominated(k)}
                (a1, p1), (a2, p2) = parts[1], parts[2]
                term = self.predicate(tree, inst, ref, (a1, p1), (a2, p2))
                pending = []
            att = adjoined.get(address)
            if att is not None:
                term, pending = self.instance(att.node, refs[id(att)], (term, pending))
            return term, pending

        term, pending = at(())
        if tree.predicate == "none":
            for cue in inst.anchors:
                entry = self.g.entry(cue.lexeme, cue.cls) if cue.lexeme else None
                if entry is not None and entry.presupposition is not None:
                    # adverbial cue: scopes over its host, licensed further up
                    pending = pending + [_Pending(cue.lexeme, entry.presupposition, term, f"{ref}:{inst.tree}")]
        return term, pending

    def predicate(self, tree, inst, ref, first: tuple[Term, list], second: tuple[Term, list]) -> Pred:
        (a1, p1), (a2, p2) = first, second
        label = self.predicate_label(inst)
        source = f"{ref}:{inst.tree}"
        self.predications.append(Predication(label, a1, a2, source))
        # cues adjoined inside one argument are licensed by the other
        for pending, other in ((p1, a2), (p2, a1)):
            for p in pending:
                self.presuppositions.append(Presupposition(p.cue, p.template, p.scope, (other,), p.source))
        for cue in inst.anchors:
            entry = self.g.entry(cue.lexeme, cue.cls) if cue.lexeme else None
            if entry is not None and entry.presupposition is not None:
                self.presuppositions.append(
                    Presupposition(cue.lexeme, entry.presupposition, a2, (a1,), source)
                )
        if tree.is_auxiliary:
            self.hooks.append(self.hook(a1, a2, source))
        return Pred(label, a1, a2)

    def hook(self, a1: Term, a2: Term, source: str) -> InferenceHook:
        candidate = UNCONSTRAINED
        unit = self._unit_for(head(a2))
        if unit is not None and unit.hook_candidate:
            candidate = unit.hook_candidate
        statuses = set()
        for prop in propositions(a1) + propositions(a2):
            u = self._unit_for(prop)
            if u is not None and u.modal_status:
                statuses.add(u.modal_status)
        modality = "possible" if "possible" in statuses else ("actual" if statuses else None)
        return InferenceHook(candidate, (a1, a2), source, modality)


def _ref_key(source: str) -> tuple[int, ...]:
    return tuple(int(i) for i in source.split(":")[0].split("."))


def compose(
    grammar: Grammar, derivation: DerivationNode, discourse: DiscourseInput | None = None
) -> MeaningLedger:
    """Build the meaning ledger of a complete derivation.

    Without ``discourse`` the unit ids stand in for propositions and no
    modal or hook-candidate annotations are available.
    """
    c = _Composer(grammar, discourse)
    _, pending = c.instance(derivation, "0")
    for p in pending:
        c.presuppositions.append(Presupposition(p.cue, p.template, p.scope, (), p.source))
    units: tuple[tuple[str, str], ...] = ()
    modal: tuple[tuple[str, str], ...] = ()
    if discourse is not None:
        units = tuple((u.id, u.proposition) for u in discourse.units)
        modal = tuple(sorted((u.id, u.modal_status) for u in discourse.units if u.modal_status))
    presups = sorted(c.presuppositions, key=lambda p: (_ref_key(p.source), p.cue))
    return MeaningLedger(tuple(c.predications), tuple(presups), tuple(c.hooks), modal, units)


# ---------------------------------------------------------------- cancellation


def _known_terms(ledger: MeaningLedger) -> set[str]:
    """Names a caller may use for terms in the ledger: renderings and heads."""
    terms: list[Term] = []
    for p in ledger.predications:
        terms += subterms(p.arg1) + subterms(p.arg2)
    for h in ledger.hooks:
        terms += subterms(h.between[0]) + subterms(h.between[1])
    return {render(t) for t in terms} | {head(t) for t in terms}


def _matches(term: Term, name: str) -> bool:
    return render(term) == name or head(term) == name


def _relates(pair: tuple[Term, Term], x: str, y: str) -> bool:
    a, b = pair
    return (_matches(a, x) and _matches(b, y)) or (_matches(a, y) and _matches(b, x))


def cancel(ledger: MeaningLedger, between: tuple[str, str]) -> tuple[MeaningLedger, str]:
    """Try to deny the relation between two terms.

    Terms may be named by proposition, unit id or rendered predication.
    Returns the new ledger and ``"cancelled"`` when an inference hook
    links them, or the unchanged ledger and ``"rejected-compositional"``
    when only a compositional predication does.
    """
    ids = dict(ledger.units)
    x, y = (ids.get(t, t) for t in between)
    known = _known_terms(ledger)
    missing = [t for t in (x, y) if t not in known]
    if missing:
        raise UnknownTerms(f"unknown terms: {', '.join(missing)}")
    hits = [i for i, h in enumerate(ledger.hooks) if _relates(h.between, x, y)]
    if hits:
        hooks = tuple(replace(h, status="cancelled") if i in hits else h for i, h in enumerate(ledger.hooks))
        return replace(ledger, hooks=hooks), "cancelled"
    if any(_relates((p.arg1, p.arg2), x, y) for p in ledger.predications):
        return ledger, "rejected-compositional"
    raise NoRelation(f"nothing relates {x} and {y}")


# ---------------------------------------------------------------- reports

_GLOSSES = {
    "defeasible-rule-failure": "a shared defeasible rule that links {ctx} to {scope} fails to hold",
    "defeasible-rule-success": "a shared defeasible rule that links {ctx} to {scope} succeeds",
    "temporal-succession": "{scope} follows {ctx} in time",
    "temporal-overlap": "{scope} overlaps {ctx} in time",
}


def presupposition_report(ledger: MeaningLedger) -> list[str]:
    out = []
    for p in ledger.presuppositions:
        ctx = " and ".join(render(t) for t in p.licensed_by) or "prior discourse"
        gloss = _GLOSSES.get(p.template, p.template + " over {ctx} and {scope}")
        out.append(f"{p.cue}: {p.template}: " + gloss.format(ctx=ctx, scope=render(p.scope)))
    return out
