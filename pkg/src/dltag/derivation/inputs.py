"""Annotated discourse inputs: clause units plus cue placements."""
from __future__ import annotations

import json
from dataclasses import dataclass
from importlib import resources
from typing import Any, NamedTuple

from ..grammar import POSITIONS, Grammar

INPUT_FORMAT = "dltag-input/1"
MODAL_STATUSES = ("actual", "possible")


class InputError(ValueError):
    """Input is malformed or mentions something the grammar lacks."""


class Token(NamedTuple):
    kind: str  # "unit" or "cue"
    value: str
    position: str | None = None

    def __str__(self) -> str:
        if self.kind == "unit":
            return f"[{self.value}]"
        return self.value if self.position in (None, "initial") else f"{self.value}<{self.position}>"


@dataclass(frozen=True)
class ClauseUnit:
    id: str
    proposition: str
    surface: str | None = None
    modal_status: str | None = None
    hook_candidate: str | None = None


@dataclass(frozen=True)
class CueMark:
    lexeme: str
    unit: str
    position: str = "initial"


@dataclass(frozen=True)
class DiscourseInput:
    units: tuple[ClauseUnit, ...]
    cues: tuple[CueMark, ...] = ()
    id: str | None = None
    surface: str | None = None
    note: str | None = None

    def unit(self, unit_id: str) -> ClauseUnit:
        for u in self.units:
            if u.id == unit_id:
                return u
        raise KeyError(f"unknown unit {unit_id!r}")

    def tokens(self) -> tuple[Token, ...]:
        """Surface order: per unit, initial cues, the unit, medial cues, final cues."""
        out: list[Token] = []
        for u in self.units:
            mine = [c for c in self.cues if c.unit == u.id]
            out += [Token("cue", c.lexeme, c.position) for c in mine if c.position == "initial"]
            out.append(Token("unit", u.id))
            for pos in ("medial", "final"):
                out += [Token("cue", c.lexeme, pos) for c in mine if c.position == pos]
        return tuple(out)

    def validate(self, grammar: Grammar | None = None) -> None:
        ids = [u.id for u in self.units]
        if len(set(ids)) != len(ids):
            raise InputError("unit ids must be unique")
        props = [u.proposition for u in self.units]
        if len(set(props)) != len(props):
            raise InputError("unit propositions must be unique")
        for u in self.units:
            if not u.id or not u.proposition:
                raise InputError("every unit needs an id and a proposition")
            if u.modal_status is not None and u.modal_status not in MODAL_STATUSES:
                raise InputError(f"unit {u.id!r}: bad modal status {u.modal_status!r}")
        for c in self.cues:
            if c.unit not in ids:
                raise InputError(f"cue {c.lexeme!r} attaches to unknown unit {c.unit!r}")
            if c.position not in POSITIONS:
                raise InputError(f"cue {c.lexeme!r}: bad position {c.position!r}")
            if not c.lexeme:
                raise InputError("the empty cue is implicit and cannot be placed")
            if grammar is not None and not grammar.entries(c.lexeme):
                raise InputError(f"unknown lexeme {c.lexeme!r}")

    def to_json(self) -> dict[str, Any]:
        doc: dict[str, Any] = {"format": INPUT_FORMAT}
        for key in ("id", "surface", "note"):
            if getattr(self, key) is not None:
                doc[key] = getattr(self, key)
        units = []
        for u in self.units:
            d: dict[str, Any] = {"id": u.id, "proposition": u.proposition}
            for key in ("surface", "modal_status", "hook_candidate"):
                if getattr(u, key) is not None:
                    d[key] = getattr(u, key)
            units.append(d)
        doc["units"] = units
        doc["cues"] = [{"lexeme": c.lexeme, "unit": c.unit, "position": c.position} for c in self.cues]
        return doc


def input_from_json(doc: Any) -> DiscourseInput:
    if not isinstance(doc, dict):
        raise InputError("input must be a JSON object")
    fmt = doc.get("format", INPUT_FORMAT)
    if fmt != INPUT_FORMAT:
        raise InputError(f"unsupported input format {fmt!r}")
    try:
        units = tuple(
            ClauseUnit(
                id=u["id"],
                proposition=u.get("proposition", u["id"]),
                surface=u.get("surface"),
                modal_status=u.get("modal_status"),
                hook_candidate=u.get("hook_candidate"),
            )
            for u in doc.get("units", [])
        )
        cues = tuple(
            CueMark(c["lexeme"], c["unit"], c.get("position", "initial"))
            for c in doc.get("cues", [])
        )
    except (KeyError, TypeError, AttributeError) as exc:
        raise InputError(f"malformed input: {exc}") from None
    inp = DiscourseInput(units, cues, doc.get("id"), doc.get("surface"), doc.get("note"))
    inp.validate()
    return inp


def load_input(source: str) -> DiscourseInput:
    try:
        doc = json.loads(source)
    except json.JSONDecodeError as exc:
        raise InputError(f"{exc.msg} (line {exc.lineno}, column {exc.colno})") from None
    return input_from_json(doc)


def load_input_file(path) -> DiscourseInput:
    with open(path, encoding="utf-8") as fh:
        return load_input(fh.read())


def bundled_example_names() -> list[str]:
    root = resources.files("dltag.data").joinpath("examples")
    return sorted(p.name[:-5] for p in root.iterdir() if p.name.endswith(".json"))


def bundled_example(name: str) -> DiscourseInput:
    root = resources.files("dltag.data").joinpath("examples")
    return load_input(root.joinpath(f"{name}.json").read_text("utf-8"))


def simple_input(*units: str, cues: tuple[tuple[str, str, str], ...] = ()) -> DiscourseInput:
    """Shorthand for tests: units named by id (proposition = id)."""
    return DiscourseInput(
        tuple(ClauseUnit(u, u) for u in units),
        tuple(CueMark(lex, unit, pos) for lex, unit, pos in cues),
    )
