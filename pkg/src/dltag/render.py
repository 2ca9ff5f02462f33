"""Text, DOT and JSON renderings of derivations."""
from __future__ import annotations

import json
from typing import Any, Sequence

from .grammar import ANCHOR, FOOT, SUBSTITUTION, UNIT, Grammar, TreeNode, format_address
from .derivation.inputs import DiscourseInput
from .derivation.model import CueRealization, DerivationNode, steps
from .derivation.ops import build_derived, linearize

DERIVATIONS_FORMAT = "dltag-derivations/1"


def _cue(c: CueRealization) -> str:
    text = f'"{c.lexeme}"' if c.lexeme else "<empty>"
    if c.position not in (None, "initial"):
        text += f"<{c.position}>"
    return f"{c.slot}={text}"


def _head(node: DerivationNode) -> str:
    parts = [node.tree]
    if node.unit is not None:
        parts.append(f"[{node.unit}]")
    parts += [_cue(c) for c in node.anchors]
    return " ".join(parts)


def bracket(node: DerivationNode, indent: int = 0, via: str = "") -> str:
    """Indented bracket form of a derivation tree.

    Each line is one elementary tree instance.  A child line starts with
    the operation and the Gorn address in its parent where it attaches.
    """
    pad = "  " * indent
    lines = [f"{pad}({via}{_head(node)}"]
    for att in node.attachments:
        lines.append(bracket(att.node, indent + 1, f"{att.operation}@{format_address(att.address)} "))
    lines[-1] += ")"
    return "\n".join(lines)


def derived_bracket(tree: TreeNode) -> str:
    """One-line bracket form of a derived tree."""
    if tree.kind == UNIT:
        return f"[{tree.unit}]" if tree.unit else "[?]"
    if tree.kind == ANCHOR:
        if tree.cue is None:
            return "<?>"
        return f'"{tree.cue.lexeme}"' if tree.cue.lexeme else "<empty>"
    if tree.kind == SUBSTITUTION:
        return f"{tree.category}!"
    if tree.kind == FOOT:
        return f"{tree.category}*"
    return "(" + " ".join([tree.category] + [derived_bracket(c) for c in tree.children]) + ")"


def yield_text(grammar: Grammar, node: DerivationNode) -> str:
    return " ".join(str(t) for t in linearize(build_derived(grammar, node)))


def bracket_document(grammar: Grammar, derivations: Sequence[DerivationNode], discourse: DiscourseInput | None = None) -> str:
    out = []
    name = discourse.id if discourse is not None and discourse.id else "input"
    out.append(f"# {name}: {len(derivations)} derivation(s)")
    for i, d in enumerate(derivations, 1):
        out.append(f"derivation {i}")
        out.append(bracket(d))
        out.append("derived " + derived_bracket(build_derived(grammar, d)))
        out.append("yield " + yield_text(grammar, d))
    return "\n".join(out) + "\n"


# ---------------------------------------------------------------- DOT


def _quote(text: str) -> str:
    return '"' + text.replace("\\", "\\\\").replace('"', '\\"') + '"'


def dot(derivations: Sequence[DerivationNode], name: str = "derivations") -> str:
    """Derivation trees as one DOT digraph, one cluster per derivation.

    Elementary tree instances are ellipses, cues are plain text and clause
    units are boxes; edges carry the operation and the attachment address.
    """
    lines = [f"digraph {_quote(name)} {{", "  node [fontname=Helvetica];"]
    for k, d in enumerate(derivations):
        lines.append(f"  subgraph cluster_{k} {{")
        lines.append(f"    label={_quote(f'derivation {k + 1}')};")
        for ref, inst in d.instances():
            nid = f"d{k}_{ref.replace('.', '_')}"
            lines.append(f"    {nid} [label={_quote(inst.tree)}, shape=ellipse];")
            if inst.unit is not None:
                lines.append(f"    {nid}_unit [label={_quote(inst.unit)}, shape=box];")
                lines.append(f"    {nid} -> {nid}_unit [label={_quote('fill-leaf')}];")
            for c in inst.anchors:
                cid = f"{nid}_{c.slot}"
                label = c.lexeme or "<empty>"
                lines.append(f"    {cid} [label={_quote(label)}, shape=plaintext];")
                lines.append(f"    {nid} -> {cid} [label={_quote('anchor ' + c.slot)}];")
            for i, att in enumerate(inst.attachments):
                child = f"{nid}_{i}"
                label = f"{att.operation}@{format_address(att.address)}"
                lines.append(f"    {nid} -> {child} [label={_quote(label)}];")
        lines.append("  }")
    lines.append("}")
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------- JSON


def node_json(node: DerivationNode) -> dict[str, Any]:
    doc: dict[str, Any] = {"tree": node.tree}
    if node.unit is not None:
        doc["unit"] = node.unit
    if node.anchors:
        doc["anchors"] = [
            {"slot": c.slot, "lexeme": c.lexeme, "class": c.cls, "position": c.position}
            for c in node.anchors
        ]
    if node.attachments:
        doc["attachments"] = [
            {"operation": a.operation, "address": list(a.address), "node": node_json(a.node)}
            for a in node.attachments
        ]
    return doc


def derivations_json(
    grammar: Grammar, derivations: Sequence[DerivationNode], discourse: DiscourseInput | None = None
) -> str:
    doc = {
        "format": DERIVATIONS_FORMAT,
        "input": discourse.id if discourse is not None else None,
        "count": len(derivations),
        "derivations": [
            {
                "root": d.tree,
                "tree": node_json(d),
                "steps": [
                    {"operation": s.operation, "source": s.source, "target": s.target,
                     "address": list(s.address)}
                    for s in steps(grammar, d)
                ],
                "yield": yield_text(grammar, d),
            }
            for d in derivations
        ],
    }
    return json.dumps(doc, indent=2, sort_keys=True) + "\n"
