"""Command-line front end.

Exit status: 0 on success, 1 on usage, parse or validation errors, 2 when
a valid input has no derivation.
"""
from __future__ import annotations

import argparse
import os
import sys
from typing import Sequence

from .derivation import (
    BoundExceeded,
    DiscourseInput,
    InputError,
    bundled_example,
    derive,
    enumerate_all,
    load_input_file,
)
from .features import FeatureError, classify, realizable
from .grammar import (
    CUE_CLASSES,
    CueEntry,
    Grammar,
    GrammarError,
    candidate_trees,
    load_grammar_file,
    seed_grammar,
    slot_accepts,
)
from .render import bracket_document, derivations_json, dot
from .semantics import CancellationError, cancel, compose, ledgers_json

GRAMMAR_ENV = "DLTAG_GRAMMAR"
FORMATS = ("bracket", "dot", "json")

EXIT_OK, EXIT_ERROR, EXIT_EMPTY = 0, 1, 2


class UsageError(Exception):
    pass


# ---------------------------------------------------------------- loading


def load_config_grammar(args: argparse.Namespace) -> Grammar:
    if args.grammar:
        grammar = load_grammar_file(args.grammar)
    elif args.seed_grammar or not os.environ.get(GRAMMAR_ENV):
        grammar = seed_grammar()
    else:
        grammar = load_grammar_file(os.environ[GRAMMAR_ENV])
    for item in args.variant or ():
        key, sep, value = item.partition("=")
        if not sep:
            raise UsageError(f"--variant expects KEY=VALUE, got {item!r}")
        try:
            grammar = grammar.with_variant(key, value)
        except KeyError as exc:
            raise UsageError(str(exc.args[0])) from None
    return grammar


def load_config_input(args: argparse.Namespace) -> DiscourseInput:
    if args.input and args.example:
        raise UsageError("give either --input or --example, not both")
    if args.example:
        try:
            return bundled_example(args.example)
        except FileNotFoundError:
            raise UsageError(f"no bundled example {args.example!r}") from None
    if not args.input:
        raise UsageError("an input is required (--input PATH or --example NAME)")
    return load_input_file(args.input)


def lookup_cue(grammar: Grammar, name: str) -> CueEntry:
    """Resolve ``lexeme`` or ``lexeme/class`` to one active lexicon entry."""
    lexeme, cls = name, None
    if "/" in name:
        lexeme, _, cls = name.rpartition("/")
        if cls not in CUE_CLASSES:
            lexeme, cls = name, None
    if lexeme == "":
        return grammar.empty_cue
    found = [e for e in grammar.entries(lexeme) if cls is None or e.cls == cls]
    if not found:
        raise UsageError(f"unknown lexeme {name!r}")
    if len(found) > 1:
        options = ", ".join(e.label() for e in found)
        raise UsageError(f"{lexeme!r} is ambiguous; pick one of: {options}")
    return found[0]


def parse_features(grammar: Grammar, text: str):
    bindings = {}
    for part in filter(None, (p.strip() for p in text.split(","))):
        name, sep, value = part.partition("=")
        if not sep:
            raise UsageError(f"feature bindings look like name=value, got {part!r}")
        bindings[name.strip()] = value.strip()
    return grammar.features.structure(bindings, "--features")


# ---------------------------------------------------------------- commands


def render_derivations(grammar, derivations, discourse, fmt: str) -> str:
    if fmt == "json":
        return derivations_json(grammar, derivations, discourse)
    if fmt == "dot":
        return dot(derivations, discourse.id or "derivations")
    return bracket_document(grammar, derivations, discourse)


def cmd_derive(args) -> int:
    grammar = load_config_grammar(args)
    discourse = load_config_input(args)
    derivations = derive(grammar, discourse)
    sys.stdout.write(render_derivations(grammar, derivations, discourse, args.format))
    return EXIT_OK if derivations else EXIT_EMPTY


def cmd_enumerate(args) -> int:
    grammar = load_config_grammar(args)
    discourse = load_config_input(args)
    derivations = enumerate_all(grammar, discourse, bound=args.bound, max_units=args.max_units)
    sys.stdout.write(render_derivations(grammar, derivations, discourse, args.format))
    return EXIT_OK if derivations else EXIT_EMPTY


def cmd_classify(args) -> int:
    grammar = load_config_grammar(args)
    if args.table:
        entries = sorted(grammar.active_lexicon, key=lambda e: e.key)
        for a in entries:
            for b in entries:
                print(f"{a.label()}\t{b.label()}\t{classify(a.features, b.features)}")
        return EXIT_OK
    if len(args.cues) != 2:
        raise UsageError("classify needs two cues (or --table)")
    a, b = (lookup_cue(grammar, c) for c in args.cues)
    print(classify(a.features, b.features))
    return EXIT_OK


def cmd_realize(args) -> int:
    grammar = load_config_grammar(args)
    cue = lookup_cue(grammar, args.cue)
    if args.features is not None:
        anchor = parse_features(grammar, args.features)
        ok = realizable(anchor, cue.features)
        print(f"{'accepted' if ok else 'rejected'}\t{classify(anchor, cue.features)}")
        return EXIT_OK
    if args.tree:
        try:
            tree = grammar.tree(args.tree)
        except KeyError as exc:
            raise UsageError(str(exc.args[0])) from None
        slots = [tree.slot(args.slot)] if args.slot else list(tree.anchors)
        for slot in slots:
            ok = slot_accepts(slot, cue, args.position)
            print(f"{tree.name}\t{slot.id}\t{'accepted' if ok else 'rejected'}"
                  f"\t{classify(slot.features, cue.features)}")
        return EXIT_OK
    for tree in candidate_trees(grammar, cue):
        slots = ",".join(s.id for s in tree.anchors if slot_accepts(s, cue))
        print(f"{tree.name}\t{slots}")
    return EXIT_OK


def _ledgers(args):
    grammar = load_config_grammar(args)
    discourse = load_config_input(args)
    derivations = derive(grammar, discourse)
    return discourse, [compose(grammar, d, discourse) for d in derivations]


def cmd_cancel(args) -> int:
    _, ledgers = _ledgers(args)
    if not ledgers:
        print("error: input has no derivation", file=sys.stderr)
        return EXIT_EMPTY
    outcomes = [cancel(ledger, (args.first, args.second))[1] for ledger in ledgers]
    if len(outcomes) == 1:
        print(outcomes[0])
    else:
        for i, outcome in enumerate(outcomes, 1):
            print(f"derivation {i}\t{outcome}")
    return EXIT_OK


def cmd_report(args) -> int:
    discourse, ledgers = _ledgers(args)
    if not ledgers:
        print("error: input has no derivation", file=sys.stderr)
        return EXIT_EMPTY
    if args.format == "json":
        sys.stdout.write(ledgers_json(ledgers, discourse.id))
        return EXIT_OK
    for i, ledger in enumerate(ledgers, 1):
        if len(ledgers) > 1:
            print(f"# derivation {i}")
        sys.stdout.write(ledger.to_text())
    return EXIT_OK


# ---------------------------------------------------------------- parser


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    g = common.add_argument_group("grammar")
    g.add_argument("--grammar", metavar="PATH", help=f"grammar file (default: ${GRAMMAR_ENV} or the seed grammar)")
    g.add_argument("--seed-grammar", action="store_true", help="use the bundled seed grammar")
    g.add_argument("--variant", action="append", metavar="KEY=VALUE",
                   help="select a lexical variant, e.g. so-but=adverbial")

    source = argparse.ArgumentParser(add_help=False)
    source.add_argument("--input", metavar="PATH", help="discourse input file")
    source.add_argument("--example", metavar="NAME", help="bundled example input, e.g. ex09")

    parser = argparse.ArgumentParser(prog="dltag", description="Discourse-level lexicalized TAG engine.")
    sub = parser.add_subparsers(dest="command", required=True, metavar="COMMAND")

    p = sub.add_parser("derive", parents=[common, source], help="all derivations of an input")
    p.add_argument("--format", choices=FORMATS, default="bracket")
    p.set_defaults(run=cmd_derive)

    p = sub.add_parser("enumerate", parents=[common, source], help="exhaustive search (testing oracle)")
    p.add_argument("--format", choices=FORMATS, default="bracket")
    p.add_argument("--bound", type=int, default=None, help="step limit (default 4 per unit)")
    p.add_argument("--max-units", type=int, default=5)
    p.set_defaults(run=cmd_enumerate)

    p = sub.add_parser("classify", parents=[common], help="substitutability relation of two cues")
    p.add_argument("cues", nargs="*", metavar="CUE", help="lexeme or lexeme/class")
    p.add_argument("--table", action="store_true", help="all ordered pairs of active lexicon entries")
    p.set_defaults(run=cmd_classify)

    p = sub.add_parser("realize", parents=[common], help="which anchors a cue can realize")
    p.add_argument("cue", metavar="CUE", help="lexeme or lexeme/class; '' for the empty cue")
    p.add_argument("--tree", help="check the anchor slots of this tree")
    p.add_argument("--slot", help="restrict --tree to one slot")
    p.add_argument("--position", choices=("initial", "medial", "final"))
    p.add_argument("--features", metavar="NAME=VALUE,...",
                   help="check against an ad hoc anchor feature structure")
    p.set_defaults(run=cmd_realize)

    p = sub.add_parser("cancel", parents=[common, source], help="try to deny the relation between two terms")
    p.add_argument("first", metavar="TERM")
    p.add_argument("second", metavar="TERM")
    p.set_defaults(run=cmd_cancel)

    p = sub.add_parser("report", parents=[common, source], help="meaning ledger of each derivation")
    p.add_argument("--format", choices=("bracket", "json"), default="bracket",
                   help="bracket prints the text ledger")
    p.set_defaults(run=cmd_report)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:  # argparse exits 2 on usage errors; keep 2 for "no derivation"
        return EXIT_OK if exc.code == 0 else EXIT_ERROR
    try:
        return args.run(args)
    except (UsageError, GrammarError, InputError, FeatureError, CancellationError,
            BoundExceeded, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
