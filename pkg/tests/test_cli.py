import json
import os
import subprocess
import sys
from importlib import resources

import pydot
import pytest

from dltag import cli
from dltag.derivation import bundled_example_names

from oracles import brute_classify

GOLDEN = resources.files("dltag.data").joinpath("golden")

FIG4 = """\
# ex09: 1 derivation(s)
derivation 1
(clause [u1]
  (adjoin@root extension link=<empty>
    (substitute@2 clause [u2]
      (adjoin@root adverbial-pre cue="however"))))
derived (DU (DU [u1]) <empty> (DU-S "however" (DU [u2])))
yield [u1] however [u2]
"""


def run(capsys, *argv):
    code = cli.main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def write_input(tmp_path, units, cues=()):
    doc = {
        "format": "dltag-input/1",
        "units": [{"id": u, "proposition": u} for u in units],
        "cues": [{"lexeme": l, "unit": u, "position": p} for l, u, p in cues],
    }
    path = tmp_path / "input.json"
    path.write_text(json.dumps(doc))
    return str(path)


# ---------------------------------------------------------------- golden files


@pytest.mark.parametrize("name", bundled_example_names())
def test_golden_derivations_and_ledgers(capsys, name):
    code, out, _ = run(capsys, "derive", "--seed-grammar", "--example", name)
    assert code == 0
    assert out == GOLDEN.joinpath(f"{name}.derive.txt").read_text("utf-8")
    code, out, _ = run(capsys, "report", "--seed-grammar", "--example", name)
    assert code == 0
    assert out == GOLDEN.joinpath(f"{name}.ledger.txt").read_text("utf-8")


def test_fig4_golden_is_the_reviewed_shape(capsys):
    assert GOLDEN.joinpath("ex09.derive.txt").read_text("utf-8") == FIG4
    assert run(capsys, "derive", "--seed-grammar", "--example", "ex09")[1] == FIG4


@pytest.mark.parametrize("fmt, ext", [("dot", "dot"), ("json", "json")])
def test_other_golden_formats(capsys, fmt, ext):
    code, out, _ = run(capsys, "derive", "--seed-grammar", "--example", "ex09", "--format", fmt)
    assert code == 0
    assert out == GOLDEN.joinpath(f"ex09.derive.{ext}").read_text("utf-8")
    code, out, _ = run(capsys, "report", "--seed-grammar", "--example", "ex09", "--format", "json")
    assert out == GOLDEN.joinpath("ex09.ledger.json").read_text("utf-8")


def test_classify_table_golden_matches_brute_force(capsys, grammar):
    code, out, _ = run(capsys, "classify", "--seed-grammar", "--table")
    assert code == 0
    assert out == GOLDEN.joinpath("classify-table.tsv").read_text("utf-8")
    by_label = {e.label(): e for e in grammar.active_lexicon}
    names = sorted(grammar.features)
    rows = [line.split("\t") for line in out.splitlines()]
    assert len(rows) == len(by_label) ** 2
    for a, b, tag in rows:
        assert tag == brute_classify(dict(by_label[a].features), dict(by_label[b].features), names)


# ---------------------------------------------------------------- formats


def test_dot_parses(capsys):
    for name in ("ex06", "ex09", "rauschenberg"):
        _, out, _ = run(capsys, "derive", "--seed-grammar", "--example", name, "--format", "dot")
        (graph,) = pydot.graph_from_dot_data(out)
        assert len(graph.get_subgraphs()) >= 1


def test_json_outputs_carry_a_format(capsys):
    _, out, _ = run(capsys, "derive", "--seed-grammar", "--example", "ex06", "--format", "json")
    doc = json.loads(out)
    assert doc["format"] == "dltag-derivations/1" and doc["count"] == 2
    _, out, _ = run(capsys, "enumerate", "--seed-grammar", "--example", "ex06", "--format", "json")
    assert json.loads(out) == doc
    _, out, _ = run(capsys, "report", "--seed-grammar", "--example", "ex06", "--format", "json")
    doc = json.loads(out)
    assert doc["format"] == "dltag-ledger/1" and len(doc["ledgers"]) == 2


# ---------------------------------------------------------------- commands


def test_classify_pairs(capsys):
    assert run(capsys, "classify", "--seed-grammar", "if", "when")[1] == "hyponym\n"
    assert run(capsys, "classify", "--seed-grammar", "when", "if")[1] == "hypernym\n"
    assert run(capsys, "classify", "--seed-grammar", "however", "however")[1] == "synonym\n"
    assert run(capsys, "classify", "--seed-grammar", "however", "however/adverbial")[1] == "synonym\n"


def test_classify_errors(capsys):
    code, _, err = run(capsys, "classify", "--seed-grammar", "however", "whereupon")
    assert code == 1 and "whereupon" in err
    code, _, err = run(capsys, "classify", "--seed-grammar", "but", "however")
    assert code == 1 and "ambiguous" in err
    assert run(capsys, "classify", "--seed-grammar", "however")[0] == 1


def test_realize(capsys):
    actual = "restricted-situation=yes,modal-status=actual"
    assert run(capsys, "realize", "--seed-grammar", "when", "--features", actual)[1].startswith("accepted")
    assert run(capsys, "realize", "--seed-grammar", "if", "--features", actual)[1].startswith("rejected")
    code, out, _ = run(capsys, "realize", "--seed-grammar", "because")
    assert code == 0
    assert sorted(line.split("\t")[0] for line in out.splitlines()) == [
        "subord-interpolated", "subord-postposed", "subord-preposed"]
    code, out, _ = run(capsys, "realize", "--seed-grammar", "but/parallel-medial",
                       "--tree", "parallel-contrast", "--slot", "second")
    assert out.split("\t")[2] == "accepted"
    code, _, err = run(capsys, "realize", "--seed-grammar", "because", "--features", "polarity=yes")
    assert code == 1 and "polarity" in err


def test_cancel(capsys):
    assert run(capsys, "cancel", "--seed-grammar", "--example", "ex12", "refuse", "fear")[1] == \
        "rejected-compositional\n"
    assert run(capsys, "cancel", "--seed-grammar", "--example", "ex13", "refuse", "fear")[1] == "cancelled\n"
    assert run(capsys, "cancel", "--seed-grammar", "--example", "ex14", "p1", "p2")[1] == "cancelled\n"


def test_cancel_unknown_terms(capsys, tmp_path):
    path = write_input(tmp_path, ["p1"])
    code, _, err = run(capsys, "cancel", "--seed-grammar", "--input", path, "p1", "p2")
    assert code == 1 and "unknown terms" in err


# ---------------------------------------------------------------- exit codes


def test_exit_codes(capsys, tmp_path):
    assert run(capsys, "derive", "--seed-grammar", "--example", "ex09")[0] == 0
    unknown = write_input(tmp_path, ["a", "b"], [("whereupon", "b", "initial")])
    code, _, err = run(capsys, "derive", "--seed-grammar", "--input", unknown)
    assert code == 1 and "whereupon" in err
    clash = write_input(tmp_path, ["a", "b"], [("on the one hand", "a", "initial"), ("or", "b", "initial")])
    for command in ("derive", "enumerate", "report", "cancel"):
        extra = ["a", "b"] if command == "cancel" else []
        assert run(capsys, command, "--seed-grammar", "--input", clash, *extra)[0] == 2, command
    assert run(capsys, "frobnicate")[0] == 1
    assert run(capsys, "derive", "--seed-grammar")[0] == 1
    assert run(capsys, "derive", "--seed-grammar", "--example", "ex99")[0] == 1
    assert run(capsys, "enumerate", "--seed-grammar", "--example", "ex04", "--bound", "2")[0] == 1


def test_bad_grammar_path_and_file(capsys, tmp_path):
    code, _, err = run(capsys, "derive", "--grammar", str(tmp_path / "missing.json"), "--example", "ex09")
    assert code == 1 and "missing.json" in err
    broken = tmp_path / "broken.json"
    broken.write_text('{"features": }')
    code, _, err = run(capsys, "derive", "--grammar", str(broken), "--example", "ex09")
    assert code == 1 and "line 1" in err


def test_variant_flag(capsys):
    base = run(capsys, "derive", "--seed-grammar", "--example", "ex10")[1]
    alt = run(capsys, "derive", "--seed-grammar", "--variant", "so-but=adverbial", "--example", "ex10")[1]
    assert 'extension link="so"' in base and 'adverbial-pre cue="so"' in alt
    assert run(capsys, "derive", "--seed-grammar", "--variant", "bogus", "--example", "ex10")[0] == 1
    assert run(capsys, "derive", "--seed-grammar", "--variant", "so-but=nope", "--example", "ex10")[0] == 1


# ---------------------------------------------------------------- processes


def _subprocess(args, env=None):
    return subprocess.run([sys.executable, "-m", "dltag.cli", *args], capture_output=True, env=env, check=False)


def test_repeated_runs_are_byte_identical():
    for args in (["derive", "--seed-grammar", "--example", "ex04", "--format", "dot"],
                 ["report", "--seed-grammar", "--example", "ex06", "--format", "json"]):
        first, second = _subprocess(args), _subprocess(args)
        assert first.returncode == 0
        assert first.stdout == second.stdout and first.stdout


def test_grammar_from_environment(tmp_path, grammar):
    doc = json.loads(resources.files("dltag.data").joinpath("seed_grammar.json").read_text("utf-8"))
    doc["lexicon"] = [e for e in doc["lexicon"] if e["lexeme"] != "however"]
    path = tmp_path / "small.json"
    path.write_text(json.dumps(doc))
    env = dict(os.environ, DLTAG_GRAMMAR=str(path))
    result = _subprocess(["derive", "--example", "ex09"], env)
    assert result.returncode == 1 and b"however" in result.stderr
    assert _subprocess(["derive", "--seed-grammar", "--example", "ex09"], env).returncode == 0
