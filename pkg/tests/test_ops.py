import pytest

from dltag.derivation import (
    Attachment,
    CueRealization,
    DerivationError,
    DerivationNode,
    IncompleteError,
    adjoin,
    build_derived,
    derive,
    fill_leaf,
    instantiate,
    linearize,
    realize_anchor,
    simple_input,
    steps,
    substitute,
)
from dltag.derivation.ops import find_origin
from dltag.grammar import ANCHOR, FOOT, INTERIOR, SUBSTITUTION, UNIT


def leaf_ids(tree):
    """Frontier as (instance ref, elementary address) pairs, left to right."""
    return [n.origin for _, n in tree.walk() if not n.children]


def empty(slot):
    return CueRealization(slot, "", "empty")


# ---------------------------------------------------------------- errors


def test_substitute_rejects_non_sites(grammar):
    host = instantiate(grammar.tree("subord-postposed"))
    clause = grammar.tree("clause")
    with pytest.raises(DerivationError, match="not a substitution site"):
        substitute(host, (1,), clause, grammar=grammar)
    with pytest.raises(DerivationError, match="bad address"):
        substitute(host, (7,), clause, grammar=grammar)
    with pytest.raises(DerivationError, match="auxiliary"):
        substitute(host, (0,), grammar.tree("extension"), grammar=grammar)


def test_substitute_twice_at_one_site(grammar):
    host = instantiate(grammar.tree("subord-postposed"))
    once = substitute(host, (0,), grammar.tree("clause"), grammar=grammar, ref="0.0")
    with pytest.raises(DerivationError, match="already filled"):
        substitute(once, (0,), grammar.tree("clause"), grammar=grammar)


def test_adjoin_errors(grammar):
    host = instantiate(grammar.tree("subord-postposed"))
    with pytest.raises(DerivationError, match="substitution site"):
        adjoin(host, (0,), grammar.tree("extension"), grammar=grammar)
    with pytest.raises(DerivationError, match="initial"):
        adjoin(host, (), grammar.tree("clause"), grammar=grammar)
    with pytest.raises(DerivationError, match="anchor"):
        adjoin(host, (1,), grammar.tree("extension"), grammar=grammar)
    with pytest.raises(DerivationError, match="bad address"):
        adjoin(host, (0, 3), grammar.tree("extension"), grammar=grammar)


def test_adjoin_only_once_per_node(grammar):
    host = instantiate(grammar.tree("clause"))
    once = adjoin(host, (), grammar.tree("adverbial-pre"), grammar=grammar, ref="0.0")
    # the excised node now hangs from the foot and is closed to adjunction
    with pytest.raises(DerivationError, match="does not accept"):
        adjoin(once, (1,), grammar.tree("adverbial-pre"), grammar=grammar)
    # stacking goes through the new root
    twice = adjoin(once, (), grammar.tree("adverbial-pre"), grammar=grammar, ref="0.1")
    assert [n.origin[0] for _, n in twice.walk() if n.kind == ANCHOR] == ["0.1", "0.0"]


def test_no_adjunction_at_foot_nodes(grammar):
    host = instantiate(grammar.tree("extension"))
    with pytest.raises(DerivationError, match="foot"):
        adjoin(host, (0,), grammar.tree("extension"), grammar=grammar)


def test_realize_anchor_checks_the_slot(grammar):
    host = instantiate(grammar.tree("subord-preposed"))
    when = CueRealization("conj", "when", "subordinate-conjunction", "initial")
    done = realize_anchor(host, (0,), when, grammar)
    assert done.at((0,)).cue == when
    with pytest.raises(DerivationError, match="already realized"):
        realize_anchor(done, (0,), when, grammar)
    with pytest.raises(DerivationError, match="cannot realize"):
        realize_anchor(host, (0,), CueRealization("conj", "however", "adverbial", "initial"), grammar)
    with pytest.raises(DerivationError, match="not an anchor"):
        realize_anchor(host, (1,), when, grammar)


def test_fill_leaf_errors(grammar):
    host = instantiate(grammar.tree("clause"))
    done = fill_leaf(host, (0,), "u1")
    with pytest.raises(DerivationError, match="already filled"):
        fill_leaf(done, (0,), "u2")
    with pytest.raises(DerivationError, match="not a leaf"):
        fill_leaf(host, (), "u1")


# ---------------------------------------------------------------- purity and order


def test_operations_do_not_touch_the_host(grammar):
    host = instantiate(grammar.tree("clause"))
    snapshot = repr(host)
    a = adjoin(host, (), grammar.tree("extension"), grammar=grammar, ref="0.0")
    b = adjoin(host, (), grammar.tree("extension"), grammar=grammar, ref="0.0")
    assert repr(host) == snapshot
    assert a == b and a is not host
    s1 = substitute(a, (2,), grammar.tree("clause"), grammar=grammar, ref="0.0.0")
    s2 = substitute(a, (2,), grammar.tree("clause"), grammar=grammar, ref="0.0.0")
    assert s1 == s2
    assert a.at((2,)).kind == SUBSTITUTION


def _sites(tree):
    return [a for a, n in tree.walk() if n.kind == SUBSTITUTION]


def test_every_substitution_keeps_leaf_order(grammar):
    initial = [grammar.tree("clause")] + list(grammar.initial_trees)
    hosts = initial + list(grammar.auxiliary_trees)
    checked = 0
    for host_tree in hosts:
        host = instantiate(host_tree, "h")
        for site in _sites(host):
            for tree in initial:
                if not grammar.category_matches(host.at(site).category, tree.root.category):
                    continue
                out = substitute(host, site, tree, grammar=grammar, ref="t")
                before = leaf_ids(host)
                k = before.index(host.at(site).origin)
                expected = before[:k] + leaf_ids(instantiate(tree, "t")) + before[k + 1:]
                assert leaf_ids(out) == expected, (host_tree.name, site, tree.name)
                checked += 1
    assert checked >= 30


def test_adjunction_preserves_existing_order(grammar):
    targets = [grammar.tree("clause")] + list(grammar.initial_trees) + list(grammar.auxiliary_trees)
    checked = 0
    for host_tree in targets:
        host = instantiate(host_tree, "h")
        for address, node in host.walk():
            if node.kind != INTERIOR or not node.adjoinable:
                continue
            for aux in grammar.auxiliary_trees:
                if not grammar.category_matches(aux.root.category, node.category):
                    continue
                out = adjoin(host, address, aux, grammar=grammar, ref="a")
                before = leaf_ids(host)
                after = leaf_ids(out)
                assert [x for x in after if x[0] == "h"] == before
                # the excised material sits where the foot was
                below = leaf_ids(node)
                aux_leaves = leaf_ids(instantiate(aux, "a"))
                f = aux_leaves.index(("a", aux.name, aux.foot_address))
                start = before.index(below[0])
                assert after[start + f: start + f + len(below)] == below
                checked += 1
    assert checked >= 10


# ---------------------------------------------------------------- Example 9 step scripts


def _ex9_script(grammar, first, second):
    """Adverbial at the root of `second`'s clause, extension at `first`'s."""
    t = instantiate(grammar.tree("clause"), "0")
    t = fill_leaf(t, (0,), first)
    t = adjoin(t, (), grammar.tree("extension"), grammar=grammar, ref="0.0")
    t = realize_anchor(t, find_origin(t, "0.0", (1,)), empty("link"), grammar)
    t = substitute(t, find_origin(t, "0.0", (2,)), grammar.tree("clause"), grammar=grammar, ref="0.0.0")
    t = fill_leaf(t, find_origin(t, "0.0.0", (0,)), second)
    t = adjoin(t, find_origin(t, "0.0.0", ()), grammar.tree("adverbial-pre"), grammar=grammar, ref="0.0.0.0")
    cue = CueRealization("cue", "however", "adverbial", "initial")
    return realize_anchor(t, find_origin(t, "0.0.0.0", (0,)), cue, grammar)


def test_ex9_reading_followed_by_the_engine(grammar):
    # extension at the first clause, "however" at the root of the second
    script = _ex9_script(grammar, "u1", "u2")
    assert [str(x) for x in linearize(script)] == ["[u1]", "however", "[u2]"]
    (only,) = derive(grammar, simple_input("u1", "u2", cues=(("however", "u2", "initial"),)))
    assert build_derived(grammar, only) == script


def test_ex9_other_reading_names_the_other_clause(grammar):
    # taken literally the second description puts "however" on the clause
    # the extension adjoins to, which yields the wrong surface order
    literal = instantiate(grammar.tree("clause"), "0")
    literal = fill_leaf(literal, (0,), "u1")
    literal = adjoin(literal, (), grammar.tree("adverbial-pre"), grammar=grammar, ref="0.1")
    literal = realize_anchor(literal, (0,), CueRealization("cue", "however", "adverbial", "initial"), grammar)
    literal = adjoin(literal, (), grammar.tree("extension"), grammar=grammar, ref="0.0")
    literal = realize_anchor(literal, find_origin(literal, "0.0", (1,)), empty("link"), grammar)
    literal = substitute(literal, find_origin(literal, "0.0", (2,)), grammar.tree("clause"),
                         grammar=grammar, ref="0.0.0")
    literal = fill_leaf(literal, find_origin(literal, "0.0.0", (0,)), "u2")
    assert [str(x) for x in linearize(literal)] == ["however", "[u1]", "[u2]"]
    # swapping which clause is called alpha gives back the engine's tree
    assert [str(x) for x in linearize(_ex9_script(grammar, "u1", "u2"))] == ["[u1]", "however", "[u2]"]


# ---------------------------------------------------------------- replay


def _examples(grammar):
    inputs = [
        simple_input("a"),
        simple_input("a", "b", "c"),
        simple_input("a", "b", cues=(("because", "b", "initial"),)),
        simple_input("a", "b", "c", cues=(("then", "b", "medial"), ("however", "b", "medial"))),
        simple_input("a", "b", "c", "d", cues=(("on the one hand", "a", "initial"),
                                               ("on the other hand", "d", "initial"))),
    ]
    return [(i, d) for i in inputs for d in derive(grammar, i)]


def test_preorder_and_postorder_replay_agree(grammar):
    for _, d in _examples(grammar):
        assert build_derived(grammar, d, "preorder") == build_derived(grammar, d, "postorder")


def test_replay_from_flat_steps(grammar):
    """Rebuild each derived tree from ``steps()`` alone."""
    for discourse, d in _examples(grammar):
        tree = instantiate(grammar.tree(d.tree), "0")
        counters: dict[str, int] = {}
        for step in steps(grammar, d):
            at = find_origin(tree, step.target, step.address)
            if step.operation in ("substitute", "adjoin"):
                k = counters.get(step.target, 0)
                counters[step.target] = k + 1
                op = substitute if step.operation == "substitute" else adjoin
                tree = op(tree, at, grammar.tree(step.source), grammar=grammar, ref=f"{step.target}.{k}")
            elif step.operation == "fill-leaf":
                tree = fill_leaf(tree, at, step.source)
            else:
                inst = dict(d.instances())[step.target]
                slot = tree.at(at).slot
                cue = next(c for c in inst.anchors if c.slot == slot)
                tree = realize_anchor(tree, at, cue, grammar)
        assert tree == build_derived(grammar, d)
        assert linearize(tree) == discourse.tokens()


def test_linearize_rejects_incomplete_trees(grammar):
    with pytest.raises(IncompleteError):
        linearize(instantiate(grammar.tree("clause")))
    t = fill_leaf(instantiate(grammar.tree("clause")), (0,), "u1")
    t = adjoin(t, (), grammar.tree("extension"), grammar=grammar, ref="0.0")
    with pytest.raises(IncompleteError):
        linearize(t)
    t = realize_anchor(t, (1,), empty("link"), grammar)
    with pytest.raises(IncompleteError, match="substitution"):
        linearize(t)


def test_linearize_single_unit_and_empty_cue(grammar):
    t = fill_leaf(instantiate(grammar.tree("clause")), (0,), "p1")
    assert [str(x) for x in linearize(t)] == ["[p1]"]
    node = DerivationNode.make("clause", "p1", attachments=[
        Attachment((), "adjoin", DerivationNode.make("extension", anchors=[empty("link")], attachments=[
            Attachment((2,), "substitute", DerivationNode.make("clause", "p2"))]))])
    assert [str(x) for x in linearize(build_derived(grammar, node))] == ["[p1]", "[p2]"]


def test_no_open_nodes_after_replay(grammar):
    for _, d in _examples(grammar):
        tree = build_derived(grammar, d)
        kinds = {n.kind for _, n in tree.walk()}
        assert SUBSTITUTION not in kinds and FOOT not in kinds
        assert all(n.unit for _, n in tree.walk() if n.kind == UNIT)
