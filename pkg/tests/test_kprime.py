import random

import pytest
from hypothesis import given, strategies as st

from hornfix.gen import random_kprime_member, random_structure
from hornfix.kprime import (
    ORACLES, ExtensionParams, StructuralViolation, closure_test, condition1_graph, is_member,
    marked_levels, membership, oracle_3col, prefix_levels, tree_graph, tree_part,
    trivial_extension,
)
from hornfix.structure import Relation, Structure, induced_substructure, make_structure
from hornfix.trees import PerfectTree, TreeStructure, decode, level_nodes

seeds = st.integers(0, 10**6)


def perfect_graph(levels, marked=0):
    tree = PerfectTree.with_levels(levels)
    p = frozenset((v,) for k in range(marked) for v in level_nodes(k))
    return tree_graph(TreeStructure(tree, {"P": Relation(1, p)}))


def test_trivial_extension():
    a = make_structure(1, {"R1": (2, [(0, 0)])})
    ext = trivial_extension(a)
    assert ext.size == 2 and ext.relations == a.relations
    assert trivial_extension(make_structure(2, {}), ExtensionParams(2)).size == 6
    with pytest.raises(ValueError):
        ExtensionParams(0)


def test_tree_part_of_perfect_tree():
    g = perfect_graph(3)
    assert tree_part(g).level_count == 3


def test_tree_part_with_missing_grandchild():
    g = perfect_graph(3)
    keep = [v for v in g.domain if v != 6]
    assert tree_part(induced_substructure(g, keep)).level_count == 2


def test_unreachable_nodes_ignored():
    g = perfect_graph(2)
    bigger = Structure(g.size + 3, {"E": Relation(2, g.relations["E"].tuples | {(3, 4)}),
                                    "P": g.relations["P"]}, g.constants)
    assert tree_part(bigger).level_count == 2


@pytest.mark.parametrize("edges,step", [
    ([(0, 1), (1, 0)], 1),
    ([(0, 1), (0, 2), (0, 3)], 2),
    ([(0, 1), (0, 2), (1, 3), (2, 3)], 2),
])
def test_structural_violations(edges, step):
    g = make_structure(4, {"E": (2, edges), "P": (1, [])}, {"root": 0})
    with pytest.raises(StructuralViolation) as info:
        tree_part(g)
    assert info.value.step == step


def test_unsaturated_relation_violates_step_4():
    g = perfect_graph(2)
    g = g.with_relations({"P": Relation(1, frozenset({(1,)}))})
    with pytest.raises(StructuralViolation) as info:
        tree_part(g)
    assert info.value.step == 4


def test_condition_2():
    res = membership(perfect_graph(2, marked=2), ORACLES["never"])
    assert res.member and res.condition == 2 and res.h == 2


def test_condition_1_even_and_never():
    a = make_structure(2, {})
    g = condition1_graph(a)
    res = membership(g, ORACLES["even"])
    assert res.member and res.condition == 1 and res.h == 2 and res.levels == 4
    assert g.size == 15
    assert not is_member(g, ORACLES["never"])


def test_condition_1_rejects_marks_in_extension():
    g = condition1_graph(make_structure(2, {}))
    p = g.relations["P"].tuples | {(v,) for v in level_nodes(3)}
    res = membership(g.with_relations({"P": Relation(1, p)}), ORACLES["always"])
    assert res.h == 2 and not res.member


def test_3col_oracle():
    triangle = make_structure(3, {"R1": (2, [(0, 1), (1, 2), (2, 0)])})
    k4 = make_structure(4, {"R1": (2, [(i, j) for i in range(4) for j in range(4) if i != j])})
    assert oracle_3col(triangle) and not oracle_3col(k4)


def test_leaf_removal_and_root_only():
    g = condition1_graph(make_structure(2, {}))
    leaves = list(level_nodes(3))
    sub = induced_substructure(g, [v for v in g.domain if v not in leaves[:3]])
    res = membership(sub, ORACLES["even"])
    assert res.member and res.condition == 2
    assert is_member(induced_substructure(g, [g.constants["root"]]), ORACLES["even"])


@given(seeds)
def test_members_closed_under_substructures(seed):
    rng = random.Random(seed)
    name = rng.choice(["even", "3col", "always"])
    g = random_kprime_member(rng, name)
    report = closure_test(g, ORACLES[name], 20, rng)
    assert report.ok, report.failures


@given(seeds)
def test_condition_dichotomy_and_coherence(seed):
    rng = random.Random(seed)
    g = random_kprime_member(rng, rng.choice(["even", "3col", "always"]))
    res = membership(g, ORACLES["always"])
    part = tree_part(g)
    h = marked_levels(part)
    assert res.condition in (1, 2)
    if res.condition == 1:
        assert res.levels == h + h
        whole = decode(part.tree)
        first = decode(prefix_levels(part.tree, h, drop=()))
        assert whole == trivial_extension(first)
    else:
        assert res.levels < 2 * h


def test_closure_requires_member():
    with pytest.raises(ValueError):
        closure_test(perfect_graph(3, marked=0), ORACLES["always"], 5, random.Random(0))
