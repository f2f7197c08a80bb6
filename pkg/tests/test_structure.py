import itertools
import random

import pytest
from hypothesis import given, strategies as st

from hornfix.gen import random_relation, random_structure
from hornfix.structure import (
    ArityMismatch, BadPermutation, ConstantOutsideSubset, Relation, Structure, complement,
    induced_substructure, intersect, make_structure, permute, product, project_exists,
    project_forall, union,
)

seeds = st.integers(0, 10**6)


def rel(arity, *tuples):
    return Relation(arity, frozenset(tuples))


def test_complement_examples():
    assert complement(rel(1, (0,)), 2) == rel(1, (1,))
    assert len(complement(rel(2), 2)) == 4


def test_intersect_union_examples():
    assert intersect(rel(2, (0, 1)), rel(2, (0, 1), (1, 0))) == rel(2, (0, 1))
    r = rel(2, (0, 1))
    assert union(r, rel(2)) == r
    with pytest.raises(ArityMismatch):
        union(r, rel(1))


def test_permute_examples():
    assert permute(rel(2, (0, 1)), (1, 0)) == rel(2, (1, 0))
    r = rel(2, (0, 1), (1, 1))
    assert permute(r, (0, 1)) == r
    with pytest.raises(BadPermutation):
        permute(r, (0, 0))


def test_product_examples():
    assert product(rel(1, (0,)), rel(1, (1,))) == rel(2, (0, 1))
    assert product(rel(1), rel(2, (0, 1))) == rel(3)


def test_projection_examples():
    assert project_exists(rel(2, (0, 1), (1, 1)), 1, 2) == rel(1, (1,))
    full = Relation(2, frozenset(itertools.product(range(3), repeat=2)))
    assert project_exists(full, 1, 3) == Relation(1, frozenset(itertools.product(range(3), repeat=1)))
    assert project_forall(full, 1, 3) == Relation(1, frozenset(itertools.product(range(3), repeat=1)))
    assert project_forall(rel(2), 1, 3) == rel(1)


def test_induced_examples():
    s = make_structure(3, {"E": (2, [(0, 1), (1, 2)])})
    assert induced_substructure(s, range(3)) == s
    sub = induced_substructure(s, {0, 2})
    assert sub.size == 2 and len(sub.relations["E"]) == 0
    with pytest.raises(ConstantOutsideSubset):
        induced_substructure(make_structure(2, {}, {"c": 1}), {0})


def test_structure_rejects_bad_tuples():
    with pytest.raises(ValueError):
        Structure(2, {"E": rel(2, (0, 2))})
    with pytest.raises(ValueError):
        Structure(2, {}, {"c": 5})


@given(seeds)
def test_algebra_identities(seed):
    rng = random.Random(seed)
    n = rng.randint(1, 3)
    a = rng.randint(1, 2)
    r1, r2 = random_relation(rng, a, n), random_relation(rng, a, n)
    assert complement(complement(r1, n), n) == r1
    assert complement(union(r1, r2), n) == intersect(complement(r1, n), complement(r2, n))
    assert complement(intersect(r1, r2), n) == union(complement(r1, n), complement(r2, n))
    g = list(range(a))
    rng.shuffle(g)
    inv = [g.index(i) for i in range(a)]
    assert permute(permute(r1, g), inv) == r1
    assert len(product(r1, r2)) == len(r1) * len(r2)


@given(seeds)
def test_quantifier_duality_and_brute_force(seed):
    rng = random.Random(seed)
    n = rng.randint(1, 4)
    arity = rng.randint(1, 3)
    r = random_relation(rng, arity, n)
    k = rng.randint(0, arity)
    assert project_exists(r, k, n) == complement(project_forall(complement(r, n), k, n), n)
    expected = {a for a in itertools.product(range(n), repeat=arity - k)
                if all(b + a in r.tuples for b in itertools.product(range(n), repeat=k))}
    assert project_forall(r, k, n).tuples == expected


@given(seeds)
def test_induced_monotone(seed):
    rng = random.Random(seed)
    s = random_structure(rng, rng.randint(1, 5), {"E": 2, "S": 1})
    keep = {v for v in s.domain if rng.random() < 0.6} or {0}
    sub = induced_substructure(s, keep)
    assert sub.size == len(keep)
    for name, r in s.relations.items():
        assert len(sub.relations[name]) <= len(r)
        assert all(0 <= x < sub.size for t in sub.relations[name] for x in t)
