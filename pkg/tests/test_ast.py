import random

import pytest
from hypothesis import given, strategies as st

from hornfix.ast import (
    Const, Kind, Program, Var, Vocabulary, eq, forall, free_variable_count, fresh, neg, neq,
    normalize, pos, rule, validate,
)
from hornfix.diagnostics import Code
from hornfix.engine import eval_datalog
from hornfix.gen import random_program, random_structure
from hornfix.parser import parse_program


def test_normalize_constant_head():
    r = rule("P", [Const("c")], pos("R", Const("c")))
    n = normalize(r)
    assert n.is_normal
    v = n.head_args[0]
    assert isinstance(v, Var)
    assert n.body == (pos("R", Const("c")), eq(v, Const("c")))


def test_normalize_keeps_normal_rule():
    r = rule("P", "x y", pos("E", "x", "y"))
    assert normalize(r) is r


def test_normalize_repeated_variable_same_fixpoint():
    prog = parse_program("P(x,x) :- E(x,x).")
    normal = Program(prog.vocabulary, tuple(normalize(r) for r in prog.rules))
    assert normal.rules[0].body[-1].kind is Kind.EQ
    rng = random.Random(7)
    for _ in range(20):
        a = random_structure(rng, rng.randint(1, 4), {"E": 2})
        r1, _ = eval_datalog(prog, a)
        r2, _ = eval_datalog(normal, a)
        assert r1.structure.relations["P"] == r2.structure.relations["P"]


@given(st.integers(0, 10**6))
def test_normalize_idempotent(seed):
    prog = random_program(random.Random(seed), constants=("c",))
    for r in prog.rules:
        once = normalize(r)
        assert normalize(once) == once
        assert once.is_normal


def test_validate_agap(agap):
    assert validate(agap) == []
    assert agap.intentional == {"Palt", "Q", "P"}


def test_negated_intentional():
    prog = Program.from_rules([rule("P", "x", neg("P", "x"))])
    assert [d.code for d in validate(prog)] == [Code.NEGATED_INTENTIONAL]


def test_universal_over_extensional():
    prog = Program.from_rules([rule("P", "x", forall("y", "E", "y", "x"))])
    assert Code.UNIVERSAL_OVER_EXTENSIONAL in [d.code for d in validate(prog)]


def test_malformed_universal():
    prog = Program.from_rules([rule("P", "x", forall("y", "P", "x"))])
    assert Code.MALFORMED_UNIVERSAL in [d.code for d in validate(prog)]


def test_unknown_constant():
    prog = Program(Vocabulary({"P": 1}), (rule("P", "x", eq("x", Const("c"))),))
    assert [d.code for d in validate(prog)] == [Code.UNKNOWN_SYMBOL]


def test_free_variable_counts():
    assert free_variable_count(rule("Palt", "x y", eq("x", "y"))) == 2
    assert free_variable_count(rule("Palt", "x y", pos("Puni", "x"), forall("z", "Q", "x", "z", "y"))) == 2
    assert free_variable_count(rule("Q", "x z y", neg("E", "x", "z"), eq("y", "y"))) == 3


def test_free_variables_match_naive_scan(agap):
    for r in agap.rules:
        names = {t.name for t in r.head_args if isinstance(t, Var)}
        for lit in r.body:
            names |= {t.name for t in lit.args if isinstance(t, Var)} - set(lit.bound)
        assert free_variable_count(r) == len(names)


def test_fresh_names():
    assert fresh("v", set()) == "$v"
    assert fresh("v", {"$v"}) == "$v1"
    assert fresh("$v", {"$v", "$v1"}) == "$v2"


def test_vocabulary_rejects_clash():
    with pytest.raises(ValueError):
        Vocabulary({"c": 1}, {"c"})


@given(st.integers(0, 10**6))
def test_partition_and_generated_programs_valid(seed):
    prog = random_program(random.Random(seed))
    assert validate(prog) == []
    assert not (prog.intentional & prog.extensional)
    assert prog.intentional | prog.extensional == set(prog.vocabulary.relations)


def test_literal_free_variables():
    lit = forall("z", "Q", "x", "z", "y")
    assert lit.free_variables() == ["x", "y"]
    assert neq("x", "y").relation is None
