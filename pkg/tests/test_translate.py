import random

import pytest
from hypothesis import given, strategies as st

from hornfix.ast import Kind, validate
from hornfix.engine import eval_datalog, eval_horn, eval_lfp, eval_simlfp
from hornfix.gen import TC_LFP_TEXT, random_agap, random_horn, random_lfp, random_program, random_structure
from hornfix.parser import format_program, parse_horn, parse_lfp, parse_program, parse_structure
from hornfix.translate import (
    GoalNotZeroAry, datalog_to_horn, datalog_to_simlfp, horn_to_datalog, lfp_to_datalog,
    lift_nullary,
)

seeds = st.integers(0, 10**6)


def test_horn_without_false_gets_guard():
    prog, goal = horn_to_datalog(parse_horn("exists R/1 forall x (S(x) -> R(x))"))
    guard = [r for r in prog.rules if r.head == goal]
    assert len(guard) == 1
    (lit,) = guard[0].body
    assert lit.kind is Kind.NEQ and lit.args[0] == lit.args[1]
    taut = prog.rules[0]
    assert taut.head == "R" and taut.body[0].relation == "R" and taut.body[0].args == taut.head_args


def test_horn_example_flips_verdict():
    s = parse_horn("exists R/1 forall x (S(x) -> R(x) ; R(x) -> false)")
    a = parse_structure("structure { size 1 rel S/1 { (0) } }")
    prog, goal = horn_to_datalog(s)
    res, _ = eval_datalog(prog, a, goal)
    assert eval_horn(s, a) is False and res.goal_holds is True


@given(seeds)
def test_horn_equivalence(seed):
    rng = random.Random(seed)
    s = random_horn(rng)
    a = random_structure(rng, rng.randint(1, 3), {"E": 2, "S": 1})
    prog, goal = horn_to_datalog(s)
    assert validate(prog) == []
    res, _ = eval_datalog(prog, a, goal)
    assert eval_horn(s, a) != res.goal_holds


def test_agap_to_horn(agap):
    s = datalog_to_horn(agap)
    assert s.so_vars == (("Palt", 2), ("Q", 3))
    assert len(s.clauses) == 6
    bottom = [c for c in s.clauses if c.head is None]
    assert len(bottom) == 1 and bottom[0].alphas[0].relation == "Palt"


def test_agap_to_horn_semantics(agap):
    rng = random.Random(3)
    s = datalog_to_horn(agap)
    checked = 0
    while checked < 50:
        g = random_agap(rng, max_nodes=2)
        if sum(g.size ** a for _, a in s.so_vars) > 20:
            continue
        res, _ = eval_datalog(agap, g)
        assert eval_horn(s, g) != res.goal_holds
        checked += 1


def test_propositional_goal():
    prog = parse_program("P() :- x = x.")
    s = datalog_to_horn(prog, "P")
    assert s.so_vars == () and s.fo_vars == ("x",)
    a = parse_structure("structure { size 2 }")
    assert eval_horn(s, a) is False
    assert eval_datalog(prog, a, "P")[0].goal_holds is True


def test_goal_must_be_nullary(agap):
    with pytest.raises(GoalNotZeroAry):
        datalog_to_horn(agap, "Palt")


def test_lift_nullary():
    prog = parse_program("A() :- S(x).\nG() :- A(), S(y).\ngoal G.")
    lifted = lift_nullary(prog)
    assert all(lit.relation != "A" for r in lifted.rules for lit in r.body)
    assert any(r.head == "A" for r in lifted.rules)
    a = parse_structure("structure { size 2 rel S/1 { (1) } }")
    assert eval_datalog(prog, a)[0].goal_holds == eval_datalog(lifted, a)[0].goal_holds is True


@given(seeds)
def test_round_trip_preserves_verdict(seed):
    rng = random.Random(seed)
    prog = random_program(rng)
    s = datalog_to_horn(prog)
    back, goal = horn_to_datalog(s)
    a = random_structure(rng, rng.randint(1, 3), {"E": 2, "S": 1})
    assert eval_datalog(back, a, goal)[0].goal_holds == eval_datalog(prog, a)[0].goal_holds


def test_tc_lfp_translation():
    f = parse_lfp(TC_LFP_TEXT)
    prog, goal = lfp_to_datalog(f)
    assert len(prog.rules) == 5
    assert validate(prog) == []
    rng = random.Random(11)
    for _ in range(100):
        a = random_structure(rng, rng.randint(1, 5), {"E": 2})
        assert eval_lfp(f, a) == eval_datalog(prog, a, goal)[0].goal_holds


def test_empty_dnf_translation():
    f = parse_lfp("exists u [lfp z1, Z: forall y (  )] (u)")
    prog, goal = lfp_to_datalog(f)
    a = random_structure(random.Random(0), 3, {})
    assert eval_lfp(f, a) is False
    assert eval_datalog(prog, a, goal)[0].goal_holds is False


@given(seeds)
def test_one_universal_literal_per_forall(seed):
    f = random_lfp(random.Random(seed))
    prog, _ = lfp_to_datalog(f)
    count = sum(lit.kind is Kind.FORALL for r in prog.rules for lit in r.body)
    assert count == sum(q == "forall" for q, _ in f.prefix)
    assert validate(prog) == []


@given(seeds)
def test_lfp_equivalence(seed):
    rng = random.Random(seed)
    f = random_lfp(rng)
    prog, goal = lfp_to_datalog(f)
    for _ in range(5):
        a = random_structure(rng, rng.randint(1, 4), {"E": 2, "S": 1})
        assert eval_lfp(f, a) == eval_datalog(prog, a, goal)[0].goal_holds


def test_simlfp_shapes(agap):
    system = datalog_to_simlfp(agap)
    assert len(system.definitions) == 3
    two = datalog_to_simlfp(parse_program("T(x,y) :- E(x,y).\nT(x,y) :- E(x,z), T(z,y)."), "T")
    (d,) = two.definitions
    assert len(d.disjuncts) == 2
    assert d.disjuncts[0].exists == () and len(d.disjuncts[1].exists) == 1
    one = datalog_to_simlfp(parse_program("P(x) :- S(x)."), "P")
    assert len(one.definitions[0].disjuncts) == 1


@given(seeds)
def test_simlfp_equivalence(seed):
    rng = random.Random(seed)
    prog = random_program(rng)
    a = random_structure(rng, rng.randint(1, 4), {"E": 2, "S": 1})
    assert eval_simlfp(datalog_to_simlfp(prog), a) == eval_datalog(prog, a)[0].goal_holds


def test_translations_are_deterministic(agap):
    assert format_program(horn_to_datalog(datalog_to_horn(agap))[0]) == \
        format_program(horn_to_datalog(datalog_to_horn(agap))[0])
    f = parse_lfp(TC_LFP_TEXT)
    assert lfp_to_datalog(f) == lfp_to_datalog(f)
