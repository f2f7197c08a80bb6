import random

import pytest
from hypothesis import given, strategies as st

from hornfix.ast import Kind, Program
from hornfix.diagnostics import Code, DiagnosticError
from hornfix.gen import AGAP_TEXT, TC_LFP_TEXT, random_horn, random_lfp, random_program, random_structure
from hornfix.parser import (
    format_horn, format_lfp, format_program, format_structure, parse_horn, parse_lfp,
    parse_program, parse_structure,
)

seeds = st.integers(0, 10**6)


def codes(fn, text):
    with pytest.raises(DiagnosticError) as info:
        fn(text)
    for d in info.value.diagnostics:
        assert d.span is not None and 0 <= d.span.start <= d.span.end <= len(text)
    return info.value.codes


def test_agap_program(agap):
    assert len(agap.rules) == 6
    assert agap.intentional == {"Palt", "Q", "P"}
    assert agap.vocabulary.constants == {"s", "t"}
    uni = agap.rules[2].body[1]
    assert uni.kind is Kind.FORALL and uni.bound == ("z",)


def test_empty_program():
    p = parse_program("")
    assert p.rules == () and p.vocabulary.relations == {}
    assert parse_program(format_program(p)) == p


def test_malformed_quantifier_reports_colon():
    text = "P(x) :- forall : E(x)."
    with pytest.raises(DiagnosticError) as info:
        parse_program(text)
    d = info.value.diagnostics[0]
    assert d.code is Code.SYNTAX
    assert text[d.span.start:d.span.end] == ":"


def test_program_diagnostics():
    assert codes(parse_program, "P(x) :- !P(x).") == [Code.NEGATED_INTENTIONAL]
    assert Code.UNIVERSAL_OVER_EXTENSIONAL in codes(parse_program, "P(x) :- forall y: E(y,x).")
    assert codes(parse_program, "P(x) :- E(x), E(x,x).") == [Code.ARITY_MISMATCH]
    assert codes(parse_program, "P(x) :- E(x") == [Code.UNEXPECTED_EOF]
    assert codes(parse_program, "P(x) :- E(x) #") == [Code.SYNTAX]
    assert Code.DUPLICATE_NAME in codes(parse_program, "const P.\nP(x) :- E(x).")


def test_comments_and_directives():
    p = parse_program("% comment\nconst c.\nrel S/1.\nP(x) :- E(x,c). % trailing\ngoal P.\n")
    assert p.goal == "P" and p.vocabulary.relations["S"] == 1
    assert parse_program(format_program(p)) == p


def test_horn_example():
    text = "exists R/1 forall x y (S(x) -> R(x) ; R(x) & R(y) -> R(y) ; forall z: R(z) -> false)"
    s = parse_horn(text)
    assert len(s.clauses) == 3
    assert s.clauses[2].head is None and s.clauses[2].alphas[0].kind is Kind.FORALL
    assert parse_horn(format_horn(s)) == s


def test_horn_diagnostics():
    assert Code.NON_EXISTENTIAL_PREFIX in codes(parse_horn, "forall R/1 forall x (S(x) -> R(x))")
    assert Code.NEGATED_SO_VARIABLE in codes(parse_horn, "exists R/1 forall x (!R(x) -> false)")
    assert Code.HEAD_NOT_SO_VARIABLE in codes(parse_horn, "exists R/1 forall x (R(x) -> S(x))")


def test_lfp_examples():
    f = parse_lfp(TC_LFP_TEXT)
    assert f.lfp_vars == ("z1", "z2") and f.prefix == (("exists", "w"),)
    assert len(f.clauses) == 2
    assert parse_lfp(format_lfp(f)) == f
    bad = "exists u [lfp z1, Z: (S(z1) | !Z(z1))] (u)"
    assert Code.NEGATIVE_FIXPOINT_VARIABLE in codes(parse_lfp, bad)
    assert Code.FIXPOINT_ARITY_MISMATCH in codes(parse_lfp, "exists u [lfp z1 z2, Z: (E(z1,z2))] (u)")
    assert Code.NOT_DNF in codes(parse_lfp, "exists u [lfp z1, Z: (S(z1) & (S(z1) | S(z1)))] (u)")


def test_structure_format():
    s = parse_structure("structure { size 4 const s = 0 const t = 3 "
                        "rel E/2 { (0,1) (1,2) } rel E/2 { (2,3) } rel Puni/1 { (1) } }")
    assert len(s.relations["E"]) == 3
    assert s.constants == {"s": 0, "t": 3}
    assert parse_structure(format_structure(s)) == s
    assert codes(parse_structure, "structure { size 0 }") == [Code.EMPTY_DOMAIN]
    assert codes(parse_structure, "structure { size 2 rel E/2 { (0,2) } }") == [Code.OUT_OF_DOMAIN]


def test_agap_round_trip(agap):
    assert parse_program(format_program(agap)) == agap
    assert parse_program(AGAP_TEXT) == agap


@given(seeds)
def test_round_trip_generated(seed):
    rng = random.Random(seed)
    p = random_program(rng, constants=("c",))
    assert parse_program(format_program(p)) == p
    h = random_horn(rng)
    assert parse_horn(format_horn(h)) == h
    f = random_lfp(rng)
    assert parse_lfp(format_lfp(f)) == f
    s = random_structure(rng, rng.randint(1, 4), {"E": 2, "S": 1}, constants=("c",))
    assert parse_structure(format_structure(s)) == s


@given(seeds, st.integers(0, 400), st.sampled_from(["", "(", ")", ":-", "!", ".", "forall", "x", ","]))
def test_every_diagnostic_has_span_inside_input(seed, cut, junk):
    text = format_program(random_program(random.Random(seed)))
    cut = cut % (len(text) + 1)
    mutated = text[:cut] + junk + text[cut:]
    for fn in (parse_program, parse_horn, parse_lfp, parse_structure):
        try:
            fn(mutated)
        except DiagnosticError as err:
            for d in err.diagnostics:
                assert d.span is not None
                assert 0 <= d.span.start <= d.span.end <= len(mutated)
