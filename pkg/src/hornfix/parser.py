"""Concrete syntax for structures, DATALOG^r programs, SO-HORN^r sentences and
normal-form LFP formulas, plus the matching printers.

Every ``parse_*`` function returns an AST or raises ``DiagnosticError``.  The
``format_*`` functions produce canonical text that parses back to an equal
AST.

Program syntax::

    const s, t.
    Palt(x,y) :- Puni(x), forall z: Q(x,z,y).
    P() :- Palt(s,t).
    goal P.

Identifiers made only of digits are always constants; other identifiers in
term position are variables unless declared with ``const``.  ``%`` starts a
comment.
"""

from __future__ import annotations

import functools
import re
from dataclasses import dataclass, replace

from .ast import (
    Clause, Const, Definition, HornSentence, Kind, LfpFormula, Literal, Program,
    Rule, SimLfpSystem, Term, Var, Vocabulary, validate, validate_horn, validate_lfp,
)
from .diagnostics import Code, Diagnostic, DiagnosticError, SourceSpan
from .structure import Relation, Structure

KEYWORDS = {"const", "goal", "rel", "forall", "exists", "lfp", "false", "true",
            "structure", "size"}

_TOKEN = re.compile(r"""
    (?P<ws>\s+|%[^\n]*)
  | (?P<punct>:-|->|!=|[=!()\[\]{},.:;&|/])
  | (?P<num>\d+)
  | (?P<ident>[A-Za-z_$~][A-Za-z0-9_$'*~]*)
""", re.VERBOSE)


def _spanned(fn):
    """Give span-less diagnostics the span of the whole input."""
    @functools.wraps(fn)
    def wrapper(text: str):
        try:
            return fn(text)
        except DiagnosticError as err:
            whole = SourceSpan(0, len(text), 1, 1)
            raise DiagnosticError([d if d.span is not None else replace(d, span=whole)
                                   for d in err.diagnostics]) from None
    return wrapper


@dataclass
class Token:
    kind: str  # "punct", "num", "ident", "eof"
    text: str
    start: int
    end: int


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.tokens = self._lex(text)
        self.i = 0

    # -- lexing and spans ---------------------------------------------------

    def span(self, start: int, end: int | None = None) -> SourceSpan:
        end = start if end is None else end
        line = self.text.count("\n", 0, start) + 1
        col = start - (self.text.rfind("\n", 0, start) + 1) + 1
        return SourceSpan(start, end, line, col)

    def _lex(self, text):
        out, pos = [], 0
        while pos < len(text):
            m = _TOKEN.match(text, pos)
            if m is None:
                raise DiagnosticError([Diagnostic(
                    Code.SYNTAX, f"unexpected character {text[pos]!r}", self.span(pos, pos + 1))])
            if m.lastgroup != "ws":
                out.append(Token(m.lastgroup, m.group(), m.start(), m.end()))
            pos = m.end()
        out.append(Token("eof", "", len(text), len(text)))
        return out

    def fail(self, msg, tok: Token | None = None):
        tok = tok or self.peek()
        code = Code.UNEXPECTED_EOF if tok.kind == "eof" else Code.SYNTAX
        raise DiagnosticError([Diagnostic(code, msg, self.span(tok.start, tok.end))])

    # -- token helpers ------------------------------------------------------

    def peek(self, k: int = 0) -> Token:
        return self.tokens[min(self.i + k, len(self.tokens) - 1)]

    def next(self) -> Token:
        tok = self.peek()
        self.i += 1
        return tok

    def at(self, text: str, k: int = 0) -> bool:
        tok = self.peek(k)
        return tok.kind in ("punct", "ident") and tok.text == text

    def accept(self, text: str) -> Token | None:
        if self.at(text):
            return self.next()
        return None

    def expect(self, text: str) -> Token:
        if not self.at(text):
            tok = self.peek()
            self.fail(f"expected {text!r}, found {tok.text or 'end of input'!r}")
        return self.next()

    def name(self, what: str = "identifier", allow_num: bool = False) -> Token:
        tok = self.peek()
        if tok.kind == "ident" and tok.text not in KEYWORDS:
            return self.next()
        if allow_num and tok.kind == "num":
            return self.next()
        self.fail(f"expected {what}, found {tok.text or 'end of input'!r}")

    def number(self) -> int:
        tok = self.peek()
        if tok.kind != "num":
            self.fail(f"expected a number, found {tok.text or 'end of input'!r}")
        self.next()
        return int(tok.text)

    def is_name(self, k: int = 0) -> bool:
        tok = self.peek(k)
        return tok.kind == "num" or (tok.kind == "ident" and tok.text not in KEYWORDS)

    # -- shared pieces ------------------------------------------------------

    def term(self) -> Term:
        tok = self.name("term", allow_num=True)
        return Const(tok.text) if tok.kind == "num" else Var(tok.text)

    def args(self) -> tuple[Term, ...]:
        if not self.accept("("):
            return ()
        if self.accept(")"):
            return ()
        out = [self.term()]
        while self.accept(","):
            out.append(self.term())
        self.expect(")")
        return tuple(out)

    def atom(self, kind: Kind = Kind.POS, start: int | None = None, bound=()) -> Literal:
        tok = self.name("relation name")
        args = self.args()
        s = tok.start if start is None else start
        return Literal(kind, tok.text, args, tuple(bound),
                       span=self.span(s, self.tokens[self.i - 1].end))

    def literal(self, allow_forall: bool = True) -> Literal:
        tok = self.peek()
        if self.accept("!"):
            return self.atom(Kind.NEG, tok.start)
        if self.at("forall"):
            if not allow_forall:
                self.fail("universal quantifier not allowed here")
            self.next()
            bound = []
            while self.is_name() and not self.at(":"):
                bound.append(self.name("variable").text)
            if not bound:
                self.fail("expected at least one quantified variable")
            self.expect(":")
            return self.atom(Kind.FORALL, tok.start, bound)
        if self.is_name() and (self.at("=", 1) or self.at("!=", 1)):
            left = self.term()
            op = self.next()
            right = self.term()
            kind = Kind.EQ if op.text == "=" else Kind.NEQ
            return Literal(kind, None, (left, right),
                           span=self.span(tok.start, self.tokens[self.i - 1].end))
        if tok.kind == "num":
            self.fail("expected a literal")
        return self.atom()

    def end(self):
        if self.peek().kind != "eof":
            self.fail(f"unexpected {self.peek().text!r} after end of input")


def _classify(args, is_const, bound=()):
    return tuple(Const(t.name) if isinstance(t, Var) and t.name not in bound and is_const(t.name)
                 else t for t in args)


def _relabel(lit: Literal, is_const) -> Literal:
    return Literal(lit.kind, lit.relation, _classify(lit.args, is_const, lit.bound),
                   lit.bound, span=lit.span)


class _Arity:
    def __init__(self, diags):
        self.table: dict[str, int] = {}
        self.diags = diags

    def note(self, name, arity, span):
        if self.table.setdefault(name, arity) != arity:
            self.diags.append(Diagnostic(
                Code.ARITY_MISMATCH,
                f"{name} used with arity {arity} but earlier with {self.table[name]}", span))


# ---------------------------------------------------------------------------
# programs


@_spanned
def parse_program(text: str) -> Program:
    p = _Parser(text)
    consts: set[str] = set()
    diags: list[Diagnostic] = []
    arity = _Arity(diags)
    rules: list[Rule] = []
    goal = None
    while p.peek().kind != "eof":
        tok = p.peek()
        if p.accept("const"):
            consts.add(p.name("constant", allow_num=True).text)
            while p.accept(","):
                consts.add(p.name("constant", allow_num=True).text)
            p.expect(".")
        elif p.accept("goal"):
            goal = p.name("goal relation").text
            p.expect(".")
        elif p.accept("rel"):
            name = p.name("relation name")
            p.expect("/")
            arity.note(name.text, p.number(), p.span(name.start, name.end))
            p.expect(".")
        else:
            head = p.atom()
            body = []
            if p.accept(":-"):
                if not p.at("."):
                    body.append(p.literal())
                    while p.accept(","):
                        body.append(p.literal())
            p.expect(".")
            rules.append(Rule(head.relation, head.args, tuple(body),
                              span=p.span(tok.start, p.tokens[p.i - 1].end)))

    def is_const(name):
        return name.isdigit() or name in consts

    final = []
    for r in rules:
        arity.note(r.head, len(r.head_args), r.span)
        body = []
        for lit in r.body:
            if lit.relation is not None:
                arity.note(lit.relation, len(lit.args), lit.span)
            body.append(_relabel(lit, is_const))
        final.append(Rule(r.head, _classify(r.head_args, is_const), tuple(body), span=r.span))
        for t in final[-1].head_args + tuple(a for lit in body for a in lit.args):
            if isinstance(t, Const):
                consts.add(t.name)
    clash = set(arity.table) & consts
    for name in sorted(clash):
        diags.append(Diagnostic(Code.DUPLICATE_NAME, f"{name} is both a relation and a constant"))
    if diags:
        raise DiagnosticError(diags)
    program = Program(Vocabulary(arity.table, frozenset(consts)), tuple(final), goal)
    diags = validate(program)
    if diags:
        raise DiagnosticError(diags)
    return program


def _fmt_args(args) -> str:
    return "(" + ",".join(t.name for t in args) + ")"


def format_literal(lit: Literal) -> str:
    if lit.kind is Kind.POS:
        return lit.relation + _fmt_args(lit.args)
    if lit.kind is Kind.NEG:
        return "!" + lit.relation + _fmt_args(lit.args)
    if lit.kind is Kind.EQ:
        return f"{lit.args[0].name} = {lit.args[1].name}"
    if lit.kind is Kind.NEQ:
        return f"{lit.args[0].name} != {lit.args[1].name}"
    return f"forall {' '.join(lit.bound)}: {lit.relation}{_fmt_args(lit.args)}"


def format_rule(r: Rule) -> str:
    head = r.head + _fmt_args(r.head_args)
    if not r.body:
        return head + "."
    return f"{head} :- {', '.join(map(format_literal, r.body))}."


def format_program(program: Program) -> str:
    lines = []
    consts = sorted(program.vocabulary.constants)
    if consts:
        lines.append(f"const {', '.join(consts)}.")
    used = set()
    for r in program.rules:
        used.add(r.head)
        used.update(lit.relation for lit in r.body if lit.relation is not None)
    for name in sorted(set(program.vocabulary.relations) - used):
        lines.append(f"rel {name}/{program.vocabulary.relations[name]}.")
    lines.extend(format_rule(r) for r in program.rules)
    if program.goal is not None:
        lines.append(f"goal {program.goal}.")
    return "\n".join(lines) + ("\n" if lines else "")


# ---------------------------------------------------------------------------
# SO-HORN^r sentences


@_spanned
def parse_horn(text: str) -> HornSentence:
    p = _Parser(text)
    so_vars: list[tuple[str, int]] = []
    fo_vars: list[str] = []
    diags: list[Diagnostic] = []
    if p.accept("exists"):
        while p.is_name():
            name = p.name("relation variable")
            p.expect("/")
            so_vars.append((name.text, p.number()))
        if not so_vars:
            p.fail("expected a relation variable such as R/1")
    if p.at("forall"):
        p.next()
        while p.is_name():
            tok = p.name("variable")
            if p.at("/"):
                p.next()
                p.number()
                diags.append(Diagnostic(
                    Code.NON_EXISTENTIAL_PREFIX,
                    f"universally quantified relation variable {tok.text}; only existential "
                    "second-order prefixes are supported", p.span(tok.start, tok.end)))
                continue
            fo_vars.append(tok.text)
    if p.at("exists"):
        tok = p.peek()
        diags.append(Diagnostic(Code.NON_EXISTENTIAL_PREFIX,
                                "second-order quantifier after a first-order one",
                                p.span(tok.start, tok.end)))
        raise DiagnosticError(diags)
    if diags:
        raise DiagnosticError(diags)
    p.expect("(")
    raw: list[tuple[list[Literal], Literal | None]] = []
    if not p.at(")"):
        raw.append(_horn_clause(p))
        while p.accept(";"):
            raw.append(_horn_clause(p))
    p.expect(")")
    p.end()

    so = dict(so_vars)
    fo = set(fo_vars)

    def is_const(name):
        return name not in fo

    arity = _Arity(diags)
    consts: set[str] = set()
    clauses = []
    for premises, head in raw:
        alphas, betas = [], []
        for lit in premises:
            lit = _relabel(lit, is_const)
            consts.update(t.name for t in lit.args if isinstance(t, Const))
            if lit.relation in so and lit.kind in (Kind.POS, Kind.FORALL):
                alphas.append(lit)
            else:
                if lit.relation is not None and lit.relation not in so:
                    arity.note(lit.relation, len(lit.args), lit.span)
                betas.append(lit)
        if head is not None:
            head = _relabel(head, is_const)
            consts.update(t.name for t in head.args if isinstance(t, Const))
        clauses.append(Clause(tuple(alphas), tuple(betas), head))
    if diags:
        raise DiagnosticError(diags)
    sentence = HornSentence(tuple(so_vars), tuple(fo_vars), tuple(clauses),
                            Vocabulary(arity.table, frozenset(consts)))
    diags = validate_horn(sentence)
    if diags:
        raise DiagnosticError(diags)
    return sentence


def _horn_clause(p: _Parser):
    premises = []
    if not p.at("->"):
        premises.append(p.literal())
        while p.accept("&"):
            premises.append(p.literal())
    p.expect("->")
    if p.accept("false"):
        return premises, None
    return premises, p.atom()


def format_horn(s: HornSentence) -> str:
    parts = []
    if s.so_vars:
        parts.append("exists " + " ".join(f"{n}/{a}" for n, a in s.so_vars))
    if s.fo_vars:
        parts.append("forall " + " ".join(s.fo_vars))
    clauses = []
    for c in s.clauses:
        prem = " & ".join(format_literal(lit) for lit in (*c.alphas, *c.betas))
        head = "false" if c.head is None else format_literal(c.head)
        clauses.append(f"{prem} -> {head}" if prem else f"-> {head}")
    parts.append("(" + " ; ".join(clauses) + ")")
    return " ".join(parts) + "\n"


# ---------------------------------------------------------------------------
# normal-form LFP formulas


@_spanned
def parse_lfp(text: str) -> LfpFormula:
    p = _Parser(text)
    p.expect("exists")
    u = p.name("variable").text
    p.expect("[")
    p.expect("lfp")
    zs = [p.name("variable").text]
    while p.is_name():
        zs.append(p.name("variable").text)
    p.expect(",")
    z_rel = p.name("fixed-point relation").text
    p.expect(":")
    prefix = []
    while p.at("exists") or p.at("forall"):
        q = p.next().text
        names = []
        while p.is_name():
            names.append(p.name("variable").text)
        if not names:
            p.fail("expected a quantified variable")
        prefix.extend((q, v) for v in names)
    p.expect("(")
    clauses = []
    if not p.at(")"):
        clauses.append(_lfp_conj(p))
        while p.accept("|"):
            clauses.append(_lfp_conj(p))
    if not p.at(")"):
        p.fail("matrix must be a disjunction of conjunctions of literals")
    p.expect(")")
    p.expect("]")
    p.expect("(")
    fix_args = [p.name("variable").text]
    while p.accept(","):
        fix_args.append(p.name("variable").text)
    p.expect(")")
    p.end()

    bound = set(zs) | {v for _, v in prefix}

    def is_const(name):
        return name not in bound

    formula = LfpFormula(u, tuple(zs), z_rel, tuple(prefix),
                         tuple(tuple(_relabel(l, is_const) for l in c) for c in clauses),
                         tuple(fix_args))
    diags = validate_lfp(formula)
    if diags:
        raise DiagnosticError(diags)
    return formula


def _lfp_conj(p: _Parser) -> tuple[Literal, ...]:
    if p.accept("true"):
        return ()
    out = []
    while True:
        tok = p.peek()
        if tok.text in ("(", "exists", "forall"):
            raise DiagnosticError([Diagnostic(
                Code.NOT_DNF, "matrix must be quantifier-prefix followed by DNF",
                p.span(tok.start, tok.end))])
        out.append(p.literal(allow_forall=False))
        if not p.accept("&"):
            return tuple(out)


def format_lfp(f: LfpFormula) -> str:
    prefix = "".join(f"{q} {v} " for q, v in f.prefix)
    clauses = []
    for c in f.clauses:
        clauses.append(" & ".join(format_literal(l) for l in c) if c else "true")
    return (f"exists {f.exist_var} [lfp {' '.join(f.lfp_vars)}, {f.relation}: "
            f"{prefix}({' | '.join(clauses)})] ({','.join(f.fixpoint_args)})\n")


# ---------------------------------------------------------------------------
# structures


@_spanned
def parse_structure(text: str) -> Structure:
    p = _Parser(text)
    p.expect("structure")
    p.expect("{")
    p.expect("size")
    size_tok = p.peek()
    size = p.number()
    if size < 1:
        raise DiagnosticError([Diagnostic(Code.EMPTY_DOMAIN, "domain must have at least one element",
                                          p.span(size_tok.start, size_tok.end))])
    diags: list[Diagnostic] = []
    consts: dict[str, int] = {}
    rels: dict[str, tuple[int, set]] = {}

    def element(tok_before=None):
        tok = p.peek()
        val = p.number()
        if val >= size:
            diags.append(Diagnostic(Code.OUT_OF_DOMAIN, f"element {val} outside domain of size {size}",
                                    p.span(tok.start, tok.end)))
        return val

    while not p.at("}"):
        if p.accept("const"):
            tok = p.name("constant", allow_num=True)
            p.expect("=")
            if tok.text in consts:
                diags.append(Diagnostic(Code.DUPLICATE_NAME, f"constant {tok.text} defined twice",
                                        p.span(tok.start, tok.end)))
            consts[tok.text] = element()
        elif p.accept("rel"):
            tok = p.name("relation name")
            p.expect("/")
            arity = p.number()
            if tok.text in rels and rels[tok.text][0] != arity:
                diags.append(Diagnostic(Code.ARITY_MISMATCH,
                                        f"{tok.text} declared with arities {rels[tok.text][0]} and {arity}",
                                        p.span(tok.start, tok.end)))
            tuples = rels.setdefault(tok.text, (arity, set()))[1]
            p.expect("{")
            while p.at("("):
                start = p.next()
                row = []
                if not p.at(")"):
                    row.append(element())
                    while p.accept(","):
                        row.append(element())
                end = p.expect(")")
                if len(row) != arity:
                    diags.append(Diagnostic(Code.ARITY_MISMATCH,
                                            f"tuple of length {len(row)} in {tok.text}/{arity}",
                                            p.span(start.start, end.end)))
                tuples.add(tuple(row))
            p.expect("}")
        else:
            p.fail("expected 'const', 'rel' or '}'")
    p.expect("}")
    p.end()
    clash = set(consts) & set(rels)
    for name in sorted(clash):
        diags.append(Diagnostic(Code.DUPLICATE_NAME, f"{name} is both a relation and a constant"))
    if diags:
        raise DiagnosticError(diags)
    return Structure(size, {n: Relation(a, frozenset(t)) for n, (a, t) in rels.items()}, consts)


def format_structure(s: Structure) -> str:
    lines = [f"structure {{ size {s.size}"]
    for name in sorted(s.constants):
        lines.append(f"  const {name} = {s.constants[name]}")
    for name in sorted(s.relations):
        rel = s.relations[name]
        body = " ".join("(" + ",".join(map(str, t)) + ")" for t in rel.sorted())
        lines.append(f"  rel {name}/{rel.arity} {{ {body} }}" if body else f"  rel {name}/{rel.arity} {{ }}")
    lines.append("}")
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# simultaneous fixed-point systems (print only)


def format_simlfp(system: SimLfpSystem) -> str:
    lines = []
    for d in system.definitions:
        parts = []
        for disj in d.disjuncts:
            body = " & ".join(format_literal(l) for l in disj.literals) or "true"
            parts.append(f"exists {' '.join(disj.exists)} ({body})" if disj.exists else f"({body})")
        lines.append(f"{d.relation}({','.join(d.params)}) := {' | '.join(parts) or 'false'}")
    name, args = system.goal
    goal = name if args is None else name + _fmt_args(args)
    lines.append(f"goal {goal}")
    return "\n".join(lines) + "\n"


def to_text(obj) -> str:
    """Canonical text for any supported AST or structure."""
    if isinstance(obj, Program):
        return format_program(obj)
    if isinstance(obj, HornSentence):
        return format_horn(obj)
    if isinstance(obj, LfpFormula):
        return format_lfp(obj)
    if isinstance(obj, Structure):
        return format_structure(obj)
    if isinstance(obj, SimLfpSystem):
        return format_simlfp(obj)
    if isinstance(obj, Rule):
        return format_rule(obj)
    raise TypeError(f"cannot print {type(obj).__name__}")
