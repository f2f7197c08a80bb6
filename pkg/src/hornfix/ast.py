"""Abstract syntax for DATALOG^r programs, SO-HORN^r sentences and LFP formulas.

All nodes are frozen dataclasses.  Source spans ride along for diagnostics but
never take part in equality, so a parsed tree compares equal to one built by
hand.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from enum import Enum
from typing import Iterable, Mapping, Union

from .diagnostics import Code, Diagnostic, DiagnosticError, SourceSpan

ROOT = "root"
ZERO = "0"


@dataclass(frozen=True)
class Var:
    name: str

    def __str__(self):
        return self.name


@dataclass(frozen=True)
class Const:
    name: str

    def __str__(self):
        return self.name


Term = Union[Var, Const]


def term(x) -> Term:
    """Coerce a plain string to a Var; digit strings become constants."""
    if isinstance(x, (Var, Const)):
        return x
    if isinstance(x, int) or str(x).isdigit():
        return Const(str(x))
    return Var(str(x))


class Kind(str, Enum):
    POS = "pos"
    NEG = "neg"
    EQ = "eq"
    NEQ = "neq"
    FORALL = "forall"


@dataclass(frozen=True)
class Literal:
    """A rule-body literal.

    For ``FORALL`` the variables in ``bound`` are universally quantified over
    the atom ``relation(args)``.  They may sit at any argument position.
    """

    kind: Kind
    relation: str | None
    args: tuple[Term, ...]
    bound: tuple[str, ...] = ()
    span: SourceSpan | None = field(default=None, compare=False, repr=False)

    @property
    def is_atom(self):
        return self.kind in (Kind.POS, Kind.NEG, Kind.FORALL)

    def variables(self) -> list[str]:
        seen = []
        for t in self.args:
            if isinstance(t, Var) and t.name not in seen:
                seen.append(t.name)
        return seen

    def free_variables(self) -> list[str]:
        return [v for v in self.variables() if v not in self.bound]

    def free_args(self) -> tuple[Term, ...]:
        return tuple(t for t in self.args if not (isinstance(t, Var) and t.name in self.bound))

    def __str__(self):
        args = ",".join(map(str, self.args))
        if self.kind is Kind.POS:
            return f"{self.relation}({args})"
        if self.kind is Kind.NEG:
            return f"!{self.relation}({args})"
        if self.kind is Kind.EQ:
            return f"{self.args[0]} = {self.args[1]}"
        if self.kind is Kind.NEQ:
            return f"{self.args[0]} != {self.args[1]}"
        return f"forall {' '.join(self.bound)}: {self.relation}({args})"


def pos(relation: str, *args) -> Literal:
    return Literal(Kind.POS, relation, tuple(term(a) for a in args))


def neg(relation: str, *args) -> Literal:
    return Literal(Kind.NEG, relation, tuple(term(a) for a in args))


def eq(a, b) -> Literal:
    return Literal(Kind.EQ, None, (term(a), term(b)))


def neq(a, b) -> Literal:
    return Literal(Kind.NEQ, None, (term(a), term(b)))


def forall(bound, relation: str, *args) -> Literal:
    if isinstance(bound, str):
        bound = bound.split()
    return Literal(Kind.FORALL, relation, tuple(term(a) for a in args), tuple(bound))


@dataclass(frozen=True)
class Vocabulary:
    relations: Mapping[str, int] = field(default_factory=dict)
    constants: frozenset[str] = frozenset()

    def __post_init__(self):
        object.__setattr__(self, "relations", dict(self.relations))
        object.__setattr__(self, "constants", frozenset(self.constants))
        clash = set(self.relations) & self.constants
        if clash:
            raise ValueError(f"names used both as relation and constant: {sorted(clash)}")
        for name, arity in self.relations.items():
            if arity < 0:
                raise ValueError(f"negative arity for {name}")

    def arity(self, name: str) -> int:
        return self.relations[name]

    def merge(self, other: "Vocabulary") -> "Vocabulary":
        rels = dict(self.relations)
        for name, arity in other.relations.items():
            if rels.get(name, arity) != arity:
                raise ValueError(f"arity clash for {name}: {rels[name]} vs {arity}")
            rels[name] = arity
        return Vocabulary(rels, self.constants | other.constants)


@dataclass(frozen=True)
class Rule:
    head: str
    head_args: tuple[Term, ...]
    body: tuple[Literal, ...] = ()
    span: SourceSpan | None = field(default=None, compare=False, repr=False)

    @property
    def is_normal(self) -> bool:
        names = [t.name for t in self.head_args if isinstance(t, Var)]
        return len(names) == len(self.head_args) and len(set(names)) == len(names)

    def free_variables(self) -> list[str]:
        """Distinct free variables in order of first occurrence, head first."""
        seen: list[str] = []
        for t in self.head_args:
            if isinstance(t, Var) and t.name not in seen:
                seen.append(t.name)
        for lit in self.body:
            for v in lit.free_variables():
                if v not in seen:
                    seen.append(v)
        return seen

    def __str__(self):
        head = f"{self.head}({','.join(map(str, self.head_args))})"
        if not self.body:
            return f"{head}."
        return f"{head} :- {', '.join(map(str, self.body))}."


def rule(head: str, head_args: Iterable = (), *body: Literal) -> Rule:
    if isinstance(head_args, str):
        head_args = head_args.split()
    return Rule(head, tuple(term(a) for a in head_args), tuple(body))


def free_variable_count(r: Rule) -> int:
    return len(r.free_variables())


@dataclass(frozen=True)
class Program:
    vocabulary: Vocabulary
    rules: tuple[Rule, ...]
    goal: str | None = None

    @property
    def intentional(self) -> frozenset[str]:
        return frozenset(r.head for r in self.rules)

    @property
    def extensional(self) -> frozenset[str]:
        return frozenset(self.vocabulary.relations) - self.intentional

    def arity(self, name: str) -> int:
        return self.vocabulary.relations[name]

    @classmethod
    def from_rules(cls, rules: Iterable[Rule], constants: Iterable[str] = (),
                   relations: Mapping[str, int] | None = None,
                   goal: str | None = None) -> "Program":
        """Build a program, inferring relation arities from use."""
        rules = tuple(rules)
        rels = dict(relations or {})
        consts = set(constants)
        for r in rules:
            _note_arity(rels, r.head, len(r.head_args))
            _note_consts(consts, r.head_args)
            for lit in r.body:
                if lit.relation is not None:
                    _note_arity(rels, lit.relation, len(lit.args))
                _note_consts(consts, lit.args)
        return cls(Vocabulary(rels, frozenset(consts)), rules, goal)

    def __str__(self):
        return "\n".join(map(str, self.rules))


def _note_arity(rels, name, arity):
    if rels.setdefault(name, arity) != arity:
        raise DiagnosticError([Diagnostic(
            Code.ARITY_MISMATCH, f"{name} used with arity {arity} and {rels[name]}")])


def _note_consts(consts, args):
    consts.update(t.name for t in args if isinstance(t, Const))


def fresh(base: str, taken) -> str:
    """Deterministic fresh name with the reserved ``$`` prefix."""
    stem = base if base.startswith("$") else "$" + base
    if stem not in taken:
        return stem
    k = 1
    while f"{stem}{k}" in taken:
        k += 1
    return f"{stem}{k}"


def rule_names(r: Rule) -> set[str]:
    names = {t.name for t in r.head_args if isinstance(t, Var)}
    for lit in r.body:
        names.update(lit.variables())
        names.update(lit.bound)
    return names


def normalize(r: Rule) -> Rule:
    """Rewrite the head so its arguments are pairwise distinct variables.

    Constants and repeated variables in the head are replaced by fresh
    variables tied back with equality literals appended to the body.
    """
    if r.is_normal:
        return r
    taken = rule_names(r)
    args: list[Term] = []
    extra: list[Literal] = []
    used: set[str] = set()
    for t in r.head_args:
        if isinstance(t, Var) and t.name not in used:
            used.add(t.name)
            args.append(t)
            continue
        v = fresh("v", taken)
        taken.add(v)
        used.add(v)
        args.append(Var(v))
        extra.append(Literal(Kind.EQ, None, (Var(v), t)))
    return replace(r, head_args=tuple(args), body=r.body + tuple(extra))


def validate(program: Program) -> list[Diagnostic]:
    """Check the DATALOG^r well-formedness conditions; empty list means valid."""
    out: list[Diagnostic] = []
    vocab = program.vocabulary
    intentional = program.intentional

    def bad(code, msg, span, idx):
        out.append(Diagnostic(code, f"rule {idx + 1}: {msg}", span))

    def check_terms(args, span, idx):
        for t in args:
            if isinstance(t, Const) and t.name not in vocab.constants:
                bad(Code.UNKNOWN_SYMBOL, f"unknown constant {t.name}", span, idx)

    def check_arity(name, n, span, idx):
        if name not in vocab.relations:
            bad(Code.UNKNOWN_SYMBOL, f"unknown relation {name}", span, idx)
            return False
        if vocab.relations[name] != n:
            bad(Code.ARITY_MISMATCH,
                f"{name} has arity {vocab.relations[name]}, used with {n}", span, idx)
            return False
        return True

    for idx, r in enumerate(program.rules):
        check_arity(r.head, len(r.head_args), r.span, idx)
        check_terms(r.head_args, r.span, idx)
        for lit in r.body:
            span = lit.span or r.span
            check_terms(lit.args, span, idx)
            if lit.kind in (Kind.EQ, Kind.NEQ):
                if len(lit.args) != 2:
                    bad(Code.ARITY_MISMATCH, "(in)equality needs two terms", span, idx)
                continue
            check_arity(lit.relation, len(lit.args), span, idx)
            if lit.kind is Kind.NEG and lit.relation in intentional:
                bad(Code.NEGATED_INTENTIONAL,
                    f"intentional {lit.relation} occurs negated", span, idx)
            if lit.kind is Kind.FORALL:
                if lit.relation not in intentional:
                    bad(Code.UNIVERSAL_OVER_EXTENSIONAL,
                        f"universal quantifier over extensional {lit.relation}", span, idx)
                names = lit.variables()
                if (not lit.bound or len(set(lit.bound)) != len(lit.bound)
                        or any(b not in names for b in lit.bound)):
                    bad(Code.MALFORMED_UNIVERSAL,
                        "bound variables must be distinct and occur in the atom", span, idx)
    if program.goal is not None and program.goal not in vocab.relations:
        out.append(Diagnostic(Code.UNKNOWN_SYMBOL, f"unknown goal {program.goal}"))
    return out


def check(program: Program) -> Program:
    diags = validate(program)
    if diags:
        raise DiagnosticError(diags)
    return program


# ---------------------------------------------------------------------------
# SO-HORN^r


@dataclass(frozen=True)
class Clause:
    """``alphas & betas -> head``; ``head`` is None for the constant false."""

    alphas: tuple[Literal, ...]
    betas: tuple[Literal, ...]
    head: Literal | None

    def variables(self) -> list[str]:
        seen: list[str] = []
        for lit in (*self.alphas, *self.betas, *((self.head,) if self.head else ())):
            for v in lit.free_variables():
                if v not in seen:
                    seen.append(v)
        return seen


@dataclass(frozen=True)
class HornSentence:
    """``exists so_vars forall fo_vars (clause ; ...)`` over ``vocabulary``.

    ``vocabulary`` holds the extensional (first-order) symbols only.
    """

    so_vars: tuple[tuple[str, int], ...]
    fo_vars: tuple[str, ...]
    clauses: tuple[Clause, ...]
    vocabulary: Vocabulary = field(default_factory=Vocabulary)

    @property
    def so_arity(self) -> dict[str, int]:
        return dict(self.so_vars)


def validate_horn(s: HornSentence) -> list[Diagnostic]:
    out: list[Diagnostic] = []
    so = s.so_arity
    ext = s.vocabulary.relations

    def bad(code, msg, lit=None):
        out.append(Diagnostic(code, msg, lit.span if lit is not None else None))

    names = [n for n, _ in s.so_vars]
    if len(set(names)) != len(names):
        bad(Code.DUPLICATE_NAME, "second-order variable declared twice")
    for name in names:
        if name in ext or name in s.vocabulary.constants:
            bad(Code.DUPLICATE_NAME, f"{name} is both a relation variable and a symbol")

    def arity_ok(lit, table):
        if table.get(lit.relation) != len(lit.args):
            bad(Code.ARITY_MISMATCH, f"{lit.relation} used with arity {len(lit.args)}", lit)

    for c in s.clauses:
        for a in c.alphas:
            if a.kind not in (Kind.POS, Kind.FORALL) or a.relation not in so:
                bad(Code.UNKNOWN_SYMBOL, f"premise {a} is not a relation-variable atom", a)
                continue
            arity_ok(a, so)
        for b in c.betas:
            if b.relation is not None and b.relation in so:
                bad(Code.NEGATED_SO_VARIABLE, f"{b} uses relation variable {b.relation} negatively", b)
            elif b.kind is Kind.FORALL:
                bad(Code.UNIVERSAL_OVER_EXTENSIONAL, f"{b} quantifies over an extensional atom", b)
            elif b.relation is not None:
                if b.relation not in ext:
                    bad(Code.UNKNOWN_SYMBOL, f"unknown relation {b.relation}", b)
                else:
                    arity_ok(b, ext)
        if c.head is not None:
            if c.head.kind is not Kind.POS or c.head.relation not in so:
                bad(Code.HEAD_NOT_SO_VARIABLE, f"head {c.head} is not a relation-variable atom", c.head)
            else:
                arity_ok(c.head, so)
    return out


# ---------------------------------------------------------------------------
# FO(LFP) in normal form and simultaneous fixed points


@dataclass(frozen=True)
class LfpFormula:
    """``exists u [lfp z1..zk, Z: Q1 y1 .. Qm ym (C1 | .. | Cn)] (u,..,u)``."""

    exist_var: str
    lfp_vars: tuple[str, ...]
    relation: str
    prefix: tuple[tuple[str, str], ...]
    clauses: tuple[tuple[Literal, ...], ...]
    fixpoint_args: tuple[str, ...]

    def bound_names(self) -> set[str]:
        return set(self.lfp_vars) | {v for _, v in self.prefix}

    def vocabulary(self) -> Vocabulary:
        rels: dict[str, int] = {}
        consts: set[str] = set()
        for clause in self.clauses:
            for lit in clause:
                if lit.relation is not None and lit.relation != self.relation:
                    rels.setdefault(lit.relation, len(lit.args))
                consts.update(t.name for t in lit.args if isinstance(t, Const))
        return Vocabulary(rels, frozenset(consts))


def validate_lfp(f: LfpFormula) -> list[Diagnostic]:
    out: list[Diagnostic] = []
    k = len(f.lfp_vars)
    qvars = [v for _, v in f.prefix]
    if len(set(f.lfp_vars)) != k or len(set(qvars)) != len(qvars) or set(qvars) & set(f.lfp_vars):
        out.append(Diagnostic(Code.DUPLICATE_NAME, "fixed-point and quantified variables must be distinct"))
    if len(f.fixpoint_args) != k:
        out.append(Diagnostic(Code.FIXPOINT_ARITY_MISMATCH,
                              f"{f.relation} has arity {k} but is applied to {len(f.fixpoint_args)} terms"))
    if any(a != f.exist_var for a in f.fixpoint_args):
        out.append(Diagnostic(Code.FIXPOINT_ARITY_MISMATCH,
                              f"fixed point must be applied to ({', '.join([f.exist_var] * k)})"))
    arities: dict[str, int] = {}
    for clause in f.clauses:
        for lit in clause:
            if lit.kind is Kind.FORALL:
                out.append(Diagnostic(Code.NOT_DNF, f"{lit} is not a literal", lit.span))
            if lit.relation == f.relation:
                if lit.kind is Kind.NEG:
                    out.append(Diagnostic(Code.NEGATIVE_FIXPOINT_VARIABLE,
                                          f"{f.relation} occurs negatively", lit.span))
                if len(lit.args) != k:
                    out.append(Diagnostic(Code.FIXPOINT_ARITY_MISMATCH,
                                          f"{f.relation} used with arity {len(lit.args)}", lit.span))
            elif lit.relation is not None:
                if arities.setdefault(lit.relation, len(lit.args)) != len(lit.args):
                    out.append(Diagnostic(Code.ARITY_MISMATCH,
                                          f"{lit.relation} used with two arities", lit.span))
    return out


@dataclass(frozen=True)
class Disjunct:
    exists: tuple[str, ...]
    literals: tuple[Literal, ...]


@dataclass(frozen=True)
class Definition:
    relation: str
    params: tuple[str, ...]
    disjuncts: tuple[Disjunct, ...]


@dataclass(frozen=True)
class SimLfpSystem:
    """Simultaneous least fixed point of several positive definitions."""

    definitions: tuple[Definition, ...]
    goal: tuple[str, tuple[Term, ...] | None]

    def defined(self) -> dict[str, Definition]:
        return {d.relation: d for d in self.definitions}
