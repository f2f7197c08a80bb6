"""Compile a DATALOG^r program over tree structures into one over ``S_T``.

A node variable ``x`` becomes the level variable ``$i~x`` (the depth of x) and
a pair ``x, y`` becomes ``$i~x~y`` (the depth of their lowest common
ancestor, names sorted so the pair is unordered).  Anything involving the
constant ``root`` is the level constant ``0``.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace

from .ast import (
    ROOT, ZERO, Const, Kind, Literal, Program, Rule, Term, Var, fresh, normalize, rule_names,
)
from .engine import eval_datalog
from .structure import Structure
from .trees import (
    char_relation_of, encode, ful_name, is_invariant, neg_star, sigma_structure, star, triangular,
)

EDGE = "E"


class UnsupportedLiteral(ValueError):
    pass


class PairVarTable:
    """Canonical level variables for single node variables and unordered pairs."""

    def __init__(self):
        self.names: dict[frozenset, str] = {}

    def single(self, x: Term) -> Term:
        return self.pair(x, x)

    def pair(self, x: Term, y: Term) -> Term:
        for t in (x, y):
            if isinstance(t, Const) and t.name != ROOT:
                raise UnsupportedLiteral(f"constant {t.name} has no level counterpart")
        if isinstance(x, Const) or isinstance(y, Const):
            return Const(ZERO)
        key = frozenset((x.name, y.name))
        if key not in self.names:
            a, b = sorted((x.name, y.name))
            self.names[key] = f"$i~{a}" if a == b else f"$i~{a}~{b}"
        return Var(self.names[key])

    def star(self, terms) -> tuple[Term, ...]:
        terms = tuple(terms)
        out = []
        for i, x in enumerate(terms):
            out.append(self.single(x))
            for y in terms[i + 1:]:
                out.append(self.pair(x, y))
        return tuple(out)


def star_args(terms) -> tuple[Term, ...]:
    return PairVarTable().star(terms)


def compute_m(program: Program) -> int:
    """Largest free-variable count of a (normalized) rule or arity of a relation."""
    counts = [len(normalize(r).free_variables()) for r in program.rules]
    arities = [a for name, a in program.vocabulary.relations.items() if name != EDGE]
    return max(counts + arities, default=0)


def _pad(terms, m):
    terms = tuple(terms)
    if not terms:
        return ()
    return terms + (terms[-1],) * (m - len(terms))


@dataclass
class _Compiler:
    program: Program
    m: int
    table: PairVarTable = field(default_factory=PairVarTable)
    extra: list[Rule] = field(default_factory=list)
    occurrence: int = 0

    @property
    def ful(self) -> str:
        return star(ful_name(self.m))

    def ful_atom(self, terms, kind=Kind.POS) -> Literal:
        padded = _pad(terms, self.m)
        args = self.table.star(padded) if padded else (Const(ZERO),) * triangular(self.m)
        return Literal(kind, self.ful, args)

    def rel_name(self, name: str) -> str:
        return star(name)

    def rewrite(self, lit: Literal) -> list[Literal]:
        t = self.table
        intentional = self.program.intentional
        if lit.kind in (Kind.EQ, Kind.NEQ) or lit.relation == EDGE:
            if len(lit.args) != 2:
                raise UnsupportedLiteral(f"{lit} is not binary")
            x, y = lit.args
            ix, ixy, iy = t.single(x), t.pair(x, y), t.single(y)
            if lit.kind is Kind.EQ:
                return [Literal(Kind.EQ, None, (ix, ixy)), Literal(Kind.EQ, None, (ixy, iy))]
            if lit.kind is Kind.NEQ:
                return [Literal(Kind.POS, "R_neq", (ix, ixy, iy))]
            if lit.kind is Kind.POS:
                return [Literal(Kind.EQ, None, (ix, ixy)), Literal(Kind.POS, "SUCC", (ixy, iy))]
            if lit.kind is Kind.NEG:
                return [Literal(Kind.POS, "R_nege", (ix, ixy, iy))]
            raise UnsupportedLiteral(f"universal quantifier over {EDGE} is not allowed")
        if lit.kind is Kind.POS:
            return [Literal(Kind.POS, self.rel_name(lit.relation), t.star(lit.args))]
        if lit.kind is Kind.NEG:
            if lit.relation in intentional:
                raise UnsupportedLiteral(f"negated intentional {lit.relation}")
            return [Literal(Kind.POS, neg_star(lit.relation), t.star(lit.args))]
        if lit.kind is Kind.FORALL:
            return [self.universal(lit)]
        raise UnsupportedLiteral(str(lit))

    def universal(self, lit: Literal) -> Literal:
        """Replace ``forall y: R(..)`` by ``Q2(z*)`` and queue the four defining rules."""
        self.occurrence += 1
        k = self.occurrence
        q, q1, q2 = f"$Q{k}", f"$Q{k}_1", f"$Q{k}_2"
        t = self.table
        args = lit.args
        zs = tuple(dict.fromkeys(a for a in args if isinstance(a, Var) and a.name not in lit.bound))
        full = t.star(args)
        free_star = t.star(zs)
        free_names = {v.name for v in free_star if isinstance(v, Var)}
        bound_star = tuple(dict.fromkeys(v.name for v in full
                                         if isinstance(v, Var) and v.name not in free_names))
        self.extra += [
            Rule(q, full, (self.ful_atom(args, Kind.NEG),)),
            Rule(q, full, (Literal(Kind.POS, self.rel_name(lit.relation), full),)),
            Rule(q1, free_star, (Literal(Kind.FORALL, q, full, bound_star),)),
            Rule(q2, free_star, (Literal(Kind.POS, q1, free_star), self.ful_atom(zs))),
        ]
        return Literal(Kind.POS, q2, free_star)

    def compile_rule(self, r: Rule) -> Rule:
        r = _rename_bound(normalize(r))
        free = tuple(Var(v) for v in r.free_variables())
        out = []
        for lit in r.body:
            out.extend(self.rewrite(lit))
        # padding atom FUL_m(v1 .. vn vn .. vn), already in starred form
        if free:
            out.append(self.ful_atom(free))
        return Rule(self.rel_name(r.head), self.table.star(r.head_args), tuple(out))


def _rename_bound(r: Rule) -> Rule:
    """Give universally bound variables fresh names so pair variables cannot collide."""
    if not any(lit.bound for lit in r.body):
        return r
    taken = rule_names(r)
    body = []
    for lit in r.body:
        if not lit.bound:
            body.append(lit)
            continue
        mapping = {}
        for b in lit.bound:
            mapping[b] = fresh("y", taken)
            taken.add(mapping[b])
        args = tuple(Var(mapping[a.name]) if isinstance(a, Var) and a.name in mapping else a
                     for a in lit.args)
        body.append(Literal(lit.kind, lit.relation, args, tuple(mapping[b] for b in lit.bound),
                            span=lit.span))
    return replace(r, body=tuple(body))


def compile_program(program: Program, m: int | None = None) -> Program:
    """Compile every rule; the goal ``P`` becomes ``P*``."""
    for c in program.vocabulary.constants:
        if c != ROOT:
            raise UnsupportedLiteral(f"constant {c} is outside the tree vocabulary")
    m = compute_m(program) if m is None else m
    comp = _Compiler(program, m)
    rules = [comp.compile_rule(r) for r in program.rules]
    rules = [normalize(r) for r in rules + comp.extra]

    rels = {"SUCC": 2, "R_neq": 3, "R_nege": 3, comp.ful: triangular(m)}
    for name in sorted(program.extensional - {EDGE}):
        a = program.vocabulary.relations[name]
        rels[star(name)] = triangular(a)
        rels[neg_star(name)] = triangular(a)
    goal = star(program.goal) if program.goal is not None else None
    return Program.from_rules(rules, constants=[ZERO], relations=rels, goal=goal)


# ---------------------------------------------------------------------------
# the equivalence harness


@dataclass
class SymbolCheck:
    symbol: str
    invariant: bool
    tree_size: int
    star_size: int
    equal: bool

    @property
    def passed(self) -> bool:
        return self.invariant and self.equal


@dataclass
class CompilationReport:
    rows: list[SymbolCheck]
    goal: str | None
    goal_tree: bool | None
    goal_star: bool | None

    @property
    def ok(self) -> bool:
        return all(r.passed for r in self.rows) and self.goal_tree == self.goal_star

    def table(self) -> str:
        lines = [f"{'symbol':<12} {'invariant':<9} {'|X|':>6} {'|X*|':>6} result"]
        for r in self.rows:
            lines.append(f"{r.symbol:<12} {str(r.invariant).lower():<9} {r.tree_size:>6} "
                         f"{r.star_size:>6} {'pass' if r.passed else 'FAIL'}")
        if self.goal is not None:
            lines.append(f"goal {self.goal}: tree={str(self.goal_tree).lower()} "
                         f"levels={str(self.goal_star).lower()}")
        lines.append("ok" if self.ok else "FAILED")
        return "\n".join(lines) + "\n"


def verify_compilation(a: Structure, program: Program, goal: str | None = None) -> CompilationReport:
    """Evaluate ``program`` on ``encode(a)`` and its compilation on the level structure and compare."""
    goal = goal if goal is not None else program.goal
    tree = encode(a)
    t_struct = tree.to_structure()
    m = compute_m(program)
    sigma = sigma_structure(tree, m)
    compiled = compile_program(program, m)
    on_tree, _ = eval_datalog(program, t_struct)
    on_sigma, _ = eval_datalog(compiled, sigma)
    rows = []
    for x in sorted(program.intentional):
        rel = on_tree.structure.relations[x]
        inv = is_invariant(rel, tree.tree)
        lhs = char_relation_of(rel, tree.tree, verify=False)
        rhs = on_sigma.structure.relations[star(x)]
        rows.append(SymbolCheck(x, inv, len(rel), len(rhs), lhs == rhs))
    goal_tree = goal_star = None
    if goal is not None:
        goal_tree = () in on_tree.structure.relations[goal]
        goal_star = () in on_sigma.structure.relations[star(goal)]
    return CompilationReport(rows, goal, goal_tree, goal_star)
