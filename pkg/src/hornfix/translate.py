"""Translations between existential SO-HORN^r, DATALOG^r and fixed-point logic.

Generated names use the reserved ``$`` prefix and deterministic counters, so
translating the same input twice gives identical output.
"""

from __future__ import annotations

from dataclasses import replace

from .ast import (
    Clause, Const, Definition, Disjunct, HornSentence, Kind, LfpFormula, Literal, Program,
    Rule, SimLfpSystem, Term, Var, Vocabulary, fresh, normalize, rule_names,
)


class GoalNotZeroAry(ValueError):
    pass


def substitute(lit: Literal, mapping: dict[str, Term]) -> Literal:
    args = tuple(mapping.get(t.name, t) if isinstance(t, Var) else t for t in lit.args)
    bound = tuple(mapping[b].name if b in mapping else b for b in lit.bound)
    return Literal(lit.kind, lit.relation, args, bound, span=lit.span)


def _program_names(program: Program) -> set[str]:
    names = set(program.vocabulary.relations) | set(program.vocabulary.constants)
    for r in program.rules:
        names |= rule_names(r)
    return names


# ---------------------------------------------------------------------------
# SO-HORN^r  <->  DATALOG^r


def horn_to_datalog(sentence: HornSentence) -> tuple[Program, str]:
    """Program ``Pi`` and 0-ary goal ``P`` with A |= sentence iff A |/= (Pi, P)."""
    taken = set(sentence.vocabulary.relations) | set(sentence.vocabulary.constants)
    taken |= {name for name, _ in sentence.so_vars} | set(sentence.fo_vars)
    for c in sentence.clauses:
        for lit in (*c.alphas, *c.betas):
            taken.update(lit.bound)
    goal = fresh("P", taken)
    taken.add(goal)

    rules: list[Rule] = []
    for name, arity in sentence.so_vars:
        us = []
        for i in range(arity):
            u = fresh(f"u{i + 1}", taken)
            us.append(Var(u))
        atom = Literal(Kind.POS, name, tuple(us))
        rules.append(Rule(name, tuple(us), (atom,)))

    has_false = False
    for c in sentence.clauses:
        body = c.alphas + c.betas
        if c.head is None:
            has_false = True
            rules.append(Rule(goal, (), body))
        else:
            rules.append(normalize(Rule(c.head.relation, c.head.args, body)))
    if not has_false:
        v = Var(fresh("v", taken))
        rules.append(Rule(goal, (), (Literal(Kind.NEQ, None, (v, v)),)))

    rels = dict(sentence.vocabulary.relations)
    rels.update(sentence.so_arity)
    rels[goal] = 0
    program = Program(Vocabulary(rels, sentence.vocabulary.constants), tuple(rules), goal)
    return program, goal


def lift_nullary(program: Program) -> Program:
    """Make 0-ary intentional symbols occur only in rule heads.

    Every 0-ary ``Q`` read by some body is replaced everywhere by ``Q'(x)``
    with a fresh unary ``Q'`` and fresh variable ``x``, and ``Q :- Q'(x)`` is
    added.
    """
    arity = program.vocabulary.relations
    read = {lit.relation for r in program.rules for lit in r.body
            if lit.relation in program.intentional and arity[lit.relation] == 0}
    if not read:
        return program
    taken = _program_names(program)
    primed = {}
    for q in sorted(read):
        primed[q] = fresh(q.lstrip("$") + "'", taken)
        taken.add(primed[q])

    def lifted_atom(lit, x):
        return Literal(lit.kind, primed[lit.relation], (Var(x),), span=lit.span)

    rules = []
    for r in program.rules:
        names = rule_names(r)
        x = fresh("x", names)
        body = tuple(lifted_atom(l, x) if l.relation in primed else l for l in r.body)
        if r.head in primed:
            rules.append(Rule(primed[r.head], (Var(x),), body, span=r.span))
        else:
            rules.append(Rule(r.head, r.head_args, body, span=r.span))
    for q in sorted(read):
        x = Var(fresh("x", set()))
        rules.append(Rule(q, (), (Literal(Kind.POS, primed[q], (x,)),)))
    rels = dict(arity)
    rels.update({p: 1 for p in primed.values()})
    return Program(Vocabulary(rels, program.vocabulary.constants), tuple(rules), program.goal)


def datalog_to_horn(program: Program, goal: str | None = None) -> HornSentence:
    """Sentence ``phi`` with A |= phi iff A |/= (program, goal)."""
    goal = goal if goal is not None else program.goal
    arity = program.vocabulary.relations
    if goal is None or goal not in program.intentional or arity[goal] != 0:
        raise GoalNotZeroAry(f"goal {goal!r} must be a 0-ary intentional relation")
    lifted = lift_nullary(program)
    arity = lifted.vocabulary.relations
    intentional = lifted.intentional

    so_vars: list[tuple[str, int]] = []
    for r in lifted.rules:
        if arity[r.head] > 0 and (r.head, arity[r.head]) not in so_vars:
            so_vars.append((r.head, arity[r.head]))
    fo_vars: list[str] = []
    clauses = []
    for r in lifted.rules:
        if arity[r.head] == 0 and r.head != goal:
            continue
        for v in r.free_variables():
            if v not in fo_vars:
                fo_vars.append(v)
        alphas = tuple(l for l in r.body if l.relation in intentional)
        betas = tuple(l for l in r.body if l.relation not in intentional)
        head = None if arity[r.head] == 0 else Literal(Kind.POS, r.head, r.head_args)
        clauses.append(Clause(alphas, betas, head))
    ext = {name: arity[name] for name in lifted.extensional}
    return HornSentence(tuple(so_vars), tuple(fo_vars), tuple(clauses),
                        Vocabulary(ext, lifted.vocabulary.constants))


# ---------------------------------------------------------------------------
# normal-form LFP  ->  DATALOG^r


def lfp_to_datalog(formula: LfpFormula) -> tuple[Program, str]:
    """Program with 0-ary goal ``Q`` that holds iff the formula does.

    The clause predicate lists the quantified variables innermost first, then
    the fixed-point variables, so each universal step quantifies the leading
    argument.
    """
    vocab = formula.vocabulary()
    taken = set(vocab.relations) | set(vocab.constants) | {formula.relation}
    taken |= formula.bound_names() | {formula.exist_var}
    zs = tuple(Var(z) for z in formula.lfp_vars)
    ys = [v for _, v in formula.prefix]
    m = len(ys)

    clause_pred = fresh("P", taken)
    taken.add(clause_pred)
    stage_preds = {}
    for k in range(m, 0, -1):
        stage_preds[k] = fresh(f"P{k}", taken)
        taken.add(stage_preds[k])
    goal = fresh("Q", taken)
    taken.add(goal)

    def args_at(k):
        # arguments of P_k: y_{k-1} .. y_1, z
        return tuple(Var(y) for y in reversed(ys[:k - 1])) + zs

    rules: list[Rule] = []
    head_args = tuple(Var(y) for y in reversed(ys)) + zs
    for c in formula.clauses:
        rules.append(Rule(clause_pred, head_args, tuple(c)))
    if not formula.clauses:
        v = Var(fresh("v", taken))
        rules.append(Rule(clause_pred, head_args, (Literal(Kind.NEQ, None, (v, v)),)))

    inner = clause_pred
    for k in range(m, 0, -1):
        q, y = formula.prefix[k - 1]
        inner_args = (Var(y),) + args_at(k)
        if q == "forall":
            lit = Literal(Kind.FORALL, inner, inner_args, (y,))
        else:
            lit = Literal(Kind.POS, inner, inner_args)
        rules.append(Rule(stage_preds[k], args_at(k), (lit,)))
        inner = stage_preds[k]
    rules.append(Rule(formula.relation, zs, (Literal(Kind.POS, inner, zs),)))
    u = Var(formula.exist_var)
    rules.append(Rule(goal, (), (Literal(Kind.POS, formula.relation, (u,) * len(zs)),)))

    rels = dict(vocab.relations)
    rels[formula.relation] = len(zs)
    rels[clause_pred] = len(head_args)
    for k, name in stage_preds.items():
        rels[name] = len(args_at(k))
    rels[goal] = 0
    return Program(Vocabulary(rels, vocab.constants), tuple(rules), goal), goal


# ---------------------------------------------------------------------------
# DATALOG^r  ->  simultaneous fixed point


def datalog_to_simlfp(program: Program, goal: str | None = None) -> SimLfpSystem:
    """One definition per intentional symbol, one disjunct per rule."""
    goal = goal if goal is not None else program.goal
    arity = program.vocabulary.relations
    taken = _program_names(program)
    counter = 0

    def next_var():
        nonlocal counter
        while True:
            counter += 1
            name = f"$e{counter}"
            if name not in taken:
                return name

    params = {p: tuple(f"$x{i + 1}" for i in range(arity[p])) for p in program.intentional}
    taken |= {x for ps in params.values() for x in ps}
    disjuncts: dict[str, list[Disjunct]] = {p: [] for p in program.intentional}
    for r in program.rules:
        r = normalize(r)
        mapping: dict[str, Term] = {t.name: Var(x) for t, x in zip(r.head_args, params[r.head])}
        exists = []
        for v in r.free_variables():
            if v not in mapping:
                mapping[v] = Var(next_var())
                exists.append(mapping[v].name)
        lits = []
        for lit in r.body:
            local = dict(mapping)
            for b in lit.bound:
                local[b] = Var(next_var())
            lits.append(substitute(lit, local))
        disjuncts[r.head].append(Disjunct(tuple(exists), tuple(lits)))

    order = list(dict.fromkeys(r.head for r in program.rules))
    defs = tuple(Definition(p, params[p], tuple(disjuncts[p])) for p in order)
    return SimLfpSystem(defs, (goal, None))
