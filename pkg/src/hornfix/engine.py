"""Evaluators for the three logics.

``eval_datalog`` runs the stage-by-stage simultaneous least fixed point of a
DATALOG^r program, ``eval_horn`` decides an existential SO-HORN^r sentence by
trying every interpretation of its relation variables, and ``eval_lfp`` /
``eval_simlfp`` evaluate fixed-point formulas by plain first-order semantics.
The last three share no matching code with the Datalog engine on purpose, so
agreement between them is a meaningful check.
"""

from __future__ import annotations

import itertools
import os
from dataclasses import dataclass, field

import numpy as np

from .ast import Const, Kind, Literal, Program, Rule, SimLfpSystem, HornSentence, LfpFormula, Var
from .diagnostics import Code, Diagnostic, DiagnosticError
from .structure import Relation, Structure

DEFAULT_BUDGET = 2 ** 24
_CHUNK = 1 << 20


class BudgetExceeded(RuntimeError):
    def __init__(self, required: int, budget: int):
        self.required = required
        self.budget = budget
        super().__init__(f"brute force needs {required} assignments, budget is {budget}")


@dataclass
class FixpointTrace:
    stages: list[dict[str, Relation]] = field(default_factory=list)

    @property
    def stage_count(self) -> int:
        return len(self.stages) - 1

    def dump(self) -> str:
        lines = []
        for k, stage in enumerate(self.stages):
            parts = []
            for name in sorted(stage):
                body = " ".join("(" + ",".join(map(str, t)) + ")" for t in stage[name].sorted())
                parts.append(f"{name}={{{body}}}")
            lines.append(f"stage {k}: " + " ".join(parts))
        return "\n".join(lines) + "\n"


@dataclass
class EvalResult:
    structure: Structure
    goal_holds: bool | Relation | None


def _constant_map(structure: Structure, needed) -> dict[str, int]:
    missing = sorted(set(needed) - set(structure.constants))
    if missing:
        raise DiagnosticError([Diagnostic(Code.UNKNOWN_SYMBOL,
                                          f"structure does not interpret constant {c}")
                               for c in missing])
    return dict(structure.constants)


def _require_relations(structure: Structure, wanted: dict[str, int]):
    diags = []
    for name, arity in sorted(wanted.items()):
        rel = structure.relations.get(name)
        if rel is None:
            diags.append(Diagnostic(Code.UNKNOWN_SYMBOL, f"structure does not interpret {name}"))
        elif rel.arity != arity:
            diags.append(Diagnostic(Code.ARITY_MISMATCH,
                                    f"{name} has arity {rel.arity} in the structure, {arity} expected"))
    if structure.size < 1:
        diags.append(Diagnostic(Code.EMPTY_DOMAIN, "structure has an empty domain"))
    if diags:
        raise DiagnosticError(diags)


# ---------------------------------------------------------------------------
# DATALOG^r


class _RuleMatcher:
    """Enumerates head tuples of one rule by backtracking over its body."""

    def __init__(self, r: Rule, consts: dict[str, int], n: int):
        self.rule = r
        self.consts = consts
        self.n = n
        self.head_vars = [t.name for t in r.head_args if isinstance(t, Var)]

    def _val(self, t, b):
        if isinstance(t, Const):
            return self.consts[t.name]
        return b.get(t.name)

    def _holds(self, lit: Literal, b, rels) -> bool:
        if lit.kind is Kind.EQ:
            return self._val(lit.args[0], b) == self._val(lit.args[1], b)
        if lit.kind is Kind.NEQ:
            return self._val(lit.args[0], b) != self._val(lit.args[1], b)
        rel = rels[lit.relation]
        if lit.kind is Kind.FORALL:
            return forall_holds(lit, b, self.consts, rel, self.n)
        t = tuple(self._val(a, b) for a in lit.args)
        return (t in rel) == (lit.kind is Kind.POS)

    def tuples(self, rels) -> set[tuple]:
        out: set[tuple] = set()
        self._search(list(self.rule.body), {}, rels, out)
        return out

    def _emit(self, b, out):
        unbound = [v for v in dict.fromkeys(self.head_vars) if v not in b]
        for combo in itertools.product(range(self.n), repeat=len(unbound)):
            full = dict(b)
            full.update(zip(unbound, combo))
            out.add(tuple(self._val(t, full) for t in self.rule.head_args))

    def _search(self, pending, b, rels, out):
        if not pending:
            self._emit(b, out)
            return
        # fully bound literals are filters
        for i, lit in enumerate(pending):
            if all(v in b for v in lit.free_variables()):
                if self._holds(lit, b, rels):
                    self._search(pending[:i] + pending[i + 1:], b, rels, out)
                return
        rest_of = lambda i: pending[:i] + pending[i + 1:]
        # equalities with one side known bind the other
        for i, lit in enumerate(pending):
            if lit.kind is Kind.EQ:
                x, y = lit.args
                vx, vy = self._val(x, b), self._val(y, b)
                if vx is not None or vy is not None:
                    nb = dict(b)
                    if vx is None:
                        nb[x.name] = vy
                    else:
                        nb[y.name] = vx
                    self._search(rest_of(i), nb, rels, out)
                    return
        # positive atoms generate candidates
        for i, lit in enumerate(pending):
            if lit.kind is Kind.POS:
                for t in rels[lit.relation]:
                    nb = _unify(lit.args, t, b, self.consts)
                    if nb is not None:
                        self._search(rest_of(i), nb, rels, out)
                return
        # otherwise guess a value for some variable
        v = next(v for lit in pending for v in lit.free_variables() if v not in b)
        for a in range(self.n):
            nb = dict(b)
            nb[v] = a
            self._search(pending, nb, rels, out)


def _unify(args, t, b, consts):
    nb = None
    for term_, val in zip(args, t):
        if isinstance(term_, Const):
            if consts[term_.name] != val:
                return None
            continue
        cur = b.get(term_.name) if nb is None else nb.get(term_.name)
        if cur is None:
            if nb is None:
                nb = dict(b)
            nb[term_.name] = val
        elif cur != val:
            return None
    return dict(b) if nb is None else nb


def forall_holds(lit: Literal, b, consts, rel, n: int) -> bool:
    """``forall y: R(..y..)`` under the partial assignment ``b`` of its free variables."""
    bound = lit.bound
    for combo in itertools.product(range(n), repeat=len(bound)):
        env = dict(zip(bound, combo))
        t = []
        for a in lit.args:
            if isinstance(a, Const):
                t.append(consts[a.name])
            elif a.name in env:
                t.append(env[a.name])
            else:
                t.append(b[a.name])
        if tuple(t) not in rel:
            return False
    return True


def _program_constants(program: Program):
    return program.vocabulary.constants


def eval_datalog(program: Program, structure: Structure, goal: str | None = None,
                 max_rounds: int | None = None) -> tuple[EvalResult, FixpointTrace]:
    """Simultaneous least fixed point, one Jacobi round per stage.

    Stage ``k+1`` is computed from stage ``k`` alone.  A rule whose intentional
    inputs did not change between two stages produces the same tuples, so its
    previous output is reused.
    """
    intentional = program.intentional
    arity = program.vocabulary.relations
    _require_relations(structure, {x: arity[x] for x in program.extensional})
    consts = _constant_map(structure, program.vocabulary.constants)
    n = structure.size

    rels = {name: structure.relations[name].tuples for name in program.extensional}
    current = {p: frozenset() for p in intentional}
    rels.update(current)
    matchers = [_RuleMatcher(r, consts, n) for r in program.rules]
    deps = [frozenset(l.relation for l in r.body if l.relation in intentional)
            for r in program.rules]
    cached: list[tuple[dict, frozenset] | None] = [None] * len(program.rules)

    stages = [{p: Relation(arity[p], current[p]) for p in intentional}]
    rounds = 0
    while True:
        nxt = {p: set() for p in intentional}
        for i, m in enumerate(matchers):
            key = {d: current[d] for d in deps[i]}
            if cached[i] is not None and cached[i][0] == key:
                produced = cached[i][1]
            else:
                produced = frozenset(m.tuples(rels))
                cached[i] = (key, produced)
            nxt[m.rule.head] |= produced
        nxt = {p: frozenset(v) for p, v in nxt.items()}
        stages.append({p: Relation(arity[p], nxt[p]) for p in intentional})
        rounds += 1
        if nxt == current:
            break
        if max_rounds is not None and rounds >= max_rounds:
            break
        current = nxt
        rels.update(current)

    final = stages[-1]
    expanded = structure.with_relations(final)
    goal = goal if goal is not None else program.goal
    holds = None
    if goal is not None:
        if goal not in arity:
            raise DiagnosticError([Diagnostic(Code.UNKNOWN_SYMBOL, f"unknown goal {goal}")])
        rel = expanded.relations[goal]
        holds = (() in rel) if rel.arity == 0 else rel
    return EvalResult(expanded, holds), FixpointTrace(stages)


# ---------------------------------------------------------------------------
# existential SO-HORN^r by enumeration


def configured_budget() -> int:
    raw = os.environ.get("HORNFIX_BUDGET")
    if raw is None:
        return DEFAULT_BUDGET
    try:
        return int(raw)
    except ValueError:
        raise ValueError(f"HORNFIX_BUDGET must be an integer, got {raw!r}") from None


def _term_value(t, env, consts):
    return consts[t.name] if isinstance(t, Const) else env[t.name]


def ground_horn(sentence: HornSentence, structure: Structure):
    """Ground the matrix into propositional Horn clauses over relation-variable bits.

    Returns ``(bit_count, clauses)`` where each clause is ``(premise_mask, head_bit)``
    and ``head_bit`` is -1 for false.
    """
    _require_relations(structure, dict(sentence.vocabulary.relations))
    consts = _constant_map(structure, sentence.vocabulary.constants)
    n = structure.size
    offsets, bits = {}, 0
    for name, ar in sentence.so_vars:
        offsets[name] = (bits, ar)
        bits += n ** ar

    def bit(name, tup):
        base, _ = offsets[name]
        idx = 0
        for a in tup:
            idx = idx * n + a
        return base + idx

    def beta_holds(lit, env):
        if lit.kind is Kind.EQ:
            return _term_value(lit.args[0], env, consts) == _term_value(lit.args[1], env, consts)
        if lit.kind is Kind.NEQ:
            return _term_value(lit.args[0], env, consts) != _term_value(lit.args[1], env, consts)
        t = tuple(_term_value(a, env, consts) for a in lit.args)
        return (t in structure.relations[lit.relation]) == (lit.kind is Kind.POS)

    ground: set[tuple[int, int]] = set()
    fo = sentence.fo_vars
    for combo in itertools.product(range(n), repeat=len(fo)):
        env = dict(zip(fo, combo))
        for c in sentence.clauses:
            if not all(beta_holds(b, env) for b in c.betas):
                continue
            mask = 0
            for a in c.alphas:
                if a.kind is Kind.FORALL:
                    for ys in itertools.product(range(n), repeat=len(a.bound)):
                        inner = dict(env)
                        inner.update(zip(a.bound, ys))
                        mask |= 1 << bit(a.relation, tuple(_term_value(t, inner, consts) for t in a.args))
                else:
                    mask |= 1 << bit(a.relation, tuple(_term_value(t, env, consts) for t in a.args))
            head = -1
            if c.head is not None:
                head = bit(c.head.relation, tuple(_term_value(t, env, consts) for t in c.head.args))
                if mask >> head & 1:
                    continue
            ground.add((mask, head))
    return bits, sorted(ground)


def eval_horn(sentence: HornSentence, structure: Structure, budget: int | None = None) -> bool:
    """True iff some interpretation of the relation variables satisfies every clause."""
    budget = configured_budget() if budget is None else budget
    n = structure.size
    bits = sum(n ** ar for _, ar in sentence.so_vars)
    required = 2 ** bits
    if required > budget:
        raise BudgetExceeded(required, budget)
    if bits > 63:
        raise BudgetExceeded(required, min(budget, 2 ** 63))
    bits, clauses = ground_horn(sentence, structure)
    if any(mask == 0 and head < 0 for mask, head in clauses):
        return False
    masks = np.array([m for m, _ in clauses], dtype=np.uint64)
    heads = [h for _, h in clauses]
    for start in range(0, required, _CHUNK):
        a = np.arange(start, min(required, start + _CHUNK), dtype=np.uint64)
        ok = np.ones(a.shape, dtype=bool)
        for mask, head in zip(masks, heads):
            violated = (a & mask) == mask
            if head >= 0:
                violated &= ((a >> np.uint64(head)) & np.uint64(1)) == 0
            ok &= ~violated
            if not ok.any():
                break
        if ok.any():
            return True
    return False


# ---------------------------------------------------------------------------
# first-order evaluation with fixed points


def _fo_literal(lit: Literal, env, consts, interp, n) -> bool:
    if lit.kind is Kind.EQ:
        return _term_value(lit.args[0], env, consts) == _term_value(lit.args[1], env, consts)
    if lit.kind is Kind.NEQ:
        return _term_value(lit.args[0], env, consts) != _term_value(lit.args[1], env, consts)
    rel = interp[lit.relation]
    if lit.kind is Kind.FORALL:
        for ys in itertools.product(range(n), repeat=len(lit.bound)):
            inner = dict(env)
            inner.update(zip(lit.bound, ys))
            if tuple(_term_value(t, inner, consts) for t in lit.args) not in rel:
                return False
        return True
    t = tuple(_term_value(a, env, consts) for a in lit.args)
    return (t in rel) == (lit.kind is Kind.POS)


def lfp_relation(formula: LfpFormula, structure: Structure) -> tuple[frozenset, int]:
    """The least fixed point Z and the number of rounds used to reach it."""
    vocab = formula.vocabulary()
    _require_relations(structure, dict(vocab.relations))
    consts = _constant_map(structure, vocab.constants)
    n = structure.size
    interp = {name: structure.relations[name].tuples for name in vocab.relations}
    k = len(formula.lfp_vars)
    prefix = formula.prefix

    def matrix(env):
        return any(all(_fo_literal(l, env, consts, interp, n) for l in c) for c in formula.clauses)

    def sat(i, env):
        if i == len(prefix):
            return matrix(env)
        q, v = prefix[i]
        vals = (sat(i + 1, {**env, v: a}) for a in range(n))
        return any(vals) if q == "exists" else all(vals)

    z: frozenset = frozenset()
    rounds = 0
    while True:
        interp[formula.relation] = z
        nz = frozenset(c for c in itertools.product(range(n), repeat=k)
                       if sat(0, dict(zip(formula.lfp_vars, c))))
        rounds += 1
        if nz == z:
            return z, rounds
        z = nz


def eval_lfp(formula: LfpFormula, structure: Structure) -> bool:
    z, _ = lfp_relation(formula, structure)
    k = len(formula.lfp_vars)
    return any((u,) * k in z for u in range(structure.size))


def simlfp_relations(system: SimLfpSystem, structure: Structure) -> dict[str, frozenset]:
    defined = system.defined()
    n = structure.size
    interp: dict[str, frozenset] = {name: rel.tuples for name, rel in structure.relations.items()}
    consts = dict(structure.constants)
    needed = {l.relation for d in system.definitions for dj in d.disjuncts for l in dj.literals
              if l.relation is not None and l.relation not in defined}
    missing = sorted(needed - set(interp))
    if missing:
        raise DiagnosticError([Diagnostic(Code.UNKNOWN_SYMBOL, f"structure does not interpret {m}")
                               for m in missing])
    _constant_map(structure, {t.name for d in system.definitions for dj in d.disjuncts
                              for l in dj.literals for t in l.args if isinstance(t, Const)})

    def disjunct_holds(dj, env):
        for witness in itertools.product(range(n), repeat=len(dj.exists)):
            inner = dict(env)
            inner.update(zip(dj.exists, witness))
            if all(_fo_literal(l, inner, consts, interp, n) for l in dj.literals):
                return True
        return False

    current = {name: frozenset() for name in defined}
    while True:
        interp.update(current)
        nxt = {}
        for d in system.definitions:
            nxt[d.relation] = frozenset(
                c for c in itertools.product(range(n), repeat=len(d.params))
                if any(disjunct_holds(dj, dict(zip(d.params, c))) for dj in d.disjuncts))
        if nxt == current:
            return current
        current = nxt


def eval_simlfp(system: SimLfpSystem, structure: Structure):
    """Joint fixed point; returns a bool for 0-ary or instantiated goals, else the relation."""
    values = simlfp_relations(system, structure)
    name, args = system.goal
    if name in values:
        rel = values[name]
        arity = len(system.defined()[name].params)
    elif name in structure.relations:
        rel = structure.relations[name].tuples
        arity = structure.relations[name].arity
    else:
        raise DiagnosticError([Diagnostic(Code.UNKNOWN_SYMBOL, f"unknown goal {name}")])
    if args is not None:
        consts = _constant_map(structure, {t.name for t in args if isinstance(t, Const)})
        if any(isinstance(t, Var) for t in args):
            raise DiagnosticError([Diagnostic(Code.UNKNOWN_SYMBOL, "goal arguments must be constants")])
        return tuple(consts[t.name] for t in args) in rel
    if arity == 0:
        return () in rel
    return Relation(arity, rel)
