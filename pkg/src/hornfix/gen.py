"""Seeded random instances for the oracle suites and property tests.

Every generator takes a ``random.Random`` so runs are reproducible.
"""

from __future__ import annotations

import itertools
import random
from functools import lru_cache

from .ast import (
    Clause, Const, HornSentence, Kind, LfpFormula, Literal, Program, Rule, Var, Vocabulary,
)
from .kprime import ExtensionParams, add_noise, condition1_graph, ORACLES
from .structure import Relation, Structure
from .trees import PerfectTree, TreeStructure, char_tuple, level_nodes

VARS = ("x", "y", "z", "w")


def random_relation(rng: random.Random, arity: int, n: int, density: float | None = None) -> Relation:
    density = rng.random() if density is None else density
    return Relation(arity, frozenset(t for t in itertools.product(range(n), repeat=arity)
                                     if rng.random() < density))


def random_structure(rng: random.Random, n: int, relations: dict[str, int],
                     constants=(), density: float | None = None) -> Structure:
    rels = {name: random_relation(rng, a, n, density) for name, a in sorted(relations.items())}
    return Structure(n, rels, {c: rng.randrange(n) for c in constants})


# ---------------------------------------------------------------------------
# AGAP


AGAP_TEXT = """\
const s, t.
Palt(x,y) :- x = y.
Palt(x,y) :- !Puni(x), E(x,z), Palt(z,y).
Palt(x,y) :- Puni(x), forall z: Q(x,z,y).
Q(x,z,y) :- !E(x,z), y = y.
Q(x,z,y) :- Palt(z,y), x = x.
P() :- Palt(s,t).
goal P.
"""


def random_agap(rng: random.Random, max_nodes: int = 8) -> Structure:
    n = rng.randint(1, max_nodes)
    p = rng.choice((0.15, 0.3, 0.5))
    edges = frozenset((a, b) for a in range(n) for b in range(n) if rng.random() < p)
    uni = frozenset((a,) for a in range(n) if rng.random() < 0.5)
    return Structure(n, {"E": Relation(2, edges), "Puni": Relation(1, uni)},
                     {"s": rng.randrange(n), "t": rng.randrange(n)})


def agap_oracle(g: Structure) -> bool:
    """Alternating reachability by memoised recursion on the path rank."""
    n = g.size
    succ = {v: [b for a, b in g.relations["E"] if a == v] for v in range(n)}
    uni = {a for (a,) in g.relations["Puni"]}
    target = g.constants["t"]

    @lru_cache(maxsize=None)
    def alt(x: int, k: int) -> bool:
        if x == target:
            return True
        if k == 0:
            return False
        if x in uni:
            return all(alt(z, k - 1) for z in succ[x])
        return any(alt(z, k - 1) for z in succ[x])

    return alt(g.constants["s"], n)


# ---------------------------------------------------------------------------
# DATALOG^r programs


def _pick_vars(rng, k, pool=VARS):
    return [rng.choice(pool) for _ in range(k)]


def random_program(rng: random.Random, ext: dict[str, int] | None = None,
                   max_rules: int = 5, constants=(), allow_forall: bool = True,
                   normal_heads: bool = False, pool=VARS) -> Program:
    """A valid DATALOG^r program with a 0-ary goal ``G``."""
    ext = dict(ext if ext is not None else {"E": 2, "S": 1})
    intentional = {"G": 0}
    for name in ("A", "B", "C")[:rng.randint(1, 3)]:
        intentional[name] = rng.randint(1, 2)
    names = sorted(intentional)
    rules = []

    def term(force_var=False):
        if constants and not force_var and rng.random() < 0.15:
            return Const(rng.choice(constants))
        return Var(rng.choice(pool))

    def literal():
        roll = rng.random()
        if roll < 0.35:
            name = rng.choice(sorted(ext))
            kind = Kind.NEG if rng.random() < 0.3 else Kind.POS
            return Literal(kind, name, tuple(term() for _ in range(ext[name])))
        if roll < 0.65:
            name = rng.choice(names)
            return Literal(Kind.POS, name, tuple(term() for _ in range(intentional[name])))
        if roll < 0.85 or not allow_forall:
            kind = Kind.EQ if rng.random() < 0.5 else Kind.NEQ
            return Literal(kind, None, (term(), term()))
        cands = [nm for nm in names if intentional[nm] > 0]
        name = rng.choice(cands)
        ar = intentional[name]
        args = [term() for _ in range(ar)]
        pos = rng.randrange(ar)
        bound = "$b" if "$b" not in pool else "$c"
        args[pos] = Var(bound)
        return Literal(Kind.FORALL, name, tuple(args), (bound,))

    for _ in range(rng.randint(1, max_rules)):
        head = rng.choice(names)
        if normal_heads:
            args = tuple(Var(v) for v in rng.sample(pool, intentional[head]))
        else:
            args = tuple(term() for _ in range(intentional[head]))
        body = tuple(literal() for _ in range(rng.randint(0, 3)))
        rules.append(Rule(head, args, body))
    # keep every intentional symbol defined so the partition is stable
    defined = {r.head for r in rules}
    for name in names:
        if name not in defined:
            args = tuple(Var(v) for v in pool[:intentional[name]])
            rules.append(Rule(name, args, (literal(),)))
    rels = dict(ext)
    rels.update(intentional)
    prog = Program.from_rules(rules, constants=constants, relations=rels, goal="G")
    return prog


# ---------------------------------------------------------------------------
# SO-HORN^r sentences


def random_horn(rng: random.Random, ext: dict[str, int] | None = None,
                max_so: int = 2, max_arity: int = 2, max_clauses: int = 4) -> HornSentence:
    ext = dict(ext if ext is not None else {"E": 2, "S": 1})
    so = [(name, rng.randint(1, max_arity)) for name in ("R", "T")[:rng.randint(1, max_so)]]
    pool = ("x", "y", "z")[:rng.randint(1, 3)]
    so_arity = dict(so)

    def atom(name, arity):
        return tuple(Var(rng.choice(pool)) for _ in range(arity))

    def alpha():
        name, ar = rng.choice(so)
        args = list(atom(name, ar))
        if rng.random() < 0.25:
            args[rng.randrange(ar)] = Var("u")
            return Literal(Kind.FORALL, name, tuple(args), ("u",))
        return Literal(Kind.POS, name, tuple(args))

    def beta():
        if rng.random() < 0.7:
            name = rng.choice(sorted(ext))
            kind = Kind.NEG if rng.random() < 0.3 else Kind.POS
            return Literal(kind, name, atom(name, ext[name]))
        kind = Kind.EQ if rng.random() < 0.5 else Kind.NEQ
        return Literal(kind, None, atom(None, 2))

    clauses = []
    for _ in range(rng.randint(1, max_clauses)):
        alphas = tuple(alpha() for _ in range(rng.randint(0, 2)))
        betas = tuple(beta() for _ in range(rng.randint(0, 2)))
        if rng.random() < 0.3:
            head = None
        else:
            name, ar = rng.choice(so)
            head = Literal(Kind.POS, name, atom(name, ar))
        clauses.append(Clause(alphas, betas, head))
    used = []
    for c in clauses:
        for v in c.variables():
            if v not in used:
                used.append(v)
    fo = tuple(v for v in pool if v in used)
    seen = {lit.relation for c in clauses for lit in c.betas if lit.relation is not None}
    vocab = Vocabulary({k: a for k, a in ext.items() if k in seen}, frozenset())
    return HornSentence(tuple(so), fo, tuple(clauses), vocab)


# ---------------------------------------------------------------------------
# normal-form LFP formulas


def random_lfp(rng: random.Random, ext: dict[str, int] | None = None) -> LfpFormula:
    ext = dict(ext if ext is not None else {"E": 2, "S": 1})
    k = rng.randint(1, 2)
    zs = ("z1", "z2")[:k]
    m = rng.randint(0, 2)
    ys = ("y1", "y2")[:m]
    prefix = tuple((rng.choice(("exists", "forall")), y) for y in ys)
    pool = zs + ys

    def lit():
        roll = rng.random()
        if roll < 0.45:
            name = rng.choice(sorted(ext))
            kind = Kind.NEG if rng.random() < 0.3 else Kind.POS
            return Literal(kind, name, tuple(Var(rng.choice(pool)) for _ in range(ext[name])))
        if roll < 0.75:
            return Literal(Kind.POS, "Z", tuple(Var(rng.choice(pool)) for _ in range(k)))
        kind = Kind.EQ if rng.random() < 0.6 else Kind.NEQ
        return Literal(kind, None, (Var(rng.choice(pool)), Var(rng.choice(pool))))

    clauses = tuple(tuple(lit() for _ in range(rng.randint(1, 3))) for _ in range(rng.randint(0, 3)))
    return LfpFormula("u", zs, "Z", prefix, clauses, ("u",) * k)


TC_LFP_TEXT = "exists u [lfp z1 z2, Z: exists w (z1 = z2 | E(z1,w) & Z(w,z2))] (u,u)\n"


# ---------------------------------------------------------------------------
# trees


def random_invariant(rng: random.Random, tree: PerfectTree, arity: int) -> Relation:
    """Union of randomly chosen classes of equal characteristic tuples."""
    classes: dict[tuple, list] = {}
    for t in itertools.product(tree.nodes, repeat=arity):
        classes.setdefault(char_tuple(t), []).append(t)
    p = rng.random()
    tuples = set()
    for key in sorted(classes):
        if rng.random() < p:
            tuples.update(classes[key])
    return Relation(arity, frozenset(tuples))


def random_saturated(rng: random.Random, tree: PerfectTree, arity: int) -> Relation:
    p = rng.random()
    tuples = set()
    for dv in itertools.product(range(tree.levels), repeat=arity):
        if rng.random() < p:
            tuples.update(itertools.product(*(level_nodes(d) for d in dv)))
    return Relation(arity, frozenset(tuples))


def random_tree_program(rng: random.Random) -> Program:
    """Program over the tree vocabulary {root, E, S/1, B/2} with at most one universal atom."""
    ext = {"E": 2, "S": 1, "B": 2}
    intentional = {"G": 0, "X": rng.randint(1, 2), "Y": rng.randint(1, 2)}
    names = sorted(intentional)
    pool = ("x", "y", "z")
    used_forall = False
    rules = []

    def term():
        if rng.random() < 0.1:
            return Const("root")
        return Var(rng.choice(pool))

    def literal():
        nonlocal used_forall
        roll = rng.random()
        if roll < 0.45:
            name = rng.choice(sorted(ext))
            kind = Kind.NEG if rng.random() < 0.3 else Kind.POS
            return Literal(kind, name, tuple(term() for _ in range(ext[name])))
        if roll < 0.7:
            name = rng.choice([n for n in names if n != "G"] + ["G"] * 0)
            return Literal(Kind.POS, name, tuple(term() for _ in range(intentional[name])))
        if roll < 0.88 or used_forall:
            kind = Kind.EQ if rng.random() < 0.5 else Kind.NEQ
            return Literal(kind, None, (term(), term()))
        used_forall = True
        name = rng.choice(["X", "Y"])
        ar = intentional[name]
        args = [term() for _ in range(ar)]
        args[rng.randrange(ar)] = Var("v")
        return Literal(Kind.FORALL, name, tuple(args), ("v",))

    for _ in range(rng.randint(2, 5)):
        head = rng.choice(names)
        args = tuple(Var(v) for v in rng.sample(pool, intentional[head]))
        body = tuple(literal() for _ in range(rng.randint(1, 3)))
        rules.append(Rule(head, args, body))
    defined = {r.head for r in rules}
    for name in names:
        if name not in defined:
            args = tuple(Var(v) for v in pool[:intentional[name]])
            rules.append(Rule(name, args, (literal(),)))
    rels = dict(ext)
    rels.update(intentional)
    return Program.from_rules(rules, constants=("root",), relations=rels, goal="G")


def random_tree_base(rng: random.Random, max_n: int = 3) -> Structure:
    n = rng.randint(1, max_n)
    return random_structure(rng, n, {"S": 1, "B": 2})


# ---------------------------------------------------------------------------
# K' members


def random_kprime_member(rng: random.Random, oracle_name: str,
                         params: ExtensionParams = ExtensionParams()):
    """A member of K' for the named oracle, via Condition 1 when possible."""
    oracle = ORACLES[oracle_name]
    for _ in range(50):
        h = rng.randint(1, 3)
        a = random_structure(rng, h, {"R1": 2})
        if oracle(a):
            g = condition1_graph(a, params)
            return add_noise(g, rng)
    # Condition 2: a perfect tree with too few levels, first level marked
    levels = rng.randint(1, 2)
    tree = PerfectTree.with_levels(levels)
    t = TreeStructure(tree, {"P": Relation(1, frozenset((v,) for v in tree.nodes)),
                             "R1": Relation(2)})
    return add_noise(t.to_structure(), rng)
