"""Trivial extensions and the substructure-closed class K' built from a class K.

A graph structure has a constant ``root``, a binary ``E``, a unary ``P`` and
any further relations ``R_i``.  Membership follows the checking steps:

1. ``E`` is acyclic,
2. the nodes reachable from ``root`` form a binary tree,
3. ``T(G)`` is the largest perfect subtree hanging from ``root``,
4. ``P`` and every ``R_i`` are saturated on ``T(G)``,
5. ``h`` is the number of leading levels of ``T(G)`` entirely marked by ``P``,

and then Condition 1 (exactly ``h + h**c`` levels, the extension levels are
blank, and K accepts the decoded first ``h`` levels) or Condition 2 (fewer
than ``h + h**c`` levels).
"""

from __future__ import annotations

import itertools
import random
from collections import deque
from dataclasses import dataclass
from graphlib import CycleError, TopologicalSorter
from typing import Callable

from .structure import Relation, Structure, induced_substructure
from .trees import PerfectTree, TreeStructure, decode, encode, is_saturated, level_nodes

KOracle = Callable[[Structure], bool]


class StructuralViolation(ValueError):
    def __init__(self, step: int, message: str):
        self.step = step
        super().__init__(f"step ({step}): {message}")


@dataclass(frozen=True)
class ExtensionParams:
    c: int = 1

    def __post_init__(self):
        if self.c < 1:
            raise ValueError("the exponent c must be at least 1")

    def extension(self, h: int) -> int:
        return h ** self.c


def trivial_extension(a: Structure, params: ExtensionParams = ExtensionParams()) -> Structure:
    """Same relations on the larger domain {0..h + h**c - 1}."""
    h = a.size
    return Structure(h + params.extension(h), a.relations, a.constants)


# ---------------------------------------------------------------------------
# demo oracles


def oracle_even(a: Structure) -> bool:
    return a.size % 2 == 0


def oracle_3col(a: Structure) -> bool:
    """3-colourability of the graph whose edges are the binary relation R1."""
    edges = a.relations.get("R1", Relation(2)).tuples
    if any(x == y for x, y in edges):
        return False
    for colours in itertools.product(range(3), repeat=a.size):
        if all(colours[x] != colours[y] for x, y in edges):
            return True
    return False


ORACLES: dict[str, KOracle] = {
    "even": oracle_even,
    "3col": oracle_3col,
    "always": lambda a: True,
    "never": lambda a: False,
}


# ---------------------------------------------------------------------------
# structural analysis


@dataclass
class TreePart:
    levels: list[list[int]]      # node ids of T(G), level by level
    heap: dict[int, int]         # node id -> heap address
    tree: TreeStructure          # T(G) with P and the R_i, heap addressed

    @property
    def level_count(self) -> int:
        return len(self.levels)


def _children(g: Structure) -> dict[int, list[int]]:
    out: dict[int, list[int]] = {v: [] for v in g.domain}
    for a, b in g.relations.get("E", Relation(2)):
        out[a].append(b)
    for v in out:
        out[v].sort()
    return out


def tree_part(g: Structure) -> TreePart:
    """Run steps (1) to (4) and return ``T(G)``; raises ``StructuralViolation``."""
    if "root" not in g.constants:
        raise StructuralViolation(2, "no root constant")
    kids = _children(g)
    try:
        tuple(TopologicalSorter({v: kids[v] for v in g.domain}).static_order())
    except CycleError:
        raise StructuralViolation(1, "E has a cycle") from None

    root = g.constants["root"]
    seen = {root}
    queue = deque([root])
    parents: dict[int, int] = {}
    while queue:
        v = queue.popleft()
        if len(kids[v]) > 2:
            raise StructuralViolation(2, f"node {v} has {len(kids[v])} children")
        for w in kids[v]:
            if w in seen:
                raise StructuralViolation(2, f"node {w} is reachable along two paths")
            seen.add(w)
            parents[w] = v
            queue.append(w)

    levels = [[root]]
    heap = {root: 0}
    while all(len(kids[v]) == 2 for v in levels[-1]):
        nxt = []
        for v in levels[-1]:
            for i, w in enumerate(kids[v]):
                heap[w] = 2 * heap[v] + 1 + i
                nxt.append(w)
        levels.append(nxt)

    tree = PerfectTree.with_levels(len(levels))
    rels = {}
    for name, r in g.relations.items():
        if name == "E":
            continue
        restricted = frozenset(tuple(heap[a] for a in t) for t in r if all(a in heap for a in t))
        rel = Relation(r.arity, restricted)
        if not is_saturated(rel, tree):
            raise StructuralViolation(4, f"{name} is not saturated on T(G)")
        rels[name] = rel
    return TreePart(levels, heap, TreeStructure(tree, rels))


def prefix_levels(t: TreeStructure, h: int, drop=("P",)) -> TreeStructure:
    """Restriction of ``t`` to its first ``h`` levels."""
    tree = PerfectTree.with_levels(h)
    rels = {name: Relation(r.arity, frozenset(x for x in r if all(a < tree.size for a in x)))
            for name, r in t.relations.items() if name not in drop}
    return TreeStructure(tree, rels)


def marked_levels(part: TreePart) -> int:
    p = part.tree.relations.get("P", Relation(1)).tuples
    h = 0
    for k in range(part.level_count):
        if all((v,) in p for v in level_nodes(k)):
            h += 1
        else:
            break
    return h


@dataclass
class Membership:
    member: bool
    condition: int | None
    h: int
    levels: int
    reason: str


def membership(g: Structure, oracle: KOracle, params: ExtensionParams = ExtensionParams()) -> Membership:
    part = tree_part(g)
    h = marked_levels(part)
    levels = part.level_count
    target = h + params.extension(h)
    if levels < target:
        return Membership(True, 2, h, levels, f"{levels} levels < {target}")
    if levels > target:
        return Membership(False, None, h, levels, f"{levels} levels > {target}")
    tail = [v for k in range(h, levels) for v in level_nodes(k)]
    p = part.tree.relations.get("P", Relation(1)).tuples
    if any((v,) in p for v in tail):
        return Membership(False, None, h, levels, "P marks a node in the extension levels")
    first_tail = 2 ** h - 1
    for name, r in part.tree.relations.items():
        if name == "P":
            continue
        if any(any(a >= first_tail for a in t) for t in r):
            return Membership(False, None, h, levels, f"{name} touches the extension levels")
    base = decode(prefix_levels(part.tree, h))
    if not oracle(base):
        return Membership(False, None, h, levels, "K rejects the decoded structure")
    return Membership(True, 1, h, levels, "K accepts the decoded structure")


def is_member(g: Structure, oracle: KOracle, params: ExtensionParams = ExtensionParams()) -> bool:
    return membership(g, oracle, params).member


# ---------------------------------------------------------------------------
# building members and testing closure


def tree_graph(t: TreeStructure) -> Structure:
    return t.to_structure()


def condition1_graph(a: Structure, params: ExtensionParams = ExtensionParams()) -> Structure:
    """Mark every element of ``a`` by ``P``, extend trivially, encode on a tree."""
    marked = a.with_relations({"P": Relation(1, frozenset((i,) for i in a.domain))})
    return tree_graph(encode(trivial_extension(marked, params)))


def add_noise(g: Structure, rng: random.Random, extra: int = 3) -> Structure:
    """Attach a partial extra level under some leaves and a few unreachable nodes."""
    part = tree_part(g)
    leaves = part.levels[-1]
    n = g.size
    edges = set(g.relations["E"].tuples)
    new_nodes = []
    for leaf in rng.sample(leaves, k=min(len(leaves), rng.randint(0, 2))):
        new_nodes.append(n)
        edges.add((leaf, n))
        n += 1
    unreachable = list(range(n, n + rng.randint(0, extra)))
    n += len(unreachable)
    for i, u in enumerate(unreachable):
        if i and rng.random() < 0.5:
            edges.add((unreachable[i - 1], u))
    rels = dict(g.relations)
    rels["E"] = Relation(2, frozenset(edges))
    p = set(rels.get("P", Relation(1)).tuples)
    for v in new_nodes + unreachable:
        if rng.random() < 0.5:
            p.add((v,))
    rels["P"] = Relation(1, frozenset(p))
    return Structure(n, rels, g.constants)


@dataclass
class ClosureReport:
    samples: int
    members: int
    failures: list[tuple[int, ...]]

    @property
    def ok(self) -> bool:
        return self.members == self.samples


def closure_test(g: Structure, oracle: KOracle, samples: int, rng: random.Random,
                 params: ExtensionParams = ExtensionParams()) -> ClosureReport:
    """Sample induced substructures that keep ``root`` and check each stays in K'."""
    if not is_member(g, oracle, params):
        raise ValueError("closure testing needs a member of K'")
    root = g.constants["root"]
    others = [v for v in g.domain if v != root]
    members, failures = 0, []
    for _ in range(samples):
        keep = {root} | {v for v in others if rng.random() < rng.choice((0.3, 0.7, 0.95))}
        h = induced_substructure(g, keep)
        try:
            ok = is_member(h, oracle, params)
        except StructuralViolation:
            ok = False
        if ok:
            members += 1
        else:
            failures.append(tuple(sorted(keep)))
    return ClosureReport(samples, members, failures)
