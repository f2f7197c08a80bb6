"""Perfect binary trees and the depth-based encodings of structures.

Nodes are heap addressed: the root is 0 and node ``i`` has children ``2i+1``
and ``2i+2``.  A tree with ``levels`` levels has ``2**levels - 1`` nodes and
depth ``levels - 1``.  A structure with domain {0..h-1} is encoded on the tree
with ``h`` levels, element ``k`` standing for level ``k``.

The characteristic tuple of nodes ``(a_1..a_r)`` lists, row by row, the depth
of ``a_i`` followed by the depths of ``lca(a_i, a_j)`` for ``j > i``.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Iterable, Mapping, Sequence

from .structure import Relation, Structure

AUTOMORPHISM_DEPTH_LIMIT = 3


class DepthTooLarge(ValueError):
    pass


class NotSaturated(ValueError):
    pass


class NotInvariant(ValueError):
    pass


class MalformedLength(ValueError):
    pass


class NotAPerfectTree(ValueError):
    pass


class EncodingError(ValueError):
    pass


# ---------------------------------------------------------------------------
# node arithmetic


def depth(v: int) -> int:
    return (v + 1).bit_length() - 1


def parent(v: int) -> int:
    if v == 0:
        raise ValueError("the root has no parent")
    return (v - 1) // 2


def lca(a: int, b: int) -> int:
    da, db = depth(a), depth(b)
    while da > db:
        a, da = (a - 1) // 2, da - 1
    while db > da:
        b, db = (b - 1) // 2, db - 1
    while a != b:
        a, b = (a - 1) // 2, (b - 1) // 2
    return a


def level_nodes(k: int) -> range:
    return range(2 ** k - 1, 2 ** (k + 1) - 1)


@dataclass(frozen=True)
class PerfectTree:
    depth: int

    def __post_init__(self):
        if self.depth < 0:
            raise ValueError("tree depth must be non-negative")

    @classmethod
    def with_levels(cls, levels: int) -> "PerfectTree":
        if levels < 1:
            raise ValueError("a tree has at least one level")
        return cls(levels - 1)

    @property
    def levels(self) -> int:
        return self.depth + 1

    @property
    def size(self) -> int:
        return 2 ** (self.depth + 1) - 1

    @property
    def nodes(self) -> range:
        return range(self.size)

    def level(self, k: int) -> range:
        return level_nodes(k)

    def children(self, v: int) -> tuple[int, ...]:
        if depth(v) >= self.depth:
            return ()
        return (2 * v + 1, 2 * v + 2)

    def internal_nodes(self) -> range:
        return range(2 ** self.depth - 1)

    def edges(self) -> frozenset:
        return frozenset((v, c) for v in self.internal_nodes() for c in (2 * v + 1, 2 * v + 2))

    def edge_relation(self) -> Relation:
        return Relation(2, self.edges())

    def equality_relation(self) -> Relation:
        return Relation(2, frozenset((v, v) for v in self.nodes))


# ---------------------------------------------------------------------------
# characteristic tuples


def triangular(r: int) -> int:
    return r * (r + 1) // 2


def arity_of_length(length: int) -> int:
    r = 0
    while triangular(r) < length:
        r += 1
    if triangular(r) != length:
        raise MalformedLength(f"length {length} is not triangular")
    return r


def pair_index(i: int, j: int, r: int) -> int:
    """Position of the entry for nodes ``i <= j`` (0-based) in a char tuple of arity ``r``."""
    if i > j:
        i, j = j, i
    if not 0 <= i <= j < r:
        raise IndexError(f"pair ({i},{j}) out of range for arity {r}")
    return i * r - i * (i - 1) // 2 + (j - i)


def char_tuple(nodes: Sequence[int]) -> tuple[int, ...]:
    nodes = tuple(nodes)
    out = []
    for i, a in enumerate(nodes):
        out.append(depth(a))
        for b in nodes[i + 1:]:
            out.append(depth(lca(a, b)))
    return tuple(out)


def diagonal(e: Sequence[int]) -> tuple[int, ...]:
    r = arity_of_length(len(e))
    return tuple(e[pair_index(i, i, r)] for i in range(r))


def sub_tuple(e: Sequence[int], indices: Sequence[int]) -> tuple[int, ...]:
    """Characteristic layout restricted to the given positions, kept in order."""
    r = arity_of_length(len(e))
    idx = sorted(indices)
    out = []
    for a, i in enumerate(idx):
        for j in idx[a:]:
            out.append(e[pair_index(i, j, r)])
    return tuple(out)


@lru_cache(maxsize=None)
def _class_sizes(tree_depth: int, arity: int) -> dict:
    sizes: dict[tuple, int] = {}
    for t in itertools.product(range(2 ** (tree_depth + 1) - 1), repeat=arity):
        key = char_tuple(t)
        sizes[key] = sizes.get(key, 0) + 1
    return sizes


@lru_cache(maxsize=None)
def _depth_class_sizes(tree_depth: int, arity: int) -> dict:
    sizes = {}
    for dv in itertools.product(range(tree_depth + 1), repeat=arity):
        count = 1
        for d in dv:
            count *= 2 ** d
        sizes[dv] = count
    return sizes


def characteristic_tuples(tree: PerfectTree, arity: int) -> frozenset:
    return frozenset(_class_sizes(tree.depth, arity))


# ---------------------------------------------------------------------------
# automorphisms and invariance


def enumerate_automorphisms(tree: PerfectTree, max_depth: int = AUTOMORPHISM_DEPTH_LIMIT):
    """Every automorphism as a tuple ``f`` with ``f[v]`` the image of ``v``.

    Each one is fixed by the set of internal nodes whose subtrees are swapped,
    so there are ``2**(number of internal nodes)`` of them.
    """
    if tree.depth > max_depth:
        raise DepthTooLarge(f"automorphism enumeration is limited to depth {max_depth}")
    internal = list(tree.internal_nodes())
    out = []
    for flips in itertools.product((False, True), repeat=len(internal)):
        f = [0] * tree.size
        for v in internal:
            w = f[v]
            a, b = 2 * v + 1, 2 * v + 2
            ca, cb = 2 * w + 1, 2 * w + 2
            if flips[v]:
                ca, cb = cb, ca
            f[a], f[b] = ca, cb
        out.append(tuple(f))
    return out


def apply_map(f: Sequence[int], r: Relation) -> Relation:
    return Relation(r.arity, frozenset(tuple(f[a] for a in t) for t in r))


def is_invariant_by_automorphisms(r: Relation, tree: PerfectTree,
                                  max_depth: int = AUTOMORPHISM_DEPTH_LIMIT) -> bool:
    return all(apply_map(f, r) == r for f in enumerate_automorphisms(tree, max_depth))


def is_invariant_by_characteristic(r: Relation, tree: PerfectTree) -> bool:
    """Membership is constant on every class of equal characteristic tuples."""
    counts: dict[tuple, int] = {}
    for t in r:
        key = char_tuple(t)
        counts[key] = counts.get(key, 0) + 1
    sizes = _class_sizes(tree.depth, r.arity)
    return all(sizes[k] == c for k, c in counts.items())


def is_invariant(r: Relation, tree: PerfectTree, method: str = "characteristic") -> bool:
    _check_nodes(r, tree)
    if method == "automorphisms":
        return is_invariant_by_automorphisms(r, tree)
    if method == "characteristic":
        return is_invariant_by_characteristic(r, tree)
    raise ValueError(f"unknown method {method!r}")


def is_saturated(r: Relation, tree: PerfectTree) -> bool:
    _check_nodes(r, tree)
    counts: dict[tuple, int] = {}
    for t in r:
        key = tuple(depth(a) for a in t)
        counts[key] = counts.get(key, 0) + 1
    sizes = _depth_class_sizes(tree.depth, r.arity)
    return all(sizes[k] == c for k, c in counts.items())


def char_relation_of(r: Relation, tree: PerfectTree, verify: bool = True) -> Relation:
    """``R*``, the set of characteristic tuples of members of ``r``."""
    if verify and not is_invariant_by_characteristic(r, tree):
        raise NotInvariant("relation is not invariant under tree automorphisms")
    return Relation(triangular(r.arity), frozenset(char_tuple(t) for t in r))


def _check_nodes(r: Relation, tree: PerfectTree):
    for t in r:
        if any(not 0 <= a < tree.size for a in t):
            raise ValueError(f"tuple {t} leaves a tree of {tree.size} nodes")


# ---------------------------------------------------------------------------
# tree structures and the encodings


@dataclass(frozen=True)
class TreeStructure:
    tree: PerfectTree
    relations: Mapping[str, Relation] = field(default_factory=dict)

    def __post_init__(self):
        object.__setattr__(self, "relations", dict(self.relations))
        for name, rel in self.relations.items():
            if name in ("E", "root"):
                raise EncodingError(f"{name} is reserved for the tree itself")
            _check_nodes(rel, self.tree)

    def to_structure(self) -> Structure:
        rels = dict(self.relations)
        rels["E"] = self.tree.edge_relation()
        return Structure(self.tree.size, rels, {"root": 0})

    @classmethod
    def from_structure(cls, s: Structure) -> "TreeStructure":
        levels = (s.size + 1).bit_length() - 1
        if s.size < 1 or 2 ** levels - 1 != s.size:
            raise NotAPerfectTree(f"{s.size} nodes cannot form a perfect binary tree")
        tree = PerfectTree.with_levels(levels)
        if "E" not in s.relations or s.relations["E"].tuples != tree.edges():
            raise NotAPerfectTree("E must be the heap-ordered edge relation of a perfect tree")
        if s.constants.get("root", 0) != 0:
            raise NotAPerfectTree("root must be node 0")
        extra = set(s.constants) - {"root"}
        if extra:
            raise NotAPerfectTree(f"unexpected constants {sorted(extra)}")
        return cls(tree, {k: v for k, v in s.relations.items() if k != "E"})


def encode(a: Structure) -> TreeStructure:
    """Lift every relation of ``a`` from elements to the levels of a tree."""
    if a.constants:
        raise EncodingError("structures with constants cannot be encoded on a tree")
    if a.size < 1:
        raise EncodingError("cannot encode an empty domain")
    tree = PerfectTree.with_levels(a.size)
    rels = {}
    for name, r in a.relations.items():
        tuples = set()
        for dv in r:
            tuples.update(itertools.product(*(level_nodes(d) for d in dv)))
        rels[name] = Relation(r.arity, frozenset(tuples))
    return TreeStructure(tree, rels)


def decode(t: TreeStructure) -> Structure:
    """``C^{-1}(T)``: one element per level, relations read off through node depths."""
    rels = {}
    for name, r in t.relations.items():
        if not is_saturated(r, t.tree):
            raise NotSaturated(f"{name} is not saturated")
        rels[name] = Relation(r.arity, frozenset(tuple(depth(a) for a in tup) for tup in r))
    return Structure(t.tree.levels, rels, {})


# ---------------------------------------------------------------------------
# deciders for the numeric relations


def decide_neq(e1: int, e2: int, e3: int) -> bool:
    if e1 == e3:
        return e2 < e1
    return e2 <= min(e1, e3)


def decide_nege(e1: int, e2: int, e3: int) -> bool:
    if e1 >= e3:
        return e2 <= e3
    if e1 + 1 == e3:
        return e2 < e1
    return e2 <= e1


def _split(e: Sequence[int]):
    n = arity_of_length(len(e))
    diag = [e[pair_index(i, i, n)] for i in range(n)]

    def pair(i, j):
        return e[pair_index(i, j, n)]

    k1 = min(diag)
    k2 = min(pair(i, j) for i in range(n) for j in range(i + 1, n))
    return n, diag, pair, k1, k2


def _partition(n, diag, pair, k1, k2):
    """Index sets ``(S, S_l, S_r)`` for the two cases of the procedure."""
    if k1 == k2:
        S = [i for i in range(n) if diag[i] == k1]
        rest = [i for i in range(n) if diag[i] != k1]
        if not rest:
            return S, [], []
        s = rest[0]
        left = [s] + [i for i in rest if i != s and pair(s, i) > k1]
        right = [i for i in rest if i != s and pair(s, i) == k1]
        return S, sorted(left), right
    left = [0] + [i for i in range(1, n) if pair(0, i) > k2]
    right = [i for i in range(1, n) if pair(0, i) == k2]
    return [], left, right


def pre_check(e: Sequence[int]) -> bool:
    """Necessary conditions on a candidate characteristic tuple."""
    n = arity_of_length(len(e))
    if n <= 1:
        return True
    n, diag, pair, k1, k2 = _split(e)
    if k1 < k2:
        return False
    S, left, right = _partition(n, diag, pair, k1, k2)
    kappa = k1 if k1 == k2 else k2

    def any_pair(xs, ys, bad):
        return any(bad(pair(i, j)) for i in xs for j in ys if i != j)

    if k1 == k2:
        if any_pair(S, S, lambda v: v != kappa):
            return False
        if any_pair(S, left + right, lambda v: v != kappa):
            return False
    if any_pair(left, left, lambda v: v == kappa):
        return False
    if any_pair(right, right, lambda v: v == kappa):
        return False
    if any_pair(left, right, lambda v: v != kappa):
        return False
    return True


def check(e: Sequence[int]) -> bool:
    """Decide whether ``e`` is the characteristic tuple of some node tuple."""
    n = arity_of_length(len(e))
    if n <= 1:
        return True
    if not pre_check(e):
        return False
    n, diag, pair, k1, k2 = _split(e)
    _, left, right = _partition(n, diag, pair, k1, k2)
    if not check(sub_tuple(e, left)):
        return False
    return check(sub_tuple(e, right))


def decide_char_relation(base: Relation, e: Sequence[int]) -> bool:
    """Membership of ``e`` in ``R*`` given the decoded relation ``base`` of ``R``."""
    if not check(e):
        return False
    return diagonal(e) in base


# ---------------------------------------------------------------------------
# the numeric structure S_T


def ful_name(m: int) -> str:
    return f"FUL{m}"


def star(name: str) -> str:
    return name + "*"


def neg_star(name: str) -> str:
    return "~" + name + "*"


def sigma_structure(t: TreeStructure, m: int, method: str = "enumerate") -> Structure:
    """``S_T`` over the levels {0..h-1}.

    ``method="enumerate"`` collects characteristic tuples of actual node
    tuples; ``method="decide"`` tests every candidate with the deciders and
    CHECK instead.  Both give the same structure.
    """
    if m < 0:
        raise ValueError("m must be non-negative")
    tree = t.tree
    h = tree.levels
    rels: dict[str, Relation] = {
        "SUCC": Relation(2, frozenset((i, i + 1) for i in range(h - 1))),
    }
    if method == "enumerate":
        nodes = tree.nodes
        edges = tree.edges()
        pairs = [(a, b) for a in nodes for b in nodes]
        rels["R_neq"] = Relation(3, frozenset(char_tuple(p) for p in pairs if p[0] != p[1]))
        rels["R_nege"] = Relation(3, frozenset(char_tuple(p) for p in pairs if p not in edges))
        rels[star(ful_name(m))] = Relation(triangular(m), characteristic_tuples(tree, m))
        for name, r in t.relations.items():
            rels[star(name)] = char_relation_of(r, tree)
            comp = frozenset(itertools.product(nodes, repeat=r.arity)) - r.tuples
            rels[neg_star(name)] = char_relation_of(Relation(r.arity, comp), tree)
    elif method == "decide":
        triples = list(itertools.product(range(h), repeat=3))
        rels["R_neq"] = Relation(3, frozenset(x for x in triples if decide_neq(*x)))
        rels["R_nege"] = Relation(3, frozenset(x for x in triples if decide_nege(*x)))
        rels[star(ful_name(m))] = Relation(triangular(m), frozenset(
            e for e in itertools.product(range(h), repeat=triangular(m)) if check(e)))
        base = decode(t)
        for name, r in t.relations.items():
            cands = [e for e in itertools.product(range(h), repeat=triangular(r.arity)) if check(e)]
            b = base.relations[name]
            rels[star(name)] = Relation(triangular(r.arity), frozenset(e for e in cands if diagonal(e) in b))
            rels[neg_star(name)] = Relation(triangular(r.arity),
                                            frozenset(e for e in cands if diagonal(e) not in b))
    else:
        raise ValueError(f"unknown method {method!r}")
    return Structure(h, rels, {"0": 0})


def brute_force_char_tuples(levels: int, arity: int) -> frozenset:
    """Every characteristic tuple realised by ``arity`` nodes of a tree with ``levels`` levels."""
    return characteristic_tuples(PerfectTree.with_levels(levels), arity)


def realised_in(e: Iterable[int]) -> bool:
    e = tuple(e)
    r = arity_of_length(len(e))
    levels = max(e, default=0) + 1
    return e in brute_force_char_tuples(levels, r)
