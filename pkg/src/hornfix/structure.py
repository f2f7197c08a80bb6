"""Finite relational structures over the domain {0, ..., n-1}."""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Iterable, Mapping

from .ast import Vocabulary


class ArityMismatch(ValueError):
    pass


class BadPermutation(ValueError):
    pass


class ConstantOutsideSubset(ValueError):
    pass


@dataclass(frozen=True)
class Relation:
    arity: int
    tuples: frozenset = frozenset()

    def __post_init__(self):
        tuples = frozenset(tuple(t) for t in self.tuples)
        for t in tuples:
            if len(t) != self.arity:
                raise ArityMismatch(f"tuple {t} in a relation of arity {self.arity}")
        object.__setattr__(self, "tuples", tuples)

    def __iter__(self):
        return iter(self.tuples)

    def __len__(self):
        return len(self.tuples)

    def __contains__(self, t):
        return tuple(t) in self.tuples

    def sorted(self) -> list[tuple]:
        return sorted(self.tuples)

    @classmethod
    def full(cls, arity: int, n: int) -> "Relation":
        return cls(arity, frozenset(itertools.product(range(n), repeat=arity)))

    def __repr__(self):
        return f"Relation({self.arity}, {self.sorted()})"


@dataclass(frozen=True)
class Structure:
    size: int
    relations: Mapping[str, Relation] = field(default_factory=dict)
    constants: Mapping[str, int] = field(default_factory=dict)

    def __post_init__(self):
        if self.size < 0:
            raise ValueError("negative domain size")
        rels = {}
        for name, rel in self.relations.items():
            if not isinstance(rel, Relation):
                raise TypeError(f"relation {name} must be a Relation")
            for t in rel:
                if any(not 0 <= a < self.size for a in t):
                    raise ValueError(f"tuple {t} of {name} leaves the domain of size {self.size}")
            rels[name] = rel
        for name, val in self.constants.items():
            if not 0 <= val < self.size:
                raise ValueError(f"constant {name}={val} outside the domain of size {self.size}")
        object.__setattr__(self, "relations", rels)
        object.__setattr__(self, "constants", dict(self.constants))

    @property
    def vocabulary(self) -> Vocabulary:
        return Vocabulary({k: r.arity for k, r in self.relations.items()},
                          frozenset(self.constants))

    @property
    def domain(self) -> range:
        return range(self.size)

    def with_relations(self, extra: Mapping[str, Relation]) -> "Structure":
        rels = dict(self.relations)
        rels.update(extra)
        return Structure(self.size, rels, self.constants)

    def __getitem__(self, name: str) -> Relation:
        return self.relations[name]


def make_structure(size: int, relations: Mapping[str, tuple[int, Iterable]] | None = None,
                   constants: Mapping[str, int] | None = None) -> Structure:
    """Shorthand: ``make_structure(3, {"E": (2, [(0, 1)])}, {"s": 0})``."""
    rels = {name: Relation(arity, frozenset(map(tuple, tuples)))
            for name, (arity, tuples) in (relations or {}).items()}
    return Structure(size, rels, constants or {})


def _same_arity(r1: Relation, r2: Relation):
    if r1.arity != r2.arity:
        raise ArityMismatch(f"arities {r1.arity} and {r2.arity} differ")


def complement(r: Relation, n: int) -> Relation:
    return Relation(r.arity, frozenset(itertools.product(range(n), repeat=r.arity)) - r.tuples)


def intersect(r1: Relation, r2: Relation) -> Relation:
    _same_arity(r1, r2)
    return Relation(r1.arity, r1.tuples & r2.tuples)


def union(r1: Relation, r2: Relation) -> Relation:
    _same_arity(r1, r2)
    return Relation(r1.arity, r1.tuples | r2.tuples)


def permute(r: Relation, g: Iterable[int]) -> Relation:
    """Reorder positions: output tuple i-th entry is input entry ``g[i]`` (0-based)."""
    g = tuple(g)
    if sorted(g) != list(range(r.arity)):
        raise BadPermutation(f"{g} is not a permutation of {r.arity} positions")
    return Relation(r.arity, frozenset(tuple(t[i] for i in g) for t in r))


def product(r: Relation, r2: Relation) -> Relation:
    return Relation(r.arity + r2.arity, frozenset(a + b for a in r for b in r2))


def project_exists(r: Relation, k: int, n: int) -> Relation:
    """Tuples a such that b + a is in r for some k-tuple b."""
    if not 0 <= k <= r.arity:
        raise ArityMismatch(f"cannot quantify {k} of {r.arity} positions")
    return Relation(r.arity - k, frozenset(t[k:] for t in r))


def project_forall(r: Relation, k: int, n: int) -> Relation:
    """Tuples a such that b + a is in r for every k-tuple b over the domain."""
    if not 0 <= k <= r.arity:
        raise ArityMismatch(f"cannot quantify {k} of {r.arity} positions")
    counts: dict[tuple, int] = {}
    for t in r:
        counts[t[k:]] = counts.get(t[k:], 0) + 1
    need = n ** k
    return Relation(r.arity - k, frozenset(a for a, c in counts.items() if c == need))


def induced_substructure(s: Structure, subset: Iterable[int]) -> Structure:
    """Restrict to ``subset`` and renumber it to {0..|subset|-1} in increasing order."""
    keep = sorted(set(subset))
    if not keep:
        raise ValueError("substructure needs a non-empty subset")
    index = {a: i for i, a in enumerate(keep)}
    consts = {}
    for name, val in s.constants.items():
        if val not in index:
            raise ConstantOutsideSubset(f"constant {name}={val} is not kept")
        consts[name] = index[val]
    rels = {name: Relation(r.arity, frozenset(tuple(index[a] for a in t) for t in r
                                              if all(a in index for a in t)))
            for name, r in s.relations.items()}
    return Structure(len(keep), rels, consts)
