"""Oracle suites comparing every engine and translation with an independent check.

Each suite is a function ``suite(rng, ...) -> SuiteResult``.  ``run_all``
feeds them from one fixed seed and prints counts only, so repeated runs
produce byte-identical text.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass, field

from . import gen
from .ast import Program, normalize
from .engine import eval_datalog, eval_horn, eval_lfp, eval_simlfp
from .kprime import ORACLES, closure_test, is_member
from .parser import (
    format_horn, format_lfp, format_program, format_structure, parse_horn, parse_lfp,
    parse_program, parse_structure,
)
from .pistar import verify_compilation
from .structure import (
    complement, intersect, permute, product, project_exists, project_forall, union,
)
from .translate import datalog_to_horn, datalog_to_simlfp, horn_to_datalog, lfp_to_datalog
from .trees import (
    PerfectTree, brute_force_char_tuples, char_tuple, check, decide_neq, decide_nege, decode,
    encode, is_invariant, sigma_structure,
)

DEFAULT_SEED = 20240607
HORN_BITS_LIMIT = 20


@dataclass
class SuiteResult:
    name: str
    passed: int
    total: int
    failures: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return self.passed == self.total

    def line(self) -> str:
        return f"{self.name:<14} {self.passed:>6}/{self.total:<6} {'pass' if self.ok else 'FAIL'}"


class _Tally:
    def __init__(self, name):
        self.result = SuiteResult(name, 0, 0)

    def __call__(self, ok: bool, info=None):
        self.result.total += 1
        if ok:
            self.result.passed += 1
        elif len(self.result.failures) < 5:
            self.result.failures.append(info)


def _horn_bits(sentence, n):
    return sum(n ** a for _, a in sentence.so_vars)


# ---------------------------------------------------------------------------


def suite_agap(rng: random.Random, count: int = 200) -> SuiteResult:
    tally = _Tally("agap")
    program = parse_program(gen.AGAP_TEXT)
    for i in range(count):
        g = gen.random_agap(rng)
        res, _ = eval_datalog(program, g)
        tally(res.goal_holds == gen.agap_oracle(g), i)
    return tally.result


def suite_horn(rng: random.Random, count: int = 200) -> SuiteResult:
    """Brute-force SO check against the fixed-point engine, plus the way back."""
    tally = _Tally("horn")
    for i in range(count):
        sentence = gen.random_horn(rng)
        a = gen.random_structure(rng, rng.randint(1, 3), {"E": 2, "S": 1})
        truth = eval_horn(sentence, a)
        program, goal = horn_to_datalog(sentence)
        res, _ = eval_datalog(program, a, goal)
        back = datalog_to_horn(program, goal)
        ok = truth != res.goal_holds and eval_horn(back, a) == truth
        ok = ok and parse_horn(format_horn(sentence)) == sentence
        tally(ok, i)
    return tally.result


def suite_datalog_to_horn(rng: random.Random, count: int = 100) -> SuiteResult:
    tally = _Tally("datalog-horn")
    done = 0
    while done < count:
        program = gen.random_program(rng)
        a = gen.random_structure(rng, rng.randint(1, 2), {"E": 2, "S": 1})
        sentence = datalog_to_horn(program)
        if _horn_bits(sentence, a.size) > HORN_BITS_LIMIT:
            continue
        done += 1
        res, _ = eval_datalog(program, a)
        tally(eval_horn(sentence, a) != res.goal_holds, done)
    return tally.result


def suite_lfp(rng: random.Random, formulas: int = 20, structures: int = 100) -> SuiteResult:
    tally = _Tally("lfp")
    for i in range(formulas):
        f = gen.random_lfp(rng)
        program, goal = lfp_to_datalog(f)
        for j in range(structures):
            a = gen.random_structure(rng, rng.randint(1, 5), {"E": 2, "S": 1})
            res, _ = eval_datalog(program, a, goal)
            tally(eval_lfp(f, a) == res.goal_holds, (i, j))
    return tally.result


def suite_simlfp(rng: random.Random, count: int = 100) -> SuiteResult:
    tally = _Tally("simlfp")
    for i in range(count):
        program = gen.random_program(rng)
        a = gen.random_structure(rng, rng.randint(1, 4), {"E": 2, "S": 1})
        res, _ = eval_datalog(program, a)
        tally(eval_simlfp(datalog_to_simlfp(program), a) == res.goal_holds, i)
    return tally.result


def suite_normalize(rng: random.Random, count: int = 100) -> SuiteResult:
    tally = _Tally("normalize")
    for i in range(count):
        program = gen.random_program(rng, constants=("c",))
        normal = Program(program.vocabulary, tuple(normalize(r) for r in program.rules),
                         program.goal)
        a = gen.random_structure(rng, rng.randint(1, 3), {"E": 2, "S": 1}, constants=("c",))
        r1, _ = eval_datalog(program, a)
        r2, _ = eval_datalog(normal, a)
        ok = all(r1.structure.relations[p] == r2.structure.relations[p] for p in program.intentional)
        tally(ok and all(r.is_normal for r in normal.rules), i)
    return tally.result


def suite_roundtrip(rng: random.Random, count: int = 100) -> SuiteResult:
    tally = _Tally("roundtrip")
    for i in range(count):
        program = gen.random_program(rng, constants=("c",))
        f = gen.random_lfp(rng)
        s = gen.random_structure(rng, rng.randint(1, 4), {"E": 2, "S": 1}, constants=("c",))
        ok = parse_program(format_program(program)) == program
        ok = ok and parse_lfp(format_lfp(f)) == f
        ok = ok and parse_structure(format_structure(s)) == s
        tally(ok, i)
    return tally.result


def suite_check(max_entry: int = 4, max_arity: int = 3) -> SuiteResult:
    tally = _Tally("check")
    for r in range(max_arity + 1):
        truth = brute_force_char_tuples(max_entry + 1, r)
        for e in itertools.product(range(max_entry + 1), repeat=r * (r + 1) // 2):
            tally(check(e) == (e in truth), e)
    return tally.result


def suite_deciders(max_entry: int = 4) -> SuiteResult:
    """Both deciders against relations enumerated from actual node pairs."""
    tally = _Tally("deciders")
    tree = PerfectTree.with_levels(max_entry + 1)
    edges = tree.edges()
    pairs = list(itertools.product(tree.nodes, repeat=2))
    neq = {char_tuple(p) for p in pairs if p[0] != p[1]}
    nege = {char_tuple(p) for p in pairs if p not in edges}
    for e in itertools.product(range(max_entry + 1), repeat=3):
        tally(decide_neq(*e) == (e in neq), ("neq", e))
        tally(decide_nege(*e) == (e in nege), ("nege", e))
    return tally.result


def _both_invariant(r, tree) -> tuple[bool, bool]:
    return (is_invariant(r, tree, "characteristic"), is_invariant(r, tree, "automorphisms"))


def suite_closure(rng: random.Random, count: int = 100) -> SuiteResult:
    """Relation algebra on invariant relations stays invariant under both tests."""
    tally = _Tally("closure")
    for i in range(count):
        tree = PerfectTree.with_levels(rng.randint(1, 4))
        n = tree.size
        arity = rng.randint(1, 2)
        r1 = gen.random_invariant(rng, tree, arity)
        r2 = gen.random_invariant(rng, tree, arity)
        unary = gen.random_invariant(rng, tree, 1)
        outputs = [r1, complement(r1, n), intersect(r1, r2), union(r1, r2),
                   permute(r1, tuple(reversed(range(arity)))), product(r1, unary),
                   project_exists(r1, 1, n), project_forall(r1, 1, n)]
        ok = all(_both_invariant(out, tree) == (True, True) for out in outputs)
        # the two tests must also agree on arbitrary relations
        noise = gen.random_relation(rng, arity, n)
        a, b = _both_invariant(noise, tree)
        tally(ok and a == b, i)
    return tally.result


def suite_encoding(rng: random.Random, count: int = 50) -> SuiteResult:
    tally = _Tally("encoding")
    for i in range(count):
        a = gen.random_structure(rng, rng.randint(1, 4), {"R": 2, "S": 1})
        t = encode(a)
        m = rng.randint(0, 3)
        ok = decode(t) == a
        if t.tree.levels <= 3:
            ok = ok and sigma_structure(t, m, "enumerate") == sigma_structure(t, m, "decide")
        tally(ok, i)
    return tally.result


def suite_compilation(rng: random.Random, count: int = 50) -> SuiteResult:
    tally = _Tally("compilation")
    for i in range(count):
        program = gen.random_tree_program(rng)
        a = gen.random_tree_base(rng)
        tally(verify_compilation(a, program).ok, i)
    return tally.result


def suite_kprime(rng: random.Random, members: int = 10, samples: int = 100) -> SuiteResult:
    tally = _Tally("kprime")
    names = ("even", "3col", "always")
    for i in range(members):
        name = names[i % len(names)]
        g = gen.random_kprime_member(rng, name)
        if not is_member(g, ORACLES[name]):
            tally(False, (i, "generated graph is not a member"))
            continue
        report = closure_test(g, ORACLES[name], samples, rng)
        for j in range(report.samples):
            tally(j >= len(report.failures), (i, report.failures[:1]))
    return tally.result


# ---------------------------------------------------------------------------


def run_all(seed: int = DEFAULT_SEED) -> tuple[str, bool]:
    """Run every suite from ``seed``; returns the report text and the verdict."""
    suites = [
        lambda r: suite_agap(r),
        lambda r: suite_horn(r),
        lambda r: suite_datalog_to_horn(r),
        lambda r: suite_lfp(r),
        lambda r: suite_simlfp(r),
        lambda r: suite_normalize(r),
        lambda r: suite_roundtrip(r),
        lambda r: suite_check(),
        lambda r: suite_deciders(),
        lambda r: suite_closure(r),
        lambda r: suite_encoding(r),
        lambda r: suite_compilation(r),
        lambda r: suite_kprime(r),
    ]
    lines = [f"selftest seed {seed}"]
    ok = True
    for k, suite in enumerate(suites):
        res = suite(random.Random(seed + k))
        ok = ok and res.ok
        lines.append(res.line())
        for f in res.failures:
            lines.append(f"  failure: {f!r}")
    lines.append("all suites passed" if ok else "SOME SUITES FAILED")
    return "\n".join(lines) + "\n", ok
