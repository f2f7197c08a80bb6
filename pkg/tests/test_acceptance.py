"""The ten acceptance criteria, each at its stated size and time limit.

Every test records one ``criterion N: pass|FAIL ...`` line; the lines are
printed in the pytest terminal summary and when this file is run directly.
"""

import os
import random
import subprocess
import sys
import time

import pytest

from hornfix import selftest

RESULTS: dict[int, str] = {}


def record(number, title, result, seconds, limit=None):
    ok = result.ok and (limit is None or seconds < limit)
    timing = f"{seconds:.1f}s" + (f" (limit {limit}s)" if limit else "")
    RESULTS[number] = (f"criterion {number:>2}: {'pass' if ok else 'FAIL'}  {title}: "
                       f"{result.passed}/{result.total} agree, {timing}")
    return ok


def timed(fn, *args, **kwargs):
    start = time.perf_counter()
    result = fn(*args, **kwargs)
    return result, time.perf_counter() - start


def test_c01_agap():
    res, sec = timed(selftest.suite_agap, random.Random(101), count=200)
    assert record(1, "AGAP vs alternating-reachability oracle, 200 graphs", res, sec, 5), res.failures


def test_c02_horn_both_directions():
    res, sec = timed(selftest.suite_horn, random.Random(102), count=200)
    assert record(2, "Horn brute force vs fixed point and back, 200 pairs", res, sec, 60), res.failures


def test_c03_lfp_forward():
    res, sec = timed(selftest.suite_lfp, random.Random(103), formulas=20, structures=100)
    assert record(3, "LFP vs translated program, 20 formulas x 100 structures", res, sec, 60), res.failures


def test_c04_simlfp_backward():
    res, sec = timed(selftest.suite_simlfp, random.Random(104), count=100)
    assert record(4, "program vs simultaneous fixed point, 100 pairs", res, sec), res.failures


def test_c05_check():
    res, sec = timed(selftest.suite_check, max_entry=4, max_arity=3)
    assert res.total == 1 + 5 + 5 ** 3 + 5 ** 6
    assert record(5, "CHECK vs brute-force characteristic tuples", res, sec, 10), res.failures


def test_c06_deciders():
    res, sec = timed(selftest.suite_deciders, max_entry=4)
    assert res.total == 2 * 5 ** 3
    assert record(6, "numeric deciders vs enumeration, all triples <= 4", res, sec), res.failures


def test_c07_invariance_closure():
    res, sec = timed(selftest.suite_closure, random.Random(107), count=100)
    assert record(7, "relation algebra keeps invariance, two tests agree", res, sec), res.failures


def test_c08_compilation():
    res, sec = timed(selftest.suite_compilation, random.Random(108), count=60)
    assert record(8, "tree program vs compiled level program, 60 pairs", res, sec, 120), res.failures


def test_c09_kprime_closure():
    res, sec = timed(selftest.suite_kprime, random.Random(109), members=10, samples=100)
    assert res.total == 1000
    assert record(9, "K' closure, 10 members x 100 substructures", res, sec), res.failures


def _selftest_output(hash_seed):
    env = dict(os.environ, PYTHONHASHSEED=str(hash_seed))
    proc = subprocess.run([sys.executable, "-m", "hornfix.cli", "selftest"],
                          capture_output=True, env=env)
    return proc.returncode, proc.stdout


def test_c10_determinism():
    start = time.perf_counter()
    (code1, out1), (code2, out2) = _selftest_output(1), _selftest_output(2)
    sec = time.perf_counter() - start
    same = out1 == out2 and code1 == code2 == 0 and out1.endswith(b"all suites passed\n")
    res = selftest.SuiteResult("determinism", int(same), 1)
    assert record(10, "two selftest runs are byte-identical", res, sec), (out1, out2)


if __name__ == "__main__":
    sys.exit(pytest.main([__file__, "-q", "-p", "no:cacheprovider"]))
