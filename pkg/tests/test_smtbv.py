"""Differential and protocol tests for the bundled QF_BV solver."""

import itertools
import random
import subprocess
import sys
from pathlib import Path

from patcheq.smtbv.engine import SmtEngine
from patcheq.smtbv.protocol import SmtSession
from patcheq.smtbv.sat import Solver
from patcheq.smtbv.terms import eval_node

SRC = str(Path(__file__).resolve().parent.parent / "src")


def test_sat_core_basics():
    s = Solver()
    a, b, c = s.new_var(), s.new_var(), s.new_var()
    s.add_clause([a << 1, b << 1])
    s.add_clause([(a << 1) ^ 1, c << 1])
    assert s.solve() is True
    s.add_clause([(c << 1) ^ 1])
    s.add_clause([(b << 1) ^ 1])
    assert s.solve() is False


def test_sat_assumptions_do_not_poison_state():
    s = Solver()
    a, b = s.new_var(), s.new_var()
    s.add_clause([a << 1, b << 1])
    assert s.solve([(a << 1) ^ 1, (b << 1) ^ 1]) is False
    assert s.solve([(a << 1) ^ 1]) is True
    assert s.solve() is True


def _random_formula(t, varnodes, rng, depth):
    if depth == 0 or rng.random() < 0.4:
        a = _random_term(t, varnodes, rng, 2)
        b = _random_term(t, varnodes, rng, 2)
        return getattr(t, rng.choice(["eq", "ult", "slt", "ule", "sle"]))(a, b)
    roll = rng.random()
    a = _random_formula(t, varnodes, rng, depth - 1)
    b = _random_formula(t, varnodes, rng, depth - 1)
    if roll < 0.3:
        return t.band([a, b])
    if roll < 0.6:
        return t.bor([a, b])
    if roll < 0.8:
        return t.bnot(a)
    return t.beq(a, b)


def _random_term(t, varnodes, rng, depth):
    w = varnodes[0].width
    if depth == 0 or rng.random() < 0.3:
        if rng.random() < 0.5:
            return rng.choice(varnodes)
        return t.const(rng.randrange(1 << w), w)
    op = rng.choice(
        ["add", "sub", "mul", "udiv", "urem", "shl", "lshr", "and", "or", "xor",
         "sdiv", "srem", "ashr", "neg", "not", "ite"]
    )
    a = _random_term(t, varnodes, rng, depth - 1)
    b = _random_term(t, varnodes, rng, depth - 1)
    if op == "neg":
        return t.neg(a)
    if op == "not":
        return t.bvnot(a)
    if op == "sdiv":
        return t.sdiv(a, b)
    if op == "srem":
        return t.srem(a, b)
    if op == "ashr":
        return t.ashr(a, b)
    if op == "ite":
        return t.ite(_random_formula(t, varnodes, rng, 0), a, b)
    return t.bv2(op, a, b)


def test_differential_against_exhaustive_enumeration():
    rng = random.Random(20240817)
    width = 4
    for trial in range(250):
        eng = SmtEngine()
        t = eng.table
        eng.declare("a", width)
        eng.declare("b", width)
        varnodes = [t.var("a", width), t.var("b", width)]
        f = _random_formula(t, varnodes, rng, 3)
        eng.assert_node(f)
        got = eng.check_sat()
        expected = "unsat"
        for va, vb in itertools.product(range(1 << width), repeat=2):
            if eval_node(f, {"a": va, "b": vb}, {}):
                expected = "sat"
                break
        assert got == expected, f"trial {trial}"
        if got == "sat":
            assert eval_node(f, eng.last_model, {})


def test_differential_production_shaped_queries():
    # the shape range search emits: [not(iff(S1 & R, S2 & R)), R] where the
    # summaries are or-of-and path constraints and R is a range conjunction
    rng = random.Random(77)
    width = 4
    half = 1 << (width - 1)
    for trial in range(120):
        eng = SmtEngine()
        t = eng.table
        eng.declare("x", width)
        eng.declare("out", width)
        x, out = t.var("x", width), t.var("out", width)

        def summary():
            cut = rng.randrange(-half, half)
            cut_c = t.const(cut & ((1 << width) - 1), width)
            t1 = _random_term(t, [x], rng, 2)
            t2 = _random_term(t, [x], rng, 2)
            guard = t.slt(x, cut_c)
            return t.bor([
                t.band([guard, t.eq(out, t1)]),
                t.band([t.bnot(guard), t.eq(out, t2)]),
            ])

        s1, s2 = summary(), summary()
        lo = rng.randrange(-half, half)
        hi = rng.randrange(lo, half)
        lo_c = t.const(lo & ((1 << width) - 1), width)
        hi_c = t.const(hi & ((1 << width) - 1), width)
        r = t.band([t.sle(lo_c, x), t.sle(x, hi_c)])
        query = t.bnot(t.beq(t.band([s1, r]), t.band([s2, r])))
        eng.assert_node(query)
        eng.assert_node(r)
        got = eng.check_sat()
        expected = "unsat"
        for vx in range(1 << width):
            for vo in range(1 << width):
                if eval_node(query, {"x": vx, "out": vo}, {}) and eval_node(
                    r, {"x": vx, "out": vo}, {}
                ):
                    expected = "sat"
                    break
            if expected == "sat":
                break
        assert got == expected, f"trial {trial}"
        if got == "sat":
            assert eval_node(query, eng.last_model, {})
            assert eval_node(r, eng.last_model, {})


def test_push_pop_isolation():
    s = SmtSession()
    s.handle(["declare-const", "x", ["_", "BitVec", "8"]])
    s.handle(["assert", ["bvult", "x", ["_", "bv10", "8"]]])
    assert s.handle(["check-sat"]) == "sat"
    s.handle(["push", "1"])
    s.handle(["assert", ["bvult", ["_", "bv20", "8"], "x"]])
    assert s.handle(["check-sat"]) == "unsat"
    s.handle(["pop", "1"])
    assert s.handle(["check-sat"]) == "sat"


def test_protocol_subprocess_round_trip():
    script = """
(set-logic QF_BV)
(declare-const x (_ BitVec 8))
(declare-const y (_ BitVec 8))
(assert (= (bvadd x y) (_ bv255 8)))
(assert (bvult x (_ bv3 8)))
(check-sat)
(get-value (x y))
(push 1)
(assert (bvult y (_ bv10 8)))
(check-sat)
(pop 1)
(check-sat)
(exit)
"""
    proc = subprocess.run(
        [sys.executable, "-m", "patcheq.smtbv"],
        input=script, capture_output=True, text=True, timeout=60,
        env={"PYTHONPATH": SRC, "PATH": "/usr/bin:/bin"},
    )
    lines = [line for line in proc.stdout.splitlines() if line.strip()]
    assert lines[0] == "sat"
    assert lines[1].startswith("((x (_ bv")
    assert lines[2] == "unsat"
    assert lines[3] == "sat"


def test_protocol_reports_errors_and_continues():
    script = """
(declare-const x (_ BitVec 8))
(assert (bvfoo x x))
(assert (bvult x (_ bv0 8)))
(check-sat)
(exit)
"""
    proc = subprocess.run(
        [sys.executable, "-m", "patcheq.smtbv"],
        input=script, capture_output=True, text=True, timeout=60,
        env={"PYTHONPATH": SRC, "PATH": "/usr/bin:/bin"},
    )
    lines = [line for line in proc.stdout.splitlines() if line.strip()]
    assert lines[0].startswith("(error")  # unknown operator reported
    assert lines[1] == "unsat"  # the session keeps going; nothing is below 0
