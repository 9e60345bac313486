"""Enumerative counting cases and the exhaustive oracle itself."""

import random

import pytest

from patcheq.enumcount import (
    BruteForceResult, DomainTooLarge, EnumCase, brute_force_eq_count,
    enumerate_models,
)
from patcheq.oracle import Budget, SolverConfig
from patcheq.randgen import random_pair
from patcheq.summarizer import eval_concrete, summarize

from conftest import corpus_fn, fn


def test_doubles_metadata_case2_single_divergence(cfg):
    s1 = summarize(corpus_fn("cve_2013_0859_doubles_metadata", "original.fn"))
    s2 = summarize(corpus_fn("cve_2013_0859_doubles_metadata", "patched.fn"))
    result = enumerate_models(s1, s2, cfg)
    assert result.case is EnumCase.CASE2
    assert result.neq_inputs == [(0,)]
    assert result.exact_eq_count == 2**32 - 1


def test_tcp_window_case2_56_inputs(cfg):
    s1 = summarize(corpus_fn("cve_2010_4165_tcp_window", "original.fn"))
    s2 = summarize(corpus_fn("cve_2010_4165_tcp_window", "patched.fn"))
    result = enumerate_models(s1, s2, cfg)
    assert result.case is EnumCase.CASE2
    assert result.neq_inputs == [(v,) for v in range(8, 64)]
    assert result.exact_eq_count == 2**32 - 56
    assert result.eq_count_lower_bound == result.exact_eq_count


def test_totally_diverging_pair_exhausts_eq_side_instantly(cfg):
    s1 = summarize(fn("fn f(x: u8) -> u8 { return 0; }"))
    s2 = summarize(fn("fn f(x: u8) -> u8 { return 1; }"))
    result = enumerate_models(s1, s2, cfg)
    assert result.case is EnumCase.CASE1
    assert result.eq_inputs == []
    assert result.exact_eq_count == 0


def test_enumeration_counts_match_oracle_width8(cfg):
    rng = random.Random(555)
    done = 0
    while done < 6:
        f1, f2 = random_pair(rng, n_params=1)
        truth = brute_force_eq_count(f1, f2)
        if min(truth.eq_count, truth.neq_count) > 150:
            continue  # keep enumeration short; correctness is unaffected
        done += 1
        s1, s2 = summarize(f1), summarize(f2)
        result = enumerate_models(s1, s2, cfg)
        assert result.case in (EnumCase.CASE1, EnumCase.CASE2)
        assert result.exact_eq_count == truth.eq_count
        # no duplicates, disjoint sides, every member revalidates concretely
        assert len(set(result.eq_inputs)) == len(result.eq_inputs)
        assert len(set(result.neq_inputs)) == len(result.neq_inputs)
        assert not (set(result.eq_inputs) & set(result.neq_inputs))
        for (v,) in result.eq_inputs:
            assert eval_concrete(f1, [v]) == eval_concrete(f2, [v])
        for (v,) in result.neq_inputs:
            assert eval_concrete(f1, [v]) != eval_concrete(f2, [v])
        # worst-case call ceiling: one check per drawn model per side, plus
        # the two exhausting/final checks
        assert result.solver_calls <= 2 * (min(truth.eq_count, truth.neq_count) + 2) + 2


def test_budget_expiry_downgrades_to_case3(cfg):
    s1 = summarize(fn("fn f(x: i32) -> i32 { return x; }"))
    s2 = summarize(fn("fn f(x: i32) -> i32 { if (x == 7) { return 0; } return x; }"))
    slow = SolverConfig(solver_cmd=cfg.solver_cmd, query_timeout_ms=1000, budget_ms=1000)
    result = enumerate_models(s1, s2, slow, budget=Budget(1))
    assert result.case is EnumCase.CASE3
    assert result.exact_eq_count is None
    assert result.eq_count_lower_bound == len(result.eq_inputs)


# --- the oracle itself ---


def test_brute_force_identical_u8():
    f = fn("fn f(x: u8) -> u8 { return x; }")
    result = brute_force_eq_count(f, f)
    assert result == BruteForceResult(256, 256, ())


def test_brute_force_tcp_window_scaled_to_i8():
    # same guard shape at width 8: divergence window is {8..63}, hand checked
    f1 = fn("fn f(val: i8) -> i8 { if (val < 8 || val > 100) { return -22; } return val; }")
    f2 = fn("fn f(val: i8) -> i8 { if (val < 64 || val > 100) { return -22; } return val; }")
    result = brute_force_eq_count(f1, f2)
    assert result.neq_inputs == tuple((v,) for v in range(8, 64))
    assert result.eq_count == 256 - 56


def test_brute_force_successor_never_equals_identity():
    f1 = fn("fn f(x: i8) -> i8 { return x; }")
    f2 = fn("fn f(x: i8) -> i8 { return x + 1; }")
    assert brute_force_eq_count(f1, f2).eq_count == 0


def test_brute_force_domain_cap():
    f = fn("fn f(x: u16, y: u16) -> u16 { return x ^ y; }")
    with pytest.raises(DomainTooLarge):
        brute_force_eq_count(f, f)
    g = fn("fn f(x: u16) -> u16 { return x; }")
    assert brute_force_eq_count(g, g).eq_count == 65536
