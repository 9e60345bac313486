#!/usr/bin/env python3
"""Compare the quantification methods against ground truth on random pairs.

Generates width-8 program pairs, computes the exact equivalent-input count by
exhaustive evaluation, then reports how close each method's lower bound gets
and how many solver calls it spent.  Useful for eyeballing the accuracy/cost
trade-off between the search strategies and enumeration.

Usage: python scripts/random_pairs_experiment.py [N_PAIRS] [SEED]
"""

import random
import sys
from pathlib import Path

REPO = Path(__file__).resolve().parent.parent
sys.path.insert(0, str(REPO / "src"))

from patcheq.classifier import Verdict, eq_check  # noqa: E402
from patcheq.enumcount import EnumCase, brute_force_eq_count, enumerate_models  # noqa: E402
from patcheq.oracle import SolverConfig, bundled_solver_command  # noqa: E402
from patcheq.randgen import random_pair  # noqa: E402
from patcheq.rangesearch import (  # noqa: E402
    RangeSearch, eq_lower_bound_iterative, eq_lower_bound_relational, merge_combined,
)
from patcheq.summarizer import summarize  # noqa: E402


def main() -> int:
    n_pairs = int(sys.argv[1]) if len(sys.argv) > 1 else 30
    seed = int(sys.argv[2]) if len(sys.argv) > 2 else 1
    rng = random.Random(seed)
    cfg = SolverConfig(solver_cmd=bundled_solver_command(),
                       query_timeout_ms=10_000, budget_ms=120_000)

    methods = ("relational", "iterative", "priority", "combined", "enumerate")
    exact_hits = dict.fromkeys(methods, 0)
    gap_sums = dict.fromkeys(methods, 0.0)
    call_sums = dict.fromkeys(methods, 0)
    partial = 0

    print(f"{'pair':>4}  {'exact':>6}  " + "  ".join(f"{m:>10}" for m in methods))
    for index in range(n_pairs):
        f1, f2 = random_pair(rng)
        truth = brute_force_eq_count(f1, f2)
        s1, s2 = summarize(f1), summarize(f2)
        if eq_check(s1, s2, cfg).kind is not Verdict.P_EQ:
            continue
        partial += 1
        n_vars = len(s1.inputs)
        domain_sizes = [v.sort.domain_size for v in s1.inputs]
        row = {}
        with RangeSearch(s1, s2, cfg) as rs:
            mark = rs.query_count
            region_set = rs.relational(limit=4)
            row["relational"] = (
                eq_lower_bound_relational(region_set.vectors()), rs.query_count - mark)
            mark = rs.query_count
            list_iter = rs.iterative(limit=6 if n_vars == 1 else 4)
            row["iterative"] = (
                eq_lower_bound_iterative(
                    [list_iter.intervals(n) for n in range(n_vars)], domain_sizes),
                rs.query_count - mark)
            mark = rs.query_count
            list_prio = rs.iterative_priority()
            row["priority"] = (
                eq_lower_bound_iterative(
                    [list_prio.intervals(n) for n in range(n_vars)], domain_sizes),
                rs.query_count - mark)
        merged, _ = merge_combined(list_iter, list_prio)
        row["combined"] = (
            eq_lower_bound_iterative(
                [merged.intervals(n) for n in range(n_vars)], domain_sizes),
            row["iterative"][1] + row["priority"][1])
        enum = enumerate_models(s1, s2, cfg)
        row["enumerate"] = (
            enum.exact_eq_count if enum.case is not EnumCase.CASE3
            else enum.eq_count_lower_bound,
            enum.solver_calls)

        cells = []
        for m in methods:
            bound, calls = row[m]
            assert bound <= truth.eq_count, (m, bound, truth.eq_count)
            if bound == truth.eq_count:
                exact_hits[m] += 1
            gap_sums[m] += (truth.eq_count - bound) / truth.domain_size
            call_sums[m] += calls
            cells.append(f"{bound:>10}")
        print(f"{index:>4}  {truth.eq_count:>6}  " + "  ".join(cells))

    if partial:
        print(f"\n{partial} partially equivalent pairs")
        print(f"{'method':>10}  {'exact':>6}  {'mean gap':>9}  {'mean calls':>10}")
        for m in methods:
            print(f"{m:>10}  {exact_hits[m]:>6}  {gap_sums[m] / partial:>9.4f}"
                  f"  {call_sums[m] / partial:>10.1f}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
