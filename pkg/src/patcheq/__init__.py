"""Quantitative patch impact analysis for numeric programs.

Pipeline: parse and type-check the two program versions, build symbolic
summaries by path enumeration, classify the pair (equivalent / totally
non-equivalent / partially equivalent), then quantify partial equivalence
with solver-guided range search or enumerative counting.
"""

from .minilang import IntSort, TypedFunction, parse, parse_unit, typecheck
from .formula import BvVar, RangePair, mk_range_constraint, iff_under_range, serialize
from .summarizer import Summary, summarize, eval_concrete
from .oracle import Budget, SolverConfig, SatResult, SolverSession, is_sat, get_model_projected
from .classifier import Verdict, VerdictResult, eq_check
from .rangesearch import (
    RangeSearch, QuantResult, divide_range, prioritized_divide_range,
    eq_lower_bound_relational, eq_lower_bound_iterative,
    render_condition_relational, render_condition_iterative,
)
from .enumcount import EnumCase, EnumResult, enumerate_models, brute_force_eq_count
from .report import ImpactReport, analyze_pair

__all__ = [
    "IntSort", "TypedFunction", "parse", "parse_unit", "typecheck",
    "BvVar", "RangePair", "mk_range_constraint", "iff_under_range", "serialize",
    "Summary", "summarize", "eval_concrete",
    "Budget", "SolverConfig", "SatResult", "SolverSession", "is_sat", "get_model_projected",
    "Verdict", "VerdictResult", "eq_check",
    "RangeSearch", "QuantResult", "divide_range", "prioritized_divide_range",
    "eq_lower_bound_relational", "eq_lower_bound_iterative",
    "render_condition_relational", "render_condition_iterative",
    "EnumCase", "EnumResult", "enumerate_models", "brute_force_eq_count",
    "ImpactReport", "analyze_pair",
]
