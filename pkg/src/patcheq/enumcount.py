"""Enumerative model counting and the exhaustive ground-truth oracle.

Two blocked enumerations run round-robin on separate solver sessions: models
of (S1 and S2) projected on inputs (the equivalent side) and models of
not(S1 iff S2) (the divergent side).  Whichever side exhausts first gives an
exact count; budget expiry downgrades to a lower bound.
"""

from __future__ import annotations

import enum
import itertools
import time
from dataclasses import dataclass

from .formula import FIff, FNot
from .oracle import Budget, SolverConfig, SolverSession
from .classifier import require_same_interface
from .minilang import TypedFunction
from .summarizer import Summary, eval_concrete

BRUTE_FORCE_DOMAIN_CAP = 1 << 20


class EnumCase(enum.Enum):
    CASE1 = "eq_side_exhausted"
    CASE2 = "neq_side_exhausted"
    CASE3 = "budget_expired"


@dataclass
class EnumResult:
    case: EnumCase
    eq_inputs: list[tuple[int, ...]]
    neq_inputs: list[tuple[int, ...]]
    exact_eq_count: int | None
    eq_count_lower_bound: int
    domain_size: int
    solver_calls: int
    elapsed: float


class DuplicateModel(Exception):
    """A blocked enumeration returned the same input assignment twice."""


class _Enumeration:
    def __init__(self, cfg: SolverConfig, summary: Summary, formulas):
        self.session = SolverSession(cfg, summary.decls)
        for f in formulas:
            self.session.assert_formula(f)
        self.inputs = list(summary.inputs)
        self.models: list[tuple[int, ...]] = []
        self.seen: set[tuple[int, ...]] = set()
        self.exhausted = False

    def step(self) -> str:
        """Draw one more model; returns 'model', 'done', or 'unknown'."""
        verdict = self.session.check_sat()
        if verdict == "unsat":
            self.exhausted = True
            return "done"
        if verdict != "sat":
            return "unknown"
        model = self.session.get_values(self.inputs)
        if model is None:
            return "unknown"
        key = tuple(model[v.name] for v in self.inputs)
        if key in self.seen:
            raise DuplicateModel(f"solver repeated blocked assignment {key}")
        self.seen.add(key)
        self.models.append(key)
        self.session.block_model(self.inputs, model)
        return "model"

    def close(self):
        self.session.close()


def enumerate_models(s1: Summary, s2: Summary, cfg: SolverConfig,
                     budget: Budget | None = None) -> EnumResult:
    """Interleaved blocked enumeration of the eq and neq input sets."""
    require_same_interface(s1, s2)
    start = time.monotonic()
    budget = budget or Budget(cfg.budget_ms)
    domain = s1.domain_size
    eq_side = _Enumeration(cfg, s1, [s1.formula, s2.formula])
    neq_side = _Enumeration(cfg, s1, [FNot(FIff(s1.formula, s2.formula))])
    case = None
    try:
        while True:
            if budget.expired:
                case = EnumCase.CASE3
                break
            status = eq_side.step()
            if status == "done":
                case = EnumCase.CASE1
                break
            if status == "unknown":
                case = EnumCase.CASE3
                break
            if budget.expired:
                case = EnumCase.CASE3
                break
            status = neq_side.step()
            if status == "done":
                case = EnumCase.CASE2
                break
            if status == "unknown":
                case = EnumCase.CASE3
                break
    finally:
        calls = eq_side.session.query_count + neq_side.session.query_count
        eq_side.close()
        neq_side.close()
    eq_models = sorted(eq_side.models)
    neq_models = sorted(neq_side.models)
    if case is EnumCase.CASE1:
        exact = len(eq_models)
    elif case is EnumCase.CASE2:
        exact = domain - len(neq_models)
    else:
        exact = None
    return EnumResult(
        case=case,
        eq_inputs=eq_models,
        neq_inputs=neq_models,
        exact_eq_count=exact,
        eq_count_lower_bound=exact if exact is not None else len(eq_models),
        domain_size=domain,
        solver_calls=calls,
        elapsed=time.monotonic() - start,
    )


# ---------------------------------------------------------------------------
# Exhaustive oracle


@dataclass(frozen=True)
class BruteForceResult:
    eq_count: int
    domain_size: int
    neq_inputs: tuple[tuple[int, ...], ...]

    @property
    def neq_count(self) -> int:
        return self.domain_size - self.eq_count


class DomainTooLarge(Exception):
    pass


def brute_force_eq_count(f1: TypedFunction, f2: TypedFunction) -> BruteForceResult:
    """Exact equivalence count by evaluating both programs on every input.

    Enforces a 2**20 total-domain cap, i.e. small widths only; this is the
    independent ground truth the solver-backed paths are tested against.
    """
    if [s for _, s in f1.params] != [s for _, s in f2.params]:
        raise ValueError("parameter sorts differ")
    domain = 1
    for _, sort in f1.params:
        domain *= sort.domain_size
    if domain > BRUTE_FORCE_DOMAIN_CAP:
        raise DomainTooLarge(f"domain size {domain} exceeds {BRUTE_FORCE_DOMAIN_CAP}")
    ranges = [range(sort.min_value, sort.max_value + 1) for _, sort in f1.params]
    eq = 0
    neq: list[tuple[int, ...]] = []
    for point in itertools.product(*ranges):
        args = list(point)
        if eval_concrete(f1, args) == eval_concrete(f2, args):
            eq += 1
        else:
            neq.append(point)
    return BruteForceResult(eq_count=eq, domain_size=domain, neq_inputs=tuple(neq))
