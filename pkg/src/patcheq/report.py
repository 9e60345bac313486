"""Analysis driver and report structures for program pairs and corpora.

A pair runs through: parse, type check, signature check, summarize, classify;
partial equivalence then flows into the selected quantification method.  All
percentages are exact rationals; JSON carries numerator/denominator strings
next to a fixed-point rendering so nothing is lost to floating point.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path

from .classifier import Verdict, eq_check
from .enumcount import EnumCase, enumerate_models
from .formula import FALSE, TRUE, Formula, FNot, pretty, serialize_formula
from .minilang import parse, typecheck
from .oracle import Budget, SolverConfig
from .rangesearch import RangeSearch, default_limit
from .summarizer import Summary, summarize, require_same_signature

MODEL_LIST_CAP = 64

RANGE_METHODS = ("relational", "iterative", "priority", "combined")
ALL_METHODS = RANGE_METHODS + ("enumerate",)


def fraction_decimal(value: Fraction, places: int = 2) -> str:
    """Exact fixed-point rendering with round-half-even."""
    scaled_num = value.numerator * 10 ** places
    q, r = divmod(scaled_num, value.denominator)
    if 2 * r > value.denominator or (2 * r == value.denominator and q % 2):
        q += 1
    text = str(q).rjust(places + 1, "0")
    return f"{text[:-places]}.{text[-places:]}" if places else text


def fraction_json(value: Fraction, places: int = 2) -> dict:
    # decimal for eyeballs, numerator/denominator so 87.50 and
    # (2^32 - 56)/2^32 are both stored losslessly
    return {
        "decimal": fraction_decimal(value, places),
        "numerator": str(value.numerator),
        "denominator": str(value.denominator),
    }


@dataclass
class ImpactReport:
    name: str
    original: str
    patched: str
    verdict: Verdict
    method: str
    eq_lower_bound: int
    domain_size: int
    eq_percent: Fraction
    impact_percent: Fraction
    exact: bool
    condition: Formula
    witness: dict[str, int] | None
    solver_calls: int
    elapsed_ms: int
    incomplete: bool
    enum_case: EnumCase | None = None
    eq_models: list[tuple[int, ...]] | None = None
    neq_models: list[tuple[int, ...]] | None = None
    per_var_source: list[str] | None = None
    input_names: list[str] = field(default_factory=list)
    error: str | None = None

    @property
    def impact_condition(self) -> Formula:
        return FNot(self.condition)

    def to_json(self, stable: bool = False, places: int = 2) -> dict:
        out = {
            "name": self.name,
            "original": self.original,
            "patched": self.patched,
            "verdict": self.verdict.value,
            "algorithm": self.method,
            "eq_lower_bound": str(self.eq_lower_bound),
            "exact": self.exact,
            "domain_size": str(self.domain_size),
            "eq_percent_lower_bound": fraction_json(self.eq_percent, places),
            "impact_percent_upper_bound": fraction_json(self.impact_percent, places),
            "condition": {
                "pretty": pretty(self.condition),
                "smtlib": serialize_formula(self.condition),
            },
            "impact_condition": {
                "pretty": pretty(self.impact_condition),
                "smtlib": serialize_formula(self.impact_condition),
            },
            "witness": self.witness,
            "solver_calls": self.solver_calls,
            "incomplete": self.incomplete,
        }
        if not stable:
            out["elapsed_ms"] = self.elapsed_ms
        if self.enum_case is not None:
            out["case"] = self.enum_case.name.lower()
            out["eq_models"] = [list(m) for m in (self.eq_models or [])[:MODEL_LIST_CAP]]
            out["neq_models"] = [list(m) for m in (self.neq_models or [])[:MODEL_LIST_CAP]]
            out["eq_model_count"] = len(self.eq_models or [])
            out["neq_model_count"] = len(self.neq_models or [])
        if self.per_var_source is not None:
            out["per_var_source"] = dict(zip(self.input_names, self.per_var_source))
        if self.error is not None:
            out["error"] = self.error
        return out


class AnalysisError(Exception):
    def __init__(self, stage: str, message: str):
        super().__init__(f"{stage}: {message}")
        self.stage = stage


def load_function(path: str | Path):
    text = Path(path).read_text()
    try:
        return typecheck(parse(text))
    except Exception as err:
        raise AnalysisError(f"parse/typecheck {path}", str(err)) from err


def analyze_pair(
    name: str,
    original_path: str | Path,
    patched_path: str | Path,
    method: str,
    cfg: SolverConfig,
    depth_limit: int | None = None,
    unroll_limit: int | None = None,
) -> ImpactReport:
    """Classify first; quantify only on partial equivalence."""
    if method not in ALL_METHODS:
        raise AnalysisError("config", f"unknown algorithm {method!r}")
    start = time.monotonic()
    f1 = load_function(original_path)
    f2 = load_function(patched_path)
    try:
        require_same_signature(f1, f2)
    except Exception as err:
        raise AnalysisError("signature", str(err)) from err
    try:
        kwargs = {} if unroll_limit is None else {"unroll_limit": unroll_limit}
        s1 = summarize(f1, **kwargs)
        s2 = summarize(f2, **kwargs)
    except Exception as err:
        raise AnalysisError("summarize", str(err)) from err

    budget = Budget(cfg.budget_ms)
    verdict = eq_check(s1, s2, cfg)
    calls = verdict.solver_calls
    domain = s1.domain_size

    def finish(**kw) -> ImpactReport:
        return ImpactReport(
            name=name,
            original=str(original_path),
            patched=str(patched_path),
            verdict=verdict.kind,
            method=method,
            domain_size=domain,
            witness=verdict.witness,
            elapsed_ms=int((time.monotonic() - start) * 1000),
            input_names=[v.name for v in s1.inputs],
            **kw,
        )

    if verdict.kind is Verdict.T_EQ:
        return finish(
            eq_lower_bound=domain, eq_percent=Fraction(100), impact_percent=Fraction(0),
            exact=True, condition=TRUE, solver_calls=calls, incomplete=False,
        )
    if verdict.kind is Verdict.T_NEQ:
        return finish(
            eq_lower_bound=0, eq_percent=Fraction(0), impact_percent=Fraction(100),
            exact=True, condition=FALSE, solver_calls=calls, incomplete=False,
        )
    if verdict.kind is Verdict.UNKNOWN:
        return finish(
            eq_lower_bound=0, eq_percent=Fraction(0), impact_percent=Fraction(100),
            exact=False, condition=FALSE, solver_calls=calls, incomplete=True,
            error="classifier query unknown (timeout or solver failure)",
        )

    if method == "enumerate":
        enum = enumerate_models(s1, s2, cfg, budget)
        calls += enum.solver_calls
        if enum.case is EnumCase.CASE1:
            bound = enum.exact_eq_count
            condition = _models_condition(s1, enum.eq_inputs)
            exact = True
        elif enum.case is EnumCase.CASE2:
            bound = enum.exact_eq_count
            condition = FNot(_models_condition(s1, enum.neq_inputs))
            exact = True
        else:
            bound = enum.eq_count_lower_bound
            condition = _models_condition(s1, enum.eq_inputs)
            exact = False
        return finish(
            eq_lower_bound=bound,
            eq_percent=Fraction(100 * bound, domain),
            impact_percent=Fraction(100) - Fraction(100 * bound, domain),
            exact=exact, condition=condition, solver_calls=calls,
            incomplete=enum.case is EnumCase.CASE3,
            enum_case=enum.case, eq_models=enum.eq_inputs, neq_models=enum.neq_inputs,
        )

    limit = default_limit(len(s1.inputs)) if depth_limit is None else depth_limit
    with RangeSearch(s1, s2, cfg, budget) as search:
        quant = search.run(method, limit=limit)
    calls += quant.solver_calls
    return finish(
        eq_lower_bound=quant.eq_lower_bound,
        eq_percent=quant.eq_percent_lower_bound,
        impact_percent=Fraction(100) - quant.eq_percent_lower_bound,
        exact=False, condition=quant.condition, solver_calls=calls,
        incomplete=quant.incomplete, per_var_source=quant.per_var_source,
    )


def _models_condition(summary: Summary, models: list[tuple[int, ...]]) -> Formula:
    from .formula import feq, for_, fand, tconst, tvar
    from . import bvarith

    disjuncts = []
    for point in models:
        parts = []
        for var, value in zip(summary.inputs, point):
            raw = bvarith.to_unsigned(value, var.sort.width)
            parts.append(feq(tvar(var), tconst(raw, var.sort.width)))
        disjuncts.append(fand(parts))
    return for_(disjuncts) if disjuncts else FALSE


# ---------------------------------------------------------------------------
# Corpus runner


@dataclass
class CorpusCase:
    name: str
    path: Path
    original: Path
    patched: Path
    method: str = "combined"
    depth_limit: int | None = None
    expectations: dict[str, str] = field(default_factory=dict)


class ManifestError(Exception):
    pass


EXPECT_KEYS = {
    "expect_verdict", "expect_eq_fraction", "expect_impact_fraction",
    "expect_case", "expect_neq_count", "expect_exact_eq_count",
}


def load_case(path: str | Path) -> CorpusCase:
    path = Path(path)
    fields: dict[str, str] = {}
    for line_no, raw in enumerate(path.read_text().splitlines(), 1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise ManifestError(f"{path}:{line_no}: expected key = value")
        key, _, value = line.partition("=")
        fields[key.strip()] = value.strip()
    for required in ("original", "patched"):
        if required not in fields:
            raise ManifestError(f"{path}: missing {required}")
    case = CorpusCase(
        name=fields.get("name", path.stem),
        path=path,
        original=path.parent / fields["original"],
        patched=path.parent / fields["patched"],
        method=fields.get("method", "combined"),
        depth_limit=int(fields["depth_limit"]) if "depth_limit" in fields else None,
        expectations={k: v for k, v in fields.items() if k in EXPECT_KEYS},
    )
    for fn in (case.original, case.patched):
        if not fn.exists():
            raise ManifestError(f"{path}: missing source file {fn}")
    return case


def check_expectations(case: CorpusCase, report: ImpactReport,
                       method_overridden: bool) -> list[str]:
    """Compare a report against the manifest; returns failure descriptions."""
    failures = []
    exp = case.expectations
    if "expect_verdict" in exp and report.verdict.name != exp["expect_verdict"]:
        failures.append(
            f"verdict {report.verdict.name}, expected {exp['expect_verdict']}"
        )
    if method_overridden:
        return failures  # method-specific expectations no longer apply
    def frac(text: str) -> Fraction:
        return Fraction(text)

    if "expect_eq_fraction" in exp:
        want = frac(exp["expect_eq_fraction"]) * 100
        if report.eq_percent != want:
            failures.append(f"eq percent {report.eq_percent}, expected {want}")
    if "expect_impact_fraction" in exp:
        want = frac(exp["expect_impact_fraction"]) * 100
        if report.impact_percent != want:
            failures.append(f"impact percent {report.impact_percent}, expected {want}")
    if "expect_case" in exp:
        got = report.enum_case.name if report.enum_case else "none"
        if got != exp["expect_case"]:
            failures.append(f"enumeration case {got}, expected {exp['expect_case']}")
    if "expect_neq_count" in exp:
        got = len(report.neq_models or [])
        if got != int(exp["expect_neq_count"]):
            failures.append(f"neq model count {got}, expected {exp['expect_neq_count']}")
    if "expect_exact_eq_count" in exp:
        want = int(exp["expect_exact_eq_count"])
        if not report.exact or report.eq_lower_bound != want:
            failures.append(
                f"exact eq count {report.eq_lower_bound} (exact={report.exact}), expected {want}"
            )
    return failures
