import sys
from pathlib import Path

import pytest

REPO = Path(__file__).resolve().parent.parent
sys.path.insert(0, str(REPO / "src"))

from patcheq.minilang import parse, typecheck  # noqa: E402
from patcheq.oracle import SolverConfig, bundled_solver_command  # noqa: E402
from patcheq.summarizer import summarize  # noqa: E402

CORPUS = REPO / "corpus"


def fn(text: str):
    return typecheck(parse(text))


def fn_file(path) -> "object":
    return fn(Path(path).read_text())


def summary_pair(orig_text: str, patched_text: str):
    return summarize(fn(orig_text)), summarize(fn(patched_text))


@pytest.fixture(scope="session")
def cfg() -> SolverConfig:
    # Exercise the bundled solver explicitly so results do not depend on
    # whatever happens to be on PATH; swap via PATCHEQ_SOLVER_CMD if desired.
    return SolverConfig(solver_cmd=bundled_solver_command(),
                        query_timeout_ms=20_000, budget_ms=300_000)


@pytest.fixture(scope="session")
def corpus_dir() -> Path:
    return CORPUS


def corpus_fn(case: str, which: str):
    return fn_file(CORPUS / case / which)
